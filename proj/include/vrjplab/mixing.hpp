#pragma once

#include <span>
#include <vector>

#include "vrjplab/field.hpp"
#include "vrjplab/graph.hpp"

namespace vrjp {

// ln D(W, u): log of the weighted count of directed spanning trees oriented
// toward the root, arc (i,j) carrying weight W_ij e^{u_j - u_i}. Computed as
// the log-determinant of the root minor of the weighted Laplacian; agreement
// with explicit arborescence enumeration is covered by tests.
double log_tree_polynomial(const Graph& g, const FieldSample& u);

// ln c_V = -(n-1)/2 * ln(2*pi)
double log_normalization_constant(const Graph& g);

// sum over directed edges of W_ij (e^{grad u_ij} - 1)
double interaction_sum(const Graph& g, const FieldSample& u);

// Exact log of the mixing density at u, normalization constant included:
//   ln c_V - 1/2 * interaction_sum + 1/2 * ln D.
// Gradients beyond the exp() range are reported (std::range_error), never
// silently saturated. Returns -infinity when the density underflows double
// precision (the exact value is then below exp's representable range).
double log_density(const Graph& g, const FieldSample& u);

// Log Radon-Nikodym derivative of the field law with respect to the law of the
// field shifted by gamma * v:
//   1/2 sum_{i->j} W_ij e^{grad u_ij} (e^{gamma grad v_ij} - 1)
//   + 1/2 (ln D(W,u) - ln D(W,u + gamma v)).
// Identical to log_density(u) - log_density(u + gamma v); v must vanish at the
// root.
double log_tilt_ratio(const Graph& g, const FieldSample& u,
                      std::span<const double> v, double gamma);

// W_ij (1 - 2 q^3 gamma^2 |grad v_ij|^2) per undirected edge, in edges()
// order. Positive (>= W/2) whenever q^2 gamma |grad v_ij| <= 1/2 on every
// edge.
std::vector<double> tilted_conductances(const Graph& g,
                                        std::span<const double> v, double gamma,
                                        double q);

// Same graph with conductances replaced by tilted_conductances; throws if any
// tilted conductance is non-positive.
Graph tilted_graph(const Graph& g, std::span<const double> v, double gamma,
                   double q);

}  // namespace vrjp
