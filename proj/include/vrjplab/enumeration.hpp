#pragma once

#include <span>
#include <vector>

#include "vrjplab/field.hpp"
#include "vrjplab/graph.hpp"

namespace vrjp {

// Brute-force enumeration of directed spanning trees oriented toward the root.
// Independent reference route for the determinant-based tree polynomial; cost
// is binomial(edges, n-1), only meant for small graphs.

struct Arborescence {
  std::vector<Arc> arcs;  // one outgoing arc per non-root vertex
  double log_weight;      // sum of ln(W_ij) + grad u_ij over the arcs
};

std::vector<Arborescence> enumerate_arborescences(const Graph& g,
                                                  const FieldSample& u);

// log of the summed arborescence weights, via logsumexp.
double enumeration_log_tree_polynomial(const Graph& g, const FieldSample& u);

// Variance of T -> sum of grad v over the arcs of T, under the arborescence
// law with arc weights W_ij e^{grad(u + gamma v)_ij}.
double arborescence_gradient_variance(const Graph& g, const FieldSample& u,
                                      std::span<const double> v, double gamma);

}  // namespace vrjp
