#include "vrjplab/mixing.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "vrjplab/laplacian.hpp"
#include "vrjplab/util.hpp"

namespace vrjp {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
// |x| beyond which exp(x) leaves the double range
constexpr double kExpArgLimit = 700.0;
// exp() underflows to zero below this
constexpr double kLogUnderflow = -745.0;

void check_field(const Graph& g, const FieldSample& u) {
  if (u.size() != g.vertex_count() || u.root() != g.root())
    throw std::invalid_argument("field does not match graph");
}

void check_gradients(const Graph& g, const FieldSample& u) {
  for (const Arc& e : g.arcs()) {
    const double d = gradient(u.values(), e);
    if (std::abs(d) > kExpArgLimit)
      throw std::range_error("gradient overflows exp() on edge " +
                             g.label(e.from) + " -> " + g.label(e.to) +
                             ": " + format_double(d));
  }
}

// D <= (#trees) * (max arc weight)^(n-1) with #trees <= n^(n-2)
double log_tree_upper_bound(const Graph& g, const FieldSample& u) {
  const int n = g.vertex_count();
  double max_log_arc = -std::numeric_limits<double>::infinity();
  for (const Arc& e : g.arcs())
    max_log_arc =
        std::max(max_log_arc, std::log(e.weight) + gradient(u.values(), e));
  return (n - 2) * std::log(static_cast<double>(n)) + (n - 1) * max_log_arc;
}

}  // namespace

double log_tree_polynomial(const Graph& g, const FieldSample& u) {
  check_field(g, u);
  check_gradients(g, u);
  return spd_log_det(laplacian_minor(g, u.values()));
}

double log_normalization_constant(const Graph& g) {
  return -0.5 * (g.vertex_count() - 1) * std::log(kTwoPi);
}

double interaction_sum(const Graph& g, const FieldSample& u) {
  check_field(g, u);
  double acc = 0.0;
  for (const Arc& e : g.arcs())
    acc += e.weight * std::expm1(gradient(u.values(), e));
  return acc;
}

double log_density(const Graph& g, const FieldSample& u) {
  check_field(g, u);
  check_gradients(g, u);
  const double base =
      log_normalization_constant(g) - 0.5 * interaction_sum(g, u);
  // Short-circuit points whose density underflows to exactly zero in double
  // precision; the Laplacian factorization is not reliable that far out and
  // its value cannot matter.
  if (base + 0.5 * log_tree_upper_bound(g, u) < kLogUnderflow)
    return -std::numeric_limits<double>::infinity();
  return base + 0.5 * spd_log_det(laplacian_minor(g, u.values()));
}

double log_tilt_ratio(const Graph& g, const FieldSample& u,
                      std::span<const double> v, double gamma) {
  check_field(g, u);
  const FieldSample shifted = FieldSample::shifted(g, u, v, gamma);
  double cross = 0.0;
  for (const Arc& e : g.arcs()) {
    const double du = gradient(u.values(), e);
    const double dv = v[e.to] - v[e.from];
    cross += e.weight * std::exp(du) * std::expm1(gamma * dv);
  }
  return 0.5 * cross +
         0.5 * (log_tree_polynomial(g, u) - log_tree_polynomial(g, shifted));
}

std::vector<double> tilted_conductances(const Graph& g,
                                        std::span<const double> v, double gamma,
                                        double q) {
  if (v.size() != static_cast<std::size_t>(g.vertex_count()))
    throw std::invalid_argument("tilted_conductances: size mismatch");
  std::vector<double> out;
  out.reserve(g.edges().size());
  const double factor = 2.0 * q * q * q * gamma * gamma;
  for (const Edge& e : g.edges()) {
    const double dv = v[e.b] - v[e.a];
    out.push_back(e.weight * (1.0 - factor * dv * dv));
  }
  return out;
}

Graph tilted_graph(const Graph& g, std::span<const double> v, double gamma,
                   double q) {
  const auto w = tilted_conductances(g, v, gamma, q);
  std::vector<EdgeSpec> specs;
  specs.reserve(w.size());
  const auto edges = g.edges();
  for (std::size_t i = 0; i < w.size(); ++i)
    specs.push_back({g.vertex_id(edges[i].a), g.vertex_id(edges[i].b), w[i]});
  return Graph::from_edges(specs, g.vertex_id(g.root()));
}

}  // namespace vrjp
