#include "vrjplab/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "vrjplab/mixing.hpp"

namespace vrjp {

namespace {

double level_sum(const Graph& g,
                 const std::function<double(std::span<const double>)>& f,
                 std::span<const double> shift, double half_width, double h,
                 std::int64_t& evals) {
  const int n = g.vertex_count();
  const int root = g.root();
  std::vector<int> free_vertices;
  for (int v = 0; v < n; ++v)
    if (v != root) free_vertices.push_back(v);
  const int dims = static_cast<int>(free_vertices.size());

  const int m = static_cast<int>(std::llround(2.0 * half_width / h));
  std::vector<double> ubuf(n, 0.0);
  std::vector<double> qbuf(n, 0.0);
  std::vector<int> idx(dims, 0);

  double total = 0.0;
  for (;;) {
    double weight = 1.0;
    for (int d = 0; d < dims; ++d) {
      const double x = -half_width + h * idx[d];
      ubuf[free_vertices[d]] = x;
      if (idx[d] == 0 || idx[d] == m) weight *= 0.5;
    }
    if (!shift.empty()) {
      for (int v = 0; v < n; ++v) qbuf[v] = ubuf[v] + shift[v];
    } else {
      qbuf = ubuf;
    }
    const double ld = log_density(g, FieldSample(g, qbuf));
    ++evals;
    if (ld > -std::numeric_limits<double>::infinity()) {
      const double q = std::exp(ld);
      if (q > 0.0) total += weight * f(ubuf) * q;
    }

    int d = 0;
    while (d < dims && ++idx[d] > m) idx[d++] = 0;
    if (d == dims) break;
  }
  return total * std::pow(h, dims);
}

}  // namespace

QuadratureResult integrate_expectation(
    const Graph& g, const std::function<double(std::span<const double>)>& f,
    double tol, std::span<const double> density_shift, double half_width,
    std::int64_t max_points_per_level) {
  const int dims = g.vertex_count() - 1;
  if (dims > 3)
    throw std::invalid_argument("quadrature: dimension too large (" +
                                std::to_string(dims) + " free coordinates)");
  if (!density_shift.empty()) {
    if (density_shift.size() != static_cast<std::size_t>(g.vertex_count()))
      throw std::invalid_argument("quadrature: shift size mismatch");
    if (density_shift[g.root()] != 0.0)
      throw std::invalid_argument("quadrature: shift not pinned at the root");
  }

  QuadratureResult res;
  double h = 0.5;
  double prev = 0.0;
  bool have_prev = false;
  for (;;) {
    const double axis = 2.0 * half_width / h + 1.0;
    if (std::pow(axis, dims) > static_cast<double>(max_points_per_level)) break;
    const double value = level_sum(g, f, density_shift, half_width, h,
                                   res.evaluations);
    if (have_prev) {
      res.error_estimate = std::abs(value - prev);
      if (res.error_estimate < 0.5 * tol) {
        res.value = value;
        res.spacing = h;
        res.converged = true;
        return res;
      }
    }
    prev = value;
    have_prev = true;
    res.value = value;
    res.spacing = h;
    h *= 0.5;
  }
  return res;  // not converged within the point budget
}

double density_normalization(const Graph& g, double tol) {
  const auto r = integrate_expectation(
      g, [](std::span<const double>) { return 1.0; }, tol);
  if (!r.converged)
    throw std::runtime_error("quadrature did not converge for normalization");
  return r.value;
}

double exp_moment_by_quadrature(const Graph& g, int vertex, double s,
                                double tol) {
  g.check_vertex(vertex);
  const auto r = integrate_expectation(
      g, [vertex, s](std::span<const double> u) { return std::exp(s * u[vertex]); },
      tol);
  if (!r.converged)
    throw std::runtime_error("quadrature did not converge for exp moment");
  return r.value;
}

}  // namespace vrjp
