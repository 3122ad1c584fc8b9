#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "vrjplab/field.hpp"
#include "vrjplab/graph.hpp"

namespace vrjp {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  double spacing = 0.0;
  std::int64_t evaluations = 0;
  bool converged = false;
};

// integral of f(u) * density(u + density_shift) over the free coordinates
// (every vertex except the root) by tensor-product trapezoid rule on
// [-half_width, half_width]^d, halving the spacing until two successive levels
// agree within tol/2. The density decays doubly exponentially in every
// direction, so truncation at half_width 40 is far below double precision.
// Throws std::invalid_argument when d > 3.
QuadratureResult integrate_expectation(
    const Graph& g, const std::function<double(std::span<const double>)>& f,
    double tol, std::span<const double> density_shift = {},
    double half_width = 40.0, std::int64_t max_points_per_level = 80'000'000);

// integral of the density itself; 1 within tol for any connected graph.
double density_normalization(const Graph& g, double tol);

// E[e^{s u_y}] by quadrature.
double exp_moment_by_quadrature(const Graph& g, int vertex, double s,
                                double tol);

}  // namespace vrjp
