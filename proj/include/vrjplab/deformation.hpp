#pragma once

#include <span>
#include <vector>

#include "vrjplab/field.hpp"
#include "vrjplab/graph.hpp"
#include "vrjplab/sampler.hpp"

namespace vrjp {

// Harmonic potential with unit conductances: v(source) = 0, v(target) = 1,
// zero divergence everywhere else (the contracted boundary vertex of a box is
// treated as an ordinary interior vertex). Direct SPD factorization of the
// reduced Laplacian with iterative refinement to residual 1e-12.
std::vector<double> solve_harmonic(const Graph& g, int source, int target);

// sum_{j ~ z} (f_j - f_z), unit conductances.
double divergence(const Graph& g, std::span<const double> f, int z);

// Largest |divergence| over vertices other than source and target.
double harmonic_residual(const Graph& g, std::span<const double> v, int source,
                         int target);

// 1 / E(v,v) for the harmonic v above; also checks the unit-current identity
// div(grad v)(z) = (1/R)(1_{z=source} - 1_{z=target}) to 1e-8.
double effective_resistance(const Graph& g, int source, int target);

// max over edges of R(source,target) * |grad v|; at most 1 for a current flow.
double current_flow_max(const Graph& g, int source, int target);

// Cut-set lower bound sum_{k=1}^{m-1} 1/(4(2k+1)) for targets at sup-norm
// distance m >= 2 on a lattice box; grows like (1/8) ln m.
double nash_williams_sum(int y_inf_norm);

// Parameters of the harmonic deformation toward `target` for moment exponent
// s: the Hoelder conjugate q, the tilt sizes gamma = gamma_tilde * R, and the
// decay exponents. eta fields are NaN when the Nash-Williams certificate is
// unavailable (non-box graphs or |y|_inf < 2).
struct DeformationPlan {
  int source = 0;
  int target = 0;
  std::vector<double> v;
  double dirichlet = 0.0;   // E(v,v)
  double resistance = 0.0;  // R = 1/E(v,v)
  double s = 0.0;
  double q = 0.0;  // s + 1/q = 1
  double gamma_tilde = 0.0;
  double gamma = 0.0;
  double gamma_prime = 0.0;  // -gamma (q-1)
  double w_bar = 0.0;
  double c0_instance = 0.0;   // nash_williams_sum(|y|_inf) / ln |y|_inf
  double c0_asymptotic = 0.125;
  double eta_instance = 0.0;
  double eta_asymptotic = 0.0;
  double max_edge_gradient = 0.0;
  double max_scaled_gradient = 0.0;  // max R |grad v|
  int y_inf_norm = 0;                // 0 for non-box graphs
};

// Requires s in (0,1) and w_bar at least the maximum conductance. Guarantees
// q^2 gamma |grad v| <= 1/2 on every edge and gamma_tilde <= 1/(2 q^2).
DeformationPlan build_plan(const Graph& g, int target, double s, double w_bar);

// Second-order remainder bound for the Hoelder interpolation term: whenever
// q^2 gamma |t| <= 1/2,
//   |(1 - 1/q) e^{q gamma t} + 1/q - e^{(q-1) gamma t}| <= 2 q^2 gamma^2 t^2
// and the right side is at most 1/2. Throws std::invalid_argument outside the
// admissible region (nothing is claimed there).
bool taylor_remainder_check(double q, double gamma, double t);

struct TaylorScan {
  bool all_hold = true;
  double worst_remainder_slack = 0.0;  // min of bound - |remainder|
  double worst_cap_slack = 0.0;        // min of 1/2 - bound
  long points = 0;
};

// Dense scan over q in (1,10] and the admissible band q^2 gamma |t| <= 1/2
// (both signs of t, boundary included).
TaylorScan taylor_grid_scan(int q_points = 400, int t_points = 401);

// Minimum central second difference of gamma -> ln D(W, u + gamma v) over the
// grid (raw differences, not divided by the spacing).
double min_second_difference(const Graph& g, const FieldSample& u,
                             std::span<const double> v,
                             std::span<const double> gammas);

// d^2/dgamma^2 ln D(W, u + gamma v) by central differences with one Richardson
// refinement, default step 1e-3.
double log_tree_second_derivative(const Graph& g, const FieldSample& u,
                                  std::span<const double> v, double gamma,
                                  double h = 1e-3);

struct MomentBoundReport {
  double estimate = 0.0;
  double std_error = 0.0;
  double bound_general = 0.0;      // exp(-gamma s + gamma^2 q^2 sum (W+1)|grad v|^2)
  double bound_resistance = 0.0;   // exp(-R s^2 / (8 q^2 (w_bar + 1)))
  bool pass_general = false;       // estimate <= bound + 3 std errors
  bool pass_resistance = false;
  double hypothesis_margin = 0.0;  // 1/2 - max q^2 gamma |grad v|
};

// Compares a Monte Carlo moment estimate against both decay bounds. Refuses
// (std::domain_error) when the edge hypothesis q^2 gamma |grad v| <= 1/2 is
// violated.
MomentBoundReport check_moment_bound(const Graph& g, const DeformationPlan& plan,
                                     const MomentEstimate& estimate);

}  // namespace vrjp
