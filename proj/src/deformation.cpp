#include "vrjplab/deformation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vrjplab/laplacian.hpp"
#include "vrjplab/mixing.hpp"
#include "vrjplab/util.hpp"

namespace vrjp {

namespace {

Eigen::MatrixXd unit_laplacian(const Graph& g) {
  const int n = g.vertex_count();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : g.edges()) {
    l(e.a, e.a) += 1.0;
    l(e.b, e.b) += 1.0;
    l(e.a, e.b) -= 1.0;
    l(e.b, e.a) -= 1.0;
  }
  return l;
}

}  // namespace

std::vector<double> solve_harmonic(const Graph& g, int source, int target) {
  g.check_vertex(source);
  g.check_vertex(target);
  if (source == target)
    throw std::invalid_argument("harmonic: source equals target");

  const int n = g.vertex_count();
  std::vector<int> free_of;  // free vertices in index order
  std::vector<int> slot(n, -1);
  for (int v = 0; v < n; ++v) {
    if (v == source || v == target) continue;
    slot[v] = static_cast<int>(free_of.size());
    free_of.push_back(v);
  }

  const Eigen::MatrixXd l = unit_laplacian(g);
  const int nf = static_cast<int>(free_of.size());
  std::vector<double> v_out(n, 0.0);
  v_out[target] = 1.0;
  if (nf > 0) {
    Eigen::MatrixXd a(nf, nf);
    Eigen::VectorXd b(nf);
    for (int i = 0; i < nf; ++i) {
      for (int j = 0; j < nf; ++j) a(i, j) = l(free_of[i], free_of[j]);
      b[i] = -l(free_of[i], target);  // v(target)=1, v(source)=0
    }
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success)
      throw structural_error("harmonic: singular reduced Laplacian");
    Eigen::VectorXd x = llt.solve(b);
    for (int refine = 0; refine < 4; ++refine) {
      const Eigen::VectorXd r = b - a * x;
      if (r.lpNorm<Eigen::Infinity>() < 1e-12) break;
      x += llt.solve(r);
    }
    for (int i = 0; i < nf; ++i) v_out[free_of[i]] = x[i];
  }

  const double residual = harmonic_residual(g, v_out, source, target);
  if (!(residual < 1e-10))
    throw structural_error("harmonic: interior divergence residual " +
                           format_double(residual));
  return v_out;
}

double divergence(const Graph& g, std::span<const double> f, int z) {
  g.check_vertex(z);
  double acc = 0.0;
  for (const auto& [j, w] : g.neighbors(z)) {
    (void)w;
    acc += f[j] - f[z];
  }
  return acc;
}

double harmonic_residual(const Graph& g, std::span<const double> v, int source,
                         int target) {
  double worst = 0.0;
  for (int z = 0; z < g.vertex_count(); ++z) {
    if (z == source || z == target) continue;
    worst = std::max(worst, std::abs(divergence(g, v, z)));
  }
  return worst;
}

double effective_resistance(const Graph& g, int source, int target) {
  const auto v = solve_harmonic(g, source, target);
  const double energy = dirichlet_energy(g, v);
  if (!(energy > 0.0))
    throw structural_error("resistance: zero Dirichlet energy");
  const double r = 1.0 / energy;
  // unit-current identity at the poles
  const double at_source = divergence(g, v, source);
  const double at_target = divergence(g, v, target);
  if (std::abs(at_source - energy) > 1e-8 || std::abs(at_target + energy) > 1e-8)
    throw structural_error("resistance: current identity violated: div(0)=" +
                           format_double(at_source) + " div(y)=" +
                           format_double(at_target) + " expected +-" +
                           format_double(energy));
  return r;
}

double current_flow_max(const Graph& g, int source, int target) {
  const auto v = solve_harmonic(g, source, target);
  const double r = 1.0 / dirichlet_energy(g, v);
  double worst = 0.0;
  for (const Edge& e : g.edges())
    worst = std::max(worst, r * std::abs(v[e.b] - v[e.a]));
  return worst;
}

double nash_williams_sum(int y_inf_norm) {
  if (y_inf_norm < 2)
    throw std::invalid_argument("nash-williams sum: |y|_inf must be >= 2");
  double acc = 0.0;
  for (int k = 1; k <= y_inf_norm - 1; ++k) acc += 1.0 / (4.0 * (2 * k + 1));
  return acc;
}

DeformationPlan build_plan(const Graph& g, int target, double s, double w_bar) {
  g.check_vertex(target);
  if (target == g.root())
    throw std::invalid_argument("plan: target equals the root");
  if (!(s > 0.0 && s < 1.0))
    throw std::invalid_argument("plan: s must lie in (0, 1)");
  if (w_bar < g.conductance_bound_floor())
    throw std::invalid_argument("plan: w_bar below the maximum conductance");

  DeformationPlan plan;
  plan.source = g.root();
  plan.target = target;
  plan.s = s;
  plan.q = 1.0 / (1.0 - s);
  plan.w_bar = w_bar;
  plan.v = solve_harmonic(g, plan.source, target);
  plan.dirichlet = dirichlet_energy(g, plan.v);
  plan.resistance = 1.0 / plan.dirichlet;

  plan.gamma_tilde = s / (4.0 * plan.q * plan.q * (w_bar + 1.0));
  if (plan.gamma_tilde > 0.5 / (plan.q * plan.q) + 1e-15)
    throw structural_error("plan: gamma_tilde exceeds 1/(2 q^2)");
  plan.gamma = plan.gamma_tilde * plan.resistance;
  plan.gamma_prime = -plan.gamma * (plan.q - 1.0);

  for (const Edge& e : g.edges()) {
    const double grad = std::abs(plan.v[e.b] - plan.v[e.a]);
    plan.max_edge_gradient = std::max(plan.max_edge_gradient, grad);
  }
  plan.max_scaled_gradient = plan.resistance * plan.max_edge_gradient;
  const double hyp = plan.q * plan.q * plan.gamma * plan.max_edge_gradient;
  if (hyp > 0.5 + 1e-12)
    throw structural_error("plan: edge hypothesis q^2 gamma |grad v| <= 1/2 "
                           "violated: " +
                           format_double(hyp));

  if (g.is_box() && target != g.boundary_vertex()) {
    const auto c = g.coord(target);
    plan.y_inf_norm = std::max(std::abs(c[0]), std::abs(c[1]));
  }
  if (plan.y_inf_norm >= 2) {
    plan.c0_instance =
        nash_williams_sum(plan.y_inf_norm) / std::log(plan.y_inf_norm);
    const double denom = 8.0 * plan.q * plan.q * (w_bar + 1.0);
    plan.eta_instance = plan.c0_instance * s * s / denom;
    plan.eta_asymptotic = plan.c0_asymptotic * s * s / denom;
  } else {
    plan.c0_instance = std::numeric_limits<double>::quiet_NaN();
    plan.eta_instance = std::numeric_limits<double>::quiet_NaN();
    plan.eta_asymptotic = std::numeric_limits<double>::quiet_NaN();
  }
  return plan;
}

bool taylor_remainder_check(double q, double gamma, double t) {
  if (!(q > 1.0)) throw std::invalid_argument("taylor check: q must be > 1");
  if (gamma < 0.0) throw std::invalid_argument("taylor check: gamma < 0");
  const double x = q * q * gamma * std::abs(t);
  if (x > 0.5 + 1e-15)
    throw std::invalid_argument(
        "taylor check: admissibility q^2 gamma |t| <= 1/2 violated");

  // first-order coefficients cancel identically
  const double first_order = (1.0 - 1.0 / q) * q - (q - 1.0);
  if (std::abs(first_order) > 1e-12 * q)
    throw structural_error("taylor check: first-order cancellation failed");

  const double gt = gamma * t;
  const double remainder =
      std::abs((1.0 - 1.0 / q) * std::exp(q * gt) + 1.0 / q -
               std::exp((q - 1.0) * gt));
  const double bound = 2.0 * q * q * gt * gt;
  return remainder <= bound + 1e-15 && bound <= 0.5 + 1e-15;
}

TaylorScan taylor_grid_scan(int q_points, int t_points) {
  TaylorScan scan;
  scan.worst_remainder_slack = std::numeric_limits<double>::infinity();
  scan.worst_cap_slack = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= q_points; ++i) {
    const double q = 1.0 + 9.0 * i / q_points;
    const double t_max = 0.5 / (q * q);  // gamma fixed at 1
    for (int j = 0; j < t_points; ++j) {
      const double t = -t_max + 2.0 * t_max * j / (t_points - 1);
      const double remainder =
          std::abs((1.0 - 1.0 / q) * std::exp(q * t) + 1.0 / q -
                   std::exp((q - 1.0) * t));
      const double bound = 2.0 * q * q * t * t;
      scan.worst_remainder_slack =
          std::min(scan.worst_remainder_slack, bound - remainder);
      scan.worst_cap_slack = std::min(scan.worst_cap_slack, 0.5 - bound);
      if (!taylor_remainder_check(q, 1.0, t)) scan.all_hold = false;
      ++scan.points;
    }
  }
  return scan;
}

double min_second_difference(const Graph& g, const FieldSample& u,
                             std::span<const double> v,
                             std::span<const double> gammas) {
  if (gammas.size() < 3)
    throw std::invalid_argument("second differences need at least 3 points");
  std::vector<double> values;
  values.reserve(gammas.size());
  for (double gamma : gammas)
    values.push_back(
        log_tree_polynomial(g, FieldSample::shifted(g, u, v, gamma)));
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < values.size(); ++i)
    worst = std::min(worst, values[i + 1] - 2.0 * values[i] + values[i - 1]);
  return worst;
}

double log_tree_second_derivative(const Graph& g, const FieldSample& u,
                                  std::span<const double> v, double gamma,
                                  double h) {
  auto phi = [&](double x) {
    return log_tree_polynomial(g, FieldSample::shifted(g, u, v, x));
  };
  auto central = [&](double step) {
    return (phi(gamma + step) - 2.0 * phi(gamma) + phi(gamma - step)) /
           (step * step);
  };
  const double coarse = central(h);
  const double fine = central(0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

MomentBoundReport check_moment_bound(const Graph& g,
                                     const DeformationPlan& plan,
                                     const MomentEstimate& estimate) {
  double max_hyp = 0.0;
  for (const Edge& e : g.edges()) {
    const double grad = std::abs(plan.v[e.b] - plan.v[e.a]);
    max_hyp = std::max(max_hyp, plan.q * plan.q * plan.gamma * grad);
  }
  if (max_hyp > 0.5 + 1e-12)
    throw std::domain_error(
        "moment bound: edge hypothesis q^2 gamma |grad v| <= 1/2 violated (" +
        format_double(max_hyp) + "); refusing to report a bound");

  MomentBoundReport rep;
  rep.hypothesis_margin = 0.5 - max_hyp;
  rep.estimate = estimate.estimate;
  rep.std_error = estimate.std_error;

  double weighted = 0.0;  // sum over directed edges of (W+1) |grad v|^2
  for (const Arc& a : g.arcs()) {
    const double grad = plan.v[a.to] - plan.v[a.from];
    weighted += (a.weight + 1.0) * grad * grad;
  }
  rep.bound_general = std::exp(-plan.gamma * plan.s +
                               plan.gamma * plan.gamma * plan.q * plan.q *
                                   weighted);
  rep.bound_resistance =
      std::exp(-plan.resistance * plan.s * plan.s /
               (8.0 * plan.q * plan.q * (plan.w_bar + 1.0)));

  const double slack =
      estimate.std_error_valid ? 3.0 * estimate.std_error : 0.0;
  rep.pass_general = rep.estimate <= rep.bound_general + slack;
  rep.pass_resistance = rep.estimate <= rep.bound_resistance + slack;
  return rep;
}

}  // namespace vrjp
