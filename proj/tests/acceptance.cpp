// Acceptance gate: end-to-end checks of the laboratory at desk scale, one
// pass/fail line per criterion. Every tolerance is pinned here in code.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "vrjplab/builtin_graphs.hpp"
#include "vrjplab/deformation.hpp"
#include "vrjplab/dynamics.hpp"
#include "vrjplab/enumeration.hpp"
#include "vrjplab/field.hpp"
#include "vrjplab/mixing.hpp"
#include "vrjplab/quadrature.hpp"
#include "vrjplab/random_instances.hpp"
#include "vrjplab/rng.hpp"
#include "vrjplab/sampler.hpp"
#include "vrjplab/util.hpp"

using namespace vrjp;

namespace {

constexpr std::uint64_t kSeed = 20240811;
constexpr int kThreads = 4;

struct Criterion {
  int id;
  std::string name;
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) { return format_double(x); }

// 1. determinant route vs arborescence enumeration, 200 random graphs
Criterion criterion_tree_oracle() {
  Criterion c{1, "matrix-tree vs arborescence enumeration"};
  Rng rng(derive_seed(kSeed, 1));
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Graph g = random_connected_graph(rng);
    const FieldSample u(g, random_pinned_field(rng, g));
    const double det_route = log_tree_polynomial(g, u);
    const double enum_route = enumeration_log_tree_polynomial(g, u);
    // |log difference| bounds the relative error of exp()
    worst = std::max(worst, std::abs(det_route - enum_route));
  }
  c.pass = worst <= 1e-10;
  c.detail = "200 random graphs (<=5 vertices): max relative error " +
             fmt(worst) + " (tol 1e-10)";
  return c;
}

// 2. the density integrates to 1
Criterion criterion_normalization() {
  Criterion c{2, "density normalization by quadrature"};
  double worst2 = 0.0, worst3 = 0.0;
  for (double w : {0.2, 1.0, 5.0}) {
    worst2 = std::max(worst2,
                      std::abs(density_normalization(two_vertex_graph(w), 1e-6) - 1.0));
    worst3 = std::max(worst3,
                      std::abs(density_normalization(path_graph(3, w), 1e-4) - 1.0));
  }
  c.pass = worst2 <= 1e-6 && worst3 <= 1e-4;
  c.detail = "W in {0.2,1,5}: two-vertex max |Z-1| " + fmt(worst2) +
             " (tol 1e-6), three-vertex " + fmt(worst3) + " (tol 1e-4)";
  return c;
}

// 3. E[e^{u_y}] = 1: exactly by quadrature, within 3 sigma by sampling
Criterion criterion_unit_moment() {
  Criterion c{3, "unit exponential moment"};
  double worst_quad = 0.0;
  for (double w : {1.0, 5.0})
    worst_quad = std::max(
        worst_quad,
        std::abs(exp_moment_by_quadrature(two_vertex_graph(w), 1, 1.0, 1e-6) -
                 1.0));

  SamplerConfig cfg;
  cfg.seed = derive_seed(kSeed, 3);
  cfg.chains = 4;
  cfg.samples_per_chain = 15000;
  cfg.burnin_sweeps = 2000;

  const Graph tri = triangle_graph();
  const auto tri_est = estimate_exp_moment(
      sample_chains(tri, cfg, std::vector<int>{1}, kThreads), 1, 0, 1, 1.0);

  const Graph box = Graph::z2_box(3, 1.0, 1.0);
  const int y = box.vertex_at(2, 0);
  const auto box_est = estimate_exp_moment(
      sample_chains(box, cfg, std::vector<int>{y}, kThreads), 1, 0, y, 1.0);

  const bool tri_ok = std::abs(tri_est.estimate - 1.0) <= 3.0 * tri_est.std_error;
  const bool box_ok = std::abs(box_est.estimate - 1.0) <= 3.0 * box_est.std_error;
  c.pass = worst_quad <= 1e-6 && tri_ok && box_ok;
  c.detail = "quadrature max |E-1| " + fmt(worst_quad) +
             " (tol 1e-6); triangle " + fmt(tri_est.estimate) + " +- " +
             fmt(tri_est.std_error) + "; box N=3 " + fmt(box_est.estimate) +
             " +- " + fmt(box_est.std_error) + " (3 sigma)";
  return c;
}

// 4. the tilt ratio is the log-density difference; closed form on one edge
Criterion criterion_tilt_ratio() {
  Criterion c{4, "tilt Radon-Nikodym identity"};
  Rng rng(derive_seed(kSeed, 4));
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Graph g = random_connected_graph(rng);
    const FieldSample u(g, random_pinned_field(rng, g));
    const auto v = random_pinned_field(rng, g, 0.7);
    const double gamma = 2.0 * rng.uniform() - 1.0;
    const double lhs = log_tilt_ratio(g, u, v, gamma);
    const double rhs = log_density(g, u) -
                       log_density(g, FieldSample::shifted(g, u, v, gamma));
    worst = std::max(worst, std::abs(lhs - rhs));
  }

  double worst_closed = 0.0;
  for (double w : {0.5, 1.0, 2.0})
    for (double uval : {-1.0, 0.3, 1.2})
      for (double gamma : {-0.8, 0.5, 1.7}) {
        const Graph g = two_vertex_graph(w);
        const FieldSample u(g, {0.0, uval});
        const std::vector<double> v{0.0, 1.0};
        const double expected =
            0.5 * w * (std::exp(uval) * std::expm1(gamma) +
                       std::exp(-uval) * std::expm1(-gamma)) +
            0.5 * gamma;
        worst_closed = std::max(
            worst_closed, std::abs(log_tilt_ratio(g, u, v, gamma) - expected));
      }
  c.pass = worst <= 1e-10 && worst_closed <= 1e-10;
  c.detail = "100 random instances: max |ratio - density diff| " + fmt(worst) +
             "; single-edge closed form max err " + fmt(worst_closed) +
             " (tol 1e-10)";
  return c;
}

// 5. convexity of gamma -> ln D and the curvature-variance identity
Criterion criterion_convexity() {
  Criterion c{5, "log tree polynomial convexity"};
  Rng rng(derive_seed(kSeed, 5));
  std::vector<double> grid;
  for (int i = -10; i <= 10; ++i) grid.push_back(0.2 * i);
  double min_second = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 100; ++trial) {
    const Graph g = random_connected_graph(rng);
    const FieldSample u(g, random_pinned_field(rng, g));
    const auto v = random_pinned_field(rng, g, 0.8);
    min_second = std::min(min_second, min_second_difference(g, u, v, grid));
  }

  double worst_var = 0.0;
  const Graph tri = triangle_graph();
  for (int trial = 0; trial < 10; ++trial) {
    const FieldSample u(tri, random_pinned_field(rng, tri));
    const std::vector<double> v{0.0, 1.0, 0.0};
    worst_var = std::max(
        worst_var, std::abs(log_tree_second_derivative(tri, u, v, 0.0) -
                            arborescence_gradient_variance(tri, u, v, 0.0)));
  }
  c.pass = min_second >= -1e-8 && worst_var <= 1e-6;
  c.detail = "100 random instances: min second difference " + fmt(min_second) +
             " (tol -1e-8); triangle curvature vs arborescence variance max "
             "err " +
             fmt(worst_var) + " (tol 1e-6)";
  return c;
}

// 6. second-order remainder bound over the admissible band
Criterion criterion_taylor() {
  Criterion c{6, "interpolation remainder bound"};
  const TaylorScan scan = taylor_grid_scan(400, 401);
  c.pass = scan.all_hold && scan.worst_remainder_slack >= 0.0 &&
           scan.worst_cap_slack >= 0.0;
  c.detail = std::to_string(scan.points) +
             " grid points over q in (1,10], q^2 gamma |t| <= 1/2: min "
             "bound-remainder " +
             fmt(scan.worst_remainder_slack) + ", min 1/2-bound " +
             fmt(scan.worst_cap_slack);
  return c;
}

// 7. moment decay against the resistance-form bound on boxes
Criterion criterion_moment_decay(std::vector<ChainResult>* keep_drift) {
  Criterion c{7, "resistance-form moment decay bound"};
  const double s = 0.5, w_bar = 1.0;
  bool all = true;
  std::string detail;
  for (int n : {3, 4, 5}) {
    const Graph g = Graph::z2_box(n, 1.0, 1.0);
    std::vector<int> targets{g.vertex_at(2, 0), g.vertex_at(3, 0),
                             g.vertex_at(2, 2)};
    SamplerConfig cfg;
    cfg.seed = derive_seed(kSeed, 70 + n);
    cfg.chains = 4;
    cfg.samples_per_chain = 15000;
    cfg.burnin_sweeps = 2000;
    const auto results = sample_chains(g, cfg, targets, kThreads);
    if (keep_drift)
      keep_drift->insert(keep_drift->end(), results.begin(), results.end());
    for (std::size_t slot = 0; slot < targets.size(); ++slot) {
      const auto plan = build_plan(g, targets[slot], s, w_bar);
      const auto est =
          estimate_exp_moment(results, static_cast<int>(targets.size()),
                              static_cast<int>(slot), targets[slot], s);
      const auto rep = check_moment_bound(g, plan, est);
      if (!rep.pass_resistance) all = false;
      const auto coords = g.coord(targets[slot]);
      detail += " N=" + std::to_string(n) + ",y=(" +
                std::to_string(coords[0]) + "," + std::to_string(coords[1]) +
                "): " + fmt(est.estimate) + " <= " + fmt(rep.bound_resistance) +
                (rep.pass_resistance ? " ok" : " VIOLATED");
    }
  }
  c.pass = all;
  c.detail = "s=1/2, W=1, 4x15000 samples, estimate <= exp(-R s^2/(8 q^2 "
             "(W+1))) + 3 sigma:" +
             detail;
  return c;
}

// 8. harmonic closed forms, cut-set lower bound, current-flow bound
Criterion criterion_harmonic() {
  Criterion c{8, "harmonic potentials and resistances"};
  const Graph path = path_graph(3);
  const Graph cyc = cycle_graph(4);
  const auto vp = solve_harmonic(path, 0, 2);
  const auto vc = solve_harmonic(cyc, 0, 2);
  const double path_err =
      std::max({std::abs(vp[0]), std::abs(vp[1] - 0.5), std::abs(vp[2] - 1.0),
                std::abs(effective_resistance(path, 0, 2) - 2.0)});
  const double cyc_err =
      std::max({std::abs(vc[1] - 0.5), std::abs(vc[3] - 0.5),
                std::abs(effective_resistance(cyc, 0, 2) - 1.0)});

  bool nw_ok = true;
  double flow_worst = 0.0;
  for (int n = 2; n <= 6; ++n) {
    const Graph g = Graph::z2_box(n, 1.0, 1.0);
    for (int k = 2; k <= n; ++k) {
      for (const auto& [x, y] : {std::pair{k, 0}, std::pair{k, k}}) {
        const int target = g.vertex_at(x, y);
        if (effective_resistance(g, g.root(), target) < nash_williams_sum(k))
          nw_ok = false;
        flow_worst =
            std::max(flow_worst, current_flow_max(g, g.root(), target));
      }
    }
  }
  c.pass = path_err <= 1e-10 && cyc_err <= 1e-10 && nw_ok &&
           flow_worst <= 1.0 + 1e-8;
  c.detail = "path/cycle closed forms max err " + fmt(std::max(path_err, cyc_err)) +
             " (tol 1e-10); R >= cut-set sum on boxes N=2..6 " +
             (nw_ok ? "ok" : "VIOLATED") + "; max edge R|grad v| " +
             fmt(flow_worst) + " (tol 1+1e-8)";
  return c;
}

// 9. the reinforced walk's jump chain is the environment mixture
Criterion criterion_mixture() {
  Criterion c{9, "jump-chain mixture identity"};
  const Graph g = triangle_graph();
  const auto walk_law =
      vrjp_jump_chain_law(g, 0, 3, 1'000'000, derive_seed(kSeed, 9), kThreads);

  SamplerConfig cfg;
  cfg.seed = derive_seed(kSeed, 90);
  cfg.chains = 4;
  cfg.samples_per_chain = 25000;
  cfg.burnin_sweeps = 2000;
  cfg.keep_full_samples = true;
  const auto fields = collect_fields(g, sample_chains(g, cfg, {}, kThreads));
  const auto mix_law = quenched_mixture_law(g, 0, 3, fields);

  const auto d = law_distance(walk_law, mix_law);
  c.pass = d.total_variation < 3.0 * d.combined_error;
  c.detail = "triangle W=1, k=3, 1e6 walk runs vs 1e5 exact quenched laws: TV " +
             fmt(d.total_variation) + " < 3 sigma " +
             fmt(3.0 * d.combined_error);
  return c;
}

// 10. sampler soundness: marginal law, determinant drift, reproducibility
Criterion criterion_sampler(const std::vector<ChainResult>& decay_runs) {
  Criterion c{10, "sampler soundness"};
  const Graph g = two_vertex_graph(1.0);
  SamplerConfig cfg;
  cfg.seed = derive_seed(kSeed, 10);
  cfg.chains = 4;
  cfg.samples_per_chain = 25000;
  cfg.burnin_sweeps = 2000;
  cfg.thin = 5;
  const std::vector<int> tracked{1};
  const auto results = sample_chains(g, cfg, tracked, kThreads);

  // KS distance of the pooled u_y samples against the quadrature CDF
  const double lo = -14.0, hi = 14.0, h = 1.0 / 256.0;
  const int m = static_cast<int>((hi - lo) / h) + 1;
  std::vector<double> cdf(m, 0.0);
  {
    double prev = std::exp(log_density(g, FieldSample(g, {0.0, lo})));
    for (int i = 1; i < m; ++i) {
      const double cur =
          std::exp(log_density(g, FieldSample(g, {0.0, lo + i * h})));
      cdf[i] = cdf[i - 1] + 0.5 * h * (prev + cur);
      prev = cur;
    }
  }
  const double z = cdf.back();
  std::vector<double> xs;
  for (const auto& r : results)
    xs.insert(xs.end(), r.tracked.begin(), r.tracked.end());
  std::sort(xs.begin(), xs.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = std::clamp(xs[i], lo, hi);
    const double f = cdf[static_cast<int>((x - lo) / h)] / z;
    ks = std::max(ks, std::abs(f - static_cast<double>(i) / xs.size()));
    ks = std::max(ks, std::abs(f - static_cast<double>(i + 1) / xs.size()));
  }

  // per-sweep determinant drift: dedicated run refactorizing every sweep,
  // plus the bookkeeping of the production runs from criterion 7
  double drift = 0.0;
  {
    const Graph box = Graph::z2_box(2, 1.0, 1.0);
    SamplerConfig tight;
    tight.seed = derive_seed(kSeed, 11);
    tight.chains = 1;
    tight.samples_per_chain = 400;
    tight.burnin_sweeps = 0;
    tight.refresh_period = 1;
    const auto run = sample_chains(box, tight, std::vector<int>{1}, 1);
    drift = run[0].max_drift_per_sweep;
  }
  double prod_drift = 0.0;
  for (const auto& r : decay_runs)
    prod_drift = std::max(prod_drift, r.max_drift_per_sweep);

  // bit-identical reruns
  SamplerConfig small = cfg;
  small.samples_per_chain = 2000;
  small.chains = 2;
  const auto r1 = sample_chains(g, small, tracked, 2);
  const auto r2 = sample_chains(g, small, tracked, 1);
  bool identical = true;
  for (std::size_t i = 0; i < r1.size(); ++i)
    identical = identical && r1[i].tracked == r2[i].tracked;

  c.pass = ks < 0.02 && drift < 1e-8 && prod_drift < 1e-8 && identical;
  c.detail = "KS(1e5 samples, quadrature law) " + fmt(ks) +
             " (tol 0.02); max per-sweep lnD drift " + fmt(drift) +
             " / production " + fmt(prod_drift) +
             " (tol 1e-8); reruns bit-identical: " +
             (identical ? "yes" : "NO");
  return c;
}

}  // namespace

int main() {
  std::vector<Criterion> results;
  std::vector<ChainResult> decay_runs;

  const std::vector<std::function<Criterion()>> criteria{
      [] { return criterion_tree_oracle(); },
      [] { return criterion_normalization(); },
      [] { return criterion_unit_moment(); },
      [] { return criterion_tilt_ratio(); },
      [] { return criterion_convexity(); },
      [] { return criterion_taylor(); },
      [&] { return criterion_moment_decay(&decay_runs); },
      [] { return criterion_harmonic(); },
      [] { return criterion_mixture(); },
      [&] { return criterion_sampler(decay_runs); },
  };

  int failed = 0;
  for (const auto& run : criteria) {
    Criterion c;
    try {
      c = run();
    } catch (const std::exception& err) {
      c.pass = false;
      c.detail = std::string("exception: ") + err.what();
      c.id = results.empty() ? 1 : results.back().id + 1;
      c.name = "(criterion aborted)";
    }
    if (!c.pass) ++failed;
    std::printf("[%2d] %s  %s — %s\n", c.id, c.pass ? "PASS" : "FAIL",
                c.name.c_str(), c.detail.c_str());
    std::fflush(stdout);
    results.push_back(std::move(c));
  }

  std::printf("ACCEPTANCE: %d/%d criteria passed\n",
              static_cast<int>(results.size()) - failed,
              static_cast<int>(results.size()));
  return failed == 0 ? 0 : 1;
}
