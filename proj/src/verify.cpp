#include "vrjplab/verify.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "vrjplab/builtin_graphs.hpp"
#include "vrjplab/deformation.hpp"
#include "vrjplab/dynamics.hpp"
#include "vrjplab/enumeration.hpp"
#include "vrjplab/mixing.hpp"
#include "vrjplab/quadrature.hpp"
#include "vrjplab/random_instances.hpp"
#include "vrjplab/sampler.hpp"
#include "vrjplab/util.hpp"

namespace vrjp {

namespace {

std::string fmt(double x) { return format_double(x); }

void add(SuiteResult& suite, const std::string& name, bool pass,
         const std::string& detail) {
  suite.checks.push_back(
      {name, pass ? Verdict::Pass : Verdict::Fail, detail});
}

void add_verdict(SuiteResult& suite, const std::string& name, Verdict v,
                 const std::string& detail) {
  suite.checks.push_back({name, v, detail});
}

// |observed - target| <= tol
void add_close(SuiteResult& suite, const std::string& name, double observed,
               double target, double tol, const std::string& instance) {
  const double err = std::abs(observed - target);
  add(suite, name, err <= tol,
      instance + " observed=" + fmt(observed) + " target=" + fmt(target) +
          " |err|=" + fmt(err) + " tol=" + fmt(tol));
}

// observed <= bound + 3 sigma, inconclusive when no standard error exists
void add_three_sigma_bound(SuiteResult& suite, const std::string& name,
                           const MomentEstimate& est, double bound,
                           const std::string& instance) {
  if (!est.std_error_valid) {
    add_verdict(suite, name, Verdict::Inconclusive,
                instance + " no standard error (fewer than 2 chains)");
    return;
  }
  const double slack = 3.0 * est.std_error;
  add(suite, name, est.estimate <= bound + slack,
      instance + " estimate=" + fmt(est.estimate) + " bound=" + fmt(bound) +
          " 3sigma=" + fmt(slack) + " ess=" + fmt(est.ess));
}

void add_three_sigma_equal(SuiteResult& suite, const std::string& name,
                           const MomentEstimate& est, double target,
                           const std::string& instance) {
  if (!est.std_error_valid) {
    add_verdict(suite, name, Verdict::Inconclusive,
                instance + " no standard error (fewer than 2 chains)");
    return;
  }
  const double err = std::abs(est.estimate - target);
  add(suite, name, err <= 3.0 * est.std_error,
      instance + " estimate=" + fmt(est.estimate) + " target=" + fmt(target) +
          " |err|=" + fmt(err) + " 3sigma=" + fmt(3.0 * est.std_error) +
          " ess=" + fmt(est.ess));
}

SamplerConfig base_config(const VerifyOptions& opt) {
  SamplerConfig cfg;
  cfg.seed = opt.seed;
  cfg.chains = opt.chains;
  cfg.samples_per_chain = opt.sampler_samples_per_chain;
  cfg.burnin_sweeps = opt.sampler_burnin;
  return cfg;
}

// Independent route for the harmonic solve: full n x n system with constraint
// rows, rank-revealing QR instead of the reduced SPD factorization.
std::vector<double> dense_harmonic_oracle(const Graph& g, int source,
                                          int target) {
  const int n = g.vertex_count();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (int z = 0; z < n; ++z) {
    if (z == source || z == target) {
      a(z, z) = 1.0;
      b[z] = (z == target) ? 1.0 : 0.0;
      continue;
    }
    for (const auto& [j, w] : g.neighbors(z)) {
      (void)w;
      a(z, z) += 1.0;
      a(z, j) -= 1.0;
    }
  }
  const Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);
  return {x.data(), x.data() + n};
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

Verdict SuiteResult::overall() const {
  Verdict v = Verdict::Pass;
  for (const auto& c : checks) {
    if (c.verdict == Verdict::Fail) return Verdict::Fail;
    if (c.verdict == Verdict::Inconclusive) v = Verdict::Inconclusive;
  }
  return v;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "PASS";
    case Verdict::Fail:
      return "FAIL";
    default:
      return "INCONCLUSIVE";
  }
}

SuiteResult verify_density(const VerifyOptions&) {
  SuiteResult suite{"density", {}};
  for (double w : {0.2, 1.0, 5.0}) {
    const Graph g = two_vertex_graph(w);
    add_close(suite, "two_vertex_normalization",
              density_normalization(g, 1e-6), 1.0, 1e-6,
              "two-vertex W=" + fmt(w));
  }
  for (double w : {0.2, 1.0, 5.0}) {
    const Graph g = path_graph(3, w);
    add_close(suite, "three_vertex_normalization",
              density_normalization(g, 1e-4), 1.0, 1e-4,
              "3-path W=" + fmt(w));
  }
  return suite;
}

SuiteResult verify_moments(const VerifyOptions& opt) {
  SuiteResult suite{"moments", {}};

  for (double w : {1.0, 5.0}) {
    const Graph g = two_vertex_graph(w);
    add_close(suite, "exp_moment_quadrature",
              exp_moment_by_quadrature(g, 1, 1.0, 1e-6), 1.0, 1e-6,
              "two-vertex W=" + fmt(w) + " s=1");
  }
  {
    const Graph g = triangle_graph();
    add_close(suite, "exp_moment_quadrature",
              exp_moment_by_quadrature(g, 1, 1.0, 1e-5), 1.0, 1e-5,
              "triangle W=1 s=1");
  }

  {
    // root target: e^{s u_root} is identically 1
    const Graph g = triangle_graph();
    SamplerConfig cfg = base_config(opt);
    cfg.samples_per_chain = 200;
    cfg.burnin_sweeps = 50;
    const std::vector<int> tracked{g.root(), 1};
    const auto chains = sample_chains(g, cfg, tracked, opt.threads);
    const auto est = estimate_exp_moment(chains, 2, 0, g.root(), 1.0);
    add(suite, "root_moment_exact",
        est.estimate == 1.0 && est.std_error == 0.0,
        "triangle y=root estimate=" + fmt(est.estimate) + " stderr=" +
            fmt(est.std_error) + " (expected exactly 1 with zero variance)");
  }

  {
    const Graph g = triangle_graph();
    SamplerConfig cfg = base_config(opt);
    const std::vector<int> tracked{1};
    const auto chains = sample_chains(g, cfg, tracked, opt.threads);
    add_three_sigma_equal(suite, "exp_moment_mc",
                          estimate_exp_moment(chains, 1, 0, 1, 1.0), 1.0,
                          "triangle W=1 y=1 s=1");
    add_three_sigma_bound(suite, "jensen_upper",
                          estimate_exp_moment(chains, 1, 0, 1, 0.5), 1.0,
                          "triangle W=1 y=1 s=1/2 (bound 1 by concavity)");
  }

  {
    const Graph g = Graph::z2_box(3, 1.0, 1.0);
    SamplerConfig cfg = base_config(opt);
    const int y = g.vertex_at(2, 0);
    const std::vector<int> tracked{y};
    const auto chains = sample_chains(g, cfg, tracked, opt.threads);
    add_three_sigma_equal(suite, "exp_moment_mc",
                          estimate_exp_moment(chains, 1, 0, y, 1.0), 1.0,
                          "box N=3 W=1 y=(2,0) s=1");
    add_three_sigma_bound(suite, "jensen_upper",
                          estimate_exp_moment(chains, 1, 0, y, 0.5), 1.0,
                          "box N=3 W=1 y=(2,0) s=1/2 (bound 1 by concavity)");
  }

  {
    const Graph g = two_vertex_graph(1.0);
    const double by_quadrature = exp_moment_by_quadrature(g, 1, 0.5, 1e-8);
    SamplerConfig cfg = base_config(opt);
    const std::vector<int> tracked{1};
    const auto chains = sample_chains(g, cfg, tracked, opt.threads);
    add_three_sigma_equal(suite, "exp_moment_mc_vs_quadrature",
                          estimate_exp_moment(chains, 1, 0, 1, 0.5),
                          by_quadrature, "two-vertex W=1 s=1/2");
  }

  return suite;
}

SuiteResult verify_tilt(const VerifyOptions& opt) {
  SuiteResult suite{"tilt", {}};
  Rng rng(derive_seed(opt.seed, 101));

  {
    const Graph g = triangle_graph(1.3, 0.7, 2.0);
    const FieldSample u(g, random_pinned_field(rng, g));
    std::vector<double> v{0.0, 0.4, -1.1};
    add_close(suite, "identity_tilt", log_tilt_ratio(g, u, v, 0.0), 0.0, 1e-14,
              "triangle gamma=0");
  }

  {
    // single-edge closed form:
    //   log ratio = W/2 [e^u (e^g - 1) + e^{-u} (e^{-g} - 1)] + g/2
    double worst = 0.0;
    for (double w : {0.5, 1.0, 2.0})
      for (double uval : {-1.0, 0.0, 0.7})
        for (double gamma : {-1.0, 0.3, 2.0}) {
          const Graph g = two_vertex_graph(w);
          const FieldSample u(g, {0.0, uval});
          const std::vector<double> v{0.0, 1.0};
          const double expected =
              0.5 * w * (std::exp(uval) * std::expm1(gamma) +
                         std::exp(-uval) * std::expm1(-gamma)) +
              0.5 * gamma;
          worst = std::max(
              worst, std::abs(log_tilt_ratio(g, u, v, gamma) - expected));
        }
    add(suite, "two_vertex_closed_form", worst <= 1e-10,
        "grid over (W,u,gamma), max |log ratio - closed form|=" + fmt(worst) +
            " tol=1e-10");
  }

  {
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const Graph g = random_connected_graph(rng);
      const FieldSample u(g, random_pinned_field(rng, g));
      std::vector<double> v = random_pinned_field(rng, g, 0.7);
      const double gamma = 2.0 * rng.uniform() - 1.0;
      const double lhs = log_tilt_ratio(g, u, v, gamma);
      const double rhs = log_density(g, u) -
                         log_density(g, FieldSample::shifted(g, u, v, gamma));
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    add(suite, "tilt_matches_density_difference", worst <= 1e-10,
        "100 random instances (<=5 vertices), max |diff|=" + fmt(worst) +
            " tol=1e-10");
  }

  {
    // root change: the density at the re-pinned field gains exactly u_{j0}
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const Graph g = random_connected_graph(rng);
      const FieldSample u(g, random_pinned_field(rng, g));
      const int j0 = 1;  // root is 0
      std::vector<EdgeSpec> specs;
      for (const Edge& e : g.edges())
        specs.push_back({g.vertex_id(e.a), g.vertex_id(e.b), e.weight});
      const Graph g2 = Graph::from_edges(specs, g.vertex_id(j0));
      std::vector<double> shifted(u.values().begin(), u.values().end());
      for (auto& x : shifted) x -= u[j0];
      const double lhs = log_density(g2, FieldSample(g2, shifted));
      const double rhs = log_density(g, u) + u[j0];
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    add(suite, "root_change_covariance", worst <= 1e-10,
        "50 random instances, max |log q_j0(u - u_j0) - log q_i0(u) - u_j0|=" +
            fmt(worst) + " tol=1e-10");
  }

  {
    // tilted conductances stay a well-defined field law
    const Graph g = two_vertex_graph(1.0);
    const std::vector<double> v{0.0, 1.0};
    const double q = 2.0, gamma = 0.125;  // q^2 gamma |grad v| = 1/2, boundary
    const Graph tg = tilted_graph(g, v, gamma, q);
    add_close(suite, "tilted_law_normalization",
              density_normalization(tg, 1e-6), 1.0, 1e-6,
              "two-vertex tilted W~=" + fmt(tg.edges()[0].weight));
  }

  return suite;
}

SuiteResult verify_convexity(const VerifyOptions& opt) {
  SuiteResult suite{"convexity", {}};
  Rng rng(derive_seed(opt.seed, 202));

  std::vector<double> grid;
  for (int i = -10; i <= 10; ++i) grid.push_back(0.2 * i);

  {
    const Graph g = triangle_graph();
    const FieldSample u(g, random_pinned_field(rng, g));
    const std::vector<double> v(3, 0.0);  // constant shifts leave ln D fixed
    const double m = min_second_difference(g, u, v, grid);
    add(suite, "constant_direction_flat", std::abs(m) <= 1e-12,
        "triangle v=const second difference=" + fmt(m) + " (expected 0)");
  }

  {
    const Graph g = triangle_graph();
    const FieldSample u(g, random_pinned_field(rng, g));
    const std::vector<double> v{0.0, 1.0, 0.0};
    const double fd = log_tree_second_derivative(g, u, v, 0.0);
    const double var = arborescence_gradient_variance(g, u, v, 0.0);
    add_close(suite, "triangle_variance_identity", fd, var, 1e-6,
              "triangle random u, v=(0,1,0)");
  }

  {
    double worst_fd = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const Graph g = random_connected_graph(rng);
      const FieldSample u(g, random_pinned_field(rng, g));
      const std::vector<double> v = random_pinned_field(rng, g, 0.8);
      const double gamma = rng.uniform() - 0.5;
      const double fd = log_tree_second_derivative(g, u, v, gamma);
      const double var = arborescence_gradient_variance(g, u, v, gamma);
      worst_fd = std::max(worst_fd, std::abs(fd - var));
    }
    add(suite, "variance_identity_random", worst_fd <= 1e-6,
        "20 random instances, max |d2 lnD - Var|=" + fmt(worst_fd) +
            " tol=1e-6");
  }

  {
    double worst = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 100; ++trial) {
      const Graph g = random_connected_graph(rng);
      const FieldSample u(g, random_pinned_field(rng, g));
      const std::vector<double> v = random_pinned_field(rng, g, 0.8);
      worst = std::min(worst, min_second_difference(g, u, v, grid));
    }
    add(suite, "log_tree_convexity", worst >= -1e-8,
        "100 random instances, min second difference=" + fmt(worst) +
            " tol=-1e-8");
  }

  return suite;
}

SuiteResult verify_taylor(const VerifyOptions&) {
  SuiteResult suite{"taylor", {}};

  add(suite, "zero_gradient", taylor_remainder_check(2.0, 1.0, 0.0),
      "q=2 t=0: remainder 0 <= 0 <= 1/2");

  {
    const double q = 2.0, gt = 0.125;  // q^2 gamma |t| = 1/2 boundary
    const bool ok = taylor_remainder_check(q, 1.0, gt);
    const double bound = 2.0 * q * q * gt * gt;
    add(suite, "boundary_example", ok && std::abs(bound - 0.125) <= 1e-15,
        "q=2 gamma t=1/8: bound=" + fmt(bound) + " (=1/8) <= 1/2");
  }

  {
    bool rejected = false;
    try {
      taylor_remainder_check(2.0, 1.0, 0.2);  // q^2 gamma t = 0.8 > 1/2
    } catch (const std::invalid_argument&) {
      rejected = true;
    }
    add(suite, "inadmissible_rejected", rejected,
        "q=2 gamma t=0.2 outside q^2 gamma |t| <= 1/2 must be rejected");
  }

  {
    const TaylorScan scan = taylor_grid_scan();
    add(suite, "grid_scan", scan.all_hold && scan.worst_remainder_slack >= 0.0 &&
            scan.worst_cap_slack >= 0.0,
        "dense scan (" + std::to_string(scan.points) +
            " points): min bound-remainder=" + fmt(scan.worst_remainder_slack) +
            ", min 1/2-bound=" + fmt(scan.worst_cap_slack));
  }

  return suite;
}

SuiteResult verify_mixture(const VerifyOptions& opt) {
  SuiteResult suite{"mixture", {}};

  {
    // first jump of the reinforced walk is W-weighted (all local times are 1)
    const Graph g = triangle_graph(1.0, 2.0, 0.5);
    const std::uint64_t runs = 100'000;
    const auto law = vrjp_jump_chain_law(g, 0, 1, runs, opt.seed, opt.threads);
    const double total = 1.0 + 2.0;  // W(0,1) + W(0,2)
    bool ok = true;
    std::ostringstream detail;
    for (std::size_t i = 0; i < law.sequences.size(); ++i) {
      const double expect = g.conductance(0, law.sequences[i][0]) / total;
      if (std::abs(law.probability[i] - expect) > 3.0 * law.std_error[i])
        ok = false;
      detail << " p(" << law.sequences[i][0] << ")=" << fmt(law.probability[i])
             << " vs " << fmt(expect);
    }
    add(suite, "first_jump_conductance_weighted", ok,
        "triangle W=(1,2,0.5), 1e5 runs:" + detail.str() + " (3 sigma)");
  }

  {
    // annealed first step equals the conductance-weighted walk in expectation
    const Graph g = triangle_graph(1.0, 2.0, 0.5);
    double worst = 0.0;
    for (int target = 1; target <= 2; ++target) {
      const auto r = integrate_expectation(
          g,
          [&](std::span<const double> u) {
            double total = 0.0, chosen = 0.0;
            for (const auto& [j, w] : g.neighbors(0)) {
              const double rate = w * std::exp(u[j]);
              total += rate;
              if (j == target) chosen = rate;
            }
            return chosen / total;
          },
          1e-6);
      if (!r.converged) throw std::runtime_error("quadrature stalled");
      const double expect = g.conductance(0, target) / 3.0;
      worst = std::max(worst, std::abs(r.value - expect));
    }
    add(suite, "annealed_first_step_identity", worst <= 1e-5,
        "triangle W=(1,2,0.5) quadrature, max |E[p_u] - W/sum W|=" +
            fmt(worst) + " tol=1e-5");
  }

  {
    const Graph g = path_graph(3, 1.0, 1);  // root at the middle vertex
    double worst = 0.0;
    for (int target : {0, 2}) {
      const auto r = integrate_expectation(
          g,
          [&](std::span<const double> u) {
            const double a = std::exp(u[0]);
            const double b = std::exp(u[2]);
            return (target == 0 ? a : b) / (a + b);
          },
          1e-6);
      if (!r.converged) throw std::runtime_error("quadrature stalled");
      worst = std::max(worst, std::abs(r.value - 0.5));
    }
    add(suite, "annealed_first_step_identity", worst <= 1e-5,
        "3-path root=middle quadrature, max |E[p_u] - 1/2|=" + fmt(worst) +
            " tol=1e-5");
  }

  {
    // two vertices force the alternating sequence on both sides
    const Graph g = two_vertex_graph(1.0);
    const auto vl = vrjp_jump_chain_law(g, 0, 3, 50, opt.seed, 1);
    SamplerConfig cfg = base_config(opt);
    cfg.samples_per_chain = 100;
    cfg.burnin_sweeps = 50;
    cfg.keep_full_samples = true;
    const auto fields = collect_fields(g, sample_chains(g, cfg, {}, 1));
    const auto ml = quenched_mixture_law(g, 0, 3, fields);
    add(suite, "two_vertex_point_mass",
        vl.sequences.size() == 1 && vl.probability[0] == 1.0 &&
            ml.probability[0] == 1.0,
        "two-vertex k=3: both laws concentrate on the alternating sequence");
  }

  {
    // annealed three-step law vs the reinforced walk
    const Graph g = triangle_graph();
    const auto vrjp_law = vrjp_jump_chain_law(g, 0, 3, opt.mixture_runs,
                                              derive_seed(opt.seed, 7),
                                              opt.threads);
    SamplerConfig cfg = base_config(opt);
    cfg.samples_per_chain = opt.mixture_fields_per_chain;
    cfg.keep_full_samples = true;
    const auto fields =
        collect_fields(g, sample_chains(g, cfg, {}, opt.threads));
    const auto mix_law = quenched_mixture_law(g, 0, 3, fields);
    const auto dist = law_distance(vrjp_law, mix_law);
    add(suite, "three_step_mixture_identity",
        dist.total_variation < 3.0 * dist.combined_error,
        "triangle W=1 k=3, " + std::to_string(opt.mixture_runs) + " runs / " +
            std::to_string(fields.size() * fields[0].size()) +
            " fields: TV=" + fmt(dist.total_variation) + " 3sigma=" +
            fmt(3.0 * dist.combined_error));
  }

  return suite;
}

SuiteResult verify_deformation(const VerifyOptions& opt) {
  SuiteResult suite{"deformation", {}};
  Rng rng(derive_seed(opt.seed, 303));

  {
    const Graph g = path_graph(3);
    const auto v = solve_harmonic(g, 0, 2);
    const std::vector<double> expect{0.0, 0.5, 1.0};
    add(suite, "path_harmonic_closed_form", max_abs_diff(v, expect) <= 1e-10,
        "path 0-1-2: v=(0,1/2,1), max err=" + fmt(max_abs_diff(v, expect)));
    add_close(suite, "path_resistance", effective_resistance(g, 0, 2), 2.0,
              1e-10, "path 0-1-2 (series)");
    add_close(suite, "path_current_flow_tight", current_flow_max(g, 0, 2), 1.0,
              1e-10, "path 0-1-2: R |grad v| attains 1");
  }

  {
    const Graph g = cycle_graph(4);
    const auto v = solve_harmonic(g, 0, 2);
    const std::vector<double> expect{0.0, 0.5, 1.0, 0.5};
    add(suite, "cycle_harmonic_closed_form", max_abs_diff(v, expect) <= 1e-10,
        "4-cycle: v=(0,1/2,1,1/2), max err=" + fmt(max_abs_diff(v, expect)));
    add_close(suite, "cycle_resistance", effective_resistance(g, 0, 2), 1.0,
              1e-10, "4-cycle opposite corners (two parallel 2-paths)");
    add_close(suite, "cycle_current_flow", current_flow_max(g, 0, 2), 0.5,
              1e-10, "4-cycle: R |grad v| = 1/2");
  }

  {
    const Graph g = Graph::z2_box(2, 1.0, 1.0);
    const int y = g.vertex_at(1, 0);
    const auto v = solve_harmonic(g, g.root(), y);
    const auto oracle = dense_harmonic_oracle(g, g.root(), y);
    add(suite, "box_harmonic_dense_oracle", max_abs_diff(v, oracle) <= 1e-10,
        "box N=2 y=(1,0): reduced SPD solve vs full QR solve, max diff=" +
            fmt(max_abs_diff(v, oracle)));
    add(suite, "box_harmonic_residual",
        harmonic_residual(g, v, g.root(), y) < 1e-10,
        "box N=2 y=(1,0): max interior |divergence|=" +
            fmt(harmonic_residual(g, v, g.root(), y)));
  }

  {
    double worst = 0.0;
    for (int n = 2; n <= 6; ++n) {
      const Graph g = Graph::z2_box(n, 1.0, 1.0);
      for (int trial = 0; trial < 4; ++trial) {
        int y = g.root();
        while (y == g.root())
          y = static_cast<int>(rng.uniform() * (g.vertex_count() - 1));
        worst = std::max(worst, current_flow_max(g, g.root(), y));
      }
    }
    add(suite, "current_flow_bound", worst <= 1.0 + 1e-8,
        "boxes N=2..6, random targets: max edge R|grad v|=" + fmt(worst) +
            " tol=1+1e-8");
  }

  add_close(suite, "nash_williams_value", nash_williams_sum(2), 1.0 / 12.0,
            1e-15, "|y|_inf=2 (single term k=1)");
  add_close(suite, "nash_williams_value", nash_williams_sum(3), 2.0 / 15.0,
            1e-15, "|y|_inf=3 (1/12 + 1/20)");
  {
    const double ratio = nash_williams_sum(1000) / std::log(1000.0);
    add(suite, "nash_williams_asymptotics",
        std::abs(ratio - 0.125) <= 0.1 * 0.125,
        "|y|_inf=1000: sum/ln = " + fmt(ratio) + " vs 1/8 within 10%");
    bool rejected = false;
    try {
      nash_williams_sum(1);
    } catch (const std::invalid_argument&) {
      rejected = true;
    }
    add(suite, "nash_williams_domain", rejected, "|y|_inf=1 must be rejected");
  }

  {
    bool ok = true;
    std::ostringstream detail;
    for (int n = 2; n <= 6; ++n) {
      const Graph g = Graph::z2_box(n, 1.0, 1.0);
      for (int k = 2; k <= n; ++k) {
        for (const auto& [x, y] : {std::pair{k, 0}, std::pair{k, k}}) {
          const int target = g.vertex_at(x, y);
          const double r = effective_resistance(g, g.root(), target);
          const double lower = nash_williams_sum(std::max(std::abs(x), std::abs(y)));
          if (r < lower) {
            ok = false;
            detail << " VIOLATION N=" << n << " y=(" << x << "," << y
                   << ") R=" << fmt(r) << " < " << fmt(lower);
          }
        }
      }
    }
    add(suite, "resistance_nash_williams_lower_bound", ok,
        "boxes N=2..6, y=(k,0),(k,k): solved R >= cut-set sum" + detail.str());
  }

  {
    double worst = 0.0;
    for (int n = 2; n <= 4; ++n) {
      const Graph g = Graph::z2_box(n, 1.0, 1.0);
      const int y = g.vertex_at(n, n - 1);
      worst = std::max(worst,
                       std::abs(effective_resistance(g, g.root(), y) -
                                effective_resistance(g, y, g.root())));
    }
    add(suite, "resistance_reciprocity", worst <= 1e-10,
        "boxes N=2..4: max |R(0,y) - R(y,0)|=" + fmt(worst) + " tol=1e-10");
  }

  {
    bool ok = true;
    std::ostringstream detail;
    for (const auto& [x, y] : {std::pair{1, 0}, std::pair{2, 0}}) {
      const int interior_from = std::max(std::abs(x), std::abs(y)) + 1;
      double prev = 0.0;
      for (int n = std::max(2, interior_from); n <= 8; ++n) {
        const Graph g = Graph::z2_box(n, 1.0, 1.0);
        const double r = effective_resistance(g, g.root(), g.vertex_at(x, y));
        if (n > interior_from && r < prev - 1e-12) {
          ok = false;
          detail << " y=(" << x << "," << y << ") N=" << n << " R=" << fmt(r)
                 << " < previous " << fmt(prev);
        }
        prev = r;
      }
    }
    add(suite, "resistance_monotone_in_n", ok,
        "growing the box moves the shorted boundary outward; R(0,y) "
        "nondecreasing once y is interior (boxes where y touches the boundary "
        "are excluded: unit conductances undo the contraction merge there), "
        "N<=8" + detail.str());
  }

  {
    const Graph g = Graph::z2_box(2, 1.0, 1.0);
    const auto plan = build_plan(g, g.vertex_at(2, 0), 0.5, 1.0);
    add_close(suite, "plan_q", plan.q, 2.0, 1e-15, "s=1/2");
    add_close(suite, "plan_gamma_tilde", plan.gamma_tilde, 1.0 / 64.0, 1e-15,
              "s=1/2 Wbar=1: s/(4 q^2 (Wbar+1))");
    add_close(suite, "plan_eta_asymptotic", plan.eta_asymptotic, 1.0 / 2048.0,
              1e-15, "s=1/2 Wbar=1 c0=1/8");
    add_close(suite, "plan_energy_resistance", plan.dirichlet * plan.resistance,
              1.0, 1e-10, "E(v,v) * R = 1");
    double worst_s = 0.0;
    for (double s : {0.1, 0.25, 0.5, 0.75, 0.9}) {
      const auto p = build_plan(g, g.vertex_at(2, 0), s, 1.0);
      worst_s = std::max(worst_s, std::abs(s + 1.0 / p.q - 1.0));
      if (!(p.gamma_tilde <= 0.5 / (p.q * p.q)) ||
          !(p.q * p.q * p.gamma * p.max_edge_gradient <= 0.5 + 1e-12))
        worst_s = 1.0;
    }
    add(suite, "plan_invariants", worst_s <= 4e-16,
        "s grid: max |s + 1/q - 1|=" + fmt(worst_s) +
            "; gamma_tilde <= 1/(2q^2); q^2 gamma |grad v| <= 1/2");
  }

  {
    // tilted conductances stay above W/2 under the edge hypothesis
    const Graph g = Graph::z2_box(2, 1.0, 1.0);
    const auto plan = build_plan(g, g.vertex_at(1, 1), 0.5, 1.0);
    const auto tw = tilted_conductances(g, plan.v, plan.gamma, plan.q);
    double worst = std::numeric_limits<double>::infinity();
    const auto edges = g.edges();
    for (std::size_t i = 0; i < tw.size(); ++i)
      worst = std::min(worst, tw[i] / edges[i].weight);
    add(suite, "tilted_conductance_floor", worst >= 0.5,
        "box N=2 plan: min W~/W=" + fmt(worst) + " >= 1/2");
  }

  {
    // tilted-law mean of e^{u_y}: shifting by gamma v scales it by e^{-gamma}
    const Graph g = two_vertex_graph(1.0);
    const std::vector<double> v{0.0, 1.0};
    double worst = 0.0;
    for (double gamma : {0.3, 1.0, 2.0}) {
      const auto r = integrate_expectation(
          g, [](std::span<const double> u) { return std::exp(u[1]); }, 1e-8,
          std::vector<double>{0.0, gamma});
      if (!r.converged) throw std::runtime_error("quadrature stalled");
      worst = std::max(worst, std::abs(r.value - std::exp(-gamma)));
    }
    add(suite, "tilted_moment_scaling", worst <= 1e-6,
        "two-vertex, gamma in {0.3,1,2}: max |E[e^{u_y}] - e^{-gamma}|=" +
            fmt(worst) + " tol=1e-6");
    (void)v;
  }

  {
    // zero tilt: both bounds collapse to 1 and the Jensen inequality holds
    const Graph g = triangle_graph();
    DeformationPlan plan = build_plan(g, 1, 0.5, 1.0);
    plan.gamma = 0.0;
    SamplerConfig cfg = base_config(opt);
    cfg.samples_per_chain = std::max(1000, opt.sampler_samples_per_chain / 4);
    const std::vector<int> tracked{1};
    const auto chains = sample_chains(g, cfg, tracked, opt.threads);
    const auto est = estimate_exp_moment(chains, 1, 0, 1, 0.5);
    const auto rep = check_moment_bound(g, plan, est);
    add(suite, "zero_tilt_unit_bound",
        rep.bound_general == 1.0 &&
            est.estimate <= 1.0 + 3.0 * est.std_error,
        "triangle gamma=0: bound=" + fmt(rep.bound_general) + " estimate=" +
            fmt(est.estimate) + " 3sigma=" + fmt(3.0 * est.std_error));
  }

  {
    const Graph g = triangle_graph();
    const auto plan = build_plan(g, 1, 0.5, 1.0);
    SamplerConfig cfg = base_config(opt);
    const std::vector<int> tracked{1};
    const auto chains = sample_chains(g, cfg, tracked, opt.threads);
    const auto est = estimate_exp_moment(chains, 1, 0, 1, 0.5);
    const auto rep = check_moment_bound(g, plan, est);
    add(suite, "moment_bound_triangle", rep.pass_general && rep.pass_resistance,
        "triangle W=1 s=1/2 y=1: estimate=" + fmt(est.estimate) +
            " general bound=" + fmt(rep.bound_general) + " resistance bound=" +
            fmt(rep.bound_resistance) + " 3sigma=" + fmt(3.0 * est.std_error));
  }

  {
    const Graph g = Graph::z2_box(3, 1.0, 1.0);
    const int y = g.vertex_at(2, 0);
    const auto plan = build_plan(g, y, 0.5, 1.0);
    SamplerConfig cfg = base_config(opt);
    const std::vector<int> tracked{y};
    const auto chains = sample_chains(g, cfg, tracked, opt.threads);
    const auto est = estimate_exp_moment(chains, 1, 0, y, 0.5);
    const auto rep = check_moment_bound(g, plan, est);
    add(suite, "moment_bound_box", rep.pass_resistance,
        "box N=3 W=1 s=1/2 y=(2,0): estimate=" + fmt(est.estimate) +
            " resistance bound=" + fmt(rep.bound_resistance) + " R=" +
            fmt(plan.resistance) + " 3sigma=" + fmt(3.0 * est.std_error));
  }

  {
    // inadmissible deformation must be refused
    const Graph g = path_graph(3);
    DeformationPlan plan = build_plan(g, 2, 0.5, 1.0);
    plan.gamma = 10.0;  // way past the edge hypothesis
    MomentEstimate est;
    est.estimate = 1.0;
    est.std_error = 0.0;
    est.std_error_valid = true;
    bool refused = false;
    try {
      check_moment_bound(g, plan, est);
    } catch (const std::domain_error&) {
      refused = true;
    }
    add(suite, "inadmissible_plan_refused", refused,
        "path gamma=10 violates q^2 gamma |grad v| <= 1/2; bound refused");
  }

  return suite;
}

std::vector<SuiteResult> run_verify_suite(const std::string& suite,
                                          const VerifyOptions& opt) {
  if (suite == "density") return {verify_density(opt)};
  if (suite == "moments") return {verify_moments(opt)};
  if (suite == "tilt") return {verify_tilt(opt)};
  if (suite == "convexity") return {verify_convexity(opt)};
  if (suite == "taylor") return {verify_taylor(opt)};
  if (suite == "mixture") return {verify_mixture(opt)};
  if (suite == "deformation") return {verify_deformation(opt)};
  if (suite == "all") {
    return {verify_density(opt),   verify_moments(opt), verify_tilt(opt),
            verify_convexity(opt), verify_taylor(opt),  verify_mixture(opt),
            verify_deformation(opt)};
  }
  throw std::invalid_argument(
      "unknown suite '" + suite +
      "' (expected density|moments|tilt|convexity|taylor|mixture|deformation|"
      "all)");
}

}  // namespace vrjp
