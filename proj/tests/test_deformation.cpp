#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vrjplab/builtin_graphs.hpp"
#include "vrjplab/deformation.hpp"
#include "vrjplab/enumeration.hpp"
#include "vrjplab/mixing.hpp"
#include "vrjplab/quadrature.hpp"
#include "vrjplab/random_instances.hpp"
#include "vrjplab/rng.hpp"

using namespace vrjp;

TEST_CASE("harmonic closed forms: series path and parallel cycle") {
  const Graph path = path_graph(3);
  const auto vp = solve_harmonic(path, 0, 2);
  CHECK(vp[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(vp[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(vp[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(effective_resistance(path, 0, 2) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(current_flow_max(path, 0, 2) == doctest::Approx(1.0).epsilon(1e-12));

  const Graph cyc = cycle_graph(4);
  const auto vc = solve_harmonic(cyc, 0, 2);
  CHECK(vc[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(vc[3] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(effective_resistance(cyc, 0, 2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(current_flow_max(cyc, 0, 2) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("harmonic solve: residual, poles, and errors") {
  const Graph g = Graph::z2_box(3, 1.0, 1.0);
  const int y = g.vertex_at(2, 1);
  const auto v = solve_harmonic(g, g.root(), y);
  CHECK(harmonic_residual(g, v, g.root(), y) < 1e-10);
  const double r = effective_resistance(g, g.root(), y);
  CHECK(divergence(g, v, g.root()) == doctest::Approx(1.0 / r).epsilon(1e-8));
  CHECK(divergence(g, v, y) == doctest::Approx(-1.0 / r).epsilon(1e-8));
  CHECK_THROWS_AS(solve_harmonic(g, y, y), std::invalid_argument);
}

TEST_CASE("resistance: reciprocity and wired-boundary monotonicity") {
  // monotonicity in N is checked once y is strictly interior: with unit
  // conductances the smallest box replaces the merged boundary edges at y by
  // weight-1 edges, which is not a pure contraction of the larger box
  for (const auto& [x, y] : {std::pair{1, 0}, std::pair{2, 2}}) {
    const int interior_from = std::max(std::abs(x), std::abs(y)) + 1;
    double prev = 0.0;
    for (int n = std::max(2, interior_from); n <= 8; ++n) {
      const Graph g = Graph::z2_box(n, 1.0, 1.0);
      const int target = g.vertex_at(x, y);
      const double r = effective_resistance(g, g.root(), target);
      const double back = effective_resistance(g, target, g.root());
      CHECK(std::abs(r - back) <= 1e-10);
      if (n > interior_from) CHECK(r >= prev - 1e-12);
      prev = r;
    }
  }
}

TEST_CASE("resistance dominates the cut-set sum on boxes") {
  for (int n = 2; n <= 6; ++n) {
    const Graph g = Graph::z2_box(n, 1.0, 1.0);
    for (int k = 2; k <= n; ++k) {
      const double r1 =
          effective_resistance(g, g.root(), g.vertex_at(k, 0));
      CHECK(r1 >= nash_williams_sum(k));
      const double r2 =
          effective_resistance(g, g.root(), g.vertex_at(k, k));
      CHECK(r2 >= nash_williams_sum(k));
    }
  }
}

TEST_CASE("cut-set sum values and asymptotics") {
  CHECK(nash_williams_sum(2) == doctest::Approx(1.0 / 12).epsilon(1e-15));
  CHECK(nash_williams_sum(3) == doctest::Approx(2.0 / 15).epsilon(1e-15));
  CHECK_THROWS_AS(nash_williams_sum(1), std::invalid_argument);
  const double ratio = nash_williams_sum(1000) / std::log(1000.0);
  CHECK(std::abs(ratio - 0.125) < 0.0125);
}

TEST_CASE("current flow bound across random boxes") {
  Rng rng(404);
  for (int n = 2; n <= 6; ++n) {
    const Graph g = Graph::z2_box(n, 1.0, 1.0);
    for (int trial = 0; trial < 3; ++trial) {
      int y = g.root();
      while (y == g.root())
        y = static_cast<int>(rng.uniform() * (g.vertex_count() - 1));
      CHECK(current_flow_max(g, g.root(), y) <= 1.0 + 1e-8);
    }
  }
}

TEST_CASE("deformation plan: arithmetic and invariants") {
  const Graph g = Graph::z2_box(2, 1.0, 1.0);
  const auto plan = build_plan(g, g.vertex_at(2, 0), 0.5, 1.0);
  CHECK(plan.q == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(plan.gamma_tilde == doctest::Approx(1.0 / 64).epsilon(1e-15));
  CHECK(plan.eta_asymptotic == doctest::Approx(1.0 / 2048).epsilon(1e-15));
  CHECK(plan.dirichlet * plan.resistance == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(plan.gamma == doctest::Approx(plan.gamma_tilde * plan.resistance)
                          .epsilon(1e-15));
  CHECK(plan.gamma_prime ==
        doctest::Approx(-plan.gamma * (plan.q - 1.0)).epsilon(1e-15));
  CHECK(plan.q * plan.q * plan.gamma * plan.max_edge_gradient <= 0.5 + 1e-12);
  CHECK(plan.v[plan.source] == 0.0);
  CHECK(plan.v[plan.target] == doctest::Approx(1.0).epsilon(1e-12));

  for (double s : {0.05, 0.3, 0.6, 0.95}) {
    const auto p = build_plan(g, g.vertex_at(1, 1), s, 2.0);
    CHECK(s + 1.0 / p.q == doctest::Approx(1.0).epsilon(4e-16));
    CHECK(p.gamma_tilde <= 0.5 / (p.q * p.q));
  }

  CHECK_THROWS_AS(build_plan(g, g.vertex_at(2, 0), 1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_plan(g, g.vertex_at(2, 0), 0.5, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_plan(g, g.root(), 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("plan certificates: instance and asymptotic exponents") {
  const Graph g = Graph::z2_box(3, 1.0, 1.0);
  const auto near = build_plan(g, g.vertex_at(1, 0), 0.5, 1.0);
  CHECK(std::isnan(near.eta_instance));  // |y|_inf < 2: no certificate
  const auto far = build_plan(g, g.vertex_at(2, 0), 0.5, 1.0);
  CHECK(far.y_inf_norm == 2);
  CHECK(far.c0_instance ==
        doctest::Approx(nash_williams_sum(2) / std::log(2.0)).epsilon(1e-15));
  CHECK(far.eta_instance ==
        doctest::Approx(far.c0_instance * 0.25 / 64.0).epsilon(1e-15));
}

TEST_CASE("taylor remainder: examples and rejection") {
  CHECK(taylor_remainder_check(2.0, 1.0, 0.0));
  CHECK(taylor_remainder_check(2.0, 1.0, 0.125));
  CHECK(taylor_remainder_check(2.0, 1.0, -0.125));
  CHECK(taylor_remainder_check(1.5, 0.1, 1.0));
  CHECK_THROWS_AS(taylor_remainder_check(2.0, 1.0, 0.2),
                  std::invalid_argument);
  CHECK_THROWS_AS(taylor_remainder_check(0.9, 1.0, 0.0),
                  std::invalid_argument);

  const TaylorScan scan = taylor_grid_scan(150, 151);
  CHECK(scan.all_hold);
  CHECK(scan.worst_remainder_slack >= 0.0);
  CHECK(scan.worst_cap_slack >= 0.0);
}

TEST_CASE("log tree polynomial is convex along any direction") {
  Rng rng(505);
  std::vector<double> grid;
  for (int i = -8; i <= 8; ++i) grid.push_back(0.25 * i);
  double worst = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 60; ++trial) {
    const Graph g = random_connected_graph(rng);
    const FieldSample u(g, random_pinned_field(rng, g));
    const auto v = random_pinned_field(rng, g, 0.7);
    worst = std::min(worst, min_second_difference(g, u, v, grid));
  }
  CHECK(worst >= -1e-8);
}

TEST_CASE("curvature equals the arborescence variance") {
  Rng rng(606);
  const Graph g = triangle_graph();
  const FieldSample u(g, random_pinned_field(rng, g));
  const std::vector<double> v{0.0, 1.0, 0.0};
  const double fd = log_tree_second_derivative(g, u, v, 0.0);
  const double var = arborescence_gradient_variance(g, u, v, 0.0);
  CHECK(fd == doctest::Approx(var).epsilon(1e-6));

  for (int trial = 0; trial < 10; ++trial) {
    const Graph h = random_connected_graph(rng);
    const FieldSample uu(h, random_pinned_field(rng, h));
    const auto dir = random_pinned_field(rng, h, 0.8);
    const double gamma = rng.uniform() - 0.5;
    CHECK(log_tree_second_derivative(h, uu, dir, gamma) ==
          doctest::Approx(arborescence_gradient_variance(h, uu, dir, gamma))
              .epsilon(2e-6));
  }
}

TEST_CASE("constant directions leave the log tree polynomial flat") {
  const Graph g = triangle_graph();
  const FieldSample u(g, {0.0, 0.3, -0.8});
  const std::vector<double> v(3, 0.0);
  std::vector<double> grid{-1.0, -0.5, 0.0, 0.5, 1.0};
  CHECK(std::abs(min_second_difference(g, u, v, grid)) <= 1e-12);
}

TEST_CASE("tilted conductances keep at least half their size under a plan") {
  const Graph g = Graph::z2_box(2, 1.0, 1.0);
  const auto plan = build_plan(g, g.vertex_at(1, 1), 0.5, 1.0);
  const auto tw = tilted_conductances(g, plan.v, plan.gamma, plan.q);
  const auto edges = g.edges();
  for (std::size_t i = 0; i < tw.size(); ++i)
    CHECK(tw[i] >= 0.5 * edges[i].weight);
}

TEST_CASE("tilted-law moment scaling by quadrature") {
  const Graph g = two_vertex_graph(1.0);
  for (double gamma : {0.3, 1.0, 2.0}) {
    const auto r = integrate_expectation(
        g, [](std::span<const double> u) { return std::exp(u[1]); }, 1e-8,
        std::vector<double>{0.0, gamma});
    REQUIRE(r.converged);
    CHECK(r.value == doctest::Approx(std::exp(-gamma)).epsilon(1e-6));
  }
}

TEST_CASE("moment bound report: bounds, passes, and refusal") {
  const Graph g = triangle_graph();
  const auto plan = build_plan(g, 1, 0.5, 1.0);

  MomentEstimate est;
  est.vertex = 1;
  est.s = 0.5;
  est.estimate = 0.93;
  est.std_error = 0.005;
  est.std_error_valid = true;

  const auto rep = check_moment_bound(g, plan, est);
  CHECK(rep.bound_general ==
        doctest::Approx(std::exp(
            -plan.gamma * 0.5 +
            plan.gamma * plan.gamma * 4.0 *
                [&] {
                  double acc = 0.0;
                  for (const Arc& a : g.arcs()) {
                    const double d = plan.v[a.to] - plan.v[a.from];
                    acc += (a.weight + 1.0) * d * d;
                  }
                  return acc;
                }()))
            .epsilon(1e-12));
  CHECK(rep.bound_resistance ==
        doctest::Approx(std::exp(-plan.resistance * 0.25 / 64.0))
            .epsilon(1e-12));
  CHECK(rep.hypothesis_margin > 0.0);

  DeformationPlan bad = plan;
  bad.gamma = 10.0;
  CHECK_THROWS_AS(check_moment_bound(g, bad, est), std::domain_error);

  DeformationPlan zero = plan;
  zero.gamma = 0.0;
  const auto trivial = check_moment_bound(g, zero, est);
  CHECK(trivial.bound_general == 1.0);
  CHECK(trivial.pass_general);
}
