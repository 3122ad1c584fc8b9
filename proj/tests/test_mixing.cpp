#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vrjplab/builtin_graphs.hpp"
#include "vrjplab/enumeration.hpp"
#include "vrjplab/field.hpp"
#include "vrjplab/mixing.hpp"
#include "vrjplab/quadrature.hpp"
#include "vrjplab/random_instances.hpp"
#include "vrjplab/rng.hpp"

using namespace vrjp;

namespace {
constexpr double kLogTwoPi = 1.8378770664093454835606594728112;
}

TEST_CASE("tree polynomial: single edge") {
  for (double w : {0.5, 1.0, 3.0}) {
    const Graph g = two_vertex_graph(w);
    for (double uj : {-1.5, 0.0, 2.0}) {
      const FieldSample u(g, {0.0, uj});
      // the only tree points the non-root vertex at the root: weight W e^{-u}
      CHECK(log_tree_polynomial(g, u) ==
            doctest::Approx(std::log(w) - uj).epsilon(1e-14));
    }
  }
}

TEST_CASE("tree polynomial: triangle") {
  const Graph g = triangle_graph();
  CHECK(std::exp(log_tree_polynomial(g, FieldSample::zeros(g))) ==
        doctest::Approx(3.0).epsilon(1e-13));

  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const double u1 = rng.normal(), u2 = rng.normal();
    const FieldSample u(g, {0.0, u1, u2});
    const double expected =
        std::exp(-u1 - u2) + std::exp(-u1) + std::exp(-u2);
    CHECK(std::exp(log_tree_polynomial(g, u)) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("tree polynomial agrees with arborescence enumeration") {
  Rng rng(42);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Graph g = random_connected_graph(rng);
    const FieldSample u(g, random_pinned_field(rng, g));
    const double det_route = log_tree_polynomial(g, u);
    const double enum_route = enumeration_log_tree_polynomial(g, u);
    worst = std::max(worst, std::abs(det_route - enum_route));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("field sample: pinning and finiteness are hard errors") {
  const Graph g = triangle_graph();
  CHECK_THROWS_AS(FieldSample(g, {0.1, 0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(FieldSample(g, {0.0, std::nan(""), 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(FieldSample(g, {0.0, 0.0}), std::invalid_argument);
  const FieldSample ok(g, {0.0, 1.0, -2.0});
  CHECK(ok[2] == -2.0);
  // shift directions must vanish at the root too
  CHECK_THROWS_AS(
      FieldSample::shifted(g, ok, std::vector<double>{1.0, 0.0, 0.0}, 0.5),
      std::invalid_argument);
}

TEST_CASE("log density: value at the origin of field space") {
  const Graph g = two_vertex_graph(1.0);
  // interaction vanishes at u = 0 and D = 1
  CHECK(log_density(g, FieldSample::zeros(g)) ==
        doctest::Approx(-0.5 * kLogTwoPi).epsilon(1e-15));
}

TEST_CASE("log density: explicit one-dimensional form") {
  const Graph g = two_vertex_graph(1.0);
  for (double x : {-3.0, -0.5, 0.0, 1.0, 2.5}) {
    const FieldSample u(g, {0.0, x});
    const double expected = -0.5 * kLogTwoPi -
                            0.5 * (std::exp(x) + std::exp(-x) - 2.0) - 0.5 * x;
    CHECK(log_density(g, u) == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("log density: gradient overflow is reported") {
  const Graph g = two_vertex_graph(1.0);
  CHECK_THROWS_AS(log_density(g, FieldSample(g, {0.0, 800.0})),
                  std::range_error);
}

TEST_CASE("density normalizes to one") {
  for (double w : {0.2, 1.0, 5.0}) {
    CHECK(density_normalization(two_vertex_graph(w), 1e-6) ==
          doctest::Approx(1.0).epsilon(1e-6));
  }
  for (double w : {0.2, 1.0, 5.0}) {
    CHECK(density_normalization(path_graph(3, w), 1e-4) ==
          doctest::Approx(1.0).epsilon(1e-4));
  }
}

TEST_CASE("exponential moment is one") {
  CHECK(exp_moment_by_quadrature(two_vertex_graph(1.0), 1, 1.0, 1e-6) ==
        doctest::Approx(1.0).epsilon(2e-6));
  CHECK(exp_moment_by_quadrature(two_vertex_graph(5.0), 1, 1.0, 1e-6) ==
        doctest::Approx(1.0).epsilon(2e-6));
  // at the root the integrand is the density itself
  CHECK(exp_moment_by_quadrature(two_vertex_graph(1.0), 0, 1.0, 1e-6) ==
        doctest::Approx(1.0).epsilon(2e-6));
}

TEST_CASE("quadrature refuses high dimensions") {
  const Graph g = Graph::z2_box(1, 1.0, 1.0);
  CHECK_THROWS_AS(density_normalization(g, 1e-4), std::invalid_argument);
}

TEST_CASE("tilt ratio: identity at gamma 0 and closed form on one edge") {
  const Graph g = two_vertex_graph(2.0);
  const FieldSample u(g, {0.0, 0.7});
  const std::vector<double> v{0.0, 1.0};
  CHECK(log_tilt_ratio(g, u, v, 0.0) == doctest::Approx(0.0).epsilon(1e-15));

  for (double gamma : {-1.0, 0.25, 1.5}) {
    const double expected =
        0.5 * 2.0 * (std::exp(0.7) * std::expm1(gamma) +
                     std::exp(-0.7) * std::expm1(-gamma)) +
        0.5 * gamma;
    CHECK(log_tilt_ratio(g, u, v, gamma) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("tilt ratio equals the log density difference") {
  Rng rng(99);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Graph g = random_connected_graph(rng);
    const FieldSample u(g, random_pinned_field(rng, g));
    const std::vector<double> v = random_pinned_field(rng, g, 0.6);
    const double gamma = 2.0 * rng.uniform() - 1.0;
    const double lhs = log_tilt_ratio(g, u, v, gamma);
    const double rhs =
        log_density(g, u) - log_density(g, FieldSample::shifted(g, u, v, gamma));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("root change carries the moment factor") {
  // density with root j0 at the re-pinned field = density with root i0 + u_j0
  Rng rng(123);
  for (int trial = 0; trial < 30; ++trial) {
    const Graph g = random_connected_graph(rng);
    const FieldSample u(g, random_pinned_field(rng, g));
    std::vector<EdgeSpec> specs;
    for (const Edge& e : g.edges())
      specs.push_back({g.vertex_id(e.a), g.vertex_id(e.b), e.weight});
    const Graph g2 = Graph::from_edges(specs, g.vertex_id(1));
    std::vector<double> shifted(u.values().begin(), u.values().end());
    for (auto& x : shifted) x -= u[1];
    CHECK(log_density(g2, FieldSample(g2, shifted)) ==
          doctest::Approx(log_density(g, u) + u[1]).epsilon(1e-11));
  }
}

TEST_CASE("tilted conductances") {
  const Graph g = path_graph(3);
  const std::vector<double> v{0.0, 0.5, 1.0};
  const double q = 2.0;
  const double gamma = 0.25;  // q^2 gamma |grad v| = 1/2 on both edges
  const auto w = tilted_conductances(g, v, gamma, q);
  // factor 1 - 2 q^3 gamma^2 (1/4) = 1 - 1/4
  CHECK(w[0] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(w[1] == doctest::Approx(0.75).epsilon(1e-15));
  const Graph tg = tilted_graph(g, v, gamma, q);
  CHECK(tg.conductance(0, 1) == doctest::Approx(0.75).epsilon(1e-15));
  // the tilted law is still a probability law
  CHECK(density_normalization(tg, 1e-5) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("structural error on effectively broken graphs") {
  // the arborescence count of a connected graph is positive for any finite u;
  // enumeration and determinant agree that nothing here throws
  Rng rng(7);
  const Graph g = random_connected_graph(rng);
  const FieldSample u(g, random_pinned_field(rng, g, 3.0));
  CHECK(std::isfinite(log_tree_polynomial(g, u)));
}
