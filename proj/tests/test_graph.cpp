#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "vrjplab/builtin_graphs.hpp"
#include "vrjplab/graph.hpp"
#include "vrjplab/rng.hpp"

using namespace vrjp;

TEST_CASE("wired box: vertex count and boundary conductances") {
  const Graph g = Graph::z2_box(1, 1.0, 1.0);
  CHECK(g.vertex_count() == 10);  // 9 lattice vertices + boundary
  CHECK(g.is_box());
  REQUIRE(g.boundary_vertex().has_value());
  const int delta = *g.boundary_vertex();

  // corner (1,1) has two outgoing lattice edges
  CHECK(g.conductance(g.vertex_at(1, 1), delta) == 2.0);

  // total boundary conductance counts every crossing edge: 4(2N+1)
  double total = 0.0;
  for (const auto& [j, w] : g.neighbors(delta)) {
    (void)j;
    total += w;
  }
  CHECK(total == 12.0);
}

TEST_CASE("wired box: contraction counts exact for asymmetric conductances") {
  // every boundary conductance is (#horizontal exits) wh + (#vertical exits) wv
  const double wh = 0.75, wv = 2.5;
  for (int n : {1, 2, 3}) {
    const Graph g = Graph::z2_box(n, wh, wv);
    const int delta = *g.boundary_vertex();
    for (const auto& [b, w] : g.neighbors(delta)) {
      const auto c = g.coord(b);
      int h_exits = 0, v_exits = 0;
      if (c[0] == n) ++h_exits;
      if (c[0] == -n) ++h_exits;
      if (c[1] == n) ++v_exits;
      if (c[1] == -n) ++v_exits;
      CHECK(w == doctest::Approx(h_exits * wh + v_exits * wv).epsilon(1e-15));
      CHECK(h_exits + v_exits > 0);
    }
  }
}

TEST_CASE("wired box: rejects bad parameters") {
  CHECK_THROWS_AS(Graph::z2_box(0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Graph::z2_box(-2, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Graph::z2_box(1, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("wired box: deterministic row-major ordering, boundary last") {
  const Graph g = Graph::z2_box(2, 1.0, 1.0);
  CHECK(g.vertex_at(-2, -2) == 0);
  CHECK(g.vertex_at(-1, -2) == 1);
  CHECK(g.vertex_at(-2, -1) == 5);
  CHECK(g.vertex_at(0, 0) == g.root());
  CHECK(g.label(g.vertex_count() - 1) == "delta");
  CHECK(g.label(g.vertex_at(1, -2)) == "(1,-2)");
}

TEST_CASE("from_edges merges parallel edges and drops loops") {
  const std::vector<EdgeSpec> edges{
      {0, 1, 1.5}, {1, 0, 0.5}, {1, 1, 3.0}, {1, 2, 1.0}};
  const Graph g = Graph::from_edges(edges, 0L);
  CHECK(g.vertex_count() == 3);
  CHECK(g.edge_count() == 2);
  CHECK(g.conductance(0, 1) == 2.0);
  CHECK(g.conductance(1, 2) == 1.0);
  CHECK(g.conductance(0, 2) == 0.0);
}

TEST_CASE("from_edges validates") {
  CHECK_THROWS_AS(
      Graph::from_edges(std::vector<EdgeSpec>{{0, 1, -1.0}}, std::nullopt),
      std::invalid_argument);
  // disconnected
  CHECK_THROWS_AS(Graph::from_edges(
                      std::vector<EdgeSpec>{{0, 1, 1.0}, {2, 3, 1.0}}, 0L),
                  std::runtime_error);
  // missing root id
  CHECK_THROWS_AS(Graph::from_edges(std::vector<EdgeSpec>{{0, 1, 1.0}}, 5L),
                  std::invalid_argument);
}

TEST_CASE("edge list round trip") {
  const Graph g = triangle_graph(1.0, 2.0, 0.25);
  std::stringstream ss;
  g.write_edge_list(ss);
  const Graph back = Graph::read_edge_list(ss, 0L);
  CHECK(back.vertex_count() == 3);
  CHECK(back.conductance(0, 2) == 2.0);
  CHECK(back.structure_hash() == g.structure_hash());
}

TEST_CASE("arcs: each undirected edge appears once per orientation") {
  Rng rng(7);
  const Graph g = Graph::z2_box(2, 0.5, 1.5);
  CHECK(g.arcs().size() == 2 * static_cast<std::size_t>(g.edge_count()));
  // directed sums decompose into the two orientations, for several g
  std::vector<double> u(g.vertex_count());
  for (auto& x : u) x = rng.normal();
  for (auto fn : {+[](double x) { return x; }, +[](double x) { return x * x; },
                  +[](double x) { return std::exp(x); }}) {
    double by_arcs = 0.0;
    for (const Arc& a : g.arcs()) by_arcs += fn(gradient(u, a));
    double by_edges = 0.0;
    for (const Edge& e : g.edges())
      by_edges += fn(u[e.b] - u[e.a]) + fn(u[e.a] - u[e.b]);
    CHECK(by_arcs == doctest::Approx(by_edges).epsilon(1e-12));
  }
}

TEST_CASE("gradient: antisymmetry and errors") {
  const Graph g = two_vertex_graph();
  std::vector<double> u{0.0, 3.0};
  CHECK(gradient(g, u, 0, 1) == 3.0);
  CHECK(gradient(g, u, 1, 0) == -3.0);
  CHECK_THROWS_AS(gradient(g, u, 0, 7), std::out_of_range);

  Rng rng(3);
  const Graph box = Graph::z2_box(2, 1.0, 1.0);
  std::vector<double> v(box.vertex_count());
  for (auto& x : v) x = rng.normal();
  for (const Arc& a : box.arcs()) {
    const Arc reversed{a.to, a.from, a.weight};
    CHECK(gradient(v, a) + gradient(v, reversed) == 0.0);
  }
  std::vector<double> zero(box.vertex_count(), 0.0);
  for (const Arc& a : box.arcs()) CHECK(gradient(zero, a) == 0.0);
}

TEST_CASE("dirichlet energy closed forms") {
  const Graph path = path_graph(3);
  CHECK(dirichlet_energy(path, std::vector<double>{0.0, 0.5, 1.0}) ==
        doctest::Approx(0.5).epsilon(1e-15));
  const Graph cyc = cycle_graph(4);
  CHECK(dirichlet_energy(cyc, std::vector<double>{0.0, 0.5, 1.0, 0.5}) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(dirichlet_energy(path, std::vector<double>{2.0, 2.0, 2.0}) == 0.0);
}

TEST_CASE("dirichlet energy: nonnegative, zero only for constants") {
  Rng rng(11);
  const Graph g = Graph::z2_box(2, 1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> f(g.vertex_count());
    for (auto& x : f) x = rng.normal();
    const double e = dirichlet_energy(g, f);
    CHECK(e >= 0.0);
    bool constant = true;
    for (double x : f) constant = constant && x == f[0];
    if (!constant) CHECK(e > 0.0);
  }
  CHECK_THROWS_AS(dirichlet_energy(g, std::vector<double>{1.0}),
                  std::invalid_argument);
}
