#include "vrjplab/enumeration.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "vrjplab/util.hpp"

namespace vrjp {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

}  // namespace

std::vector<Arborescence> enumerate_arborescences(const Graph& g,
                                                  const FieldSample& u) {
  const int n = g.vertex_count();
  const int ne = g.edge_count();
  if (n > 8 || ne > 24)
    throw std::invalid_argument("enumeration oracle: graph too large");

  const auto edges = g.edges();
  std::vector<Arborescence> out;
  std::vector<int> pick(n - 1);
  std::iota(pick.begin(), pick.end(), 0);

  auto process = [&](const std::vector<int>& sel) {
    UnionFind uf(n);
    for (int ei : sel)
      if (!uf.unite(edges[ei].a, edges[ei].b)) return;  // cycle
    // n-1 acyclic edges on n vertices form a spanning tree; orient each edge
    // toward the root by walking parent pointers from a BFS.
    std::vector<std::vector<int>> tree(n);
    for (int ei : sel) {
      tree[edges[ei].a].push_back(edges[ei].b);
      tree[edges[ei].b].push_back(edges[ei].a);
    }
    std::vector<int> parent(n, -1), order{g.root()};
    std::vector<char> seen(n, 0);
    seen[g.root()] = 1;
    for (std::size_t i = 0; i < order.size(); ++i) {
      for (int w : tree[order[i]]) {
        if (!seen[w]) {
          seen[w] = 1;
          parent[w] = order[i];
          order.push_back(w);
        }
      }
    }
    Arborescence a;
    a.log_weight = 0.0;
    for (int v = 0; v < n; ++v) {
      if (v == g.root()) continue;
      const double w = g.conductance(v, parent[v]);
      a.arcs.push_back({v, parent[v], w});
      a.log_weight += std::log(w) + (u[parent[v]] - u[v]);
    }
    out.push_back(std::move(a));
  };

  // all subsets of size n-1
  if (n - 1 > ne) return out;
  for (;;) {
    process(pick);
    int i = n - 2;
    while (i >= 0 && pick[i] == ne - (n - 1) + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < n - 1; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

double enumeration_log_tree_polynomial(const Graph& g, const FieldSample& u) {
  const auto arbs = enumerate_arborescences(g, u);
  if (arbs.empty())
    throw std::runtime_error("enumeration oracle: no arborescence found");
  std::vector<double> logs;
  logs.reserve(arbs.size());
  for (const auto& a : arbs) logs.push_back(a.log_weight);
  return logsumexp(logs);
}

double arborescence_gradient_variance(const Graph& g, const FieldSample& u,
                                      std::span<const double> v, double gamma) {
  if (v.size() != static_cast<std::size_t>(g.vertex_count()))
    throw std::invalid_argument("gradient variance: size mismatch");
  const auto arbs = enumerate_arborescences(g, u);
  std::vector<double> logw(arbs.size());
  std::vector<double> stat(arbs.size());
  for (std::size_t i = 0; i < arbs.size(); ++i) {
    double x = 0.0;
    for (const Arc& a : arbs[i].arcs) x += v[a.to] - v[a.from];
    stat[i] = x;
    logw[i] = arbs[i].log_weight + gamma * x;
  }
  const double lz = logsumexp(logw);
  double mean = 0.0, second = 0.0;
  for (std::size_t i = 0; i < arbs.size(); ++i) {
    const double p = std::exp(logw[i] - lz);
    mean += p * stat[i];
    second += p * stat[i] * stat[i];
  }
  return second - mean * mean;
}

}  // namespace vrjp
