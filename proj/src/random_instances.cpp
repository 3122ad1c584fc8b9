#include "vrjplab/random_instances.hpp"

#include <cmath>

namespace vrjp {

Graph random_connected_graph(Rng& rng, int min_v, int max_v,
                             double extra_edge_p) {
  const int n = min_v + static_cast<int>(rng.uniform() * (max_v - min_v + 1));
  auto weight = [&rng] {
    return std::exp(std::log(0.2) +
                    rng.uniform() * (std::log(5.0) - std::log(0.2)));
  };
  std::vector<EdgeSpec> edges;
  std::vector<std::vector<char>> present(n, std::vector<char>(n, 0));
  for (int v = 1; v < n; ++v) {
    const int anchor = static_cast<int>(rng.uniform() * v);
    edges.push_back({anchor, v, weight()});
    present[anchor][v] = present[v][anchor] = 1;
  }
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (!present[a][b] && rng.uniform() < extra_edge_p)
        edges.push_back({a, b, weight()});
  return Graph::from_edges(edges, 0L);
}

std::vector<double> random_pinned_field(Rng& rng, const Graph& g,
                                        double scale) {
  std::vector<double> u(g.vertex_count());
  for (auto& x : u) x = scale * rng.normal();
  u[g.root()] = 0.0;
  return u;
}

}  // namespace vrjp
