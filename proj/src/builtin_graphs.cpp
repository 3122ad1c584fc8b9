#include "vrjplab/builtin_graphs.hpp"

#include <stdexcept>
#include <vector>

namespace vrjp {

Graph two_vertex_graph(double w) {
  const EdgeSpec e{0, 1, w};
  return Graph::from_edges(std::span(&e, 1), 0L);
}

Graph triangle_graph(double w01, double w02, double w12) {
  const std::vector<EdgeSpec> edges{{0, 1, w01}, {0, 2, w02}, {1, 2, w12}};
  return Graph::from_edges(edges, 0L);
}

Graph path_graph(int k, double w, long root_id) {
  if (k < 2) throw std::invalid_argument("path: need at least 2 vertices");
  std::vector<EdgeSpec> edges;
  for (int i = 0; i + 1 < k; ++i) edges.push_back({i, i + 1, w});
  return Graph::from_edges(edges, root_id);
}

Graph cycle_graph(int k, double w) {
  if (k < 3) throw std::invalid_argument("cycle: need at least 3 vertices");
  std::vector<EdgeSpec> edges;
  for (int i = 0; i + 1 < k; ++i) edges.push_back({i, i + 1, w});
  edges.push_back({0, k - 1, w});
  return Graph::from_edges(edges, 0L);
}

}  // namespace vrjp
