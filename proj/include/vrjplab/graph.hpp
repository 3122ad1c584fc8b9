#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace vrjp {

// One orientation of an undirected edge; arcs() yields each edge exactly
// twice, once per orientation, so sums "over i -> j" can be written literally.
struct Arc {
  int from;
  int to;
  double weight;
};

// Undirected edge with a < b.
struct Edge {
  int a;
  int b;
  double weight;
};

// Construction input in external vertex ids.
struct EdgeSpec {
  long a;
  long b;
  double weight;
};

// Finite connected graph with positive symmetric conductances, immutable after
// construction. Vertices carry a dense index 0..n-1. Lattice boxes are ordered
// by row-major scan (y ascending, then x ascending), with the contracted
// boundary vertex last; general graphs are ordered by ascending external id.
class Graph {
 public:
  // Merges parallel edges by summing conductances and drops self-loops.
  // Throws std::invalid_argument on non-positive weights or a missing root id,
  // std::runtime_error if the resulting graph is not connected.
  static Graph from_edges(std::span<const EdgeSpec> edges,
                          std::optional<long> root_id = std::nullopt);

  // Restriction of the square lattice to [-radius, radius]^2 with all outside
  // vertices contracted to a single boundary vertex; conductances of merged
  // boundary edges are summed. Horizontal edges carry horizontal_w, vertical
  // edges vertical_w. Root is the origin.
  static Graph z2_box(int radius, double horizontal_w, double vertical_w);

  // Text format: one line per edge "a b w"; '#' starts a comment.
  static Graph read_edge_list(std::istream& in,
                              std::optional<long> root_id = std::nullopt);
  void write_edge_list(std::ostream& out) const;

  int vertex_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int root() const { return root_; }

  std::span<const Arc> arcs() const { return arcs_; }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const std::pair<int, double>> neighbors(int v) const;
  int degree(int v) const;
  // 0 when i and j are not adjacent.
  double conductance(int i, int j) const;
  double max_conductance() const;
  // Largest conductance relevant for uniform bounds: the lattice values for a
  // wired box (contracted boundary edges merge several lattice edges and may
  // exceed them), the maximum edge conductance otherwise.
  double conductance_bound_floor() const;

  bool is_box() const { return box_radius_ > 0; }
  int box_radius() const { return box_radius_; }
  std::optional<int> boundary_vertex() const;
  // Boxes only; throws std::out_of_range outside the box.
  int vertex_at(int x, int y) const;
  std::array<int, 2> coord(int v) const;

  long vertex_id(int v) const { return ids_[v]; }
  std::string label(int v) const;

  void check_vertex(int v) const;

  std::uint64_t structure_hash() const;

 private:
  Graph() = default;
  void finalize();  // adjacency, arcs, connectivity check

  int n_ = 0;
  int root_ = 0;
  int box_radius_ = 0;
  double box_wh_ = 0.0;
  double box_wv_ = 0.0;
  std::vector<long> ids_;
  std::vector<Edge> edges_;
  std::vector<Arc> arcs_;
  std::vector<std::pair<int, double>> adj_flat_;
  std::vector<int> adj_offset_;
};

inline double gradient(std::span<const double> u, const Arc& e) {
  return u[e.to] - u[e.from];
}

// Gradient of u on the directed edge (i, j); validates the vertex ids.
double gradient(const Graph& g, std::span<const double> u, int i, int j);

// Unit-conductance Dirichlet form: half the sum over directed edges of the
// squared gradient of f.
double dirichlet_energy(const Graph& g, std::span<const double> f);

}  // namespace vrjp
