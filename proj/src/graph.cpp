#include "vrjplab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "vrjplab/util.hpp"

namespace vrjp {

namespace {

constexpr long kBoundaryId = -1;  // internal marker while building boxes

}  // namespace

Graph Graph::from_edges(std::span<const EdgeSpec> edges,
                        std::optional<long> root_id) {
  if (edges.empty()) throw std::invalid_argument("graph: no edges");

  std::vector<long> ids;
  for (const auto& e : edges) {
    ids.push_back(e.a);
    ids.push_back(e.b);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  auto dense = [&](long id) {
    return static_cast<int>(
        std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };

  std::map<std::pair<int, int>, double> merged;
  for (const auto& e : edges) {
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw std::invalid_argument("graph: conductances must be positive");
    if (e.a == e.b) continue;  // contraction loops are dropped
    int a = dense(e.a), b = dense(e.b);
    if (a > b) std::swap(a, b);
    merged[{a, b}] += e.weight;  // parallel edges merge by conductance sum
  }
  if (merged.empty()) throw std::invalid_argument("graph: only self-loops");

  Graph g;
  g.n_ = static_cast<int>(ids.size());
  g.ids_ = std::move(ids);
  for (const auto& [key, w] : merged) g.edges_.push_back({key.first, key.second, w});

  if (root_id) {
    auto it = std::lower_bound(g.ids_.begin(), g.ids_.end(), *root_id);
    if (it == g.ids_.end() || *it != *root_id)
      throw std::invalid_argument("graph: root id not present");
    g.root_ = static_cast<int>(it - g.ids_.begin());
  } else {
    g.root_ = 0;
  }

  g.finalize();
  return g;
}

Graph Graph::z2_box(int radius, double horizontal_w, double vertical_w) {
  if (radius < 1) throw std::invalid_argument("z2_box: radius must be >= 1");
  if (!(horizontal_w > 0.0) || !(vertical_w > 0.0))
    throw std::invalid_argument("z2_box: conductances must be positive");

  const int side = 2 * radius + 1;
  const long boundary = static_cast<long>(side) * side;
  auto index = [&](int x, int y) {
    return static_cast<long>(y + radius) * side + (x + radius);
  };

  std::vector<EdgeSpec> edges;
  std::vector<double> to_boundary(static_cast<std::size_t>(boundary), 0.0);
  for (int y = -radius; y <= radius; ++y) {
    for (int x = -radius; x <= radius; ++x) {
      const long v = index(x, y);
      if (x + 1 <= radius)
        edges.push_back({v, index(x + 1, y), horizontal_w});
      else
        to_boundary[v] += horizontal_w;
      if (x - 1 < -radius) to_boundary[v] += horizontal_w;
      if (y + 1 <= radius)
        edges.push_back({v, index(x, y + 1), vertical_w});
      else
        to_boundary[v] += vertical_w;
      if (y - 1 < -radius) to_boundary[v] += vertical_w;
    }
  }
  for (long v = 0; v < boundary; ++v)
    if (to_boundary[v] > 0.0) edges.push_back({v, boundary, to_boundary[v]});

  Graph g = from_edges(edges, index(0, 0));
  g.box_radius_ = radius;
  g.box_wh_ = horizontal_w;
  g.box_wv_ = vertical_w;
  (void)kBoundaryId;
  return g;
}

Graph Graph::read_edge_list(std::istream& in, std::optional<long> root_id) {
  std::vector<EdgeSpec> edges;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    long a, b;
    double w;
    if (!(ls >> a)) continue;  // blank
    if (!(ls >> b >> w)) {
      throw std::invalid_argument("edge list: malformed line " +
                                  std::to_string(lineno) + ": '" + line + "'");
    }
    edges.push_back({a, b, w});
  }
  return from_edges(edges, root_id);
}

void Graph::write_edge_list(std::ostream& out) const {
  out << "# vertices " << n_ << " edges " << edges_.size() << " root "
      << ids_[root_] << "\n";
  if (is_box()) {
    out << "# box radius " << box_radius_
        << "; ordering row-major (y then x), boundary vertex last; "
        << "index(x,y) = (y+N)*(2N+1) + (x+N)\n";
  }
  for (const auto& e : edges_)
    out << ids_[e.a] << " " << ids_[e.b] << " " << format_double(e.weight)
        << "\n";
}

void Graph::finalize() {
  std::sort(edges_.begin(), edges_.end(), [](const Edge& l, const Edge& r) {
    return std::pair(l.a, l.b) < std::pair(r.a, r.b);
  });

  arcs_.clear();
  for (const auto& e : edges_) {
    arcs_.push_back({e.a, e.b, e.weight});
    arcs_.push_back({e.b, e.a, e.weight});
  }

  std::vector<std::vector<std::pair<int, double>>> adj(n_);
  for (const auto& e : edges_) {
    adj[e.a].push_back({e.b, e.weight});
    adj[e.b].push_back({e.a, e.weight});
  }
  adj_offset_.assign(n_ + 1, 0);
  adj_flat_.clear();
  for (int v = 0; v < n_; ++v) {
    std::sort(adj[v].begin(), adj[v].end());
    adj_offset_[v + 1] = adj_offset_[v] + static_cast<int>(adj[v].size());
    adj_flat_.insert(adj_flat_.end(), adj[v].begin(), adj[v].end());
  }

  // connectivity
  std::vector<char> seen(n_, 0);
  std::vector<int> stack{root_};
  seen[root_] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (const auto& [w, _] : neighbors(v)) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  if (reached != n_) throw std::runtime_error("graph: not connected");
}

std::span<const std::pair<int, double>> Graph::neighbors(int v) const {
  check_vertex(v);
  return {adj_flat_.data() + adj_offset_[v],
          static_cast<std::size_t>(adj_offset_[v + 1] - adj_offset_[v])};
}

int Graph::degree(int v) const {
  check_vertex(v);
  return adj_offset_[v + 1] - adj_offset_[v];
}

double Graph::conductance(int i, int j) const {
  check_vertex(i);
  check_vertex(j);
  const auto nb = neighbors(i);
  auto it = std::lower_bound(
      nb.begin(), nb.end(), j,
      [](const std::pair<int, double>& p, int v) { return p.first < v; });
  if (it != nb.end() && it->first == j) return it->second;
  return 0.0;
}

double Graph::max_conductance() const {
  double m = 0.0;
  for (const auto& e : edges_) m = std::max(m, e.weight);
  return m;
}

double Graph::conductance_bound_floor() const {
  if (is_box()) return std::max(box_wh_, box_wv_);
  return max_conductance();
}

std::optional<int> Graph::boundary_vertex() const {
  if (!is_box()) return std::nullopt;
  return n_ - 1;
}

int Graph::vertex_at(int x, int y) const {
  if (!is_box()) throw std::logic_error("vertex_at: not a lattice box");
  if (std::abs(x) > box_radius_ || std::abs(y) > box_radius_)
    throw std::out_of_range("vertex_at: outside box");
  const int side = 2 * box_radius_ + 1;
  return (y + box_radius_) * side + (x + box_radius_);
}

std::array<int, 2> Graph::coord(int v) const {
  check_vertex(v);
  if (!is_box()) throw std::logic_error("coord: not a lattice box");
  if (v == n_ - 1) throw std::out_of_range("coord: boundary vertex");
  const int side = 2 * box_radius_ + 1;
  return {v % side - box_radius_, v / side - box_radius_};
}

std::string Graph::label(int v) const {
  check_vertex(v);
  if (is_box()) {
    if (v == n_ - 1) return "delta";
    const auto c = coord(v);
    return "(" + std::to_string(c[0]) + "," + std::to_string(c[1]) + ")";
  }
  return std::to_string(ids_[v]);
}

void Graph::check_vertex(int v) const {
  if (v < 0 || v >= n_)
    throw std::out_of_range("graph: unknown vertex " + std::to_string(v));
}

std::uint64_t Graph::structure_hash() const {
  std::uint64_t h = kFnvOffset;
  auto mix = [&h](const void* p, std::size_t len) { h = fnv1a64_bytes(p, len, h); };
  mix(&n_, sizeof(n_));
  mix(&root_, sizeof(root_));
  mix(&box_radius_, sizeof(box_radius_));
  for (const auto& e : edges_) {
    mix(&e.a, sizeof(e.a));
    mix(&e.b, sizeof(e.b));
    mix(&e.weight, sizeof(e.weight));
  }
  return h;
}

double gradient(const Graph& g, std::span<const double> u, int i, int j) {
  g.check_vertex(i);
  g.check_vertex(j);
  if (u.size() != static_cast<std::size_t>(g.vertex_count()))
    throw std::invalid_argument("gradient: field size mismatch");
  return u[j] - u[i];
}

double dirichlet_energy(const Graph& g, std::span<const double> f) {
  if (f.size() != static_cast<std::size_t>(g.vertex_count()))
    throw std::invalid_argument("dirichlet_energy: field size mismatch");
  double sum = 0.0;
  for (const Arc& e : g.arcs()) {
    const double d = gradient(f, e);
    sum += d * d;
  }
  return 0.5 * sum;
}

}  // namespace vrjp
