#include "vrjplab/field.hpp"

#include <cmath>
#include <stdexcept>

namespace vrjp {

FieldSample::FieldSample(const Graph& g, std::vector<double> values)
    : values_(std::move(values)), root_(g.root()) {
  if (values_.size() != static_cast<std::size_t>(g.vertex_count()))
    throw std::invalid_argument("field: size mismatch");
  for (double x : values_)
    if (!std::isfinite(x)) throw std::invalid_argument("field: non-finite entry");
  if (values_[root_] != 0.0)
    throw std::invalid_argument("field: not pinned at the root");
}

FieldSample FieldSample::zeros(const Graph& g) {
  return FieldSample(g, std::vector<double>(g.vertex_count(), 0.0));
}

FieldSample FieldSample::shifted(const Graph& g, const FieldSample& u,
                                 std::span<const double> dir, double gamma) {
  if (dir.size() != u.values().size())
    throw std::invalid_argument("field: direction size mismatch");
  if (dir[u.root()] != 0.0)
    throw std::invalid_argument("field: direction not pinned at the root");
  std::vector<double> out(u.values().begin(), u.values().end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += gamma * dir[i];
  return FieldSample(g, std::move(out));
}

}  // namespace vrjp
