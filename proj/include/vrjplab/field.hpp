#pragma once

#include <span>
#include <vector>

#include "vrjplab/graph.hpp"

namespace vrjp {

// Field configuration u : V -> R pinned to zero at the root. A nonzero root
// coordinate is a hard error everywhere; silent re-pinning would mask sampler
// bugs.
class FieldSample {
 public:
  FieldSample(const Graph& g, std::vector<double> values);

  static FieldSample zeros(const Graph& g);

  // u + gamma * dir; dir must vanish at the root so the sum stays pinned.
  static FieldSample shifted(const Graph& g, const FieldSample& u,
                             std::span<const double> dir, double gamma);

  double operator[](int v) const { return values_[v]; }
  std::span<const double> values() const { return values_; }
  int root() const { return root_; }
  int size() const { return static_cast<int>(values_.size()); }

 private:
  std::vector<double> values_;
  int root_;
};

}  // namespace vrjp
