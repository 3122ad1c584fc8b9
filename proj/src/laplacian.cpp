#include "vrjplab/laplacian.hpp"

#include <cmath>

namespace vrjp {

Eigen::VectorXd laplacian_diagonal(const Graph& g, std::span<const double> u) {
  const int n = g.vertex_count();
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (const auto& [j, w] : g.neighbors(i)) acc += w * std::exp(u[j]);
    d[i] = std::exp(-u[i]) * acc;
  }
  return d;
}

Eigen::MatrixXd laplacian_minor(const Graph& g, std::span<const double> u) {
  const int n = g.vertex_count();
  const int root = g.root();
  const Eigen::VectorXd d = laplacian_diagonal(g, u);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n - 1, n - 1);
  for (int v = 0; v < n; ++v)
    if (v != root) m(minor_index(v, root), minor_index(v, root)) = d[v];
  for (const Edge& e : g.edges()) {
    if (e.a == root || e.b == root) continue;
    const int a = minor_index(e.a, root);
    const int b = minor_index(e.b, root);
    m(a, b) = -e.weight;
    m(b, a) = -e.weight;
  }
  return m;
}

double spd_log_det(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) {
    const auto& l = llt.matrixLLT();
    double acc = 0.0;
    bool ok = true;
    for (int i = 0; i < m.rows(); ++i) {
      const double p = l(i, i);
      if (!(p > 0.0) || !std::isfinite(p)) {
        ok = false;
        break;
      }
      acc += std::log(p);
    }
    if (ok) return 2.0 * acc;
  }
  // Cholesky breakdown: pivoted LU still produces the determinant when it is
  // genuinely positive.
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const auto& lum = lu.matrixLU();
  double acc = 0.0;
  double sign = lu.permutationP().determinant();
  for (int i = 0; i < m.rows(); ++i) {
    const double p = lum(i, i);
    if (p < 0.0)
      sign = -sign;
    else if (p == 0.0)
      sign = 0.0;
    acc += std::log(std::abs(p));
  }
  if (sign <= 0.0 || !std::isfinite(acc))
    throw structural_error("tree polynomial: non-positive determinant");
  return acc;
}

}  // namespace vrjp
