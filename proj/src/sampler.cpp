#include "vrjplab/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "vrjplab/laplacian.hpp"
#include "vrjplab/mixing.hpp"
#include "vrjplab/rng.hpp"
#include "vrjplab/util.hpp"

namespace vrjp {

void SamplerConfig::validate() const {
  if (!(step > 0.0)) throw std::invalid_argument("sampler: step must be > 0");
  if (burnin_sweeps < 0) throw std::invalid_argument("sampler: negative burn-in");
  if (thin < 1) throw std::invalid_argument("sampler: thinning must be >= 1");
  if (chains < 1) throw std::invalid_argument("sampler: chains must be >= 1");
  if (samples_per_chain < 1)
    throw std::invalid_argument("sampler: samples must be >= 1");
  if (refresh_period < 1)
    throw std::invalid_argument("sampler: refresh period must be >= 1");
}

ChainState::ChainState(const Graph& g, FieldSample start)
    : g_(&g),
      u_(start.values().begin(), start.values().end()),
      log_const_(log_normalization_constant(g)) {
  if (start.root() != g.root())
    throw std::invalid_argument("chain state: field does not match graph");
  recompute();
}

void ChainState::recompute() {
  diag_ = laplacian_diagonal(*g_, u_);
  const int n = g_->vertex_count();
  const int root = g_->root();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n - 1, n - 1);
  for (int v = 0; v < n; ++v)
    if (v != root) m(minor_index(v, root), minor_index(v, root)) = diag_[v];
  for (const Edge& e : g_->edges()) {
    if (e.a == root || e.b == root) continue;
    m(minor_index(e.a, root), minor_index(e.b, root)) = -e.weight;
    m(minor_index(e.b, root), minor_index(e.a, root)) = -e.weight;
  }

  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) {
    double acc = 0.0;
    for (int i = 0; i < n - 1; ++i) acc += std::log(llt.matrixLLT()(i, i));
    log_tree_ = 2.0 * acc;
    inverse_ = llt.solve(Eigen::MatrixXd::Identity(n - 1, n - 1));
  } else {
    log_tree_ = spd_log_det(m);
    inverse_ = m.partialPivLu().inverse();
  }
  inverse_ = 0.5 * (inverse_ + inverse_.transpose().eval());

  double acc = 0.0;
  for (const Arc& e : g_->arcs())
    acc += e.weight * std::expm1(u_[e.to] - u_[e.from]);
  interaction_ = acc;
}

ChainState::Proposal ChainState::propose(int vertex, double value) const {
  g_->check_vertex(vertex);
  const int root = g_->root();
  if (vertex == root)
    throw std::invalid_argument("chain state: the root coordinate is pinned");

  Proposal p;
  p.vertex = vertex;
  p.value = value;
  const double old = u_[vertex];
  const double delta = value - old;

  double dint = 0.0;
  for (const auto& [j, w] : g_->neighbors(vertex)) {
    dint += w * (std::exp(u_[j] - value) - std::exp(u_[j] - old));
    dint += w * (std::exp(value - u_[j]) - std::exp(old - u_[j]));
  }
  p.delta_interaction = dint;

  p.touched.push_back(minor_index(vertex, root));
  std::vector<double> dd{diag_[vertex] * std::expm1(-delta)};
  for (const auto& [j, w] : g_->neighbors(vertex)) {
    if (j == root) continue;
    p.touched.push_back(minor_index(j, root));
    dd.push_back(w * std::exp(old - u_[j]) * std::expm1(delta));
  }
  const int m = static_cast<int>(p.touched.size());
  p.delta_diag = Eigen::Map<const Eigen::VectorXd>(dd.data(), m);

  Eigen::MatrixXd s(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) s(a, b) = inverse_(p.touched[a], p.touched[b]);
  p.lemma_matrix = Eigen::MatrixXd::Identity(m, m);
  p.lemma_matrix.noalias() += p.delta_diag.asDiagonal() * s;

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(p.lemma_matrix);
  double log_abs = 0.0;
  double sign = lu.permutationP().determinant();
  for (int i = 0; i < m; ++i) {
    const double piv = lu.matrixLU()(i, i);
    if (piv < 0.0)
      sign = -sign;
    else if (piv == 0.0)
      sign = 0.0;
    log_abs += std::log(std::abs(piv));
  }

  if (sign > 0.0 && std::isfinite(log_abs)) {
    p.delta_log_tree = log_abs;
  } else {
    // Lemma route broke down numerically; fall back to an exact
    // refactorization of the candidate state.
    std::vector<double> cand = u_;
    cand[vertex] = value;
    p.delta_log_tree =
        log_tree_polynomial(*g_, FieldSample(*g_, cand)) - log_tree_;
    p.needs_refresh = true;
  }
  p.delta_log_density = -0.5 * p.delta_interaction + 0.5 * p.delta_log_tree;
  return p;
}

ChainState::Proposal ChainState::propose_level_shift(double delta) const {
  const int root = g_->root();
  Proposal p;
  p.vertex = -1;
  p.value = delta;

  // only gradients across root edges move
  double dint = 0.0;
  for (const auto& [j, w] : g_->neighbors(root)) {
    dint += w * (std::exp(u_[j] + delta) - std::exp(u_[j]));
    dint += w * (std::exp(-u_[j] - delta) - std::exp(-u_[j]));
  }
  p.delta_interaction = dint;

  std::vector<double> dd;
  for (const auto& [j, w] : g_->neighbors(root)) {
    p.touched.push_back(minor_index(j, root));
    dd.push_back(w * std::exp(-u_[j]) * std::expm1(-delta));
  }
  const int m = static_cast<int>(p.touched.size());
  p.delta_diag = Eigen::Map<const Eigen::VectorXd>(dd.data(), m);

  Eigen::MatrixXd s(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) s(a, b) = inverse_(p.touched[a], p.touched[b]);
  p.lemma_matrix = Eigen::MatrixXd::Identity(m, m);
  p.lemma_matrix.noalias() += p.delta_diag.asDiagonal() * s;

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(p.lemma_matrix);
  double log_abs = 0.0;
  double sign = lu.permutationP().determinant();
  for (int i = 0; i < m; ++i) {
    const double piv = lu.matrixLU()(i, i);
    if (piv < 0.0)
      sign = -sign;
    else if (piv == 0.0)
      sign = 0.0;
    log_abs += std::log(std::abs(piv));
  }
  if (sign > 0.0 && std::isfinite(log_abs)) {
    p.delta_log_tree = log_abs;
  } else {
    std::vector<double> cand = u_;
    for (int v = 0; v < g_->vertex_count(); ++v)
      if (v != root) cand[v] += delta;
    p.delta_log_tree =
        log_tree_polynomial(*g_, FieldSample(*g_, cand)) - log_tree_;
    p.needs_refresh = true;
  }
  p.delta_log_density = -0.5 * p.delta_interaction + 0.5 * p.delta_log_tree;
  return p;
}

void ChainState::accept(const Proposal& p) {
  const int root = g_->root();
  if (p.vertex >= 0) {
    u_[p.vertex] = p.value;
  } else {
    for (int v = 0; v < g_->vertex_count(); ++v)
      if (v != root) u_[v] += p.value;
  }
  interaction_ += p.delta_interaction;
  log_tree_ += p.delta_log_tree;
  if (p.needs_refresh) {
    recompute();
    return;
  }
  for (std::size_t a = 0; a < p.touched.size(); ++a) {
    const int v = p.touched[a] < root ? p.touched[a] : p.touched[a] + 1;
    diag_[v] += p.delta_diag[a];
  }
  if (p.vertex < 0) diag_[root] *= std::exp(p.value);
  const int m = static_cast<int>(p.touched.size());
  const int nf = static_cast<int>(inverse_.rows());
  Eigen::MatrixXd cols(nf, m);
  Eigen::MatrixXd rows(m, nf);
  for (int a = 0; a < m; ++a) {
    cols.col(a) = inverse_.col(p.touched[a]);
    rows.row(a) = inverse_.row(p.touched[a]);
  }
  const Eigen::MatrixXd update =
      p.lemma_matrix.partialPivLu().solve(p.delta_diag.asDiagonal() * rows);
  inverse_.noalias() -= cols * update;
}

double ChainState::refresh() {
  const double running = log_tree_;
  recompute();
  return std::abs(running - log_tree_);
}

namespace {

void dump_abort_state(const Graph& g, const SamplerConfig& cfg, int chain,
                      std::uint64_t sweep, int vertex, double value,
                      const std::vector<double>& u, const std::string& reason) {
  nlohmann::ordered_json j;
  j["reason"] = reason;
  j["seed"] = cfg.seed;
  j["chain"] = chain;
  j["sweep"] = sweep;
  j["vertex"] = vertex;
  j["proposed_value"] = value;
  j["graph_hash"] = hex64(g.structure_hash());
  j["field"] = u;
  std::string path = cfg.abort_dump_path;
  if (path.empty())
    path = "vrjp_abort_chain" + std::to_string(chain) + ".json";
  std::ofstream out(path);
  out << j.dump(2) << "\n";
}

ChainResult run_chain(const Graph& g, const SamplerConfig& cfg, int chain,
                      std::span<const int> tracked) {
  Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(chain));
  ChainState state(g, FieldSample::zeros(g));

  const int n = g.vertex_count();
  const int root = g.root();
  const std::uint64_t post_sweeps =
      static_cast<std::uint64_t>(cfg.thin) * cfg.samples_per_chain;
  const std::uint64_t total =
      static_cast<std::uint64_t>(cfg.burnin_sweeps) + post_sweeps;

  ChainResult result;
  result.tracked.reserve(tracked.size() * cfg.samples_per_chain);
  if (cfg.keep_full_samples)
    result.full_samples.reserve(static_cast<std::size_t>(n) *
                                cfg.samples_per_chain);

  double step = cfg.step;
  double level_step = cfg.step;
  std::uint64_t accepted = 0, proposed = 0;
  int since_refresh = 0;

  auto guard_finite = [&](const ChainState::Proposal& prop,
                          std::uint64_t sweep, int vertex, double candidate) {
    if (!std::isfinite(prop.delta_log_density) &&
        prop.delta_log_density != -std::numeric_limits<double>::infinity()) {
      dump_abort_state(g, cfg, chain, sweep, vertex, candidate, state.field(),
                       "non-finite log density change");
      throw std::runtime_error("sampler: non-finite log density (chain " +
                               std::to_string(chain) + ", sweep " +
                               std::to_string(sweep) + "); state persisted");
    }
  };

  for (std::uint64_t sweep = 0; sweep < total; ++sweep) {
    int accepted_sweep = 0;
    for (int v = 0; v < n; ++v) {
      if (v == root) continue;
      const double z = rng.normal();
      const double candidate = state.field()[v] + step * z;
      const auto prop = state.propose(v, candidate);
      guard_finite(prop, sweep, v, candidate);
      const double lnu = std::log(rng.uniform_pos());
      if (lnu < prop.delta_log_density) {
        state.accept(prop);
        ++accepted_sweep;
      }
    }
    int accepted_level = 0;
    for (int lm = 0; lm < cfg.level_moves; ++lm) {
      const double delta = level_step * rng.normal();
      const auto prop = state.propose_level_shift(delta);
      guard_finite(prop, sweep, -1, delta);
      if (std::log(rng.uniform_pos()) < prop.delta_log_density) {
        state.accept(prop);
        ++accepted_level;
      }
    }

    ++since_refresh;
    if (since_refresh == cfg.refresh_period) {
      const double drift = state.refresh();
      result.max_refresh_drift = std::max(result.max_refresh_drift, drift);
      result.max_drift_per_sweep =
          std::max(result.max_drift_per_sweep, drift / since_refresh);
      if (drift > cfg.refresh_drift_tol) {
        throw std::runtime_error(
            "sampler: incremental log-determinant drift " +
            format_double(drift) + " exceeds tolerance " +
            format_double(cfg.refresh_drift_tol) + " (chain " +
            std::to_string(chain) + ", sweep " + std::to_string(sweep) + ")");
      }
      since_refresh = 0;
    }

    if (sweep < static_cast<std::uint64_t>(cfg.burnin_sweeps)) {
      if (cfg.adapt_step && n > 1) {
        const double rate =
            static_cast<double>(accepted_sweep) / static_cast<double>(n - 1);
        step *= std::exp(0.08 * (rate - 0.30));
        step = std::clamp(step, 1e-6, 50.0);
        if (cfg.level_moves > 0) {
          const double lrate = static_cast<double>(accepted_level) /
                               static_cast<double>(cfg.level_moves);
          level_step *= std::exp(0.08 * (lrate - 0.30));
          level_step = std::clamp(level_step, 1e-6, 50.0);
        }
      }
      continue;
    }

    accepted += accepted_sweep;
    proposed += n - 1;
    const std::uint64_t post = sweep - cfg.burnin_sweeps + 1;
    if (post % cfg.thin == 0) {
      for (int t : tracked) result.tracked.push_back(state.field()[t]);
      if (cfg.keep_full_samples)
        result.full_samples.insert(result.full_samples.end(),
                                   state.field().begin(), state.field().end());
    }
  }

  if (since_refresh > 0) {
    const double drift = state.refresh();
    result.max_refresh_drift = std::max(result.max_refresh_drift, drift);
    result.max_drift_per_sweep =
        std::max(result.max_drift_per_sweep, drift / since_refresh);
  }
  result.acceptance_rate =
      proposed ? static_cast<double>(accepted) / proposed : 0.0;
  result.final_step = step;
  result.sweeps = total;
  return result;
}

}  // namespace

std::vector<ChainResult> sample_chains(const Graph& g, const SamplerConfig& cfg,
                                       std::span<const int> tracked_vertices,
                                       int threads) {
  cfg.validate();
  for (int t : tracked_vertices) g.check_vertex(t);
  std::vector<ChainResult> results(cfg.chains);
  parallel_for(cfg.chains, threads, [&](int chain) {
    results[chain] = run_chain(g, cfg, chain, tracked_vertices);
  });
  return results;
}

MomentEstimate estimate_exp_moment(const std::vector<ChainResult>& results,
                                   int tracked_count, int tracked_slot,
                                   int vertex, double s) {
  if (!(s > 0.0) || s > 1.0)
    throw std::invalid_argument("exp moment: s must lie in (0, 1]");
  if (results.empty()) throw std::invalid_argument("exp moment: no chains");
  if (tracked_count < 1 || tracked_slot < 0 || tracked_slot >= tracked_count)
    throw std::invalid_argument("exp moment: invalid tracked slot");
  const std::size_t rec_width = static_cast<std::size_t>(tracked_count);
  for (const auto& chain : results)
    if (chain.tracked.size() % rec_width != 0)
      throw std::invalid_argument("exp moment: tracked layout mismatch");

  MomentEstimate est;
  est.vertex = vertex;
  est.s = s;
  est.chains = static_cast<int>(results.size());

  double total_ess = 0.0;
  std::uint64_t total_count = 0;
  for (const auto& chain : results) {
    const std::size_t m = chain.tracked.size() / rec_width;
    double sum = 0.0, maxv = -std::numeric_limits<double>::infinity();
    std::vector<double> xs(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double x = std::exp(s * chain.tracked[i * rec_width + tracked_slot]);
      xs[i] = x;
      sum += x;
      maxv = std::max(maxv, x);
    }
    const double mean = sum / m;
    est.chain_means.push_back(mean);
    est.chain_max.push_back(maxv);
    total_count += m;

    // batch-means ESS
    const std::size_t batches = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::sqrt(static_cast<double>(m))));
    const std::size_t bsize = m / batches;
    if (batches >= 2 && bsize >= 1) {
      double var = 0.0;
      for (double x : xs) var += (x - mean) * (x - mean);
      var /= (m - 1);
      double bvar = 0.0;
      for (std::size_t b = 0; b < batches; ++b) {
        double bm = 0.0;
        for (std::size_t i = 0; i < bsize; ++i) bm += xs[b * bsize + i];
        bm /= bsize;
        bvar += (bm - mean) * (bm - mean);
      }
      bvar /= (batches - 1);
      if (bvar > 0.0 && var > 0.0)
        total_ess += var * static_cast<double>(batches) / bvar;
      else
        total_ess += static_cast<double>(m);
    } else {
      total_ess += static_cast<double>(m);
    }
  }

  double grand = 0.0;
  for (double cm : est.chain_means) grand += cm;
  est.estimate = grand / est.chain_means.size();
  est.ess = std::min(total_ess, static_cast<double>(total_count));
  est.total_samples = total_count;

  if (est.chains >= 2) {
    double v = 0.0;
    for (double cm : est.chain_means)
      v += (cm - est.estimate) * (cm - est.estimate);
    v /= (est.chains - 1);
    est.std_error = std::sqrt(v / est.chains);
    est.std_error_valid = true;
  } else {
    est.std_error = std::numeric_limits<double>::quiet_NaN();
    est.std_error_valid = false;
  }
  return est;
}

std::vector<std::vector<FieldSample>> collect_fields(
    const Graph& g, const std::vector<ChainResult>& results) {
  std::vector<std::vector<FieldSample>> out;
  const std::size_t n = static_cast<std::size_t>(g.vertex_count());
  for (const auto& chain : results) {
    if (chain.full_samples.empty() || chain.full_samples.size() % n != 0)
      throw std::invalid_argument("collect_fields: full samples not kept");
    std::vector<FieldSample> fields;
    const std::size_t m = chain.full_samples.size() / n;
    fields.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> u(chain.full_samples.begin() + i * n,
                            chain.full_samples.begin() + (i + 1) * n);
      fields.emplace_back(g, std::move(u));
    }
    out.push_back(std::move(fields));
  }
  return out;
}

}  // namespace vrjp
