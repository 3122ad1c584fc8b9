#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vrjplab/field.hpp"
#include "vrjplab/graph.hpp"

namespace vrjp {

struct SamplerConfig {
  double step = 1.0;  // random-walk proposal std dev (starting value if adapting)
  int burnin_sweeps = 1000;
  int thin = 1;
  int chains = 4;
  int samples_per_chain = 10000;  // retained per chain
  std::uint64_t seed = 1;
  int refresh_period = 64;          // sweeps between full refactorizations
  double refresh_drift_tol = 1e-6;  // hard failure threshold at a refresh
  bool adapt_step = true;           // burn-in only, toward ~30% acceptance
  // Collective moves per sweep shifting every non-root coordinate by one
  // scalar; the field is pinned at a single vertex, so this level mode is by
  // far the slowest under single-site updates. 0 disables.
  int level_moves = 1;
  bool keep_full_samples = false;
  std::string abort_dump_path;  // non-finite states persisted here ("" = cwd)

  void validate() const;  // throws std::invalid_argument
};

// Incremental log-density machinery for single-site Metropolis updates.
// Maintains the inverse of the root minor of diag(d(u)) - W together with a
// running log-determinant. A single-site move perturbs the diagonal at the
// site and its neighbours, so the determinant ratio is the matrix determinant
// lemma det(I + diag(dd) S) with S the touched block of the inverse, and the
// inverse is updated in place by the Woodbury identity. refresh()
// refactorizes from scratch and reports the accumulated drift.
class ChainState {
 public:
  ChainState(const Graph& g, FieldSample start);

  struct Proposal {
    int vertex = -1;  // -1: level shift of every non-root coordinate
    double value = 0.0;
    double delta_log_density = 0.0;
    double delta_log_tree = 0.0;
    double delta_interaction = 0.0;
    std::vector<int> touched;  // minor indices, site first
    Eigen::VectorXd delta_diag;
    Eigen::MatrixXd lemma_matrix;  // I + diag(delta_diag) * S
    bool needs_refresh = false;    // lemma route broke down, exact fallback used
  };

  Proposal propose(int vertex, double value) const;
  // u_v += delta for every v != root: gradients change only on root edges and
  // the minor diagonal only at the root's neighbours, so the same determinant
  // lemma applies.
  Proposal propose_level_shift(double delta) const;
  void accept(const Proposal& p);

  // Full refactorization; returns |running - fresh| log-determinant drift.
  double refresh();

  const std::vector<double>& field() const { return u_; }
  double log_tree() const { return log_tree_; }
  double log_density_value() const {
    return log_const_ - 0.5 * interaction_ + 0.5 * log_tree_;
  }
  const Graph& graph() const { return *g_; }

 private:
  void recompute();

  const Graph* g_;
  std::vector<double> u_;
  Eigen::VectorXd diag_;     // d(u) over all vertices
  Eigen::MatrixXd inverse_;  // inverse of the root minor
  double log_tree_ = 0.0;
  double interaction_ = 0.0;
  double log_const_ = 0.0;
};

struct ChainResult {
  std::vector<double> tracked;       // sample-major, tracked vertices per sample
  std::vector<double> full_samples;  // sample-major, all vertices (optional)
  double acceptance_rate = 0.0;      // post burn-in
  double final_step = 0.0;
  double max_refresh_drift = 0.0;     // max |running - fresh| over refreshes
  double max_drift_per_sweep = 0.0;   // same, divided by the window length
  std::uint64_t sweeps = 0;
};

// Independent single-site Metropolis chains started from u = 0, one RNG
// stream per chain derived from the master seed; results are merged by chain
// index, so they do not depend on thread scheduling. Throws std::runtime_error
// when the incremental log-determinant drifts beyond the tolerance at a
// refresh, or when a non-finite log density appears (the offending state is
// persisted first).
std::vector<ChainResult> sample_chains(const Graph& g, const SamplerConfig& cfg,
                                       std::span<const int> tracked_vertices,
                                       int threads = 1);

struct MomentEstimate {
  int vertex = -1;
  double s = 1.0;
  double estimate = 0.0;
  double std_error = 0.0;  // NaN when fewer than 2 chains
  bool std_error_valid = false;
  double ess = 0.0;  // batch-means effective sample size, summed over chains
  std::vector<double> chain_means;
  std::vector<double> chain_max;  // heavy-tail monitor
  std::uint64_t total_samples = 0;
  int chains = 0;
};

// Empirical mean of e^{s u_y} over retained samples; standard error from
// per-chain mean variability. tracked_count is the length of the tracked
// vertex list passed to sample_chains, tracked_slot the position of y in it.
// Requires s in (0, 1].
MomentEstimate estimate_exp_moment(const std::vector<ChainResult>& results,
                                   int tracked_count, int tracked_slot,
                                   int vertex, double s);

// Rebuilds FieldSamples from full samples (keep_full_samples must be on),
// grouped per chain.
std::vector<std::vector<FieldSample>> collect_fields(
    const Graph& g, const std::vector<ChainResult>& results);

}  // namespace vrjp
