#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vrjplab/field.hpp"
#include "vrjplab/graph.hpp"

namespace vrjp {

struct JumpEvent {
  double time;
  int vertex;  // destination
};

struct Trajectory {
  int start = 0;
  std::vector<JumpEvent> events;    // strictly increasing times
  std::vector<double> local_times;  // 1 + total sojourn per vertex, at the
                                    // instant of the last jump
};

// Reinforced walk: from i, jumps to a neighbour j at rate W_ij L_j, where L_j
// is 1 plus the time spent at j. While sitting at i only L_i grows, so the
// neighbour rates are frozen: the holding time is exponential with the summed
// rate and the destination is drawn proportionally to W_ij L_j.
Trajectory simulate_vrjp(const Graph& g, int start, int jumps,
                         std::uint64_t seed);

// Markov jump process at a frozen environment u, rates (1/2) W_ij e^{u_j-u_i}.
Trajectory simulate_quenched(const Graph& g, const FieldSample& u, int start,
                             int jumps, std::uint64_t seed);

// Jump-chain transition probabilities out of `from` at environment u:
// W_ij e^{u_j} / sum_l W_il e^{u_l}, aligned with g.neighbors(from).
std::vector<double> quenched_jump_probabilities(const Graph& g,
                                                const FieldSample& u, int from);

// Law of the first `horizon` visited vertices; sequences are all
// neighbour-consistent paths from `start`, in lexicographic vertex order.
struct SequenceLaw {
  int start = 0;
  int horizon = 0;
  std::vector<std::vector<int>> sequences;
  std::vector<double> probability;
  std::vector<double> std_error;
  bool exact_probabilities = false;  // per-environment probabilities are exact
  std::uint64_t sample_count = 0;
};

// Empirical law of the reinforced walk's jump chain over `runs`
// simulations. Requires horizon <= 4 so the sequence space stays enumerable.
SequenceLaw vrjp_jump_chain_law(const Graph& g, int start, int horizon,
                                std::uint64_t runs, std::uint64_t seed,
                                int threads = 1);

// Environment mixture of the quenched jump-chain laws: per sampled field the
// sequence probabilities are exact closed-form products, only the average over
// fields is Monte Carlo. Standard errors come from per-group (chain) mean
// variability when more than one group is given.
SequenceLaw quenched_mixture_law(const Graph& g, int start, int horizon,
                                 std::span<const std::vector<FieldSample>> chains);

// Total variation distance (1/2 sum |p - q|) between two laws on the same
// sequence list, plus the combined standard error
// (1/2) * sum_seq sqrt(se_a^2 + se_b^2).
struct LawDistance {
  double total_variation = 0.0;
  double combined_error = 0.0;
};
LawDistance law_distance(const SequenceLaw& a, const SequenceLaw& b);

}  // namespace vrjp
