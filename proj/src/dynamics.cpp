#include "vrjplab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "vrjplab/rng.hpp"
#include "vrjplab/util.hpp"

namespace vrjp {

namespace {

Trajectory simulate_jump_process(const Graph& g, int start, int jumps,
                                 std::uint64_t seed, bool reinforced,
                                 const FieldSample* env) {
  g.check_vertex(start);
  if (jumps < 1) throw std::invalid_argument("simulate: jumps must be >= 1");

  Rng rng(seed);
  Trajectory t;
  t.start = start;
  t.local_times.assign(g.vertex_count(), 1.0);

  int cur = start;
  double now = 0.0;
  std::vector<double> rates;
  for (int step = 0; step < jumps; ++step) {
    const auto nb = g.neighbors(cur);
    rates.clear();
    double total = 0.0;
    for (const auto& [j, w] : nb) {
      const double r = reinforced
                           ? w * t.local_times[j]
                           : 0.5 * w * std::exp((*env)[j] - (*env)[cur]);
      rates.push_back(r);
      total += r;
    }
    const double hold = rng.exponential(total);
    now += hold;
    t.local_times[cur] += hold;
    cur = nb[rng.categorical(rates, total)].first;
    t.events.push_back({now, cur});
  }
  return t;
}

void enumerate_sequences(const Graph& g, int from, int horizon,
                         std::vector<int>& prefix,
                         std::vector<std::vector<int>>& out) {
  if (static_cast<int>(prefix.size()) == horizon) {
    out.push_back(prefix);
    return;
  }
  for (const auto& [j, w] : g.neighbors(from)) {
    (void)w;
    prefix.push_back(j);
    enumerate_sequences(g, j, horizon, prefix, out);
    prefix.pop_back();
  }
}

std::vector<std::vector<int>> all_sequences(const Graph& g, int start,
                                            int horizon) {
  if (horizon < 1 || horizon > 4)
    throw std::invalid_argument(
        "jump chain law: horizon must be in 1..4 (enumerable sequence space)");
  std::vector<std::vector<int>> out;
  std::vector<int> prefix;
  enumerate_sequences(g, start, horizon, prefix, out);
  return out;
}

}  // namespace

Trajectory simulate_vrjp(const Graph& g, int start, int jumps,
                         std::uint64_t seed) {
  return simulate_jump_process(g, start, jumps, seed, true, nullptr);
}

Trajectory simulate_quenched(const Graph& g, const FieldSample& u, int start,
                             int jumps, std::uint64_t seed) {
  if (u.size() != g.vertex_count())
    throw std::invalid_argument("simulate: field size mismatch");
  return simulate_jump_process(g, start, jumps, seed, false, &u);
}

std::vector<double> quenched_jump_probabilities(const Graph& g,
                                                const FieldSample& u,
                                                int from) {
  g.check_vertex(from);
  const auto nb = g.neighbors(from);
  std::vector<double> p;
  p.reserve(nb.size());
  double total = 0.0;
  for (const auto& [j, w] : nb) {
    const double r = w * std::exp(u[j]);  // e^{-u_from} cancels
    p.push_back(r);
    total += r;
  }
  for (auto& x : p) x /= total;
  return p;
}

SequenceLaw vrjp_jump_chain_law(const Graph& g, int start, int horizon,
                                std::uint64_t runs, std::uint64_t seed,
                                int threads) {
  g.check_vertex(start);
  if (runs < 1) throw std::invalid_argument("jump chain law: runs must be >= 1");

  SequenceLaw law;
  law.start = start;
  law.horizon = horizon;
  law.sequences = all_sequences(g, start, horizon);
  law.sample_count = runs;

  std::map<std::vector<int>, int> slot;
  for (std::size_t i = 0; i < law.sequences.size(); ++i)
    slot[law.sequences[i]] = static_cast<int>(i);

  const int shards = std::max(1, std::min<int>(threads * 4, 64));
  std::vector<std::vector<std::uint64_t>> counts(
      shards, std::vector<std::uint64_t>(law.sequences.size(), 0));
  const std::uint64_t per = runs / shards;
  const std::uint64_t extra = runs % shards;

  parallel_for(shards, threads, [&](int shard) {
    const std::uint64_t begin = shard * per + std::min<std::uint64_t>(shard, extra);
    const std::uint64_t end = begin + per + (static_cast<std::uint64_t>(shard) < extra ? 1 : 0);
    std::vector<int> seq(horizon);
    for (std::uint64_t run = begin; run < end; ++run) {
      const Trajectory t =
          simulate_vrjp(g, start, horizon, derive_seed(seed, run));
      for (int i = 0; i < horizon; ++i) seq[i] = t.events[i].vertex;
      ++counts[shard][slot.at(seq)];
    }
  });

  std::vector<std::uint64_t> total(law.sequences.size(), 0);
  for (const auto& c : counts)
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += c[i];

  law.probability.resize(law.sequences.size());
  law.std_error.resize(law.sequences.size());
  for (std::size_t i = 0; i < total.size(); ++i) {
    const double p = static_cast<double>(total[i]) / runs;
    law.probability[i] = p;
    law.std_error[i] = std::sqrt(p * (1.0 - p) / runs);
  }
  return law;
}

SequenceLaw quenched_mixture_law(
    const Graph& g, int start, int horizon,
    std::span<const std::vector<FieldSample>> chains) {
  g.check_vertex(start);
  SequenceLaw law;
  law.start = start;
  law.horizon = horizon;
  law.sequences = all_sequences(g, start, horizon);
  law.exact_probabilities = true;

  const std::size_t ns = law.sequences.size();
  std::vector<std::vector<double>> chain_mean;
  std::uint64_t total_fields = 0;

  for (const auto& fields : chains) {
    if (fields.empty()) continue;
    std::vector<double> acc(ns, 0.0);
    for (const FieldSample& u : fields) {
      // exact jump-chain probabilities at this environment
      for (std::size_t i = 0; i < ns; ++i) {
        double p = 1.0;
        int from = start;
        for (int step = 0; step < horizon; ++step) {
          const auto nb = g.neighbors(from);
          double total = 0.0, chosen = 0.0;
          const int to = law.sequences[i][step];
          for (const auto& [j, w] : nb) {
            const double r = w * std::exp(u[j]);
            total += r;
            if (j == to) chosen = r;
          }
          p *= chosen / total;
          from = to;
        }
        acc[i] += p;
      }
      ++total_fields;
    }
    for (auto& x : acc) x /= fields.size();
    chain_mean.push_back(std::move(acc));
  }
  if (chain_mean.empty())
    throw std::invalid_argument("mixture law: no field samples");
  law.sample_count = total_fields;

  law.probability.assign(ns, 0.0);
  for (const auto& cm : chain_mean)
    for (std::size_t i = 0; i < ns; ++i) law.probability[i] += cm[i];
  for (auto& p : law.probability) p /= chain_mean.size();

  law.std_error.assign(ns, 0.0);
  const std::size_t c = chain_mean.size();
  if (c >= 2) {
    for (std::size_t i = 0; i < ns; ++i) {
      double v = 0.0;
      for (const auto& cm : chain_mean)
        v += (cm[i] - law.probability[i]) * (cm[i] - law.probability[i]);
      v /= (c - 1);
      law.std_error[i] = std::sqrt(v / c);
    }
  } else {
    // single group: fall back to the per-sample spread
    for (std::size_t i = 0; i < ns; ++i)
      law.std_error[i] = std::numeric_limits<double>::quiet_NaN();
  }
  return law;
}

LawDistance law_distance(const SequenceLaw& a, const SequenceLaw& b) {
  if (a.sequences != b.sequences)
    throw std::invalid_argument("law distance: sequence sets differ");
  LawDistance d;
  double var = 0.0;
  for (std::size_t i = 0; i < a.sequences.size(); ++i) {
    d.total_variation += std::abs(a.probability[i] - b.probability[i]);
    var = a.std_error[i] * a.std_error[i] + b.std_error[i] * b.std_error[i];
    d.combined_error += std::sqrt(var);
  }
  d.total_variation *= 0.5;
  d.combined_error *= 0.5;
  return d;
}

}  // namespace vrjp
