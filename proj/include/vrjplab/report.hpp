#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "vrjplab/graph.hpp"
#include "vrjplab/sampler.hpp"

namespace vrjp {

inline constexpr const char* kToolVersion = "vrjp-lab 0.1.0";

// FNV-1a over the canonical "key=value\n" dump of a flat config object;
// reports embed both the config and this digest so a run can be reproduced
// from its own output.
std::string config_digest(const nlohmann::ordered_json& config);

// CSV row `N,y_x,y_y,s,estimate,stderr,ess,chains`. For non-box graphs N is 0
// and (y_x, y_y) is (vertex id, 0).
void write_estimate_row(std::ostream& out, const Graph& g,
                        const MomentEstimate& est);
void write_estimate_header(std::ostream& out);

// Binary sample records (vertex-ordered doubles per retained sample, chains
// concatenated in index order) plus a JSON sidecar with the graph hash,
// config, and layout.
void write_samples(const std::string& path_base, const Graph& g,
                   const SamplerConfig& cfg,
                   const std::vector<ChainResult>& results,
                   const nlohmann::ordered_json& config);

}  // namespace vrjp
