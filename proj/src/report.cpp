#include "vrjplab/report.hpp"

#include <fstream>
#include <ostream>
#include <stdexcept>

#include "vrjplab/util.hpp"

namespace vrjp {

std::string config_digest(const nlohmann::ordered_json& config) {
  std::vector<std::string> keys;
  for (const auto& [k, v] : config.items()) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  std::uint64_t h = kFnvOffset;
  for (const auto& k : keys) {
    h = fnv1a64(k, h);
    h = fnv1a64("=", h);
    h = fnv1a64(config.at(k).dump(), h);
    h = fnv1a64("\n", h);
  }
  return hex64(h);
}

void write_estimate_header(std::ostream& out) {
  out << "N,y_x,y_y,s,estimate,stderr,ess,chains\n";
}

void write_estimate_row(std::ostream& out, const Graph& g,
                        const MomentEstimate& est) {
  int n = 0;
  long yx = 0, yy = 0;
  if (g.is_box()) {
    n = g.box_radius();
    if (est.vertex == *g.boundary_vertex()) {
      yx = yy = n + 1;  // boundary vertex sits outside the box proper
    } else {
      const auto c = g.coord(est.vertex);
      yx = c[0];
      yy = c[1];
    }
  } else {
    yx = g.vertex_id(est.vertex);
  }
  out << n << "," << yx << "," << yy << "," << format_double(est.s) << ","
      << format_double(est.estimate) << "," << format_double(est.std_error)
      << "," << format_double(est.ess) << "," << est.chains << "\n";
}

void write_samples(const std::string& path_base, const Graph& g,
                   const SamplerConfig& cfg,
                   const std::vector<ChainResult>& results,
                   const nlohmann::ordered_json& config) {
  const std::string bin_path = path_base + ".bin";
  std::ofstream bin(bin_path, std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open " + bin_path);
  std::uint64_t records = 0;
  for (const auto& chain : results) {
    if (chain.full_samples.empty())
      throw std::invalid_argument("write_samples: full samples not kept");
    bin.write(reinterpret_cast<const char*>(chain.full_samples.data()),
              static_cast<std::streamsize>(chain.full_samples.size() *
                                           sizeof(double)));
    records += chain.full_samples.size() / g.vertex_count();
  }
  bin.close();

  nlohmann::ordered_json side;
  side["tool"] = kToolVersion;
  side["graph_hash"] = hex64(g.structure_hash());
  side["vertices"] = g.vertex_count();
  side["root"] = g.root();
  side["records"] = records;
  side["layout"] = "chain-major, sample-major, vertex-ordered float64";
  side["seed"] = cfg.seed;
  side["chains"] = cfg.chains;
  side["samples_per_chain"] = cfg.samples_per_chain;
  side["config"] = config;
  side["config_digest"] = config_digest(config);
  std::ofstream meta(path_base + ".json");
  meta << side.dump(2) << "\n";
}

}  // namespace vrjp
