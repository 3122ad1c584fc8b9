// Command-line laboratory for the reinforced-walk mixing field: graph
// construction, field sampling, walk simulation, resistance computations, the
// moment-decay scan, and the verification suites. Outputs are deterministic
// for a fixed command line and seed.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vrjplab/builtin_graphs.hpp"
#include "vrjplab/deformation.hpp"
#include "vrjplab/dynamics.hpp"
#include "vrjplab/graph.hpp"
#include "vrjplab/mixing.hpp"
#include "vrjplab/quadrature.hpp"
#include "vrjplab/report.hpp"
#include "vrjplab/sampler.hpp"
#include "vrjplab/util.hpp"
#include "vrjplab/verify.hpp"

namespace {

using nlohmann::ordered_json;
using namespace vrjp;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInconclusive = 2;

struct GlobalOptions {
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  int threads = 1;
};

struct GraphOptions {
  std::string spec = "box";
  int n = 3;
  double wh = 1.0;
  double wv = 1.0;
  double w = 1.0;
  long root = -1;  // <0: default root
};

void add_graph_options(CLI::App* cmd, GraphOptions& o) {
  cmd->add_option("--graph", o.spec,
                  "two_vertex | triangle | path:K | cycle:K | box | FILE");
  cmd->add_option("--n", o.n, "box radius (graph 'box')");
  cmd->add_option("--wh", o.wh, "horizontal conductance (box)");
  cmd->add_option("--wv", o.wv, "vertical conductance (box)");
  cmd->add_option("--w", o.w, "uniform conductance for builtin graphs");
  cmd->add_option("--root", o.root, "root vertex id (default: builtin choice)");
}

Graph build_graph(const GraphOptions& o) {
  std::optional<long> root;
  if (o.root >= 0) root = o.root;
  if (o.spec == "box") return Graph::z2_box(o.n, o.wh, o.wv);
  if (o.spec == "two_vertex") return two_vertex_graph(o.w);
  if (o.spec == "triangle") return triangle_graph(o.w, o.w, o.w);
  if (o.spec.rfind("path:", 0) == 0)
    return path_graph(std::stoi(o.spec.substr(5)), o.w, root.value_or(0));
  if (o.spec.rfind("cycle:", 0) == 0)
    return cycle_graph(std::stoi(o.spec.substr(6)), o.w);
  std::ifstream in(o.spec);
  if (!in) throw CLI::ValidationError("--graph", "cannot open '" + o.spec + "'");
  return Graph::read_edge_list(in, root);
}

// "x,y" on boxes, plain id otherwise
int parse_vertex(const Graph& g, const std::string& text) {
  const auto comma = text.find(',');
  if (comma != std::string::npos) {
    if (!g.is_box())
      throw CLI::ValidationError("--y", "coordinates need a box graph");
    return g.vertex_at(std::stoi(text.substr(0, comma)),
                       std::stoi(text.substr(comma + 1)));
  }
  const long id = std::stol(text);
  for (int v = 0; v < g.vertex_count(); ++v)
    if (g.vertex_id(v) == id) return v;
  throw CLI::ValidationError("--y", "unknown vertex id '" + text + "'");
}

std::ofstream open_out(const GlobalOptions& g, const std::string& name) {
  std::filesystem::create_directories(g.out_dir);
  const auto path = std::filesystem::path(g.out_dir) / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  return out;
}

ordered_json law_json(const Graph& g, const SequenceLaw& law) {
  ordered_json j;
  j["start"] = law.start;
  j["horizon"] = law.horizon;
  j["samples"] = law.sample_count;
  j["exact_per_environment"] = law.exact_probabilities;
  ordered_json seqs = ordered_json::object();
  for (std::size_t i = 0; i < law.sequences.size(); ++i) {
    std::ostringstream key;
    for (std::size_t k = 0; k < law.sequences[i].size(); ++k) {
      if (k) key << " ";
      key << law.sequences[i][k];
    }
    seqs[key.str()] = {{"prob", law.probability[i]},
                       {"stderr", law.std_error[i]}};
  }
  j["laws"] = seqs;
  ordered_json labels = ordered_json::array();
  for (int v = 0; v < g.vertex_count(); ++v) labels.push_back(g.label(v));
  j["vertex_labels"] = labels;
  return j;
}

int run_graph_cmd(const GlobalOptions&, const GraphOptions& go,
                  const std::string& out_file) {
  const Graph g = build_graph(go);
  if (out_file.empty()) {
    g.write_edge_list(std::cout);
  } else {
    std::ofstream out(out_file);
    if (!out) throw std::runtime_error("cannot open " + out_file);
    g.write_edge_list(out);
  }
  return kExitPass;
}

struct SampleCmd {
  GraphOptions graph;
  std::vector<std::string> targets;
  std::vector<double> s_values{1.0};
  SamplerConfig cfg;
  bool save_samples = false;
  std::string prefix = "samples";
};

ordered_json sampler_config_json(const GlobalOptions& g, const GraphOptions& go,
                                 const SamplerConfig& cfg) {
  ordered_json j;
  j["graph"] = go.spec;
  j["n"] = go.n;
  j["wh"] = go.wh;
  j["wv"] = go.wv;
  j["w"] = go.w;
  j["seed"] = cfg.seed;
  j["threads"] = g.threads;
  j["chains"] = cfg.chains;
  j["samples_per_chain"] = cfg.samples_per_chain;
  j["burnin_sweeps"] = cfg.burnin_sweeps;
  j["thin"] = cfg.thin;
  j["step"] = cfg.step;
  j["refresh_period"] = cfg.refresh_period;
  return j;
}

int run_sample_cmd(const GlobalOptions& g, SampleCmd& c) {
  const Graph graph = build_graph(c.graph);
  c.cfg.seed = g.seed;
  c.cfg.keep_full_samples = c.save_samples;

  std::vector<int> tracked;
  for (const auto& t : c.targets) tracked.push_back(parse_vertex(graph, t));
  if (tracked.empty() && graph.vertex_count() > 1)
    tracked.push_back(graph.root() == 0 ? 1 : 0);

  const auto results = sample_chains(graph, c.cfg, tracked, g.threads);

  auto csv = open_out(g, "estimates.csv");
  write_estimate_header(csv);
  for (std::size_t slot = 0; slot < tracked.size(); ++slot)
    for (double s : c.s_values)
      write_estimate_row(
          csv, graph,
          estimate_exp_moment(results, static_cast<int>(tracked.size()),
                              static_cast<int>(slot), tracked[slot], s));

  if (c.save_samples) {
    std::filesystem::create_directories(g.out_dir);
    const auto base = (std::filesystem::path(g.out_dir) / c.prefix).string();
    write_samples(base, graph, c.cfg, results,
                  sampler_config_json(g, c.graph, c.cfg));
  }

  double acc = 0.0, drift = 0.0;
  for (const auto& r : results) {
    acc += r.acceptance_rate / results.size();
    drift = std::max(drift, r.max_drift_per_sweep);
  }
  std::cout << "chains=" << results.size() << " acceptance=" << format_double(acc)
            << " max_drift_per_sweep=" << format_double(drift) << "\n";
  return kExitPass;
}

struct VrjpCmd {
  GraphOptions graph;
  int k = 3;
  std::uint64_t runs = 100000;
  std::string start = "";
  std::string law_out = "law.json";
  std::string trajectory_out;
};

int run_vrjp_cmd(const GlobalOptions& g, const VrjpCmd& c) {
  const Graph graph = build_graph(c.graph);
  const int start = c.start.empty() ? graph.root() : parse_vertex(graph, c.start);

  if (!c.trajectory_out.empty()) {
    const Trajectory t = simulate_vrjp(graph, start, c.k, g.seed);
    auto out = open_out(g, c.trajectory_out);
    out << "time,vertex\n0," << start << "\n";
    for (const auto& e : t.events)
      out << format_double(e.time) << "," << e.vertex << "\n";
  }

  const auto law = vrjp_jump_chain_law(graph, start, c.k, c.runs, g.seed,
                                       g.threads);
  auto out = open_out(g, c.law_out);
  out << law_json(graph, law).dump(2) << "\n";
  std::cout << "sequences=" << law.sequences.size() << " runs=" << c.runs
            << "\n";
  return kExitPass;
}

struct ResistanceCmd {
  GraphOptions graph;
  std::vector<std::string> targets{"2,0"};
  std::string source;
  std::string out_file = "resistance.csv";
};

int run_resistance_cmd(const GlobalOptions& g, const ResistanceCmd& c) {
  const Graph graph = build_graph(c.graph);
  const int a = c.source.empty() ? graph.root() : parse_vertex(graph, c.source);
  auto out = open_out(g, c.out_file);
  out << "N,y_x,y_y,R,nash_williams_lower,current_flow_max\n";
  for (const auto& t : c.targets) {
    const int y = parse_vertex(graph, t);
    const double r = effective_resistance(graph, a, y);
    const double flow = current_flow_max(graph, a, y);
    double nw = std::numeric_limits<double>::quiet_NaN();
    long yx = 0, yy = 0;
    int n = 0;
    if (graph.is_box() && y != *graph.boundary_vertex()) {
      const auto cd = graph.coord(y);
      yx = cd[0];
      yy = cd[1];
      n = graph.box_radius();
      const int inf = std::max(std::abs(cd[0]), std::abs(cd[1]));
      if (inf >= 2) nw = nash_williams_sum(inf);
    } else {
      yx = graph.vertex_id(y);
    }
    out << n << "," << yx << "," << yy << "," << format_double(r) << ","
        << format_double(nw) << "," << format_double(flow) << "\n";
  }
  return kExitPass;
}

struct DecayCmd {
  GraphOptions graph;
  double s = 0.5;
  double w_bar = 0.0;  // 0: use max conductance
  std::vector<std::string> targets{"2,0", "3,0", "2,2"};
  SamplerConfig cfg;
  double ess_min = 100.0;
  std::string report_out = "decay_report.json";
  std::string csv_out = "decay.csv";
};

int run_decay_cmd(const GlobalOptions& g, DecayCmd& c) {
  const Graph graph = build_graph(c.graph);
  c.cfg.seed = g.seed;
  if (c.w_bar <= 0.0) c.w_bar = graph.conductance_bound_floor();

  std::vector<int> targets;
  for (const auto& t : c.targets) {
    int y = -1;
    try {
      y = parse_vertex(graph, t);
    } catch (const std::exception&) {
      continue;  // target outside this box
    }
    if (y == graph.root())
      throw CLI::ValidationError("--y", "the root itself is excluded");
    targets.push_back(y);
  }
  if (targets.empty())
    throw CLI::ValidationError("--y", "no valid targets for this graph");

  const auto results = sample_chains(graph, c.cfg, targets, g.threads);

  ordered_json config = sampler_config_json(g, c.graph, c.cfg);
  config["s"] = c.s;
  config["w_bar"] = c.w_bar;
  {
    ordered_json t = ordered_json::array();
    for (const auto& y : c.targets) t.push_back(y);
    config["targets"] = t;
  }

  ordered_json report;
  report["tool"] = kToolVersion;
  report["config"] = config;
  report["config_digest"] = config_digest(config);
  report["graph_hash"] = hex64(graph.structure_hash());

  auto csv = open_out(g, c.csv_out);
  csv << "N,y_x,y_y,s,Wbar,R,eta_instance,eta_asymptotic,bound,estimate,"
         "stderr,pass\n";

  ordered_json rows = ordered_json::array();
  bool any_fail = false, any_inconclusive = false;
  std::vector<double> log_est, log_dist;
  for (std::size_t slot = 0; slot < targets.size(); ++slot) {
    const int y = targets[slot];
    const auto plan = build_plan(graph, y, c.s, c.w_bar);
    const auto est =
        estimate_exp_moment(results, static_cast<int>(targets.size()),
                            static_cast<int>(slot), y, c.s);
    const auto rep = check_moment_bound(graph, plan, est);

    std::string verdict = "pass";
    if (est.ess < c.ess_min || !est.std_error_valid) {
      verdict = "inconclusive";
      any_inconclusive = true;
    } else if (!rep.pass_resistance) {
      verdict = "fail";
      any_fail = true;
    }

    long yx = 0, yy = 0;
    if (graph.is_box() && y != *graph.boundary_vertex()) {
      const auto cd = graph.coord(y);
      yx = cd[0];
      yy = cd[1];
    } else {
      yx = graph.vertex_id(y);
    }
    csv << (graph.is_box() ? graph.box_radius() : 0) << "," << yx << "," << yy
        << "," << format_double(c.s) << "," << format_double(c.w_bar) << ","
        << format_double(plan.resistance) << ","
        << format_double(plan.eta_instance) << ","
        << format_double(plan.eta_asymptotic) << ","
        << format_double(rep.bound_resistance) << ","
        << format_double(est.estimate) << "," << format_double(est.std_error)
        << "," << verdict << "\n";

    ordered_json row;
    row["y"] = {yx, yy};
    row["y_inf"] = plan.y_inf_norm;
    row["R"] = plan.resistance;
    row["estimate"] = est.estimate;
    row["stderr"] = est.std_error;
    row["ess"] = est.ess;
    row["bound_resistance"] = rep.bound_resistance;
    row["bound_general"] = rep.bound_general;
    row["eta_instance"] = plan.eta_instance;
    row["eta_asymptotic"] = plan.eta_asymptotic;
    row["verdict"] = verdict;
    row["checked"] = "resistance_moment_bound";
    rows.push_back(row);

    if (plan.y_inf_norm >= 1 && est.estimate > 0.0) {
      log_est.push_back(std::log(est.estimate));
      log_dist.push_back(std::log(static_cast<double>(plan.y_inf_norm)));
    }
  }
  report["rows"] = rows;

  // informational slope of ln E[e^{s u_y}] against ln |y|_inf
  ordered_json fit;
  if (log_est.size() >= 3) {
    const std::size_t m = log_est.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      mx += log_dist[i];
      my += log_est[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      sxx += (log_dist[i] - mx) * (log_dist[i] - mx);
      sxy += (log_dist[i] - mx) * (log_est[i] - my);
    }
    if (sxx > 0.0) {
      const double slope = sxy / sxx;
      const double intercept = my - slope * mx;
      double rss = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double r = log_est[i] - intercept - slope * log_dist[i];
        rss += r * r;
      }
      const double se =
          m > 2 ? std::sqrt(rss / (m - 2) / sxx)
                : std::numeric_limits<double>::quiet_NaN();
      fit["slope"] = slope;
      fit["slope_stderr"] = se;
      fit["ci95"] = {slope - 1.96 * se, slope + 1.96 * se};
      fit["note"] =
          "informational only: compares to -eta; the pass/fail verdicts use "
          "the resistance-form bound";
    }
  } else {
    fit["note"] = "need >= 3 distinct targets for a slope";
  }
  report["slope_fit"] = fit;

  auto out = open_out(g, c.report_out);
  out << report.dump(2) << "\n";

  if (any_fail) return kExitFail;
  if (any_inconclusive) return kExitInconclusive;
  return kExitPass;
}

struct VerifyCmd {
  std::string suite = "all";
  VerifyOptions opt;
  std::string report_out = "verify_report.json";
};

int run_verify_cmd(const GlobalOptions& g, VerifyCmd& c) {
  c.opt.seed = g.seed;
  c.opt.threads = g.threads;
  const auto suites = run_verify_suite(c.suite, c.opt);

  ordered_json report;
  report["tool"] = kToolVersion;
  ordered_json config;
  config["suite"] = c.suite;
  config["seed"] = g.seed;
  config["threads"] = g.threads;
  config["mixture_runs"] = c.opt.mixture_runs;
  config["mixture_fields_per_chain"] = c.opt.mixture_fields_per_chain;
  config["sampler_samples_per_chain"] = c.opt.sampler_samples_per_chain;
  config["sampler_burnin"] = c.opt.sampler_burnin;
  config["chains"] = c.opt.chains;
  report["config"] = config;
  report["config_digest"] = config_digest(config);

  bool any_fail = false, any_inconclusive = false;
  ordered_json jsuites = ordered_json::array();
  for (const auto& suite : suites) {
    ordered_json js;
    js["suite"] = suite.suite;
    ordered_json checks = ordered_json::array();
    for (const auto& check : suite.checks) {
      std::cout << "[" << verdict_name(check.verdict) << "] " << suite.suite
                << "/" << check.name << ": " << check.detail << "\n";
      if (check.verdict == Verdict::Fail) any_fail = true;
      if (check.verdict == Verdict::Inconclusive) any_inconclusive = true;
      checks.push_back({{"name", check.name},
                        {"verdict", verdict_name(check.verdict)},
                        {"detail", check.detail}});
    }
    js["checks"] = checks;
    js["overall"] = verdict_name(suite.overall());
    jsuites.push_back(js);
    std::cout << "suite " << suite.suite << ": "
              << verdict_name(suite.overall()) << "\n";
  }
  report["suites"] = jsuites;
  auto out = open_out(g, c.report_out);
  out << report.dump(2) << "\n";

  if (any_fail) return kExitFail;
  if (any_inconclusive) return kExitInconclusive;
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kToolVersion) +
               " -- numerical laboratory for the reinforced-walk mixing field"};
  app.require_subcommand(1);
  app.set_config("--config", "", "config file (ini sections per subcommand)");

  GlobalOptions global;
  app.add_option("--seed", global.seed, "master RNG seed")
      ->capture_default_str();
  app.add_option("--out-dir", global.out_dir, "output directory")
      ->capture_default_str();
  app.add_option("--threads", global.threads, "worker threads")
      ->capture_default_str();

  auto* graph_cmd = app.add_subcommand("graph", "build a graph, print edges");
  GraphOptions graph_opts;
  std::string graph_out;
  add_graph_options(graph_cmd, graph_opts);
  graph_cmd->add_option("--out", graph_out, "edge-list file (default stdout)");

  auto* sample_cmd = app.add_subcommand("sample", "field sampling + moments");
  SampleCmd sample;
  add_graph_options(sample_cmd, sample.graph);
  sample_cmd->add_option("--y", sample.targets, "targets (x,y or id)");
  sample_cmd->add_option("--s", sample.s_values, "moment exponents in (0,1]");
  sample_cmd->add_option("--chains", sample.cfg.chains)->capture_default_str();
  sample_cmd->add_option("--samples", sample.cfg.samples_per_chain)
      ->capture_default_str();
  sample_cmd->add_option("--burnin", sample.cfg.burnin_sweeps)
      ->capture_default_str();
  sample_cmd->add_option("--thin", sample.cfg.thin)->capture_default_str();
  sample_cmd->add_option("--sigma", sample.cfg.step, "proposal std dev")
      ->capture_default_str();
  sample_cmd->add_option("--refresh", sample.cfg.refresh_period)
      ->capture_default_str();
  sample_cmd->add_flag("--save-samples", sample.save_samples,
                       "persist binary samples + JSON sidecar");
  sample_cmd->add_option("--prefix", sample.prefix, "sample file prefix")
      ->capture_default_str();

  auto* vrjp_cmd = app.add_subcommand("vrjp", "simulate the reinforced walk");
  VrjpCmd vrjp;
  add_graph_options(vrjp_cmd, vrjp.graph);
  vrjp_cmd->add_option("--k", vrjp.k, "jumps per run")->capture_default_str();
  vrjp_cmd->add_option("--runs", vrjp.runs)->capture_default_str();
  vrjp_cmd->add_option("--start", vrjp.start, "start vertex (default root)");
  vrjp_cmd->add_option("--law-out", vrjp.law_out)->capture_default_str();
  vrjp_cmd->add_option("--trajectory-out", vrjp.trajectory_out,
                       "CSV (time,vertex) of a single run");

  auto* res_cmd = app.add_subcommand("resistance", "harmonic potentials");
  ResistanceCmd resistance;
  add_graph_options(res_cmd, resistance.graph);
  res_cmd->add_option("--y", resistance.targets, "targets")->capture_default_str();
  res_cmd->add_option("--a", resistance.source, "source (default root)");
  res_cmd->add_option("--out", resistance.out_file)->capture_default_str();

  auto* decay_cmd = app.add_subcommand("decay", "moment-decay scan");
  DecayCmd decay;
  add_graph_options(decay_cmd, decay.graph);
  decay_cmd->add_option("--s", decay.s, "moment exponent in (0,1)")
      ->capture_default_str();
  decay_cmd->add_option("--wbar", decay.w_bar,
                        "conductance bound (default: max)");
  decay_cmd->add_option("--y", decay.targets, "targets")->capture_default_str();
  decay_cmd->add_option("--chains", decay.cfg.chains)->capture_default_str();
  decay_cmd->add_option("--samples", decay.cfg.samples_per_chain)
      ->capture_default_str();
  decay_cmd->add_option("--burnin", decay.cfg.burnin_sweeps)
      ->capture_default_str();
  decay_cmd->add_option("--thin", decay.cfg.thin)->capture_default_str();
  decay_cmd->add_option("--sigma", decay.cfg.step)->capture_default_str();
  decay_cmd->add_option("--refresh", decay.cfg.refresh_period)
      ->capture_default_str();
  decay_cmd->add_option("--ess-min", decay.ess_min,
                        "below this the row is inconclusive")
      ->capture_default_str();
  decay_cmd->add_option("--report-out", decay.report_out)->capture_default_str();
  decay_cmd->add_option("--csv-out", decay.csv_out)->capture_default_str();

  auto* verify_cmd = app.add_subcommand("verify", "run a verification suite");
  VerifyCmd verify;
  verify_cmd
      ->add_option("suite", verify.suite,
                   "density|moments|tilt|convexity|taylor|mixture|deformation|"
                   "all")
      ->capture_default_str();
  verify_cmd->add_option("--mixture-runs", verify.opt.mixture_runs)
      ->capture_default_str();
  verify_cmd
      ->add_option("--mixture-fields", verify.opt.mixture_fields_per_chain)
      ->capture_default_str();
  verify_cmd->add_option("--samples", verify.opt.sampler_samples_per_chain)
      ->capture_default_str();
  verify_cmd->add_option("--burnin", verify.opt.sampler_burnin)
      ->capture_default_str();
  verify_cmd->add_option("--chains", verify.opt.chains)->capture_default_str();
  verify_cmd->add_option("--report-out", verify.report_out)
      ->capture_default_str();

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (graph_cmd->parsed())
      return run_graph_cmd(global, graph_opts, graph_out);
    if (sample_cmd->parsed()) return run_sample_cmd(global, sample);
    if (vrjp_cmd->parsed()) return run_vrjp_cmd(global, vrjp);
    if (res_cmd->parsed()) return run_resistance_cmd(global, resistance);
    if (decay_cmd->parsed()) return run_decay_cmd(global, decay);
    if (verify_cmd->parsed()) return run_verify_cmd(global, verify);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitFail;
  }
  return kExitFail;
}
