// Batch driver: enumerate / synth / rank / simulate / tf over a shared
// config, emitting CSV and text reports.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "adcflow/config.hpp"
#include "adcflow/enumeration.hpp"
#include "adcflow/error.hpp"
#include "adcflow/pipeline.hpp"
#include "adcflow/rational.hpp"
#include "adcflow/synth_cache.hpp"
#include "adcflow/units.hpp"

namespace {

using namespace adcflow;

std::string config_header(const RunConfig& cfg) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "# config_hash=0x%016llx\n",
                static_cast<unsigned long long>(cfg.hash()));
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Internal, "cannot write " + path);
  out << content;
}

long long quantizer_oracle(double v, const AdcSpec& spec) {
  const long long full = 1ll << spec.resolution_bits;
  double code = std::floor((v / spec.full_scale + 0.5) * double(full));
  return std::min(full - 1, std::max(0ll, static_cast<long long>(code)));
}

std::vector<int> parse_prefix(const std::string& text) {
  std::vector<int> prefix;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, '-')) {
    if (part == "..." || part.empty()) continue;
    try {
      prefix.push_back(std::stoi(part));
    } catch (...) {
      throw Error(ErrorKind::InvalidSpec, "bad candidate prefix '" + text + "'");
    }
  }
  return prefix;
}

int cmd_enumerate(const RunConfig& cfg, int bits) {
  AdcSpec spec = cfg.adc;
  spec.resolution_bits = bits;
  for (const auto& cand : enumerate_candidates(spec))
    std::cout << cand.display() << "\n";
  return 0;
}

int cmd_synth(const RunConfig& cfg, int bits, int stage) {
  AdcSpec spec = cfg.adc;
  spec.resolution_bits = bits;
  auto candidates = enumerate_candidates(spec);
  auto uniques = collect_unique_mdacs(candidates, spec, cfg.power.tail_load_cap,
                                      cfg.power.cap_floor);
  SynthCache cache(cfg.cache_path);
  std::printf("%-4s %-4s %-10s %-12s %-12s %-8s %-6s\n", "m", "r", "feasible",
              "power_W", "i_tail_A", "pm_deg", "hit");
  for (std::size_t i = 0; i < uniques.size(); ++i) {
    if (stage > 0 && static_cast<int>(i + 1) != stage) continue;
    bool hit = false;
    SynthResult res =
        get_or_synthesize(uniques[i].spec, cfg.device, cfg.synth, cache, &hit);
    std::printf("%-4d %-4d %-10s %-12.4e %-12.4e %-8.2f %-6s\n",
                res.spec.stage_resolution, res.spec.accuracy_bits,
                res.feasible ? "yes" : "NO", res.performance.power_w,
                res.design.i_tail, res.performance.phase_margin_deg,
                hit ? "yes" : "no");
  }
  return 0;
}

int cmd_rank(const RunConfig& cfg, int bits_from, int bits_to) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  SynthCache cache(cfg.cache_path);

  std::ostringstream summary;
  summary << config_header(cfg) << "K,candidate,head_W,tail_W,total_W,rank\n";
  std::ostringstream optimum;
  optimum << config_header(cfg) << "K,optimum_candidate,total_W\n";

  char buf[128];
  for (int k = bits_from; k <= bits_to; ++k) {
    AdcSpec spec = cfg.adc;
    spec.resolution_bits = k;
    RankTable table = rank_candidates(spec, cfg.device, cfg.synth, cfg.power,
                                      cache, cfg.jobs);
    write_file(cfg.output_dir + "/rank_K" + std::to_string(k) + ".csv",
               config_header(cfg) + rank_csv(table));
    std::cout << rank_text_table(table) << "\n";
    for (std::size_t i = 0; i < table.ranked.size(); ++i) {
      const auto& r = table.ranked[i];
      std::snprintf(buf, sizeof(buf), "%d,%s,%.9e,%.9e,%.9e,%zu\n", k,
                    r.candidate.display().c_str(), r.head_total_w,
                    r.tail_estimate_w, r.grand_total_w, i + 1);
      summary << buf;
    }
    if (!table.ranked.empty()) {
      std::snprintf(buf, sizeof(buf), "%d,%s,%.9e\n", k,
                    table.ranked[0].candidate.display().c_str(),
                    table.ranked[0].grand_total_w);
      optimum << buf;
      std::cout << "optimum for K=" << k << ": "
                << table.ranked[0].candidate.display() << "\n\n";
    }
  }
  write_file(cfg.output_dir + "/summary.csv", summary.str());
  write_file(cfg.output_dir + "/optimum.csv", optimum.str());
  return 0;
}

int cmd_simulate(const RunConfig& cfg, const std::string& candidate_text,
                 int points, double offset, int bits) {
  AdcSpec spec = cfg.adc;
  if (bits > 0) spec.resolution_bits = bits;
  Candidate cand = candidate_from_prefix(parse_prefix(candidate_text), spec);

  std::vector<double> inputs;
  inputs.reserve(points);
  for (int i = 0; i < points; ++i) {
    double t = points == 1 ? 0.5 : static_cast<double>(i) / (points - 1);
    inputs.push_back((t - 0.5) * spec.full_scale);
  }

  std::vector<std::vector<double>> offsets;
  if (offset != 0.0) {
    for (int i = 0; i < cand.total_stages(); ++i) {
      std::vector<double> per_stage(comparator_count(cand.stages[i]));
      for (std::size_t j = 0; j < per_stage.size(); ++j)
        per_stage[j] = (j % 2 == 0) ? offset : -offset;
      offsets.push_back(std::move(per_stage));
    }
  }

  auto samples = simulate_pipeline(cand, inputs, spec, offsets);

  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  std::ostringstream csv;
  csv << config_header(cfg) << "input_V,output_code,oracle_code,clipped\n";
  long long worst = 0;
  char buf[96];
  for (const auto& s : samples) {
    long long oracle = quantizer_oracle(s.input, spec);
    worst = std::max(worst, std::llabs(s.output_code - oracle));
    std::snprintf(buf, sizeof(buf), "%.9e,%lld,%lld,%d\n", s.input,
                  s.output_code, oracle, s.clipped ? 1 : 0);
    csv << buf;
  }
  write_file(cfg.output_dir + "/simulate_" + cand.display() + ".csv", csv.str());
  std::cout << "candidate " << cand.display() << ": " << samples.size()
            << " points, worst |code - oracle| = " << worst << " LSB\n";
  return 0;
}

int cmd_tf(const RunConfig& cfg, const std::string& netlist_path,
           const std::vector<std::string>& param_args,
           const std::string& csv_path) {
  std::ifstream in(netlist_path);
  if (!in)
    throw Error(ErrorKind::ParseError, "cannot open netlist " + netlist_path);
  std::ostringstream text;
  text << in.rdbuf();

  Netlist nl = parse_netlist(text.str());
  Sfg sfg = build_sfg(nl);
  SymbolicTf tf = mason_transfer(sfg);

  Bindings bindings;
  for (const auto& arg : param_args) {
    auto eq = arg.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::InvalidSpec, "--param expects name=value");
    auto value = parse_eng_value(arg.substr(eq + 1));
    if (!value)
      throw Error(ErrorKind::InvalidSpec, "bad --param value in '" + arg + "'");
    bindings[arg.substr(0, eq)] = *value;
  }

  RationalFunction rf = bind_parameters(tf, bindings);

  std::cout << config_header(cfg);
  std::cout << "numerator (lowest degree first):";
  for (double c : rf.num.c) std::printf(" %.12g", c);
  std::cout << "\ndenominator (lowest degree first):";
  for (double c : rf.den.c) std::printf(" %.12g", c);
  std::cout << "\n";

  std::cout << "forward paths: " << tf.record.paths.size()
            << ", loops: " << tf.record.loops.size() << "\n";

  PoleZeroResult pz = poles_zeros(rf);
  std::cout << "poles (rad/s):";
  for (auto p : pz.poles) std::printf(" (%.6g%+.6gj)", p.real(), p.imag());
  std::cout << "\nzeros (rad/s):";
  for (auto z : pz.zeros) std::printf(" (%.6g%+.6gj)", z.real(), z.imag());
  std::cout << "\n";

  LoopMetrics lm = loop_metrics(rf, cfg.tf_f_lo, cfg.tf_f_hi,
                                cfg.synth.eval.grid_points_per_decade);
  std::printf("dc_gain = %.8g\n", lm.dc_gain);
  if (lm.unity_gain_hz)
    std::printf("unity_gain_freq_hz = %.8g\n", *lm.unity_gain_hz);
  else
    std::printf("unity_gain_freq_hz = none\n");
  if (lm.phase_margin_deg)
    std::printf("phase_margin_deg = %.6g\n", *lm.phase_margin_deg);
  else
    std::printf("phase_margin_deg = none\n");
  if (lm.gain_margin_db)
    std::printf("gain_margin_db = %.6g\n", *lm.gain_margin_db);
  else
    std::printf("gain_margin_db = none\n");

  if (!csv_path.empty()) {
    std::ostringstream csv;
    csv << config_header(cfg) << "coefficient_index,numerator,denominator\n";
    std::size_t n = std::max(rf.num.c.size(), rf.den.c.size());
    char buf[96];
    for (std::size_t i = 0; i < n; ++i) {
      double nc = i < rf.num.c.size() ? rf.num.c[i] : 0.0;
      double dc = i < rf.den.c.size() ? rf.den.c[i] : 0.0;
      std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", i, nc, dc);
      csv << buf;
    }
    write_file(csv_path, csv.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pipelined-ADC stage-resolution exploration toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_override, cache_override;
  app.add_option("--config", config_path, "config file (defaults built in)");
  app.add_option("--out", out_override, "output directory override");
  app.add_option("--cache", cache_override, "cache file override");
  int jobs_override = 0;
  app.add_option("--jobs", jobs_override, "synthesis worker threads");

  auto* c_enum = app.add_subcommand("enumerate", "list stage configurations");
  int bits = 13;
  c_enum->add_option("--bits", bits, "target resolution K")->required();

  auto* c_synth = app.add_subcommand("synth", "synthesize unique MDACs");
  int synth_bits = 13, synth_stage = 0;
  c_synth->add_option("--bits", synth_bits, "target resolution K")->required();
  c_synth->add_option("--stage", synth_stage, "restrict to one unique spec (1-based)");

  auto* c_rank = app.add_subcommand("rank", "rank candidates by total power");
  int bits_from = 0, bits_to = 0;
  c_rank->add_option("--bits-from", bits_from, "first resolution");
  c_rank->add_option("--bits-to", bits_to, "last resolution");

  auto* c_sim = app.add_subcommand("simulate", "behavioral pipeline + correction");
  std::string cand_text;
  int points = 4096, sim_bits = 0;
  double offset = 0.0;
  c_sim->add_option("--candidate", cand_text, "head prefix, e.g. 4-3-2")->required();
  c_sim->add_option("--points", points, "ramp points");
  c_sim->add_option("--offset", offset, "comparator offset magnitude (V)");
  c_sim->add_option("--bits", sim_bits, "resolution override");

  auto* c_tf = app.add_subcommand("tf", "netlist -> transfer function report");
  std::string netlist_path, tf_csv;
  std::vector<std::string> params;
  c_tf->add_option("--netlist", netlist_path, "netlist file")->required();
  c_tf->add_option("--param", params, "bind parameter name=value");
  c_tf->add_option("--csv", tf_csv, "write coefficient CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig::defaults()
                                        : RunConfig::from_file(config_path);
    if (const char* env = std::getenv("ADCFLOW_CACHE")) cfg.cache_path = env;
    if (!out_override.empty()) cfg.output_dir = out_override;
    if (!cache_override.empty()) cfg.cache_path = cache_override;
    if (jobs_override > 0) cfg.jobs = jobs_override;
    cfg.validate();

    if (*c_enum) return cmd_enumerate(cfg, bits);
    if (*c_synth) return cmd_synth(cfg, synth_bits, synth_stage);
    if (*c_rank) {
      if (bits_from == 0) bits_from = cfg.rank_bits_from;
      if (bits_to == 0) bits_to = cfg.rank_bits_to;
      if (bits_from < 2 || bits_to > 16 || bits_from > bits_to)
        throw Error(ErrorKind::InvalidSpec, "rank bit range must be within [2, 16]");
      return cmd_rank(cfg, bits_from, bits_to);
    }
    if (*c_sim) return cmd_simulate(cfg, cand_text, points, offset, sim_bits);
    if (*c_tf) return cmd_tf(cfg, netlist_path, params, tf_csv);
    std::cerr << "no subcommand selected\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.user_error() ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
