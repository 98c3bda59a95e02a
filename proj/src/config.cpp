#include "adcflow/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include "adcflow/error.hpp"
#include "adcflow/units.hpp"

namespace adcflow {

namespace {

enum class FieldKind { Double, Int, UInt64, String };

struct Field {
  const char* section;
  const char* key;
  FieldKind kind;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

std::string fmt_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double need_double(const std::string& value, const std::string& where) {
  auto v = parse_eng_value(value);
  if (!v)
    throw Error(ErrorKind::ConfigError,
                "key '" + where + "': bad numeric value '" + value + "'");
  return *v;
}

long long need_int(const std::string& value, const std::string& where) {
  char* end = nullptr;
  long long v = std::strtoll(value.c_str(), &end, 10);
  if (end != value.c_str() + value.size())
    throw Error(ErrorKind::ConfigError,
                "key '" + where + "': bad integer value '" + value + "'");
  return v;
}

#define FIELD_D(sec, name, ref)                                            \
  Field {                                                                  \
    sec, name, FieldKind::Double,                                          \
        [](RunConfig& c, const std::string& v, const std::string& w) {     \
          c.ref = need_double(v, w);                                       \
        },                                                                 \
        [](const RunConfig& c) { return fmt_double(c.ref); }               \
  }
#define FIELD_I(sec, name, ref)                                            \
  Field {                                                                  \
    sec, name, FieldKind::Int,                                             \
        [](RunConfig& c, const std::string& v, const std::string& w) {     \
          c.ref = static_cast<int>(need_int(v, w));                        \
        },                                                                 \
        [](const RunConfig& c) { return std::to_string(c.ref); }           \
  }
#define FIELD_U(sec, name, ref)                                            \
  Field {                                                                  \
    sec, name, FieldKind::UInt64,                                          \
        [](RunConfig& c, const std::string& v, const std::string& w) {     \
          c.ref = static_cast<std::uint64_t>(need_int(v, w));              \
        },                                                                 \
        [](const RunConfig& c) { return std::to_string(c.ref); }           \
  }
#define FIELD_S(sec, name, ref)                                            \
  Field {                                                                  \
    sec, name, FieldKind::String,                                          \
        [](RunConfig& c, const std::string& v, const std::string&) {       \
          c.ref = v;                                                       \
        },                                                                 \
        [](const RunConfig& c) { return c.ref; }                           \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      FIELD_I("adc", "resolution_bits", adc.resolution_bits),
      FIELD_D("adc", "sample_rate", adc.sample_rate),
      FIELD_D("adc", "full_scale", adc.full_scale),
      FIELD_D("adc", "supply", adc.supply),
      FIELD_D("adc", "temperature", adc.temperature),
      FIELD_D("adc", "gamma_n", adc.gamma_n),
      FIELD_I("adc", "head_cut_bits", adc.head_cut_bits),

      FIELD_D("device", "k_prime", device.k_prime),
      FIELD_D("device", "lambda", device.lambda),
      FIELD_D("device", "vov_min", device.vov_min),
      FIELD_D("device", "vov_max", device.vov_max),
      FIELD_D("device", "min_length", device.min_length),
      FIELD_D("device", "cgs_per_width", device.cgs_per_width),
      FIELD_D("device", "cj_per_width", device.cj_per_width),
      FIELD_D("device", "supply", device.supply),

      FIELD_U("synth", "seed", synth.seed),
      FIELD_I("synth", "starts", synth.starts),
      FIELD_I("synth", "evals_per_start", synth.evals_per_start),
      FIELD_D("synth", "pm_floor_deg", synth.pm_floor_deg),
      FIELD_D("synth", "penalty_scale", synth.penalty_scale),
      FIELD_D("synth", "i_tail_min", synth.i_tail_min),
      FIELD_D("synth", "i_tail_max", synth.i_tail_max),
      FIELD_D("synth", "load_scale_max", synth.load_scale_max),

      FIELD_D("eval", "slew_boundary_factor", synth.eval.slew_boundary_factor),
      FIELD_D("eval", "mirror_overhead", synth.eval.mirror_overhead),
      FIELD_I("eval", "settle_steps", synth.eval.settle_steps),
      FIELD_I("eval", "grid_points_per_decade", synth.eval.grid_points_per_decade),
      FIELD_D("eval", "margin_f_lo", synth.eval.margin_f_lo),
      FIELD_D("eval", "margin_f_hi", synth.eval.margin_f_hi),

      FIELD_D("power", "c_cmp", power.c_cmp),
      FIELD_D("power", "tail_taper", power.tail_taper),
      FIELD_D("power", "tail_load_cap", power.tail_load_cap),
      FIELD_D("power", "cap_floor", power.cap_floor),

      FIELD_I("cli", "rank_bits_from", rank_bits_from),
      FIELD_I("cli", "rank_bits_to", rank_bits_to),
      FIELD_S("cli", "output_dir", output_dir),
      FIELD_S("cli", "cache_path", cache_path),
      FIELD_I("cli", "jobs", jobs),
      FIELD_D("cli", "tf_f_lo", tf_f_lo),
      FIELD_D("cli", "tf_f_hi", tf_f_hi),
  };
  return table;
}

#undef FIELD_D
#undef FIELD_I
#undef FIELD_U
#undef FIELD_S

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

RunConfig RunConfig::defaults() { return RunConfig{}; }

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw Error(ErrorKind::ConfigError,
                    "config line " + std::to_string(lineno) + ": bad section");
      section = t.substr(1, t.size() - 2);
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::ConfigError,
                  "config line " + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    std::string where = section + "." + key;
    bool matched = false;
    for (const auto& f : fields()) {
      if (section == f.section && key == f.key) {
        f.set(cfg, value, where);
        seen.insert(where);
        matched = true;
        break;
      }
    }
    if (!matched)
      throw Error(ErrorKind::ConfigError, "unknown config key '" + where + "'");
  }
  for (const auto& f : fields()) {
    std::string where = std::string(f.section) + "." + f.key;
    if (!seen.count(where))
      throw Error(ErrorKind::ConfigError, "missing config key '" + where + "'");
  }
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::ConfigError, "cannot open config file " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse(os.str());
}

std::string RunConfig::serialize() const {
  std::ostringstream os;
  std::string section;
  for (const auto& f : fields()) {
    if (section != f.section) {
      section = f.section;
      os << "[" << section << "]\n";
    }
    os << f.key << " = " << f.get(*this) << "\n";
  }
  return os.str();
}

std::uint64_t RunConfig::hash() const {
  // Output paths and worker count do not affect any result; keep the
  // provenance hash stable across --out/--cache/--jobs overrides.
  std::istringstream is(serialize());
  std::string line, hashed;
  while (std::getline(is, line)) {
    if (line.rfind("output_dir ", 0) == 0 || line.rfind("cache_path ", 0) == 0 ||
        line.rfind("jobs ", 0) == 0)
      continue;
    hashed += line;
    hashed += '\n';
  }
  return fnv1a(hashed);
}

void RunConfig::validate() const {
  adc.validate();
  device.validate();
  if (synth.starts < 1 || synth.evals_per_start < 1)
    throw Error(ErrorKind::ConfigError, "synth budget must be positive");
  if (!(synth.i_tail_min > 0) || !(synth.i_tail_max > synth.i_tail_min))
    throw Error(ErrorKind::ConfigError, "tail current bounds must be ordered");
  if (synth.load_scale_max < 1.0)
    throw Error(ErrorKind::ConfigError, "load_scale_max must be >= 1");
  if (power.c_cmp < 0 || power.tail_taper <= 0 || power.tail_taper > 1 ||
      power.tail_load_cap <= 0 || power.cap_floor < 0)
    throw Error(ErrorKind::ConfigError, "power model constants out of range");
  if (rank_bits_from < 2 || rank_bits_to > 16 || rank_bits_from > rank_bits_to)
    throw Error(ErrorKind::ConfigError, "rank bit range must be within [2, 16]");
  if (jobs < 1)
    throw Error(ErrorKind::ConfigError, "jobs must be >= 1");
  if (!(tf_f_lo > 0) || !(tf_f_hi > tf_f_lo))
    throw Error(ErrorKind::ConfigError, "tf frequency range must be ordered");
  if (synth.eval.settle_steps < 64)
    throw Error(ErrorKind::ConfigError, "settle_steps must be >= 64");
}

}  // namespace adcflow
