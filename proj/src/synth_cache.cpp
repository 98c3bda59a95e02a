#include "adcflow/synth_cache.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "adcflow/error.hpp"
#include "adcflow/units.hpp"

namespace adcflow {

namespace {

std::string u64_hex(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::optional<std::uint64_t> u64_from_hex(const std::string& s) {
  if (s.rfind("0x", 0) != 0) return std::nullopt;
  char* end = nullptr;
  unsigned long long v = std::strtoull(s.c_str() + 2, &end, 16);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return static_cast<std::uint64_t>(v);
}

}  // namespace

std::string SynthCache::serialize_record(const CacheKey& key,
                                         const SynthResult& r) {
  std::ostringstream os;
  os << "mdac"
     << " m=" << key.m << " r=" << key.r
     << " cfg=" << u64_hex(key.config_hash)
     << " model=" << u64_hex(key.model_hash)
     << " feasible=" << (r.feasible ? 1 : 0)
     << " iters=" << r.iterations
     << " load_scale=" << double_to_hex(r.load_scale)
     << " i_tail=" << double_to_hex(r.design.i_tail)
     << " v_ov=" << double_to_hex(r.design.v_ov)
     << " cs=" << double_to_hex(r.design.sampling_cap)
     << " cf=" << double_to_hex(r.design.feedback_cap)
     << " cl=" << double_to_hex(r.design.load_cap)
     << " ovh=" << double_to_hex(r.design.mirror_overhead)
     << " t0=" << double_to_hex(r.performance.dc_loop_gain)
     << " bw=" << double_to_hex(r.performance.bandwidth_rad_s)
     << " pm=" << double_to_hex(r.performance.phase_margin_deg)
     << " se=" << double_to_hex(r.performance.static_error)
     << " de=" << double_to_hex(r.performance.dynamic_error)
     << " te=" << double_to_hex(r.performance.total_error)
     << " noise=" << double_to_hex(r.performance.noise_v2)
     << " power=" << double_to_hex(r.performance.power_w)
     << " spec_gain=" << double_to_hex(r.spec.closed_loop_gain)
     << " spec_ts=" << double_to_hex(r.spec.settle_time)
     << " spec_cs=" << double_to_hex(r.spec.sampling_cap)
     << " spec_cl=" << double_to_hex(r.spec.load_cap)
     << " spec_fs=" << double_to_hex(r.spec.full_scale)
     << " spec_vdd=" << double_to_hex(r.spec.supply)
     << " spec_temp=" << double_to_hex(r.spec.temperature);
  std::string body = os.str();
  return body + " hash=" + u64_hex(fnv1a(body));
}

std::optional<std::pair<CacheKey, SynthResult>> SynthCache::parse_record(
    const std::string& line) {
  auto hash_pos = line.rfind(" hash=");
  if (hash_pos == std::string::npos) return std::nullopt;
  std::string body = line.substr(0, hash_pos);
  auto declared = u64_from_hex(line.substr(hash_pos + 6));
  if (!declared || *declared != fnv1a(body)) return std::nullopt;

  std::istringstream is(body);
  std::string tag;
  is >> tag;
  if (tag != "mdac") return std::nullopt;
  std::map<std::string, std::string> kv;
  std::string token;
  while (is >> token) {
    auto eq = token.find('=');
    if (eq == std::string::npos) return std::nullopt;
    kv[token.substr(0, eq)] = token.substr(eq + 1);
  }

  auto geti = [&](const char* k, int& out) {
    auto it = kv.find(k);
    if (it == kv.end()) return false;
    out = std::atoi(it->second.c_str());
    return true;
  };
  auto getd = [&](const char* k, double& out) {
    auto it = kv.find(k);
    if (it == kv.end()) return false;
    auto v = double_from_hex(it->second);
    if (!v) return false;
    out = *v;
    return true;
  };
  auto getu = [&](const char* k, std::uint64_t& out) {
    auto it = kv.find(k);
    if (it == kv.end()) return false;
    auto v = u64_from_hex(it->second);
    if (!v) return false;
    out = *v;
    return true;
  };

  CacheKey key;
  SynthResult r;
  int feasible = 0;
  bool ok = geti("m", key.m) && geti("r", key.r) &&
            getu("cfg", key.config_hash) && getu("model", key.model_hash) &&
            geti("feasible", feasible) && geti("iters", r.iterations) &&
            getd("load_scale", r.load_scale) &&
            getd("i_tail", r.design.i_tail) && getd("v_ov", r.design.v_ov) &&
            getd("cs", r.design.sampling_cap) &&
            getd("cf", r.design.feedback_cap) &&
            getd("cl", r.design.load_cap) &&
            getd("ovh", r.design.mirror_overhead) &&
            getd("t0", r.performance.dc_loop_gain) &&
            getd("bw", r.performance.bandwidth_rad_s) &&
            getd("pm", r.performance.phase_margin_deg) &&
            getd("se", r.performance.static_error) &&
            getd("de", r.performance.dynamic_error) &&
            getd("te", r.performance.total_error) &&
            getd("noise", r.performance.noise_v2) &&
            getd("power", r.performance.power_w) &&
            getd("spec_gain", r.spec.closed_loop_gain) &&
            getd("spec_ts", r.spec.settle_time) &&
            getd("spec_cs", r.spec.sampling_cap) &&
            getd("spec_cl", r.spec.load_cap) &&
            getd("spec_fs", r.spec.full_scale) &&
            getd("spec_vdd", r.spec.supply) &&
            getd("spec_temp", r.spec.temperature);
  if (!ok) return std::nullopt;
  r.feasible = feasible != 0;
  r.spec.stage_resolution = key.m;
  r.spec.accuracy_bits = key.r;
  return std::make_pair(key, r);
}

SynthCache::SynthCache(std::string path) : path_(std::move(path)) { load(); }

void SynthCache::load() {
  std::ifstream in(path_);
  if (!in) return;  // no cache yet
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto parsed = parse_record(line);
    if (!parsed) {
      ++discarded_;
      std::cerr << "warning: discarding corrupt cache record in " << path_
                << "\n";
      continue;
    }
    entries_[parsed->first] = parsed->second;  // last valid record wins
  }
}

std::optional<SynthResult> SynthCache::find(const CacheKey& key) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void SynthCache::store(const CacheKey& key, const SynthResult& result) {
  std::lock_guard<std::mutex> lock(mu_);
  entries_[key] = result;
  std::ofstream out(path_, std::ios::app);
  if (!out)
    throw Error(ErrorKind::CacheError, "cannot append to cache file " + path_);
  out << serialize_record(key, result) << "\n";
}

std::size_t SynthCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

SynthResult get_or_synthesize(const MdacSpec& spec, const DeviceModel& dm,
                              const SynthOptions& opts, SynthCache& cache,
                              bool* cache_hit) {
  CacheKey key{spec.stage_resolution, spec.accuracy_bits, opts.hash(),
               dm.hash()};
  if (auto cached = cache.find(key)) {
    if (cache_hit) *cache_hit = true;
    return *cached;
  }
  if (cache_hit) *cache_hit = false;
  SynthResult result = synthesize_mdac(spec, dm, opts);
  cache.store(key, result);
  return result;
}

}  // namespace adcflow
