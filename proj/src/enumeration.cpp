#include "adcflow/enumeration.hpp"

#include <algorithm>
#include <cmath>

#include "adcflow/device.hpp"
#include "adcflow/error.hpp"

namespace adcflow {

void AdcSpec::validate() const {
  if (resolution_bits < 2)
    throw Error(ErrorKind::InvalidSpec, "resolution_bits must be >= 2");
  if (sample_rate <= 0)
    throw Error(ErrorKind::InvalidSpec, "sample_rate must be positive");
  if (full_scale <= 0)
    throw Error(ErrorKind::InvalidSpec, "full_scale must be positive");
  if (supply <= 0)
    throw Error(ErrorKind::InvalidSpec, "supply must be positive");
  if (temperature <= 0)
    throw Error(ErrorKind::InvalidSpec, "temperature must be positive");
  if (!(gamma_n > 0.0) || gamma_n > 4.0)
    throw Error(ErrorKind::InvalidSpec, "gamma_n must be in (0, 4]");
  if (head_cut_bits < 1)
    throw Error(ErrorKind::InvalidSpec, "head_cut_bits must be >= 1");
}

std::string Candidate::display() const {
  std::string out;
  for (int i = 0; i < head_len; ++i) {
    if (i) out += '-';
    out += std::to_string(stages[i]);
  }
  if (head_len < total_stages()) out += "...";
  return out;
}

namespace {

int compute_head_len(const std::vector<int>& stages, int head_cut) {
  int cum = 0;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    cum += stages[i] - 1;
    if (cum > head_cut) return static_cast<int>(i) + 1;
  }
  return static_cast<int>(stages.size());
}

Candidate make_candidate(const std::vector<int>& prefix, const AdcSpec& spec) {
  Candidate c;
  c.stages = prefix;
  int cum = 0;
  for (int m : prefix) cum += m - 1;
  c.stages.insert(c.stages.end(), spec.resolution_bits - cum, 2);
  c.head_len = compute_head_len(c.stages, spec.head_cut_bits);
  return c;
}

// Prefixes of stages carrying more than 2 bits; each such stage must keep
// the cumulative output resolution strictly below the head cut.
void expand_prefixes(std::vector<int>& prefix, int cum, const AdcSpec& spec,
                     std::vector<Candidate>& out) {
  out.push_back(make_candidate(prefix, spec));
  int max_m = prefix.empty() ? 4 : prefix.back();
  for (int m = 3; m <= max_m; ++m) {
    int next = cum + m - 1;
    if (next >= spec.head_cut_bits) continue;
    if (next > spec.resolution_bits) continue;
    prefix.push_back(m);
    expand_prefixes(prefix, next, spec, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<Candidate> enumerate_candidates(const AdcSpec& spec) {
  spec.validate();
  std::vector<Candidate> out;
  std::vector<int> prefix;
  expand_prefixes(prefix, 0, spec, out);
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    return a.stages > b.stages;  // lexicographically descending
  });
  return out;
}

Candidate candidate_from_prefix(const std::vector<int>& prefix,
                                const AdcSpec& spec) {
  spec.validate();
  if (prefix.empty())
    throw Error(ErrorKind::InvalidSpec, "empty candidate prefix");
  int cum = 0;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    int m = prefix[i];
    if (m < 2 || m > 4)
      throw Error(ErrorKind::InvalidSpec,
                  "stage resolution " + std::to_string(m) + " outside [2, 4]");
    if (i > 0 && m > prefix[i - 1])
      throw Error(ErrorKind::InvalidSpec,
                  "stage resolutions must be non-increasing");
    cum += m - 1;
    if (m > 2 && cum >= spec.head_cut_bits)
      throw Error(ErrorKind::InvalidSpec,
                  "stage " + std::to_string(i + 1) +
                      " resolves extra bits past the head cut");
  }
  if (cum > spec.resolution_bits)
    throw Error(ErrorKind::InvalidSpec, "prefix exceeds target resolution");
  std::vector<int> non2;
  for (int m : prefix)
    if (m > 2) non2.push_back(m);
  return make_candidate(non2, spec);
}

std::vector<MdacSpec> derive_mdac_specs(const Candidate& candidate,
                                        const AdcSpec& spec,
                                        double tail_load_cap,
                                        double cap_floor) {
  spec.validate();
  const int K = spec.resolution_bits;
  auto caps = noise_and_caps(spec, candidate);
  // Matching floor: an m-bit MDAC array is built from 2^(m-1) unit caps.
  for (std::size_t i = 0; i < caps.size(); ++i)
    caps[i] = std::max(caps[i],
                       cap_floor * std::pow(2.0, candidate.stages[i] - 1));
  // The final pipeline stage is a bare flash; it never gets an MDAC.
  int n = std::min(candidate.head_len, candidate.total_stages() - 1);
  std::vector<MdacSpec> specs;
  specs.reserve(n);
  for (int i = 0; i < n; ++i) {
    MdacSpec ms;
    ms.stage_resolution = candidate.stages[i];
    ms.closed_loop_gain = std::pow(2.0, candidate.stages[i] - 1);
    ms.accuracy_bits = K - candidate.bits_before(i);
    ms.settle_time = 0.5 / spec.sample_rate;
    ms.sampling_cap = caps[i];
    ms.load_cap = (i + 1 < n) ? caps[i + 1] : tail_load_cap;
    ms.full_scale = spec.full_scale;
    ms.supply = spec.supply;
    ms.temperature = spec.temperature;
    specs.push_back(ms);
  }
  return specs;
}

std::vector<UniqueMdac> collect_unique_mdacs(
    const std::vector<Candidate>& candidates, const AdcSpec& spec,
    double tail_load_cap, double cap_floor) {
  if (candidates.empty())
    throw Error(ErrorKind::InvalidSpec, "empty candidate set");
  std::vector<UniqueMdac> unique;
  for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
    auto specs = derive_mdac_specs(candidates[ci], spec, tail_load_cap, cap_floor);
    for (std::size_t si = 0; si < specs.size(); ++si) {
      const auto& ms = specs[si];
      auto it = std::find_if(unique.begin(), unique.end(), [&](const UniqueMdac& u) {
        return u.spec.stage_resolution == ms.stage_resolution &&
               u.spec.accuracy_bits == ms.accuracy_bits;
      });
      if (it == unique.end()) {
        unique.push_back({ms, {{static_cast<int>(ci), static_cast<int>(si)}}});
      } else {
        it->users.emplace_back(static_cast<int>(ci), static_cast<int>(si));
      }
    }
  }
  return unique;
}

}  // namespace adcflow
