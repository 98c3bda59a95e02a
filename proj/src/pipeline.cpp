#include "adcflow/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "adcflow/error.hpp"
#include "adcflow/units.hpp"

namespace adcflow {

int comparator_count(int m) {
  if (m < 2 || m > 4)
    throw Error(ErrorKind::InvalidSpec, "stage resolution outside [2, 4]");
  return (1 << m) - 2;
}

double comparator_power(int m, const AdcSpec& spec, const PowerModel& pm) {
  return comparator_count(m) * pm.c_cmp * spec.supply * spec.supply *
         spec.sample_rate;
}

PowerReport total_power(const Candidate& candidate,
                        const std::vector<SynthResult>& head_results,
                        const SynthResult* tail_ref, const AdcSpec& spec,
                        const PowerModel& pm) {
  PowerReport report;
  report.candidate = candidate;
  const int K = spec.resolution_bits;
  const int M = candidate.total_stages();
  const int n_head_mdacs = std::min(candidate.head_len, M - 1);
  if (static_cast<int>(head_results.size()) != n_head_mdacs)
    throw Error(ErrorKind::ContractViolation,
                "head result count does not match candidate head");

  for (int i = 0; i < n_head_mdacs; ++i) {
    const auto& sr = head_results[i];
    if (!sr.feasible) {
      report.feasible = false;
      report.infeasible_reason = "stage " + std::to_string(i + 1) + " (m=" +
                                 std::to_string(sr.spec.stage_resolution) +
                                 ", r=" + std::to_string(sr.spec.accuracy_bits) +
                                 ") infeasible";
    }
    StageRow row;
    row.stage = i + 1;
    row.m = candidate.stages[i];
    row.r = K - candidate.bits_before(i);
    row.mdac_power_w = sr.performance.power_w;
    row.n_comparators = comparator_count(row.m);
    row.comp_power_w = comparator_power(row.m, spec, pm);
    report.rows.push_back(row);
    report.head_total_w += row.mdac_power_w + row.comp_power_w;
  }
  // A head that covers the whole pipeline still pays the final flash.
  if (candidate.head_len == M) {
    StageRow row;
    row.stage = M;
    row.m = candidate.stages[M - 1];
    row.r = K - candidate.bits_before(M - 1);
    row.mdac_power_w = 0.0;
    row.n_comparators = comparator_count(row.m);
    row.comp_power_w = comparator_power(row.m, spec, pm);
    report.rows.push_back(row);
    report.head_total_w += row.comp_power_w;
  }

  // Tail estimate: tapered copies of the reference m=2 stage for the tail
  // MDACs plus a comparator bank per tail stage.
  const int n_tail = M - candidate.head_len;
  if (n_tail > 0) {
    if (tail_ref == nullptr)
      throw Error(ErrorKind::ContractViolation,
                  "tail reference stage missing");
    if (!tail_ref->feasible && report.feasible) {
      report.feasible = false;
      report.infeasible_reason = "tail reference stage infeasible";
    }
    // MDACs exist for stages head_len+1 .. M-1; the final stage is a bare
    // flash.
    const int count = std::max(0, M - 1 - candidate.head_len);
    double taper = 1.0;
    for (int j = 0; j < count; ++j) {
      report.tail_estimate_w += tail_ref->performance.power_w * taper;
      taper *= pm.tail_taper;
    }
    report.tail_estimate_w += n_tail * comparator_power(2, spec, pm);
  }

  report.grand_total_w = report.head_total_w + report.tail_estimate_w;
  return report;
}

namespace {

// The accuracy left after the head: r of the first tail stage.
int head_exit_r(const Candidate& candidate, int K) {
  return K - candidate.bits_before(candidate.head_len);
}

}  // namespace

RankTable rank_candidates(const AdcSpec& spec, const DeviceModel& dm,
                          const SynthOptions& opts, const PowerModel& pm,
                          SynthCache& cache, int jobs) {
  spec.validate();
  RankTable table;
  table.resolution_bits = spec.resolution_bits;

  const auto candidates = enumerate_candidates(spec);

  // Candidates whose noise sizing is unrealizable drop out with a reason
  // instead of aborting the whole ranking.
  std::vector<Candidate> sizable;
  for (const auto& cand : candidates) {
    try {
      noise_and_caps(spec, cand);
      sizable.push_back(cand);
    } catch (const Error& e) {
      PowerReport report;
      report.candidate = cand;
      report.feasible = false;
      report.infeasible_reason = e.what();
      table.infeasible.push_back(std::move(report));
    }
  }
  if (sizable.empty()) return table;
  auto uniques =
      collect_unique_mdacs(sizable, spec, pm.tail_load_cap, pm.cap_floor);

  // Tail reference specs join the synthesis batch under their (m, r) key.
  for (const auto& cand : sizable) {
    if (cand.head_len >= cand.total_stages()) continue;
    auto caps = noise_and_caps(spec, cand);
    for (std::size_t i = 0; i < caps.size(); ++i)
      caps[i] = std::max(caps[i],
                         pm.cap_floor * std::pow(2.0, cand.stages[i] - 1));
    MdacSpec ms;
    ms.stage_resolution = 2;
    ms.closed_loop_gain = 2.0;
    ms.accuracy_bits = head_exit_r(cand, spec.resolution_bits);
    ms.settle_time = 0.5 / spec.sample_rate;
    ms.sampling_cap = caps[cand.head_len];
    ms.load_cap = cand.head_len + 1 < cand.total_stages()
                      ? caps[cand.head_len + 1]
                      : pm.tail_load_cap;
    ms.full_scale = spec.full_scale;
    ms.supply = spec.supply;
    ms.temperature = spec.temperature;
    bool seen = false;
    for (const auto& u : uniques)
      if (u.spec.stage_resolution == ms.stage_resolution &&
          u.spec.accuracy_bits == ms.accuracy_bits)
        seen = true;
    if (!seen) uniques.push_back({ms, {}});
  }

  // Synthesize every unique spec through the cache, optionally fanned out
  // over a worker pool (results are deterministic regardless).
  {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= uniques.size()) return;
        get_or_synthesize(uniques[i].spec, dm, opts, cache);
      }
    };
    const int n = std::max(1, jobs);
    if (n == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < n; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
  }

  auto lookup = [&](int m, int r) {
    CacheKey key{m, r, opts.hash(), dm.hash()};
    auto hit = cache.find(key);
    if (!hit)
      throw Error(ErrorKind::Internal, "cache lost a synthesized stage");
    return *hit;
  };

  for (const auto& cand : sizable) {
    auto specs =
        derive_mdac_specs(cand, spec, pm.tail_load_cap, pm.cap_floor);
    std::vector<SynthResult> head;
    head.reserve(specs.size());
    for (const auto& ms : specs)
      head.push_back(lookup(ms.stage_resolution, ms.accuracy_bits));
    SynthResult tail_ref;
    const SynthResult* tail_ptr = nullptr;
    if (cand.head_len < cand.total_stages()) {
      tail_ref = lookup(2, head_exit_r(cand, spec.resolution_bits));
      tail_ptr = &tail_ref;
    }
    PowerReport report = total_power(cand, head, tail_ptr, spec, pm);
    if (report.feasible)
      table.ranked.push_back(std::move(report));
    else
      table.infeasible.push_back(std::move(report));
  }

  std::sort(table.ranked.begin(), table.ranked.end(),
            [](const PowerReport& a, const PowerReport& b) {
              if (a.grand_total_w != b.grand_total_w)
                return a.grand_total_w < b.grand_total_w;
              if (a.candidate.head_len != b.candidate.head_len)
                return a.candidate.head_len < b.candidate.head_len;
              return a.candidate.stages < b.candidate.stages;
            });
  return table;
}

std::string rank_csv(const RankTable& table) {
  std::ostringstream os;
  os << "K,candidate,stage,m,r,mdac_power_W,n_comparators,comp_power_W,total_W\n";
  char buf[64];
  for (const auto& report : table.ranked) {
    for (const auto& row : report.rows) {
      os << table.resolution_bits << "," << report.candidate.display() << ","
         << row.stage << "," << row.m << "," << row.r << ",";
      std::snprintf(buf, sizeof(buf), "%.9e", row.mdac_power_w);
      os << buf << "," << row.n_comparators << ",";
      std::snprintf(buf, sizeof(buf), "%.9e", row.comp_power_w);
      os << buf << ",";
      std::snprintf(buf, sizeof(buf), "%.9e", report.grand_total_w);
      os << buf << "\n";
    }
  }
  return os.str();
}

std::string rank_text_table(const RankTable& table) {
  std::ostringstream os;
  os << "K=" << table.resolution_bits << " candidates by total power\n";
  char line[160];
  std::snprintf(line, sizeof(line), "%-24s %10s %12s %12s %12s\n", "candidate",
                "stages", "head_W", "tail_W", "total_W");
  os << line;
  for (const auto& r : table.ranked) {
    std::snprintf(line, sizeof(line), "%-24s %10d %12.4e %12.4e %12.4e\n",
                  r.candidate.display().c_str(), r.candidate.total_stages(),
                  r.head_total_w, r.tail_estimate_w, r.grand_total_w);
    os << line;
  }
  for (const auto& r : table.infeasible) {
    std::snprintf(line, sizeof(line), "%-24s excluded: %s\n",
                  r.candidate.display().c_str(), r.infeasible_reason.c_str());
    os << line;
  }
  return os.str();
}

long long digital_correct(const std::vector<int>& codes,
                          const Candidate& candidate, int resolution_bits) {
  const int M = candidate.total_stages();
  if (static_cast<int>(codes.size()) != M)
    throw Error(ErrorKind::ContractViolation,
                "code count does not match candidate stages");
  long long sum = 0;
  int cum = 0;
  for (int i = 0; i < M; ++i) {
    const int m = candidate.stages[i];
    if (codes[i] < 0 || codes[i] >= (1 << m))
      throw Error(ErrorKind::ContractViolation,
                  "stage " + std::to_string(i + 1) + " code out of range");
    cum += m - 1;
    sum += static_cast<long long>(codes[i]) << (resolution_bits - cum);
  }
  long long out = sum >> 1;  // floor of the half-weighted overlap-add
  const long long max_code = (1ll << resolution_bits) - 1;
  return std::min(max_code, std::max(0ll, out));
}

std::vector<PipelineSample> simulate_pipeline(
    const Candidate& candidate, const std::vector<double>& inputs,
    const AdcSpec& spec,
    const std::vector<std::vector<double>>& comparator_offsets) {
  spec.validate();
  const int M = candidate.total_stages();
  const double vfs = spec.full_scale;
  if (!comparator_offsets.empty() &&
      static_cast<int>(comparator_offsets.size()) != M)
    throw Error(ErrorKind::ContractViolation,
                "offset vectors must cover every stage");

  std::vector<PipelineSample> samples;
  samples.reserve(inputs.size());
  for (double vin : inputs) {
    PipelineSample sample;
    sample.input = vin;
    double v = vin;
    if (v > vfs / 2 || v < -vfs / 2) {
      sample.clipped = true;
      v = std::min(vfs / 2, std::max(-vfs / 2, v));
    }
    for (int i = 0; i < M; ++i) {
      const int m = candidate.stages[i];
      const int n_cmp = comparator_count(m);
      const double lsb = vfs / std::pow(2.0, m + 1);
      int code = 0;
      for (int d = 1; d <= n_cmp; ++d) {
        double threshold = (2.0 * d - ((1 << m) - 1)) * lsb;
        if (!comparator_offsets.empty()) {
          if (static_cast<int>(comparator_offsets[i].size()) != n_cmp)
            throw Error(ErrorKind::ContractViolation,
                        "stage " + std::to_string(i + 1) +
                            " offset count mismatch");
          threshold += comparator_offsets[i][d - 1];
        }
        if (v >= threshold) code = d;
      }
      const double dac = (2.0 * code - ((1 << m) - 2)) * lsb;
      v = std::pow(2.0, m - 1) * (v - dac);
      sample.codes.push_back(code);
      sample.residues.push_back(v);
    }
    sample.output_code =
        digital_correct(sample.codes, candidate, spec.resolution_bits);
    samples.push_back(std::move(sample));
  }
  return samples;
}

}  // namespace adcflow
