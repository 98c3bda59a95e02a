#pragma once

#include <string>
#include <vector>

#include "adcflow/enumeration.hpp"
#include "adcflow/synth_cache.hpp"

namespace adcflow {

// Comparator-power model constants and tail estimation knobs.
struct PowerModel {
  double c_cmp = 0.01e-12;     // F; comparator energy = c_cmp * Vdd^2 per cycle
  double tail_taper = 0.5;     // per-stage decay of tail MDAC power
  double tail_load_cap = 2e-13;  // F, load presented past the head
  double cap_floor = 8e-15;    // F, minimum unit cap (array floor: 2^(m-1) units)
};

// 1-bit-redundancy flash: 2^m - 2 comparators.
int comparator_count(int m);

// (2^m - 2) * c_cmp * supply^2 * sample_rate.
double comparator_power(int m, const AdcSpec& spec, const PowerModel& pm);

struct StageRow {
  int stage = 0;  // 1-based
  int m = 0;
  int r = 0;
  double mdac_power_w = 0.0;
  int n_comparators = 0;
  double comp_power_w = 0.0;
};

struct PowerReport {
  Candidate candidate;
  std::vector<StageRow> rows;  // head stages
  double head_total_w = 0.0;
  double tail_estimate_w = 0.0;  // tapered tail MDACs + tail comparators
  double grand_total_w = 0.0;
  bool feasible = true;
  std::string infeasible_reason;
};

// Aggregates synthesized head stages plus the tail estimate. head_results
// must follow derive_mdac_specs order; tail_ref is the synthesized m=2
// reference stage at the head-exit accuracy (ignored when there is no
// tail).
PowerReport total_power(const Candidate& candidate,
                        const std::vector<SynthResult>& head_results,
                        const SynthResult* tail_ref, const AdcSpec& spec,
                        const PowerModel& pm);

struct RankTable {
  int resolution_bits = 0;
  std::vector<PowerReport> ranked;      // feasible, ascending grand total
  std::vector<PowerReport> infeasible;  // excluded, with reasons
};

// Enumerate -> synthesize unique MDACs through the cache -> rank by grand
// total. Ties break by fewer head stages, then lexicographic head.
RankTable rank_candidates(const AdcSpec& spec, const DeviceModel& dm,
                          const SynthOptions& opts, const PowerModel& pm,
                          SynthCache& cache, int jobs = 1);

// CSV/text emission (schemas shared with the CLI).
std::string rank_csv(const RankTable& table);
std::string rank_text_table(const RankTable& table);

// --- Behavioral pipeline ---------------------------------------------

struct PipelineSample {
  double input = 0.0;
  bool clipped = false;
  std::vector<int> codes;       // raw d_i per stage
  std::vector<double> residues; // v_{i+1} after each stage
  long long output_code = 0;
};

// Overlap-add of stage codes with one bit of redundancy per stage:
// out = floor(sum_i d_i * 2^(K - cum_i) / 2), clamped to [0, 2^K).
long long digital_correct(const std::vector<int>& codes,
                          const Candidate& candidate, int resolution_bits);

// Ideal switched-capacitor pipeline: per stage a 2^m - 2 comparator flash
// (uniform thresholds, optionally offset), DAC at threshold midpoints,
// residue gain 2^(m-1). Offsets: one vector per stage, one entry per
// comparator; empty means zero offsets.
std::vector<PipelineSample> simulate_pipeline(
    const Candidate& candidate, const std::vector<double>& inputs,
    const AdcSpec& spec,
    const std::vector<std::vector<double>>& comparator_offsets = {});

}  // namespace adcflow
