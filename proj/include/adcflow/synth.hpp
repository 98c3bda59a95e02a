#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adcflow/adc_types.hpp"
#include "adcflow/device.hpp"

namespace adcflow {

// Deterministic multi-start coordinate pattern search settings. The same
// seed, spec, model, and options always reproduce the same result bit for
// bit.
struct SynthOptions {
  std::uint64_t seed = 12345;
  int starts = 8;
  int evals_per_start = 400;
  double pm_floor_deg = 60.0;
  double penalty_scale = 1000.0;  // sharpens the static penalty's boundary
  double i_tail_min = 0.5e-6;  // A
  double i_tail_max = 100e-3;  // A
  double load_scale_max = 4.0; // C_L multiplier upper bound (lower is 1)
  EvalOptions eval;

  std::uint64_t hash() const;
};

struct ConstraintReport {
  bool feasible = false;
  // name, violation/tolerance (positive past the limit), for each check
  std::vector<std::pair<std::string, double>> violations;
  double penalty_sum_sq = 0.0;
};

struct SynthResult {
  MdacSpec spec;
  DesignPoint design;
  MdacPerformance performance;
  bool feasible = false;
  int iterations = 0;   // objective evaluations spent
  double load_scale = 1.0;
};

// Half-LSB error budget at the stage's residual resolution.
double error_budget(const MdacSpec& spec);

// Static checks against the spec: total error within budget, phase margin
// above the floor, bias inside the model bounds.
ConstraintReport check_constraints(const MdacPerformance& perf,
                                   const DesignPoint& dp, const MdacSpec& spec,
                                   const DeviceModel& dm,
                                   const SynthOptions& opts);

// Minimizes power over {I_tail, V_ov, load scale} in log space with a
// static penalty; caps are fixed by the spec. Infeasible outcomes return
// the best-effort point flagged feasible=false rather than throwing.
SynthResult synthesize_mdac(const MdacSpec& spec, const DeviceModel& dm,
                            const SynthOptions& opts);

}  // namespace adcflow
