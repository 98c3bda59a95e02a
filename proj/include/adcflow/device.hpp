#pragma once

#include <cstdint>
#include <vector>

#include "adcflow/adc_types.hpp"
#include "adcflow/rational.hpp"

namespace adcflow {

// Analytic square-law operating-point model standing in for a DC
// simulation. All numbers are calibration constants for a 0.25um-class
// 3.3V process, set in the config file; they are artifact defaults, not
// measured data. lambda is the effective output-conductance parameter of
// the (cascoded) amplifier, hence far below a bare device's CLM.
struct DeviceModel {
  double k_prime = 700.0;         // A/V^2 per meter of width at min length
  double lambda = 1e-4;           // 1/V
  double vov_min = 0.02;          // V
  double vov_max = 0.5;           // V
  double min_length = 0.25e-6;    // m
  double cgs_per_width = 1.5e-9;  // F/m
  double cj_per_width = 0.1e-9;   // F/m
  double supply = 3.3;            // V

  void validate() const;
  std::uint64_t hash() const;
};

// Evaluation knobs shared by the linear and transient paths.
struct EvalOptions {
  double slew_boundary_factor = 0.2;  // linear settling below this * V_ov
  double mirror_overhead = 1.25;      // bias/mirror current multiplier
  int settle_steps = 1024;            // minimum transient step count
  int grid_points_per_decade = 64;
  double margin_f_lo = 1e4;           // Hz, crossover search range
  double margin_f_hi = 1e11;          // Hz
};

struct SmallSignalParams {
  double gm = 0.0;      // S
  double ro = 0.0;      // ohm
  double cgs = 0.0;     // F, amplifier input parasitic
  double cpar = 0.0;    // F, amplifier output junction parasitic
  double slew_current = 0.0;  // A
};

// One point in the MDAC design space.
struct DesignPoint {
  double i_tail = 0.0;          // A
  double v_ov = 0.0;            // V
  double sampling_cap = 0.0;    // C_s
  double feedback_cap = 0.0;    // C_f = C_s / (2^(m-1) - 1)
  double load_cap = 0.0;        // C_L presented to the stage
  double mirror_overhead = 1.25;

  static DesignPoint from_spec(const MdacSpec& spec, double i_tail, double v_ov,
                               double load_scale, double mirror_overhead);
};

struct MdacPerformance {
  double dc_loop_gain = 0.0;        // T0
  double bandwidth_rad_s = 0.0;     // loop unity-gain crossover
  double phase_margin_deg = 0.0;
  double static_error = 0.0;        // fraction of full scale
  double dynamic_error = 0.0;       // fraction of full scale
  double total_error = 0.0;         // static + dynamic
  double noise_v2 = 0.0;            // input-referred thermal noise
  double power_w = 0.0;             // supply * I_tail * mirror overhead
};

// gm = 2*(I_tail/2)/V_ov, ro = 1/(lambda*(I_tail/2)), parasitics scale
// with the implied width W = I_tail/(k'*V_ov^2).
SmallSignalParams operating_point(const DesignPoint& dp, const DeviceModel& dm);

// Linear metrics of the amplify-phase MDAC derived through the SFG path.
struct MdacLinear {
  RationalFunction loop_tf;    // return ratio T(s)
  RationalFunction closed_tf;  // v_out / v_in (half-circuit sign: inverting)
  double t0 = 0.0;             // T(0)
  double beta = 0.0;           // C_f / (C_f + C_s + cgs)
  double c_load_eff = 0.0;     // slew-relevant effective load
  double closed_dc_gain = 0.0; // |closed_tf(0)|
};

MdacLinear mdac_linear_eval(const DesignPoint& dp, const MdacSpec& spec,
                            const DeviceModel& dm);

// The embedded amplify-phase template in netlist form.
const char* mdac_template_netlist();

// Worst-case step settling with the slew-then-linear model. Returns the
// remaining error at settle_time as a fraction of full scale; a slew
// phase that outlasts settle_time returns 1.0. Throws
// Error(UnstableLoop) when the closed loop has a right-half-plane pole.
double settle_step(const DesignPoint& dp, const MdacSpec& spec,
                   const DeviceModel& dm, const EvalOptions& opts);

// settle_step given an already computed linear evaluation.
double settle_step(const MdacLinear& lin, const DesignPoint& dp,
                   const MdacSpec& spec, const DeviceModel& dm,
                   const EvalOptions& opts);

// Full hybrid evaluation: equations for the linear metrics, transient
// integration for the large-swing settling.
MdacPerformance evaluate_mdac(const DesignPoint& dp, const MdacSpec& spec,
                              const DeviceModel& dm, const EvalOptions& opts);

// kT/C sizing from the thermal budget gamma_n * (quantization noise).
// Stage i (1-based) takes share (1/2)^i of the input-referred budget,
// amplified by the squared gain in front of it:
//   C_i = kT / (beta_i * budget * w_i * G_{<i}^2)
// with beta_i the zero-parasitic feedback factor 2^-(m_i-1). Returns one
// cap per pipeline stage; throws Error(InfeasibleNoise) above 100 pF.
std::vector<double> noise_and_caps(const AdcSpec& spec,
                                   const Candidate& candidate);

}  // namespace adcflow
