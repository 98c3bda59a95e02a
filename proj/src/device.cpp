#include "adcflow/device.hpp"

#include <cmath>
#include <string>

#include "adcflow/error.hpp"
#include "adcflow/units.hpp"

namespace adcflow {

void DeviceModel::validate() const {
  if (k_prime <= 0 || lambda <= 0 || min_length <= 0 || cgs_per_width <= 0 ||
      cj_per_width <= 0 || supply <= 0)
    throw Error(ErrorKind::InvalidSpec, "device model constants must be positive");
  if (!(vov_min > 0) || !(vov_max > vov_min))
    throw Error(ErrorKind::InvalidSpec, "overdrive bounds must be ordered");
}

std::uint64_t DeviceModel::hash() const {
  std::string blob;
  for (double v : {k_prime, lambda, vov_min, vov_max, min_length,
                   cgs_per_width, cj_per_width, supply})
    blob += double_to_hex(v) + ",";
  return fnv1a(blob);
}

DesignPoint DesignPoint::from_spec(const MdacSpec& spec, double i_tail,
                                   double v_ov, double load_scale,
                                   double mirror_overhead) {
  DesignPoint dp;
  dp.i_tail = i_tail;
  dp.v_ov = v_ov;
  dp.sampling_cap = spec.sampling_cap;
  dp.feedback_cap = spec.feedback_cap();
  dp.load_cap = spec.load_cap * load_scale;
  dp.mirror_overhead = mirror_overhead;
  return dp;
}

SmallSignalParams operating_point(const DesignPoint& dp, const DeviceModel& dm) {
  if (dp.i_tail <= 0)
    throw Error(ErrorKind::InfeasibleBias, "tail current must be positive");
  if (dp.v_ov < dm.vov_min || dp.v_ov > dm.vov_max)
    throw Error(ErrorKind::InfeasibleBias,
                "overdrive " + format_eng(dp.v_ov) + "V outside model bounds");
  const double id = dp.i_tail / 2.0;  // per input device
  SmallSignalParams ssp;
  ssp.gm = 2.0 * id / dp.v_ov;
  ssp.ro = 1.0 / (dm.lambda * id);
  const double width = dp.i_tail / (dm.k_prime * dp.v_ov * dp.v_ov);
  ssp.cgs = dm.cgs_per_width * width;
  ssp.cpar = dm.cj_per_width * width;
  ssp.slew_current = dp.i_tail;
  return ssp;
}

const char* mdac_template_netlist() {
  return "* mdac amplify-phase half circuit\n"
         "Cs   vi 0  cs\n"
         "Cgs  vi 0  cgs\n"
         "Cf   vi vo cf\n"
         "Gm   vo 0  vi 0 1m gm\n"
         "Ro   vo 0  ro\n"
         "Cl   vo 0  cl\n"
         "Iin  0  vi in\n"
         ".in vi\n"
         ".out vo\n";
}

namespace {

struct TemplateTf {
  SymbolicTf tf;
  ExprPtr loop_gain;  // the template's single feedback loop
};

const TemplateTf& template_tf() {
  static const TemplateTf cached = [] {
    Netlist nl = parse_netlist(mdac_template_netlist());
    Sfg sfg = build_sfg(nl);
    TemplateTf t{mason_transfer(sfg), nullptr};
    if (t.tf.record.loops.size() != 1)
      throw Error(ErrorKind::Internal, "mdac template must have one loop");
    t.loop_gain = t.tf.record.loops[0].gain;
    return t;
  }();
  return cached;
}

}  // namespace

MdacLinear mdac_linear_eval(const DesignPoint& dp, const MdacSpec& spec,
                            const DeviceModel& dm) {
  (void)spec;  // caps and bias live on the design point
  const SmallSignalParams ssp = operating_point(dp, dm);
  const auto& tpl = template_tf();

  Bindings b;
  b["cs"] = dp.sampling_cap;
  b["cgs"] = ssp.cgs;
  b["cf"] = dp.feedback_cap;
  b["gm"] = ssp.gm;
  b["ro"] = ssp.ro;
  b["cl"] = dp.load_cap + ssp.cpar;

  MdacLinear lin;
  // Return ratio T(s) = -L(s) of the template's feedback loop.
  lin.loop_tf = expand_expression(
      Expr::constant(-1.0) * tpl.loop_gain, Expr::constant(1.0), b);
  // Residue transfer: both C_s and C_f carry the sampled input charge, so
  // the input appears as a current s*(C_s+C_f)*v_in into the summing node.
  lin.closed_tf = bind_parameters(tpl.tf, b)
                      .times_monomial(dp.sampling_cap + dp.feedback_cap, 1);

  lin.beta = dp.feedback_cap / (dp.feedback_cap + dp.sampling_cap + ssp.cgs);
  lin.t0 = lin.loop_tf.eval(0.0).real();
  lin.closed_dc_gain = std::abs(lin.closed_tf.eval(0.0));
  const double c_in = dp.sampling_cap + ssp.cgs;
  lin.c_load_eff = dp.load_cap + ssp.cpar +
                   dp.feedback_cap * c_in / (dp.feedback_cap + c_in);
  return lin;
}

namespace {

// Homogeneous decay of the closed-loop denominator: den(d/dt) e = 0,
// integrated with fixed-step RK4 from (e0, e0') over duration T.
double linear_decay(const Poly& den, double e0, double de0, double duration,
                    int min_steps) {
  Poly d = den;
  d.trim();
  const std::size_t n = static_cast<std::size_t>(std::max(d.degree(), 0));
  if (n == 0 || duration <= 0.0) return n == 0 ? 0.0 : e0;
  std::vector<double> state(n, 0.0);
  state[0] = e0;
  if (n > 1) state[1] = de0;
  const double lead = d.c[n];
  std::vector<double> rate(n);
  for (std::size_t i = 0; i < n; ++i) rate[i] = d.c[i] / lead;

  auto deriv = [&](const std::vector<double>& x, std::vector<double>& dx) {
    for (std::size_t i = 0; i + 1 < n; ++i) dx[i] = x[i + 1];
    double top = 0.0;
    for (std::size_t i = 0; i < n; ++i) top -= rate[i] * x[i];
    dx[n - 1] = top;
  };

  const int steps = min_steps;
  const double h = duration / steps;
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (int s = 0; s < steps; ++s) {
    deriv(state, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = state[i] + 0.5 * h * k1[i];
    deriv(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = state[i] + 0.5 * h * k2[i];
    deriv(tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = state[i] + h * k3[i];
    deriv(tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return state[0];
}

}  // namespace

double settle_step(const MdacLinear& lin, const DesignPoint& dp,
                   const MdacSpec& spec, const DeviceModel& dm,
                   const EvalOptions& opts) {
  // Stability gate on the closed-loop poles.
  {
    auto pz_poles = poly_roots(lin.closed_tf.den);
    for (const auto& p : pz_poles) {
      if (p.real() >= -1e-6 * std::abs(p))
        throw Error(ErrorKind::UnstableLoop,
                    "closed loop has a non-left-half-plane pole");
    }
  }

  const SmallSignalParams ssp = operating_point(dp, dm);
  const double step = spec.full_scale / 2.0;
  const double boundary = opts.slew_boundary_factor * dp.v_ov;
  const double slew_rate = ssp.slew_current / lin.c_load_eff;

  double t_slew = 0.0;
  double e0 = step;
  double de0 = 0.0;
  if (step > boundary) {
    t_slew = (step - boundary) / slew_rate;
    if (t_slew > spec.settle_time) return 1.0;  // never leaves slewing
    e0 = boundary;
    de0 = -slew_rate;  // output still moving at SR at the handoff
  }

  const double remaining =
      linear_decay(lin.closed_tf.den, e0, de0, spec.settle_time - t_slew,
                   opts.settle_steps);
  return std::fabs(remaining) / spec.full_scale;
}

double settle_step(const DesignPoint& dp, const MdacSpec& spec,
                   const DeviceModel& dm, const EvalOptions& opts) {
  return settle_step(mdac_linear_eval(dp, spec, dm), dp, spec, dm, opts);
}

MdacPerformance evaluate_mdac(const DesignPoint& dp, const MdacSpec& spec,
                              const DeviceModel& dm, const EvalOptions& opts) {
  const MdacLinear lin = mdac_linear_eval(dp, spec, dm);
  MdacPerformance perf;
  perf.dc_loop_gain = lin.t0;

  const LoopMetrics lm = loop_metrics(lin.loop_tf, opts.margin_f_lo,
                                      opts.margin_f_hi,
                                      opts.grid_points_per_decade);
  perf.bandwidth_rad_s =
      lm.unity_gain_hz ? *lm.unity_gain_hz * 2.0 * M_PI : 0.0;
  perf.phase_margin_deg = lm.phase_margin_deg ? *lm.phase_margin_deg : 180.0;

  const double ideal = spec.closed_loop_gain;
  perf.static_error = 0.5 * std::fabs(lin.closed_dc_gain - ideal) / ideal;
  perf.dynamic_error = settle_step(lin, dp, spec, dm, opts);
  perf.total_error = perf.static_error + perf.dynamic_error;

  perf.noise_v2 = kBoltzmann * spec.temperature / (lin.beta * dp.sampling_cap);
  perf.power_w = spec.supply * dp.i_tail * dp.mirror_overhead;
  return perf;
}

std::vector<double> noise_and_caps(const AdcSpec& spec,
                                   const Candidate& candidate) {
  spec.validate();
  const double delta = spec.full_scale / std::pow(2.0, spec.resolution_bits);
  const double q2 = delta * delta / 12.0;
  const double budget = spec.gamma_n * q2;
  const double kt = kBoltzmann * spec.temperature;

  std::vector<double> caps;
  caps.reserve(candidate.stages.size());
  double share = 1.0;
  double gain2 = 1.0;  // squared cumulative gain before the stage
  for (int i = 0; i < candidate.total_stages(); ++i) {
    share *= 0.5;  // w_i = (1/2)^i, normalized over the infinite tail
    const int m = candidate.stages[i];
    const double beta = std::pow(2.0, -(m - 1));
    const double cap = kt / (beta * budget * share * gain2);
    if (cap > 100e-12)
      throw Error(ErrorKind::InfeasibleNoise,
                  "stage " + std::to_string(i + 1) + " sampling cap " +
                      format_eng(cap) + "F exceeds 100pF");
    caps.push_back(cap);
    gain2 *= std::pow(2.0, 2 * (m - 1));
  }
  return caps;
}

}  // namespace adcflow
