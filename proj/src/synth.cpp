#include "adcflow/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adcflow/error.hpp"
#include "adcflow/units.hpp"

namespace adcflow {

namespace {

// Platform-stable PRNG (splitmix64); libstdc++ distributions are not
// pinned across implementations, so draw bits directly.
std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

struct Box {
  double lo[3];
  double hi[3];  // log-space bounds for {i_tail, v_ov, load_scale}

  void clamp(double* x) const {
    for (int d = 0; d < 3; ++d) x[d] = std::min(hi[d], std::max(lo[d], x[d]));
  }
};

struct Objective {
  const MdacSpec& spec;
  const DeviceModel& dm;
  const SynthOptions& opts;
  mutable int evals = 0;

  DesignPoint design(const double* x) const {
    return DesignPoint::from_spec(spec, std::exp(x[0]), std::exp(x[1]),
                                  std::exp(x[2]), opts.eval.mirror_overhead);
  }

  // Penalized power; infeasible evaluations (unstable loop, bad bias)
  // price far above any real design. error_out carries the total error
  // for margin tie-breaking between equal-power points.
  double operator()(const double* x, MdacPerformance* perf_out = nullptr,
                    ConstraintReport* rep_out = nullptr,
                    double* error_out = nullptr) const {
    ++evals;
    const DesignPoint dp = design(x);
    if (error_out) *error_out = 1e30;
    try {
      MdacPerformance perf = evaluate_mdac(dp, spec, dm, opts.eval);
      ConstraintReport rep = check_constraints(perf, dp, spec, dm, opts);
      if (perf_out) *perf_out = perf;
      if (rep_out) *rep_out = rep;
      if (error_out) *error_out = perf.total_error;
      return perf.power_w *
             (1.0 + opts.penalty_scale * rep.penalty_sum_sq);
    } catch (const Error&) {
      if (rep_out) *rep_out = ConstraintReport{};
      return 1e30 * (1.0 + std::exp(x[0]));
    }
  }
};

}  // namespace

double error_budget(const MdacSpec& spec) {
  return std::pow(2.0, -(spec.accuracy_bits + 1));
}

ConstraintReport check_constraints(const MdacPerformance& perf,
                                   const DesignPoint& dp, const MdacSpec& spec,
                                   const DeviceModel& dm,
                                   const SynthOptions& opts) {
  ConstraintReport rep;
  const double budget = error_budget(spec);
  auto add = [&](const std::string& name, double violation) {
    rep.violations.emplace_back(name, violation);
    if (violation > 0.0) rep.penalty_sum_sq += violation * violation;
  };
  add("total_error", (perf.total_error - budget) / budget);
  add("phase_margin",
      (opts.pm_floor_deg - perf.phase_margin_deg) / opts.pm_floor_deg);
  add("vov_min", (dm.vov_min - dp.v_ov) / dm.vov_min);
  add("vov_max", (dp.v_ov - dm.vov_max) / dm.vov_max);
  rep.feasible = rep.penalty_sum_sq == 0.0;
  return rep;
}

std::uint64_t SynthOptions::hash() const {
  std::string blob;
  blob += std::to_string(seed) + "," + std::to_string(starts) + "," +
          std::to_string(evals_per_start) + ",";
  for (double v : {pm_floor_deg, penalty_scale, i_tail_min, i_tail_max,
                   load_scale_max, eval.slew_boundary_factor,
                   eval.mirror_overhead, static_cast<double>(eval.settle_steps),
                   static_cast<double>(eval.grid_points_per_decade),
                   eval.margin_f_lo, eval.margin_f_hi})
    blob += double_to_hex(v) + ",";
  return fnv1a(blob);
}

SynthResult synthesize_mdac(const MdacSpec& spec, const DeviceModel& dm,
                            const SynthOptions& opts) {
  dm.validate();
  if (spec.sampling_cap <= 0 || spec.load_cap <= 0 || spec.settle_time <= 0)
    throw Error(ErrorKind::InvalidSpec, "mdac spec caps/timing must be positive");

  Objective objective{spec, dm, opts};
  Box box{{std::log(opts.i_tail_min), std::log(dm.vov_min), 0.0},
          {std::log(opts.i_tail_max), std::log(dm.vov_max),
           std::log(opts.load_scale_max)}};

  // Heuristic first start: current sized from the linear-settling time
  // constant at a mid-range overdrive.
  auto heuristic_start = [&](double v_ov, double* x) {
    const double cf = spec.feedback_cap();
    const double beta0 = cf / (cf + spec.sampling_cap);
    const double c_eff = spec.load_cap +
                         cf * spec.sampling_cap / (cf + spec.sampling_cap);
    const double nt = std::log(std::pow(2.0, spec.accuracy_bits + 2));
    const double tau = spec.settle_time * 0.5 / std::max(nt, 1.0);
    const double gm = c_eff / (beta0 * tau);
    x[0] = std::log(gm * v_ov);
    x[1] = std::log(v_ov);
    x[2] = 0.0;
    box.clamp(x);
  };

  std::uint64_t rng = opts.seed;

  double best_x[3] = {0, 0, 0};
  double best_f = std::numeric_limits<double>::infinity();

  const int starts = std::max(1, opts.starts);
  for (int s = 0; s < starts; ++s) {
    double x[3];
    if (s == 0) {
      heuristic_start(std::sqrt(dm.vov_min * dm.vov_max), x);
    } else if (s == 1) {
      heuristic_start(dm.vov_min * 1.5, x);
    } else {
      for (int d = 0; d < 3; ++d)
        x[d] = box.lo[d] + uniform01(rng) * (box.hi[d] - box.lo[d]);
    }

    double ex;
    double fx = objective(x, nullptr, nullptr, &ex);
    double step = 0.6;
    int spent = 1;
    while (spent < opts.evals_per_start && step > 1e-5) {
      bool improved = false;
      for (int d = 0; d < 3 && spent < opts.evals_per_start; ++d) {
        for (double dir : {+1.0, -1.0}) {
          double y[3] = {x[0], x[1], x[2]};
          y[d] += dir * step;
          box.clamp(y);
          if (y[d] == x[d]) continue;
          double ey;
          double fy = objective(y, nullptr, nullptr, &ey);
          ++spent;
          // Equal-power moves still win on error margin: V_ov and the
          // load scale do not show up in the power term.
          if (fy < fx || (fy == fx && ey < ex)) {
            std::copy(y, y + 3, x);
            fx = fy;
            ex = ey;
            improved = true;
            break;
          }
          if (spent >= opts.evals_per_start) break;
        }
      }
      if (!improved) step *= 0.5;
    }
    if (fx < best_f) {
      best_f = fx;
      std::copy(x, x + 3, best_x);
    }
  }

  // Final polish. Power depends on the current alone, so the constrained
  // optimum is min over (V_ov, load scale) of the minimal feasible
  // current; error falls monotonically with I_tail at fixed bias, which
  // makes the inner problem a bisection.
  {
    auto feasible_at = [&](double xi, double x1, double x2) {
      double y[3] = {xi, x1, x2};
      ConstraintReport r;
      objective(y, nullptr, &r);
      return r.feasible;
    };
    auto min_feasible_current = [&](double x1, double x2,
                                    double seed_xi) -> double {
      double hi = seed_xi;
      bool have = feasible_at(hi, x1, x2);
      while (!have && hi < box.hi[0]) {
        hi = std::min(box.hi[0], hi + std::log(2.0));
        have = feasible_at(hi, x1, x2);
      }
      if (!have) return std::numeric_limits<double>::infinity();
      double lo = hi;
      bool bracketed = false;
      while (lo > box.lo[0]) {
        double cand = std::max(box.lo[0], lo - std::log(2.0));
        if (!feasible_at(cand, x1, x2)) {
          lo = cand;
          bracketed = true;
          break;
        }
        lo = cand;
        hi = cand;
      }
      if (bracketed) {
        for (int it = 0; it < 44 && (hi - lo) > 1e-10; ++it) {
          double mid = 0.5 * (lo + hi);
          if (feasible_at(mid, x1, x2))
            hi = mid;
          else
            lo = mid;
        }
      }
      return hi;
    };

    double x1 = best_x[1], x2 = best_x[2];
    double xi = min_feasible_current(x1, x2, best_x[0]);
    if (std::isfinite(xi)) {
      double step = 0.1;
      while (step > 2e-4) {
        bool improved = false;
        for (int d = 1; d <= 2; ++d) {
          for (double dir : {+1.0, -1.0}) {
            double y1 = x1, y2 = x2;
            (d == 1 ? y1 : y2) += dir * step;
            double y[3] = {xi, y1, y2};
            box.clamp(y);
            y1 = y[1];
            y2 = y[2];
            if (y1 == x1 && y2 == x2) continue;
            double cand = min_feasible_current(y1, y2, xi);
            if (cand < xi - 1e-12) {
              xi = cand;
              x1 = y1;
              x2 = y2;
              improved = true;
            }
          }
        }
        if (!improved) step *= 0.5;
      }
      best_x[0] = xi;
      best_x[1] = x1;
      best_x[2] = x2;
    }
  }

  SynthResult result;
  result.spec = spec;
  MdacPerformance perf;
  ConstraintReport rep;
  objective(best_x, &perf, &rep);
  result.design = objective.design(best_x);
  result.performance = perf;
  result.feasible = rep.feasible;
  result.iterations = objective.evals;
  result.load_scale = std::exp(best_x[2]);
  return result;
}

}  // namespace adcflow
