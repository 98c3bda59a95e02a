#include "adcflow/rational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adcflow/error.hpp"

namespace adcflow {

namespace {

// Polynomial with a running magnitude bound per coefficient, used to tell
// true coefficients from cancellation residue after expansion.
struct TrackedPoly {
  Poly p;
  Poly mag;  // same ops with absolute values, additions only

  static TrackedPoly constant(double v) { return {Poly({v}), Poly({std::fabs(v)})}; }
  static TrackedPoly freq() { return {Poly({0.0, 1.0}), Poly({0.0, 1.0})}; }
};

TrackedPoly add(const TrackedPoly& a, const TrackedPoly& b) {
  return {a.p + b.p, a.mag + b.mag};
}

TrackedPoly sub(const TrackedPoly& a, const TrackedPoly& b) {
  return {a.p - b.p, a.mag + b.mag};
}

TrackedPoly mul(const TrackedPoly& a, const TrackedPoly& b) {
  // Magnitude companions are nonnegative by construction.
  return {a.p * b.p, a.mag * b.mag};
}

struct TrackedRational {
  TrackedPoly num;
  TrackedPoly den;

  // Keep constant denominators folded into the numerator so Mason's
  // division-free trees expand as plain polynomials.
  void fold_constant_den() {
    den.p.trim();
    den.mag.trim();
    if (den.p.degree() == 0) {
      double d = den.p.c[0];
      for (double& v : num.p.c) v /= d;
      for (double& v : num.mag.c) v /= std::fabs(d);
      den = TrackedPoly::constant(1.0);
    }
  }
};

TrackedRational expand(const ExprPtr& e, const Bindings& bindings) {
  switch (e->kind()) {
    case Expr::Kind::Constant:
      return {TrackedPoly::constant(e->value()), TrackedPoly::constant(1.0)};
    case Expr::Kind::Parameter: {
      auto it = bindings.find(e->name());
      if (it == bindings.end())
        throw Error(ErrorKind::UnboundParameter,
                    "unbound parameter '" + e->name() + "'");
      return {TrackedPoly::constant(it->second), TrackedPoly::constant(1.0)};
    }
    case Expr::Kind::Freq:
      return {TrackedPoly::freq(), TrackedPoly::constant(1.0)};
    case Expr::Kind::Add:
    case Expr::Kind::Sub: {
      TrackedRational a = expand(e->lhs(), bindings);
      TrackedRational b = expand(e->rhs(), bindings);
      TrackedRational r;
      bool same_den = a.den.p.c == b.den.p.c;
      if (same_den) {
        r.num = e->kind() == Expr::Kind::Add ? add(a.num, b.num)
                                             : sub(a.num, b.num);
        r.den = a.den;
      } else {
        TrackedPoly ad = mul(a.num, b.den);
        TrackedPoly cb = mul(b.num, a.den);
        r.num = e->kind() == Expr::Kind::Add ? add(ad, cb) : sub(ad, cb);
        r.den = mul(a.den, b.den);
      }
      r.fold_constant_den();
      return r;
    }
    case Expr::Kind::Mul: {
      TrackedRational a = expand(e->lhs(), bindings);
      TrackedRational b = expand(e->rhs(), bindings);
      TrackedRational r{mul(a.num, b.num), mul(a.den, b.den)};
      r.fold_constant_den();
      return r;
    }
    case Expr::Kind::Div: {
      TrackedRational a = expand(e->lhs(), bindings);
      TrackedRational b = expand(e->rhs(), bindings);
      TrackedRational r{mul(a.num, b.den), mul(a.den, b.num)};
      r.fold_constant_den();
      return r;
    }
  }
  throw Error(ErrorKind::Internal, "corrupt expression node");
}

// Zero out cancellation residue and drop trailing zeros.
void clean(TrackedPoly& tp) {
  constexpr double kRel = 1e-12;
  for (std::size_t i = 0; i < tp.p.c.size(); ++i) {
    double bound = i < tp.mag.c.size() ? tp.mag.c[i] : 0.0;
    if (std::fabs(tp.p.c[i]) <= kRel * bound) tp.p.c[i] = 0.0;
  }
  tp.p.trim();
}

}  // namespace

RationalFunction RationalFunction::times_monomial(double k, int power) const {
  RationalFunction r = *this;
  Poly mono;
  mono.c.assign(static_cast<std::size_t>(power) + 1, 0.0);
  mono.c.back() = k;
  r.num = r.num * mono;
  r.normalize();
  return r;
}

void RationalFunction::normalize() {
  num.trim();
  den.trim();
  if (den.is_zero())
    throw Error(ErrorKind::DegeneratePolynomial,
                "denominator is identically zero");
  // Cancel a common s^k factor (exact zeros only).
  if (!num.is_zero()) {
    std::size_t k = 0;
    while (k < num.c.size() && k < den.c.size() && num.c[k] == 0.0 &&
           den.c[k] == 0.0)
      ++k;
    if (k > 0) {
      num.c.erase(num.c.begin(), num.c.begin() + static_cast<long>(k));
      den.c.erase(den.c.begin(), den.c.begin() + static_cast<long>(k));
    }
  }
  std::size_t low = 0;
  while (den.c[low] == 0.0) ++low;
  double scale = 1.0 / den.c[low];
  num = num.scaled(scale);
  den = den.scaled(scale);
  den.c[low] = 1.0;  // exact
}

RationalFunction expand_expression(const ExprPtr& num_expr,
                                   const ExprPtr& den_expr,
                                   const Bindings& bindings) {
  TrackedRational n = expand(num_expr, bindings);
  TrackedRational d = expand(den_expr, bindings);
  // H = (n.num/n.den) / (d.num/d.den)
  TrackedPoly num = mul(n.num, d.den);
  TrackedPoly den = mul(d.num, n.den);
  clean(num);
  clean(den);
  RationalFunction rf{num.p, den.p};
  rf.normalize();
  return rf;
}

RationalFunction bind_parameters(const SymbolicTf& tf, const Bindings& bindings) {
  return expand_expression(tf.numerator, tf.denominator, bindings);
}

PoleZeroResult poles_zeros(const RationalFunction& rf) {
  if (rf.den.is_zero())
    throw Error(ErrorKind::DegeneratePolynomial,
                "denominator is identically zero");
  PoleZeroResult result;
  result.poles = poly_roots(rf.den);
  if (!rf.num.is_zero() && rf.num.degree() > 0)
    result.zeros = poly_roots(rf.num);
  else if (rf.num.is_zero())
    throw Error(ErrorKind::DegeneratePolynomial,
                "numerator is identically zero");
  return result;
}

namespace {

double phase_unwrap_step(double prev, double next) {
  double d = next - prev;
  while (d > M_PI) d -= 2.0 * M_PI;
  while (d < -M_PI) d += 2.0 * M_PI;
  return prev + d;
}

}  // namespace

LoopMetrics loop_metrics(const RationalFunction& rf, double f_lo_hz,
                         double f_hi_hz, int points_per_decade) {
  if (!(f_lo_hz > 0.0) || !(f_hi_hz > f_lo_hz))
    throw Error(ErrorKind::InvalidSpec, "frequency range must be positive and ordered");

  LoopMetrics metrics;

  // DC gain from the lowest nonzero orders.
  {
    Poly n = rf.num, d = rf.den;
    n.trim();
    d.trim();
    int on = 0, od = 0;
    while (on < static_cast<int>(n.c.size()) && n.c[on] == 0.0) ++on;
    while (od < static_cast<int>(d.c.size()) && d.c[od] == 0.0) ++od;
    if (n.is_zero())
      metrics.dc_gain = 0.0;
    else if (on > od)
      metrics.dc_gain = 0.0;
    else if (on == od)
      metrics.dc_gain = n.c[on] / d.c[od];
    else
      metrics.dc_gain = (n.c[on] / d.c[od] > 0)
                            ? std::numeric_limits<double>::infinity()
                            : -std::numeric_limits<double>::infinity();
  }

  const double w_lo = 2.0 * M_PI * f_lo_hz;
  const double w_hi = 2.0 * M_PI * f_hi_hz;
  const double decades = std::log10(w_hi / w_lo);
  const int npts = std::max(2, static_cast<int>(std::ceil(decades * points_per_decade)) + 1);

  std::vector<double> w(npts), mag(npts), phase(npts);
  for (int i = 0; i < npts; ++i) {
    double t = static_cast<double>(i) / (npts - 1);
    w[i] = w_lo * std::pow(w_hi / w_lo, t);
    auto h = rf.eval_jw(w[i]);
    mag[i] = std::abs(h);
    double raw = std::arg(h);
    phase[i] = (i == 0) ? raw : phase_unwrap_step(phase[i - 1], raw);
  }

  // Unity-gain crossover: first |H|-1 sign change, bisected.
  for (int i = 0; i + 1 < npts; ++i) {
    double a = mag[i] - 1.0, b = mag[i + 1] - 1.0;
    if (a == 0.0) {
      metrics.unity_gain_hz = w[i] / (2.0 * M_PI);
      break;
    }
    if (a * b < 0.0) {
      double lo = w[i], hi = w[i + 1];
      while ((hi - lo) > 1e-6 * lo) {
        double mid = std::sqrt(lo * hi);
        double v = std::abs(rf.eval_jw(mid)) - 1.0;
        if (v * a <= 0.0)
          hi = mid;
        else
          lo = mid;
      }
      metrics.unity_gain_hz = std::sqrt(lo * hi) / (2.0 * M_PI);
      break;
    }
  }

  if (metrics.unity_gain_hz) {
    double wu = *metrics.unity_gain_hz * 2.0 * M_PI;
    // Unwrapped phase at wu: continue the unwrap from the nearest grid
    // point below.
    int i = 0;
    while (i + 1 < npts && w[i + 1] < wu) ++i;
    double ph = phase_unwrap_step(phase[i], std::arg(rf.eval_jw(wu)));
    metrics.phase_margin_deg = 180.0 + ph * 180.0 / M_PI;
  }

  // Gain margin: phase crossing of -180 degrees.
  for (int i = 0; i + 1 < npts; ++i) {
    double a = phase[i] + M_PI, b = phase[i + 1] + M_PI;
    if (a * b < 0.0) {
      double lo = w[i], hi = w[i + 1], pa = a;
      for (int iter = 0; iter < 80 && (hi - lo) > 1e-9 * lo; ++iter) {
        double mid = std::sqrt(lo * hi);
        double v = phase_unwrap_step(phase[i], std::arg(rf.eval_jw(mid))) + M_PI;
        if (v * pa <= 0.0)
          hi = mid;
        else
          lo = mid;
      }
      double w180 = std::sqrt(lo * hi);
      metrics.gain_margin_db = -20.0 * std::log10(std::abs(rf.eval_jw(w180)));
      break;
    }
  }

  return metrics;
}

}  // namespace adcflow
