#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "adcflow/expr.hpp"
#include "adcflow/mason.hpp"
#include "adcflow/polynomial.hpp"

namespace adcflow {

// Numeric rational function in s, canonical: denominator's lowest-order
// nonzero coefficient is 1 and common scalar factors are removed.
struct RationalFunction {
  Poly num;
  Poly den;

  std::complex<double> eval(std::complex<double> s) const {
    return num.eval(s) / den.eval(s);
  }
  std::complex<double> eval_jw(double omega) const {
    return eval(std::complex<double>(0.0, omega));
  }

  // Multiply by k * s^power (power >= 0).
  RationalFunction times_monomial(double k, int power) const;

  void normalize();  // throws Error(DegeneratePolynomial) on a zero den
};

// Expands the Mason trees into canonical polynomials with all parameters
// bound. Throws Error(UnboundParameter) naming any missing binding.
RationalFunction bind_parameters(const SymbolicTf& tf, const Bindings& bindings);

// Generic expression -> rational expansion (used by bind_parameters and
// directly in tests).
RationalFunction expand_expression(const ExprPtr& num_expr,
                                   const ExprPtr& den_expr,
                                   const Bindings& bindings);

struct PoleZeroResult {
  std::vector<std::complex<double>> poles;
  std::vector<std::complex<double>> zeros;
};

PoleZeroResult poles_zeros(const RationalFunction& rf);

struct LoopMetrics {
  double dc_gain = 0.0;  // +-inf for integrators
  std::optional<double> unity_gain_hz;
  std::optional<double> phase_margin_deg;
  std::optional<double> gain_margin_db;
};

// Crossover search over a log grid (points per decade configurable),
// refined by bisection to 1e-6 relative frequency.
LoopMetrics loop_metrics(const RationalFunction& rf, double f_lo_hz,
                         double f_hi_hz, int points_per_decade = 64);

}  // namespace adcflow
