#pragma once

#include <complex>
#include <vector>

namespace adcflow {

// Real-coefficient polynomial in s, lowest degree first.
struct Poly {
  std::vector<double> c;

  Poly() = default;
  explicit Poly(std::vector<double> coeffs) : c(std::move(coeffs)) {}
  static Poly constant(double v) { return Poly({v}); }

  int degree() const;        // -1 for the zero polynomial
  bool is_zero() const;
  double leading() const;    // coefficient of the highest power
  double at_zero() const { return c.empty() ? 0.0 : c[0]; }

  std::complex<double> eval(std::complex<double> s) const;
  double eval(double s) const;

  Poly derivative() const;
  void trim();  // drop trailing exact zeros

  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly scaled(double k) const;
};

// Monic polynomial from roots (testing and oracle use).
Poly poly_from_roots(const std::vector<std::complex<double>>& roots);

// All complex roots via a balanced companion matrix with variable
// rescaling and Newton polish. Throws Error(DegeneratePolynomial) on the
// zero polynomial. Conjugate mates come out adjacent.
std::vector<std::complex<double>> poly_roots(const Poly& p);

}  // namespace adcflow
