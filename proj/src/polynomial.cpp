#include "adcflow/polynomial.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "adcflow/error.hpp"

namespace adcflow {

int Poly::degree() const {
  for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i)
    if (c[i] != 0.0) return i;
  return -1;
}

bool Poly::is_zero() const { return degree() < 0; }

double Poly::leading() const {
  int d = degree();
  return d < 0 ? 0.0 : c[d];
}

std::complex<double> Poly::eval(std::complex<double> s) const {
  std::complex<double> acc = 0.0;
  for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i)
    acc = acc * s + c[i];
  return acc;
}

double Poly::eval(double s) const {
  double acc = 0.0;
  for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) acc = acc * s + c[i];
  return acc;
}

Poly Poly::derivative() const {
  Poly d;
  for (std::size_t i = 1; i < c.size(); ++i) d.c.push_back(c[i] * double(i));
  return d;
}

void Poly::trim() {
  while (!c.empty() && c.back() == 0.0) c.pop_back();
}

Poly operator+(const Poly& a, const Poly& b) {
  Poly r;
  r.c.resize(std::max(a.c.size(), b.c.size()), 0.0);
  for (std::size_t i = 0; i < a.c.size(); ++i) r.c[i] += a.c[i];
  for (std::size_t i = 0; i < b.c.size(); ++i) r.c[i] += b.c[i];
  return r;
}

Poly operator-(const Poly& a, const Poly& b) {
  Poly r;
  r.c.resize(std::max(a.c.size(), b.c.size()), 0.0);
  for (std::size_t i = 0; i < a.c.size(); ++i) r.c[i] += a.c[i];
  for (std::size_t i = 0; i < b.c.size(); ++i) r.c[i] -= b.c[i];
  return r;
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.c.empty() || b.c.empty()) return Poly();
  Poly r;
  r.c.assign(a.c.size() + b.c.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.c.size(); ++i)
    for (std::size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
  return r;
}

Poly Poly::scaled(double k) const {
  Poly r = *this;
  for (double& v : r.c) v *= k;
  return r;
}

Poly poly_from_roots(const std::vector<std::complex<double>>& roots) {
  // Multiply out (s - r_i); pair conjugates into real quadratics first so
  // the result stays exactly real.
  std::vector<std::complex<double>> pending = roots;
  Poly p = Poly::constant(1.0);
  while (!pending.empty()) {
    auto r = pending.back();
    pending.pop_back();
    if (std::abs(r.imag()) < 1e-300) {
      p = p * Poly({-r.real(), 1.0});
      continue;
    }
    auto mate = std::find_if(pending.begin(), pending.end(), [&](auto m) {
      return std::abs(m.real() - r.real()) <= 1e-12 * std::abs(r.real()) &&
             std::abs(m.imag() + r.imag()) <= 1e-12 * std::abs(r.imag());
    });
    if (mate == pending.end())
      throw Error(ErrorKind::InvalidSpec,
                  "complex roots must come in conjugate pairs");
    pending.erase(mate);
    p = p * Poly({std::norm(r), -2.0 * r.real(), 1.0});
  }
  return p;
}

namespace {

// Parlett/Reinsch-style diagonal balancing to even out row/column norms.
void balance(Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  bool changed = true;
  int guard = 0;
  while (changed && guard++ < 50) {
    changed = false;
    for (int i = 0; i < n; ++i) {
      double row = 0.0, col = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        row += std::fabs(m(i, j));
        col += std::fabs(m(j, i));
      }
      if (row == 0.0 || col == 0.0) continue;
      double f = 1.0;
      double s = row + col;
      while (col < row / 2.0) { col *= 2.0; row /= 2.0; f *= 2.0; }
      while (col > row * 2.0) { col /= 2.0; row *= 2.0; f /= 2.0; }
      if (col + row < 0.95 * s) {
        changed = true;
        m.row(i) /= f;
        m.col(i) *= f;
      }
    }
  }
}

std::complex<double> horner(const std::vector<double>& c,
                            std::complex<double> s) {
  std::complex<double> acc = 0.0;
  for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) acc = acc * s + c[i];
  return acc;
}

}  // namespace

std::vector<std::complex<double>> poly_roots(const Poly& p) {
  Poly q = p;
  q.trim();
  if (q.is_zero())
    throw Error(ErrorKind::DegeneratePolynomial,
                "zero polynomial has no well-defined roots");
  std::vector<std::complex<double>> roots;
  // Factor out roots at the origin.
  std::size_t low = 0;
  while (low < q.c.size() && q.c[low] == 0.0) ++low;
  for (std::size_t i = 0; i < low; ++i) roots.emplace_back(0.0, 0.0);
  std::vector<double> c(q.c.begin() + static_cast<long>(low), q.c.end());
  const int n = static_cast<int>(c.size()) - 1;
  if (n <= 0) return roots;

  // Rescale s = w0 * t so the scaled roots are O(1).
  double w0 = std::pow(std::fabs(c.front() / c.back()), 1.0 / n);
  if (!std::isfinite(w0) || w0 <= 0.0) w0 = 1.0;
  std::vector<double> sc(c.size());
  double f = 1.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    sc[i] = c[i] * f;
    f *= w0;
  }
  double lead = sc.back();
  for (double& v : sc) v /= lead;

  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -sc[i];
  balance(comp);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(comp, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::Internal, "eigenvalue iteration failed");

  std::vector<double> dc;  // derivative of the scaled polynomial
  for (std::size_t i = 1; i < sc.size(); ++i) dc.push_back(sc[i] * double(i));

  for (int i = 0; i < n; ++i) {
    std::complex<double> r = solver.eigenvalues()[i];
    // Newton polish; keep whichever iterate evaluates smallest.
    std::complex<double> best = r;
    double best_mag = std::abs(horner(sc, r));
    for (int it = 0; it < 12; ++it) {
      std::complex<double> pv = horner(sc, r);
      std::complex<double> dv = horner(dc, r);
      if (std::abs(dv) == 0.0) break;
      r -= pv / dv;
      double mag = std::abs(horner(sc, r));
      if (mag < best_mag) {
        best_mag = mag;
        best = r;
      } else if (mag > 4.0 * best_mag) {
        break;
      }
    }
    roots.push_back(best * w0);
  }

  // Snap conjugate structure: order by (real, |imag|, imag) so mates sit
  // next to each other, and zero out negligible imaginary parts.
  for (auto& r : roots)
    if (std::abs(r.imag()) <= 1e-12 * std::abs(r.real()))
      r = {r.real(), 0.0};
  std::sort(roots.begin(), roots.end(), [](auto a, auto b) {
    if (a.real() != b.real()) return a.real() < b.real();
    double ia = std::abs(a.imag()), ib = std::abs(b.imag());
    if (ia != ib) return ia < ib;
    return a.imag() < b.imag();
  });
  return roots;
}

}  // namespace adcflow
