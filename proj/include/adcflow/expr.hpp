#pragma once

#include <complex>
#include <map>
#include <memory>
#include <set>
#include <string>

namespace adcflow {

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;
using Bindings = std::map<std::string, double>;

// Immutable expression tree over {+, -, *, /} with leaves
// {constant, named parameter, s}. Shared subtrees are allowed (DAG).
class Expr {
 public:
  enum class Kind { Constant, Parameter, Freq, Add, Sub, Mul, Div };

  static ExprPtr constant(double v);
  static ExprPtr parameter(std::string name);
  static ExprPtr freq();  // the Laplace variable s

  static ExprPtr add(ExprPtr a, ExprPtr b);
  static ExprPtr sub(ExprPtr a, ExprPtr b);
  static ExprPtr mul(ExprPtr a, ExprPtr b);
  static ExprPtr div(ExprPtr a, ExprPtr b);

  Kind kind() const { return kind_; }
  double value() const { return value_; }
  const std::string& name() const { return name_; }
  const ExprPtr& lhs() const { return lhs_; }
  const ExprPtr& rhs() const { return rhs_; }

  bool is_zero() const { return kind_ == Kind::Constant && value_ == 0.0; }
  bool is_one() const { return kind_ == Kind::Constant && value_ == 1.0; }

  // Numeric evaluation at a complex frequency with all parameters bound.
  // Throws Error(UnboundParameter) on a missing binding.
  std::complex<double> eval(std::complex<double> s,
                            const Bindings& bindings) const;

  void collect_parameters(std::set<std::string>& out) const;

  std::string to_string() const;  // debug/report form

 private:
  Expr() = default;

  Kind kind_ = Kind::Constant;
  double value_ = 0.0;
  std::string name_;
  ExprPtr lhs_, rhs_;
};

inline ExprPtr operator+(ExprPtr a, ExprPtr b) { return Expr::add(a, b); }
inline ExprPtr operator-(ExprPtr a, ExprPtr b) { return Expr::sub(a, b); }
inline ExprPtr operator*(ExprPtr a, ExprPtr b) { return Expr::mul(a, b); }
inline ExprPtr operator/(ExprPtr a, ExprPtr b) { return Expr::div(a, b); }

}  // namespace adcflow
