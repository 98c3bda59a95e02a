#include "adcflow/expr.hpp"

#include <sstream>

#include "adcflow/error.hpp"

namespace adcflow {

namespace {
ExprPtr make(Expr&& e) { return std::make_shared<const Expr>(std::move(e)); }
}  // namespace

ExprPtr Expr::constant(double v) {
  Expr e;
  e.kind_ = Kind::Constant;
  e.value_ = v;
  return make(std::move(e));
}

ExprPtr Expr::parameter(std::string name) {
  Expr e;
  e.kind_ = Kind::Parameter;
  e.name_ = std::move(name);
  return make(std::move(e));
}

ExprPtr Expr::freq() {
  Expr e;
  e.kind_ = Kind::Freq;
  return make(std::move(e));
}

ExprPtr Expr::add(ExprPtr a, ExprPtr b) {
  if (a->is_zero()) return b;
  if (b->is_zero()) return a;
  if (a->kind() == Kind::Constant && b->kind() == Kind::Constant)
    return constant(a->value() + b->value());
  Expr e;
  e.kind_ = Kind::Add;
  e.lhs_ = std::move(a);
  e.rhs_ = std::move(b);
  return make(std::move(e));
}

ExprPtr Expr::sub(ExprPtr a, ExprPtr b) {
  if (b->is_zero()) return a;
  if (a->kind() == Kind::Constant && b->kind() == Kind::Constant)
    return constant(a->value() - b->value());
  Expr e;
  e.kind_ = Kind::Sub;
  e.lhs_ = std::move(a);
  e.rhs_ = std::move(b);
  return make(std::move(e));
}

ExprPtr Expr::mul(ExprPtr a, ExprPtr b) {
  if (a->is_zero() || b->is_zero()) return constant(0.0);
  if (a->is_one()) return b;
  if (b->is_one()) return a;
  if (a->kind() == Kind::Constant && b->kind() == Kind::Constant)
    return constant(a->value() * b->value());
  Expr e;
  e.kind_ = Kind::Mul;
  e.lhs_ = std::move(a);
  e.rhs_ = std::move(b);
  return make(std::move(e));
}

ExprPtr Expr::div(ExprPtr a, ExprPtr b) {
  if (a->is_zero()) return constant(0.0);
  if (b->is_one()) return a;
  if (a->kind() == Kind::Constant && b->kind() == Kind::Constant &&
      b->value() != 0.0)
    return constant(a->value() / b->value());
  Expr e;
  e.kind_ = Kind::Div;
  e.lhs_ = std::move(a);
  e.rhs_ = std::move(b);
  return make(std::move(e));
}

std::complex<double> Expr::eval(std::complex<double> s,
                                const Bindings& bindings) const {
  switch (kind_) {
    case Kind::Constant:
      return value_;
    case Kind::Parameter: {
      auto it = bindings.find(name_);
      if (it == bindings.end())
        throw Error(ErrorKind::UnboundParameter,
                    "unbound parameter '" + name_ + "'");
      return it->second;
    }
    case Kind::Freq:
      return s;
    case Kind::Add:
      return lhs_->eval(s, bindings) + rhs_->eval(s, bindings);
    case Kind::Sub:
      return lhs_->eval(s, bindings) - rhs_->eval(s, bindings);
    case Kind::Mul:
      return lhs_->eval(s, bindings) * rhs_->eval(s, bindings);
    case Kind::Div:
      return lhs_->eval(s, bindings) / rhs_->eval(s, bindings);
  }
  throw Error(ErrorKind::Internal, "corrupt expression node");
}

void Expr::collect_parameters(std::set<std::string>& out) const {
  switch (kind_) {
    case Kind::Parameter:
      out.insert(name_);
      return;
    case Kind::Constant:
    case Kind::Freq:
      return;
    default:
      lhs_->collect_parameters(out);
      rhs_->collect_parameters(out);
  }
}

std::string Expr::to_string() const {
  switch (kind_) {
    case Kind::Constant: {
      std::ostringstream os;
      os << value_;
      return os.str();
    }
    case Kind::Parameter:
      return name_;
    case Kind::Freq:
      return "s";
    case Kind::Add:
      return "(" + lhs_->to_string() + " + " + rhs_->to_string() + ")";
    case Kind::Sub:
      return "(" + lhs_->to_string() + " - " + rhs_->to_string() + ")";
    case Kind::Mul:
      return "(" + lhs_->to_string() + "*" + rhs_->to_string() + ")";
    case Kind::Div:
      return "(" + lhs_->to_string() + "/" + rhs_->to_string() + ")";
  }
  return "?";
}

}  // namespace adcflow
