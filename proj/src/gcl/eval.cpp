#include "mimsynth/gcl/eval.hpp"

namespace mimsynth::gcl {

namespace {

Rational as_truth(bool b) { return Rational(b ? 1 : 0); }

}  // namespace

Rational evaluate(const Expr& e, const Lookup& lookup)
{
  switch (e.kind()) {
    case Expr::Kind::Number: return e.value();
    case Expr::Kind::Boolean: return as_truth(e.truth());
    case Expr::Kind::Identifier: {
      const Rational* bound = lookup ? lookup(e.name()) : nullptr;
      if (bound == nullptr) throw EvalError("unbound identifier '" + e.name() + "'");
      return *bound;
    }
    case Expr::Kind::Apply: break;
  }

  const auto& args = e.args();
  auto arg = [&](std::size_t i) { return evaluate(args[i], lookup); };
  auto truth = [&](std::size_t i) { return evaluate(args[i], lookup) != 0; };

  switch (e.op()) {
    case Op::Neg: return -arg(0);
    case Op::Not: return as_truth(!truth(0));
    case Op::Add: return arg(0) + arg(1);
    case Op::Sub: return arg(0) - arg(1);
    case Op::Mul: return arg(0) * arg(1);
    case Op::Div: {
      Rational num = arg(0);
      Rational den = arg(1);
      if (den == 0) throw EvalError("division by zero");
      return num / den;
    }
    case Op::Lt: return as_truth(arg(0) < arg(1));
    case Op::Le: return as_truth(arg(0) <= arg(1));
    case Op::Gt: return as_truth(arg(0) > arg(1));
    case Op::Ge: return as_truth(arg(0) >= arg(1));
    case Op::Eq: return as_truth(arg(0) == arg(1));
    case Op::Ne: return as_truth(arg(0) != arg(1));
    case Op::And: return as_truth(truth(0) && truth(1));
    case Op::Or: return as_truth(truth(0) || truth(1));
    case Op::Implies: return as_truth(!truth(0) || truth(1));
    case Op::Ite: return truth(0) ? arg(1) : arg(2);
    case Op::Min: {
      Rational a = arg(0);
      Rational b = arg(1);
      return b < a ? b : a;
    }
    case Op::Max: {
      Rational a = arg(0);
      Rational b = arg(1);
      return b > a ? b : a;
    }
  }
  throw EvalError("unknown operator");
}

bool evaluate_bool(const Expr& e, const Lookup& lookup) { return evaluate(e, lookup) != 0; }

}  // namespace mimsynth::gcl
