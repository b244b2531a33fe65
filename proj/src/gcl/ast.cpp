#include "mimsynth/gcl/ast.hpp"

#include <stdexcept>

namespace mimsynth::gcl {

const char* op_symbol(Op op)
{
  switch (op) {
    case Op::Neg: return "-";
    case Op::Not: return "!";
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    case Op::Eq: return "=";
    case Op::Ne: return "!=";
    case Op::And: return "&";
    case Op::Or: return "|";
    case Op::Implies: return "=>";
    case Op::Ite: return "?";
    case Op::Min: return "min";
    case Op::Max: return "max";
  }
  return "?";
}

Expr Expr::number(const Rational& value, SourcePos pos)
{
  auto node = std::make_shared<ExprNode>();
  node->kind = Kind::Number;
  node->value = value;
  node->pos = pos;
  return Expr(std::move(node));
}

Expr Expr::boolean(bool value, SourcePos pos)
{
  auto node = std::make_shared<ExprNode>();
  node->kind = Kind::Boolean;
  node->truth = value;
  node->pos = pos;
  return Expr(std::move(node));
}

Expr Expr::identifier(std::string name, SourcePos pos)
{
  auto node = std::make_shared<ExprNode>();
  node->kind = Kind::Identifier;
  node->name = std::move(name);
  node->pos = pos;
  return Expr(std::move(node));
}

Expr Expr::apply(Op op, std::vector<Expr> args, SourcePos pos)
{
  auto node = std::make_shared<ExprNode>();
  node->kind = Kind::Apply;
  node->op = op;
  node->args = std::move(args);
  node->pos = pos;
  return Expr(std::move(node));
}

Expr::Kind Expr::kind() const { return node_->kind; }
const Rational& Expr::value() const { return node_->value; }
bool Expr::truth() const { return node_->truth; }
const std::string& Expr::name() const { return node_->name; }
Op Expr::op() const { return node_->op; }
const std::vector<Expr>& Expr::args() const { return node_->args; }
SourcePos Expr::pos() const { return node_ ? node_->pos : SourcePos{}; }

bool operator==(const Expr& a, const Expr& b)
{
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::Number: return a.value() == b.value();
    case Expr::Kind::Boolean: return a.truth() == b.truth();
    case Expr::Kind::Identifier: return a.name() == b.name();
    case Expr::Kind::Apply: return a.op() == b.op() && a.args() == b.args();
  }
  return false;
}

Expr num(const Rational& value)
{
  if (value < 0) {
    return Expr::apply(Op::Neg, {num(Rational(-value))});
  }
  if (!is_terminating_decimal(value)) {
    return Expr::apply(Op::Div, {Expr::number(Rational(value.get_num())),
                                 Expr::number(Rational(value.get_den()))});
  }
  return Expr::number(value);
}

Expr num(long value) { return num(Rational(value)); }
Expr ident(const std::string& name) { return Expr::identifier(name); }
Expr tt() { return Expr::boolean(true); }
Expr ff() { return Expr::boolean(false); }
Expr unary(Op op, Expr a) { return Expr::apply(op, {std::move(a)}); }
Expr binary(Op op, Expr a, Expr b) { return Expr::apply(op, {std::move(a), std::move(b)}); }

Expr conj(const std::vector<Expr>& parts)
{
  Expr result;
  for (const Expr& part : parts) {
    if (part.kind() == Expr::Kind::Boolean && part.truth()) continue;
    result = result.valid() ? binary(Op::And, result, part) : part;
  }
  return result.valid() ? result : tt();
}

void collect_identifiers(const Expr& e, std::set<std::string>& out)
{
  if (!e.valid()) return;
  if (e.kind() == Expr::Kind::Identifier) {
    out.insert(e.name());
  } else if (e.kind() == Expr::Kind::Apply) {
    for (const Expr& arg : e.args()) collect_identifiers(arg, out);
  }
}

const ParameterDecl* Program::find_parameter(const std::string& name) const
{
  for (const auto& p : parameters) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const ConstantDecl* Program::find_constant(const std::string& name) const
{
  for (const auto& c : constants) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const VariableDecl* Program::find_variable(const std::string& name) const
{
  for (const auto& m : modules) {
    for (const auto& v : m.variables) {
      if (v.name == name) return &v;
    }
  }
  return nullptr;
}

const LabelDecl* Program::find_label(const std::string& name) const
{
  for (const auto& l : labels) {
    if (l.name == name) return &l;
  }
  return nullptr;
}

std::vector<VariableDecl> Program::variables() const
{
  std::vector<VariableDecl> result;
  for (const auto& m : modules) {
    result.insert(result.end(), m.variables.begin(), m.variables.end());
  }
  return result;
}

std::set<std::string> Program::parameter_names() const
{
  std::set<std::string> result;
  for (const auto& p : parameters) result.insert(p.name);
  return result;
}

std::set<std::string> Program::all_names() const
{
  std::set<std::string> result;
  for (const auto& c : constants) result.insert(c.name);
  for (const auto& p : parameters) result.insert(p.name);
  for (const auto& m : modules) {
    result.insert(m.name);
    for (const auto& v : m.variables) result.insert(v.name);
    result.insert(m.actions.begin(), m.actions.end());
    for (const auto& c : m.commands) {
      if (!c.action.empty()) result.insert(c.action);
    }
  }
  for (const auto& l : labels) result.insert(l.name);
  return result;
}

}  // namespace mimsynth::gcl
