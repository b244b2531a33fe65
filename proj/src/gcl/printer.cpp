#include "mimsynth/gcl/printer.hpp"

#include <sstream>

namespace mimsynth::gcl {

namespace {

// Binding strength; higher binds tighter.
int precedence(const Expr& e)
{
  if (e.kind() != Expr::Kind::Apply) return 9;
  switch (e.op()) {
    case Op::Ite: return 9;  // always printed inside its own parentheses
    case Op::Implies: return 1;
    case Op::Or: return 2;
    case Op::And: return 3;
    case Op::Not: return 4;
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
    case Op::Eq:
    case Op::Ne: return 5;
    case Op::Add:
    case Op::Sub: return 6;
    case Op::Mul:
    case Op::Div: return 7;
    case Op::Neg: return 8;
    case Op::Min:
    case Op::Max: return 9;
  }
  return 9;
}

void print(std::ostream& out, const Expr& e, int min_prec);

void print_number(std::ostream& out, const Rational& v)
{
  if (v >= 0 && is_terminating_decimal(v)) {
    out << to_string(v);
    return;
  }
  // Only reachable for programmatically built literals; num() avoids these.
  out << "(";
  print(out, num(v), 0);
  out << ")";
}

void print(std::ostream& out, const Expr& e, int min_prec)
{
  switch (e.kind()) {
    case Expr::Kind::Number: print_number(out, e.value()); return;
    case Expr::Kind::Boolean: out << (e.truth() ? "true" : "false"); return;
    case Expr::Kind::Identifier: out << e.name(); return;
    case Expr::Kind::Apply: break;
  }
  const int prec = precedence(e);
  const bool paren = prec < min_prec;
  if (paren) out << "(";
  const auto& a = e.args();
  switch (e.op()) {
    case Op::Ite:
      out << "(";
      print(out, a[0], 1);
      out << " ? ";
      print(out, a[1], 1);
      out << " : ";
      print(out, a[2], 1);
      out << ")";
      break;
    case Op::Min:
    case Op::Max:
      out << op_symbol(e.op()) << "(";
      print(out, a[0], 0);
      out << ", ";
      print(out, a[1], 0);
      out << ")";
      break;
    case Op::Neg:
      out << "-";
      print(out, a[0], 8);
      break;
    case Op::Not:
      out << "!";
      print(out, a[0], 4);
      break;
    case Op::Implies:
      print(out, a[0], 2);
      out << " => ";
      print(out, a[1], 1);
      break;
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
    case Op::Eq:
    case Op::Ne:
      print(out, a[0], 6);
      out << " " << op_symbol(e.op()) << " ";
      print(out, a[1], 6);
      break;
    default:
      print(out, a[0], prec);
      out << " " << op_symbol(e.op()) << " ";
      print(out, a[1], prec + 1);
      break;
  }
  if (paren) out << ")";
}

void print_updates(std::ostream& out, const std::vector<Update>& updates)
{
  if (updates.empty()) {
    out << "true";
    return;
  }
  for (std::size_t i = 0; i < updates.size(); ++i) {
    if (i > 0) out << " & ";
    out << "(" << updates[i].variable << "' = ";
    print(out, updates[i].value, 0);
    out << ")";
  }
}

bool is_one(const Expr& e) { return e.kind() == Expr::Kind::Number && e.value() == 1; }

}  // namespace

std::string print_expr(const Expr& e)
{
  std::ostringstream out;
  print(out, e, 0);
  return out.str();
}

std::string pretty_print(const Program& p)
{
  std::ostringstream out;
  for (const auto& c : p.constants) {
    out << "const " << c.name << " = " << print_expr(c.value) << ";\n";
  }
  for (const auto& param : p.parameters) {
    out << "param " << param.name << " in {";
    for (std::size_t i = 0; i < param.values.size(); ++i) {
      if (i > 0) out << ", ";
      out << to_string(param.values[i]);
    }
    out << "};\n";
  }
  for (const auto& m : p.modules) {
    out << "\nmodule " << m.name << "\n";
    std::set<std::string> used;
    for (const auto& c : m.commands) {
      if (!c.action.empty()) used.insert(c.action);
    }
    if (used != m.actions) {
      out << "  actions ";
      bool first = true;
      for (const auto& a : m.actions) {
        out << (first ? "" : ", ") << a;
        first = false;
      }
      out << ";\n";
    }
    for (const auto& v : m.variables) {
      out << "  " << v.name << " : [" << v.lo << ".." << v.hi << "] init " << v.init << ";\n";
    }
    for (const auto& c : m.commands) {
      out << "  [" << c.action << "] ";
      print(out, c.guard, 0);
      out << " ->";
      if (c.branches.size() == 1 && is_one(c.branches[0].probability)) {
        out << " ";
        print_updates(out, c.branches[0].updates);
      } else {
        for (std::size_t i = 0; i < c.branches.size(); ++i) {
          out << (i > 0 ? " + " : " ");
          print(out, c.branches[i].probability, 1);
          out << " : ";
          print_updates(out, c.branches[i].updates);
        }
      }
      out << ";\n";
    }
    out << "endmodule\n";
  }
  if (!p.rewards.empty()) {
    out << "\nrewards\n";
    for (const auto& r : p.rewards) {
      out << "  ";
      print(out, r.guard, 1);
      out << " : ";
      print(out, r.cost, 0);
      out << ";\n";
    }
    out << "endrewards\n";
  }
  if (!p.labels.empty()) out << "\n";
  for (const auto& l : p.labels) {
    out << "label \"" << l.name << "\" = " << print_expr(l.expr) << ";\n";
  }
  return out.str();
}

}  // namespace mimsynth::gcl
