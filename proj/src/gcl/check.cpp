#include "mimsynth/gcl/check.hpp"

#include "mimsynth/gcl/eval.hpp"

#include <map>
#include <optional>

namespace mimsynth::gcl {

namespace {

enum class Sort { Number, Boolean };

const char* sort_name(Sort s) { return s == Sort::Number ? "numeric" : "boolean"; }

class Checker {
 public:
  explicit Checker(const Program& p) : p_(p) {}

  std::vector<Diagnostic> run()
  {
    names();
    constants();
    parameters();
    variables();
    modules();
    for (const auto& r : p_.rewards) {
      expect(r.guard, Sort::Boolean, "reward guard");
      expect(r.cost, Sort::Number, "reward");
    }
    for (const auto& l : p_.labels) expect(l.expr, Sort::Boolean, "label");
    return std::move(out_);
  }

 private:
  const Program& p_;
  std::vector<Diagnostic> out_;
  std::map<std::string, Sort> constant_sorts_;

  void report(SourcePos pos, std::string message) { out_.push_back({pos.line, pos.column, std::move(message)}); }

  void names()
  {
    std::map<std::string, std::string> seen;
    auto declare = [&](const std::string& name, const std::string& kind, SourcePos pos) {
      auto [it, inserted] = seen.emplace(name, kind);
      if (!inserted) {
        report(pos, kind + " '" + name + "' clashes with " + it->second + " of the same name");
      }
    };
    for (const auto& c : p_.constants) declare(c.name, "constant", c.pos);
    for (const auto& p : p_.parameters) declare(p.name, "parameter", p.pos);
    for (const auto& m : p_.modules) {
      for (const auto& v : m.variables) declare(v.name, "variable", v.pos);
    }
  }

  void constants()
  {
    for (const auto& c : p_.constants) {
      if (auto s = sort_of(c.value)) constant_sorts_[c.name] = *s;
    }
  }

  void parameters()
  {
    for (const auto& p : p_.parameters) {
      if (p.values.empty()) report(p.pos, "parameter '" + p.name + "' has an empty value set");
      for (std::size_t i = 0; i < p.values.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
          if (p.values[i] == p.values[j]) {
            report(p.pos, "parameter '" + p.name + "' lists value " + to_string(p.values[i]) + " twice");
          }
        }
      }
    }
  }

  void variables()
  {
    for (const auto& m : p_.modules) {
      for (const auto& v : m.variables) {
        if (v.lo > v.hi) {
          report(v.pos, "variable '" + v.name + "' has an empty domain");
        } else if (v.init < v.lo || v.init > v.hi) {
          report(v.pos, "initial value of '" + v.name + "' lies outside its domain");
        }
      }
    }
  }

  void modules()
  {
    for (const auto& m : p_.modules) {
      std::set<std::string> owned;
      for (const auto& v : m.variables) owned.insert(v.name);
      for (const auto& c : m.commands) {
        if (!c.action.empty() && m.actions.count(c.action) == 0) {
          report(c.pos, "action '" + c.action + "' is not a synchronizing action of module '" + m.name + "'");
        }
        expect(c.guard, Sort::Boolean, "guard");
        if (mentions_parameter(c.guard)) report(c.pos, "guard references a parameter");
        if (c.branches.empty()) report(c.pos, "command has no branches");
        for (const auto& b : c.branches) {
          expect(b.probability, Sort::Number, "probability");
          std::set<std::string> assigned;
          for (const auto& u : b.updates) {
            if (!assigned.insert(u.variable).second) {
              report(c.pos, "variable '" + u.variable + "' assigned twice in one branch");
            }
            if (owned.count(u.variable) == 0) {
              report(c.pos, "module '" + m.name + "' updates variable '" + u.variable + "' it does not own");
            }
            expect(u.value, Sort::Number, "update");
            if (mentions_parameter(u.value)) report(c.pos, "update of '" + u.variable + "' references a parameter");
            constant_update_in_domain(c, u);
          }
        }
      }
    }
  }

  void constant_update_in_domain(const Command& c, const Update& u)
  {
    const VariableDecl* v = p_.find_variable(u.variable);
    if (v == nullptr) return;
    std::map<std::string, Rational> env;
    for (const auto& k : p_.constants) {
      try {
        env[k.name] = evaluate(k.value, [&](const std::string& n) -> const Rational* {
          auto it = env.find(n);
          return it == env.end() ? nullptr : &it->second;
        });
      } catch (const EvalError&) {
        return;
      }
    }
    Rational value;
    try {
      value = evaluate(u.value, [&](const std::string& n) -> const Rational* {
        auto it = env.find(n);
        return it == env.end() ? nullptr : &it->second;
      });
    } catch (const EvalError&) {
      return;  // depends on state; checked during model construction
    }
    if (value < v->lo || value > v->hi) {
      report(c.pos, "update assigns " + to_string(value) + " to '" + u.variable + "' outside its domain");
    }
  }

  bool mentions_parameter(const Expr& e) const
  {
    std::set<std::string> ids;
    collect_identifiers(e, ids);
    for (const auto& id : ids) {
      if (p_.find_parameter(id) != nullptr) return true;
    }
    return false;
  }

  void expect(const Expr& e, Sort wanted, const char* where)
  {
    auto s = sort_of(e);
    if (s && *s != wanted) {
      report(e.pos(), std::string(where) + " must be " + sort_name(wanted) + " but is " + sort_name(*s));
    }
  }

  // Reports inner mismatches and returns the expression's sort, if determinable.
  std::optional<Sort> sort_of(const Expr& e)
  {
    switch (e.kind()) {
      case Expr::Kind::Number: return Sort::Number;
      case Expr::Kind::Boolean: return Sort::Boolean;
      case Expr::Kind::Identifier: {
        auto it = constant_sorts_.find(e.name());
        if (it != constant_sorts_.end()) return it->second;
        if (p_.find_constant(e.name()) != nullptr) return std::nullopt;
        if (p_.find_parameter(e.name()) == nullptr && p_.find_variable(e.name()) == nullptr) {
          report(e.pos(), "unknown identifier '" + e.name() + "'");
          return std::nullopt;
        }
        return Sort::Number;
      }
      case Expr::Kind::Apply: break;
    }
    const auto& a = e.args();
    auto operand = [&](std::size_t i, Sort wanted) {
      auto s = sort_of(a[i]);
      if (s && *s != wanted) {
        report(a[i].pos(), std::string("operand of '") + op_symbol(e.op()) + "' must be " + sort_name(wanted));
      }
    };
    switch (e.op()) {
      case Op::Neg:
        operand(0, Sort::Number);
        return Sort::Number;
      case Op::Not:
        operand(0, Sort::Boolean);
        return Sort::Boolean;
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Div:
      case Op::Min:
      case Op::Max:
        operand(0, Sort::Number);
        operand(1, Sort::Number);
        return Sort::Number;
      case Op::Lt:
      case Op::Le:
      case Op::Gt:
      case Op::Ge:
        operand(0, Sort::Number);
        operand(1, Sort::Number);
        return Sort::Boolean;
      case Op::Eq:
      case Op::Ne: {
        auto l = sort_of(a[0]);
        auto r = sort_of(a[1]);
        if (l && r && *l != *r) report(e.pos(), std::string("operands of '") + op_symbol(e.op()) + "' differ in sort");
        return Sort::Boolean;
      }
      case Op::And:
      case Op::Or:
      case Op::Implies:
        operand(0, Sort::Boolean);
        operand(1, Sort::Boolean);
        return Sort::Boolean;
      case Op::Ite: {
        operand(0, Sort::Boolean);
        auto l = sort_of(a[1]);
        auto r = sort_of(a[2]);
        if (l && r && *l != *r) report(e.pos(), "branches of '?:' differ in sort");
        return l ? l : r;
      }
    }
    return std::nullopt;
  }
};

}  // namespace

std::vector<Diagnostic> check_program(const Program& p) { return Checker(p).run(); }

}  // namespace mimsynth::gcl
