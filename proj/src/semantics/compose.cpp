#include "mimsynth/semantics/compose.hpp"

#include <stdexcept>

namespace mimsynth {

namespace {

using gcl::Expr;

bool is_one(const Expr& e) { return e.kind() == Expr::Kind::Number && e.value() == 1; }

Expr times(const Expr& a, const Expr& b)
{
  if (is_one(a)) return b;
  if (is_one(b)) return a;
  return gcl::binary(gcl::Op::Mul, a, b);
}

gcl::Command product(const gcl::Command& a, const gcl::Command& b)
{
  gcl::Command c;
  c.action = a.action;
  c.guard = gcl::conj({a.guard, b.guard});
  c.pos = a.pos;
  for (const auto& ba : a.branches) {
    for (const auto& bb : b.branches) {
      gcl::Branch br;
      br.probability = times(ba.probability, bb.probability);
      br.updates = ba.updates;
      for (const auto& u : bb.updates) {
        for (const auto& existing : br.updates) {
          if (existing.variable == u.variable) {
            throw std::logic_error("update conflict on '" + u.variable + "' in action '" + c.action + "'");
          }
        }
        br.updates.push_back(u);
      }
      c.branches.push_back(std::move(br));
    }
  }
  return c;
}

gcl::Module compose_pair(const gcl::Module& m1, const gcl::Module& m2, std::vector<std::string>* warnings)
{
  std::set<std::string> shared;
  for (const auto& a : m1.actions) {
    if (m2.actions.count(a) != 0) shared.insert(a);
  }
  auto has_command = [](const gcl::Module& m, const std::string& action) {
    for (const auto& c : m.commands) {
      if (c.action == action) return true;
    }
    return false;
  };
  for (const auto& a : shared) {
    const bool in1 = has_command(m1, a);
    const bool in2 = has_command(m2, a);
    if (in1 != in2 && warnings != nullptr) {
      const gcl::Module& blocker = in1 ? m2 : m1;
      warnings->push_back("action '" + a + "' is blocked by module '" + blocker.name +
                          "'; its commands are ignored");
    }
  }

  gcl::Module out;
  out.name = m1.name + "_" + m2.name;
  out.pos = m1.pos;
  out.variables = m1.variables;
  out.variables.insert(out.variables.end(), m2.variables.begin(), m2.variables.end());
  out.actions = m1.actions;
  out.actions.insert(m2.actions.begin(), m2.actions.end());
  for (const auto& c1 : m1.commands) {
    if (c1.action.empty() || shared.count(c1.action) == 0) {
      out.commands.push_back(c1);
      continue;
    }
    for (const auto& c2 : m2.commands) {
      if (c2.action == c1.action) out.commands.push_back(product(c1, c2));
    }
  }
  for (const auto& c2 : m2.commands) {
    if (c2.action.empty() || shared.count(c2.action) == 0) out.commands.push_back(c2);
  }
  return out;
}

}  // namespace

gcl::Program compose(const gcl::Program& p, std::vector<std::string>* warnings)
{
  if (p.modules.size() <= 1) return p;
  gcl::Program out = p;
  gcl::Module acc = p.modules[0];
  for (std::size_t i = 1; i < p.modules.size(); ++i) acc = compose_pair(acc, p.modules[i], warnings);
  out.modules = {std::move(acc)};
  return out;
}

}  // namespace mimsynth
