#include "mimsynth/transform/transform.hpp"

#include "mimsynth/gcl/eval.hpp"
#include "mimsynth/gcl/printer.hpp"
#include "mimsynth/semantics/build.hpp"
#include "mimsynth/semantics/compose.hpp"

#include <set>

namespace mimsynth {

namespace {

using gcl::Expr;
using gcl::Op;

class NamePool {
 public:
  explicit NamePool(const gcl::Program& p) : used_(p.all_names())
  {
    for (const auto& l : p.labels) used_.insert(l.name);
  }

  std::string fresh(const std::string& base)
  {
    std::string name = base;
    while (used_.count(name) != 0) name += "_";
    used_.insert(name);
    return name;
  }

 private:
  std::set<std::string> used_;
};

gcl::Program composed(const gcl::Program& p)
{
  gcl::Program c = compose(p);
  if (c.modules.empty()) {
    gcl::Module m;
    m.name = "main";
    c.modules.push_back(m);
  }
  return c;
}

Expr eq(const std::string& var, std::int64_t value) { return gcl::binary(Op::Eq, gcl::ident(var), gcl::num(value)); }

/// The row extended by the program's numeric constants.
ParameterValuation with_constants(const ParameterValuation& row, const gcl::Program& p)
{
  ParameterValuation out = row;
  for (const auto& c : p.constants) {
    if (c.value.kind() == Expr::Kind::Number) out.emplace(c.name, c.value.value());
    if (c.value.kind() == Expr::Kind::Boolean) out.emplace(c.name, Rational(c.value.truth() ? 1 : 0));
  }
  return out;
}

gcl::Lookup row_lookup(const ParameterValuation& row)
{
  return [&row](const std::string& n) -> const Rational* {
    auto it = row.find(n);
    return it == row.end() ? nullptr : &it->second;
  };
}

std::vector<std::string> command_parameters(const gcl::Command& c, const gcl::Program& p)
{
  std::set<std::string> ids;
  for (const auto& b : c.branches) gcl::collect_identifiers(b.probability, ids);
  std::vector<std::string> result;
  for (const auto& decl : p.parameters) {
    if (ids.count(decl.name) != 0) result.push_back(decl.name);
  }
  return result;
}

std::size_t value_index(const gcl::Program& p, const std::string& param, const Rational& v)
{
  const auto* decl = p.find_parameter(param);
  for (std::size_t i = 0; i < decl->values.size(); ++i) {
    if (decl->values[i] == v) return i;
  }
  throw TransformError("value " + to_string(v) + " is not declared for parameter '" + param + "'");
}

}  // namespace

const FreshAction* TransformReport::find_action(const std::string& name) const
{
  for (const auto& a : fresh_actions) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

void TransformReport::merge(const TransformReport& other)
{
  fresh_variables.insert(fresh_variables.end(), other.fresh_variables.begin(), other.fresh_variables.end());
  fresh_actions.insert(fresh_actions.end(), other.fresh_actions.begin(), other.fresh_actions.end());
  control_variables.insert(control_variables.end(), other.control_variables.begin(), other.control_variables.end());
}

std::pair<gcl::Program, TransformReport> transform_rewards(const gcl::Program& source)
{
  gcl::Program p = composed(source);
  TransformReport report;
  NamePool names(p);
  gcl::Module& module = p.modules[0];

  struct Selector {
    std::string variable;
    Expr guard;
    std::vector<ParameterValuation> rows;
    std::vector<Rational> costs;
  };
  std::vector<Selector> selectors;
  std::vector<std::size_t> selector_of_item(p.rewards.size(), SIZE_MAX);
  for (std::size_t k = 0; k < p.rewards.size(); ++k) {
    const auto& item = p.rewards[k];
    const auto params = parameters_of(item.cost, p);
    if (params.empty()) continue;
    std::set<std::string> ids;
    gcl::collect_identifiers(item.cost, ids);
    for (const auto& id : ids) {
      if (p.find_parameter(id) == nullptr && p.find_constant(id) == nullptr) {
        throw TransformError("parametric reward '" + gcl::print_expr(item.cost) + "' references state variable '" +
                             id + "'");
      }
    }
    if (!parameters_of(item.guard, p).empty()) {
      throw TransformError("reward guard '" + gcl::print_expr(item.guard) + "' references a parameter");
    }
    Selector sel;
    sel.variable = names.fresh("sel_" + std::to_string(selectors.size() + 1));
    sel.guard = item.guard;
    sel.rows = joint_rows(p.parameters, params);
    for (const auto& row : sel.rows) sel.costs.push_back(eval_expr(item.cost, {}, row, &p));
    selector_of_item[k] = selectors.size();
    selectors.push_back(std::move(sel));
  }
  if (selectors.empty()) return {p, report};

  // Selector k may fire once every earlier applicable selector has fired.
  auto done = [&](std::size_t k) {
    return gcl::binary(Op::Or, gcl::unary(Op::Not, selectors[k].guard),
                       gcl::binary(Op::Ge, gcl::ident(selectors[k].variable), gcl::num(1L)));
  };

  const std::size_t original = module.commands.size();
  for (std::size_t i = 0; i < original; ++i) {
    auto& cmd = module.commands[i];
    std::vector<Expr> parts{cmd.guard};
    for (std::size_t k = 0; k < selectors.size(); ++k) parts.push_back(done(k));
    cmd.guard = gcl::conj(parts);
    for (auto& b : cmd.branches) {
      for (const auto& sel : selectors) b.updates.push_back({sel.variable, gcl::num(0L)});
    }
    report.command_mapping.push_back({i, {i}});
  }
  for (std::size_t k = 0; k < selectors.size(); ++k) {
    const auto& sel = selectors[k];
    gcl::VariableDecl var;
    var.name = sel.variable;
    var.lo = 0;
    var.hi = static_cast<std::int64_t>(sel.rows.size());
    var.init = 0;
    module.variables.push_back(var);
    report.fresh_variables.push_back({var.name, var.lo, var.hi});
    for (std::size_t r = 0; r < sel.rows.size(); ++r) {
      gcl::Command c;
      c.action = names.fresh(sel.variable + "_" + std::to_string(r + 1));
      std::vector<Expr> parts{sel.guard, eq(sel.variable, 0)};
      for (std::size_t j = 0; j < k; ++j) parts.push_back(done(j));
      c.guard = gcl::conj(parts);
      c.branches.push_back({gcl::num(1L), {{sel.variable, gcl::num(static_cast<long>(r + 1))}}});
      module.actions.insert(c.action);
      module.commands.push_back(std::move(c));
      report.fresh_actions.push_back({module.commands.back().action, sel.rows[r]});
    }
  }

  std::vector<gcl::RewardItem> rewards;
  for (std::size_t k = 0; k < p.rewards.size(); ++k) {
    const auto& item = p.rewards[k];
    if (selector_of_item[k] == SIZE_MAX) {
      std::vector<Expr> parts{item.guard};
      for (const auto& sel : selectors) parts.push_back(eq(sel.variable, 0));
      rewards.push_back({gcl::conj(parts), item.cost, item.pos});
      continue;
    }
    const std::size_t s = selector_of_item[k];
    const auto& sel = selectors[s];
    for (std::size_t r = 0; r < sel.rows.size(); ++r) {
      std::vector<Expr> parts{item.guard, eq(sel.variable, static_cast<std::int64_t>(r + 1))};
      for (std::size_t j = s + 1; j < selectors.size(); ++j) parts.push_back(eq(selectors[j].variable, 0));
      rewards.push_back({gcl::conj(parts), gcl::num(sel.costs[r]), item.pos});
    }
  }
  p.rewards = std::move(rewards);
  return {p, report};
}

std::pair<gcl::Program, TransformReport> transform_probabilities(const gcl::Program& source)
{
  gcl::Program p = composed(source);
  TransformReport report;
  NamePool names(p);
  gcl::Module& module = p.modules[0];
  const std::vector<gcl::Command> commands = module.commands;
  module.commands.clear();

  for (std::size_t i = 0; i < commands.size(); ++i) {
    const auto& cmd = commands[i];
    const auto params = command_parameters(cmd, p);
    if (params.empty()) {
      report.command_mapping.push_back({i, {module.commands.size()}});
      module.commands.push_back(cmd);
      continue;
    }
    std::vector<std::size_t> produced;
    const auto rows = joint_rows(p.parameters, params);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      gcl::Command c = cmd;
      bool closed = true;
      bool well_defined = true;
      Rational sum = 0;
      const ParameterValuation bound = with_constants(rows[r], p);
      for (auto& b : c.branches) {
        b.probability = residualize(b.probability, row_lookup(bound));
        if (b.probability.kind() != Expr::Kind::Number) {
          closed = false;
          continue;
        }
        const Rational& v = b.probability.value();
        well_defined = well_defined && v >= 0 && v <= 1;
        sum += v;
        b.probability = gcl::num(v);
      }
      if (closed && sum != 1) well_defined = false;
      if (!well_defined) continue;
      c.action = names.fresh("row_" + std::to_string(i + 1) + "_" + std::to_string(r + 1));
      module.actions.insert(c.action);
      report.fresh_actions.push_back({c.action, rows[r]});
      produced.push_back(module.commands.size());
      module.commands.push_back(std::move(c));
    }
    if (produced.empty()) {
      throw TransformError("command '" + gcl::print_expr(cmd.guard) +
                           "' has no well-defined instantiation of its probabilities");
    }
    report.command_mapping.push_back({i, std::move(produced)});
  }
  return {p, report};
}

gcl::Program add_control(const gcl::Program& source, TransformReport& report)
{
  gcl::Program p = composed(source);
  if (p.modules.size() != 1) throw TransformError("control expects a single-module program");
  NamePool names(p);
  gcl::Module& module = p.modules[0];

  std::set<std::string> present;
  for (const auto& c : module.commands) present.insert(c.action);
  for (const auto& a : report.fresh_actions) {
    if (present.count(a.name) == 0) throw TransformError("reported action '" + a.name + "' is absent from the program");
  }

  // One boolean per (parameter, value) pair that some action commits to.
  std::set<std::pair<std::size_t, std::size_t>> pairs;  // (parameter index, value index)
  for (const auto& a : report.fresh_actions) {
    for (const auto& [name, v] : a.commits) {
      std::size_t pi = 0;
      while (p.parameters[pi].name != name) ++pi;
      pairs.insert({pi, value_index(p, name, v)});
    }
  }
  gcl::Module control;
  control.name = names.fresh("control");
  std::map<std::pair<std::size_t, std::size_t>, std::string> qvar;
  report.control_variables.clear();
  for (const auto& [pi, vi] : pairs) {
    const auto& param = p.parameters[pi];
    gcl::VariableDecl v;
    v.name = names.fresh("q_" + param.name + "_" + std::to_string(vi + 1));
    v.lo = 0;
    v.hi = 1;
    v.init = 0;
    control.variables.push_back(v);
    qvar[{pi, vi}] = v.name;
    report.fresh_variables.push_back({v.name, 0, 1});
    report.control_variables.push_back({{param.name, vi}, v.name});
  }

  for (auto& cmd : module.commands) {
    const FreshAction* a = report.find_action(cmd.action);
    if (a == nullptr) continue;
    std::vector<Expr> blocked{cmd.guard};
    gcl::Command set;
    set.action = cmd.action;
    set.guard = gcl::tt();
    gcl::Branch b;
    b.probability = gcl::num(1L);
    for (const auto& [name, v] : a->commits) {
      std::size_t pi = 0;
      while (p.parameters[pi].name != name) ++pi;
      const std::size_t vi = value_index(p, name, v);
      for (const auto& [key, var] : qvar) {
        if (key.first == pi && key.second != vi) blocked.push_back(eq(var, 0));
      }
      b.updates.push_back({qvar.at({pi, vi}), gcl::num(1L)});
    }
    cmd.guard = gcl::conj(blocked);
    set.branches.push_back(std::move(b));
    control.actions.insert(set.action);
    control.commands.push_back(std::move(set));
  }
  p.modules.push_back(std::move(control));
  return p;
}

std::pair<gcl::Program, TransformReport> transform_all(const gcl::Program& source)
{
  gcl::Program p = composed(source);
  if (p.parameters.empty()) return {p, TransformReport{}};
  auto [rewarded, r1] = transform_rewards(p);
  auto [probs, r2] = transform_probabilities(rewarded);
  TransformReport report = r1;
  report.merge(r2);
  report.command_mapping.clear();
  const std::size_t original = p.modules[0].commands.size();
  for (const auto& [id, produced] : r2.command_mapping) {
    if (id < original) report.command_mapping.push_back({id, produced});
  }
  if (report.fresh_actions.empty()) return {probs, report};
  gcl::Program controlled = add_control(probs, report);
  return {controlled, report};
}

}  // namespace mimsynth
