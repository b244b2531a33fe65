#include "mimsynth/semantics/build.hpp"

#include "mimsynth/gcl/eval.hpp"
#include "mimsynth/gcl/printer.hpp"
#include "mimsynth/semantics/compose.hpp"

#include <deque>
#include <set>
#include <sstream>
#include <unordered_map>

namespace mimsynth {

namespace {

using gcl::Expr;
using gcl::Op;

const Rational kSumTolerance(1, 1000000000);

bool is_closed(const Expr& e)
{
  return e.kind() == Expr::Kind::Number || e.kind() == Expr::Kind::Boolean;
}

bool yields_boolean(Op op)
{
  switch (op) {
    case Op::Not:
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
    case Op::Eq:
    case Op::Ne:
    case Op::And:
    case Op::Or:
    case Op::Implies: return true;
    default: return false;
  }
}

Rational closed_value(const Expr& e) { return e.kind() == Expr::Kind::Number ? e.value() : Rational(e.truth() ? 1 : 0); }

struct VectorHash {
  std::size_t operator()(const std::vector<std::int64_t>& v) const noexcept
  {
    std::size_t h = 1469598103934665603ull;
    for (std::int64_t x : v) {
      h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

std::map<std::string, Rational> constant_values(const gcl::Program& p)
{
  std::map<std::string, Rational> env;
  for (const auto& c : p.constants) {
    env[c.name] = gcl::evaluate(c.value, [&](const std::string& n) -> const Rational* {
      auto it = env.find(n);
      return it == env.end() ? nullptr : &it->second;
    });
  }
  return env;
}

bool is_zero(const Entry& e)
{
  const auto* r = std::get_if<Rational>(&e);
  return r != nullptr && *r == 0;
}

Entry add_entries(const Entry& a, const Entry& b)
{
  if (is_concrete(a) && is_concrete(b)) return Rational(std::get<Rational>(a) + std::get<Rational>(b));
  if (is_zero(a)) return b;
  if (is_zero(b)) return a;
  auto as_expr = [](const Entry& e) {
    if (const auto* r = std::get_if<Rational>(&e)) return Expr::number(*r);
    return std::get<Expr>(e);
  };
  return gcl::binary(Op::Add, as_expr(a), as_expr(b));
}

Entry to_entry(const Expr& e)
{
  if (e.kind() == Expr::Kind::Number) return e.value();
  return e;
}

std::string choice_text(const ExplicitModel& m, std::size_t s, const Choice& c)
{
  return "state " + std::to_string(s) + " " + m.state_text(s) + " action '" + c.action + "'";
}

// Checks concrete entries of one distribution; throws E with a located message.
template <typename E>
void validate_distribution(const ExplicitModel& m, std::size_t s, const Choice& c)
{
  Rational sum = 0;
  bool all_concrete = true;
  for (const auto& t : c.transitions) {
    const auto* r = std::get_if<Rational>(&t.probability);
    if (r == nullptr) {
      all_concrete = false;
      continue;
    }
    if (*r < 0 || *r > 1) {
      throw E("probability " + to_string(*r) + " outside [0,1] in " + choice_text(m, s, c));
    }
    sum += *r;
  }
  if (all_concrete && abs(sum - 1) > kSumTolerance) {
    throw E("distribution sums to " + to_string(sum) + " in " + choice_text(m, s, c));
  }
}

}  // namespace

Expr residualize(const Expr& e, const gcl::Lookup& lookup)
{
  switch (e.kind()) {
    case Expr::Kind::Number:
    case Expr::Kind::Boolean: return e;
    case Expr::Kind::Identifier: {
      const Rational* v = lookup ? lookup(e.name()) : nullptr;
      return v != nullptr ? Expr::number(*v, e.pos()) : e;
    }
    case Expr::Kind::Apply: break;
  }
  const Op op = e.op();
  std::vector<Expr> args;
  args.reserve(e.args().size());
  for (const auto& a : e.args()) args.push_back(residualize(a, lookup));

  if (op == Op::Ite && is_closed(args[0])) return closed_value(args[0]) != 0 ? args[1] : args[2];
  if ((op == Op::And || op == Op::Or) && (is_closed(args[0]) || is_closed(args[1]))) {
    const bool absorbing = op == Op::Or;
    for (std::size_t i = 0; i < 2; ++i) {
      if (is_closed(args[i]) && (closed_value(args[i]) != 0) == absorbing) return Expr::boolean(absorbing);
    }
  }
  bool closed = true;
  for (const auto& a : args) closed = closed && is_closed(a);
  Expr rebuilt = Expr::apply(op, std::move(args), e.pos());
  if (!closed) return rebuilt;
  Rational v = gcl::evaluate(rebuilt, nullptr);
  return yields_boolean(op) ? Expr::boolean(v != 0, e.pos()) : Expr::number(v, e.pos());
}

std::vector<std::string> parameters_of(const Expr& e, const gcl::Program& program)
{
  std::set<std::string> ids;
  gcl::collect_identifiers(e, ids);
  std::vector<std::string> result;
  for (const auto& p : program.parameters) {
    if (ids.count(p.name) != 0) result.push_back(p.name);
  }
  return result;
}

std::vector<ParameterValuation> joint_rows(const std::vector<gcl::ParameterDecl>& params,
                                           const std::vector<std::string>& names)
{
  std::vector<ParameterValuation> rows{ParameterValuation{}};
  for (const auto& p : params) {
    bool wanted = false;
    for (const auto& n : names) wanted = wanted || n == p.name;
    if (!wanted) continue;
    std::vector<ParameterValuation> next;
    for (const auto& row : rows) {
      for (const auto& v : p.values) {
        ParameterValuation extended = row;
        extended[p.name] = v;
        next.push_back(std::move(extended));
      }
    }
    rows = std::move(next);
  }
  return rows;
}

std::vector<ParameterValuation> all_valuations(const std::vector<gcl::ParameterDecl>& params)
{
  std::vector<std::string> names;
  for (const auto& p : params) names.push_back(p.name);
  return joint_rows(params, names);
}

std::string valuation_text(const ParameterValuation& u)
{
  std::string out;
  for (const auto& [name, value] : u) {
    if (!out.empty()) out += ",";
    out += name + "=" + to_string(value);
  }
  return out;
}

Rational eval_expr(const Expr& e, const VariableValuation& vars, const ParameterValuation& params,
                   const gcl::Program* program)
{
  std::map<std::string, Rational> env;
  if (program != nullptr) env = constant_values(*program);
  for (const auto& [name, value] : params) env[name] = value;
  for (const auto& [name, value] : vars) env[name] = Rational(static_cast<long>(value));
  return gcl::evaluate(e, [&](const std::string& n) -> const Rational* {
    auto it = env.find(n);
    return it == env.end() ? nullptr : &it->second;
  });
}

std::vector<Rational> expr_value_set(const Expr& e, const gcl::Program& program)
{
  std::set<std::string> ids;
  gcl::collect_identifiers(e, ids);
  for (const auto& id : ids) {
    if (program.find_parameter(id) == nullptr && program.find_constant(id) == nullptr) {
      throw ModelError("expression references state variable '" + id + "'");
    }
  }
  std::set<Rational> values;
  for (const auto& row : joint_rows(program.parameters, parameters_of(e, program))) {
    values.insert(eval_expr(e, {}, row, &program));
  }
  return {values.begin(), values.end()};
}

ExplicitModel build_model(const gcl::Program& source, const std::optional<ParameterValuation>& params,
                          const BuildOptions& options)
{
  const gcl::Program p = compose(source);
  gcl::Module empty;
  const gcl::Module& module = p.modules.empty() ? empty : p.modules[0];

  ExplicitModel m;
  m.parameters = p.parameters;
  for (const auto& v : module.variables) m.variable_names.push_back(v.name);
  const std::size_t nvars = module.variables.size();

  std::unordered_map<std::string, std::size_t> var_index;
  for (std::size_t i = 0; i < nvars; ++i) var_index[module.variables[i].name] = i;
  const std::map<std::string, Rational> constants = constant_values(p);
  if (params) {
    for (const auto& decl : p.parameters) {
      if (params->count(decl.name) == 0) throw ModelError("valuation does not bind parameter '" + decl.name + "'");
    }
  }

  std::vector<Rational> current(nvars);
  const gcl::Lookup lookup = [&](const std::string& n) -> const Rational* {
    if (auto it = var_index.find(n); it != var_index.end()) return &current[it->second];
    if (auto it = constants.find(n); it != constants.end()) return &it->second;
    if (params) {
      if (auto it = params->find(n); it != params->end()) return &it->second;
    }
    return nullptr;
  };
  auto located = [&](std::size_t s, const std::string& what) {
    return "state " + std::to_string(s) + " " + m.state_text(s) + ": " + what;
  };
  auto truth = [&](std::size_t s, const Expr& e, const char* what) {
    try {
      return gcl::evaluate_bool(e, lookup);
    } catch (const gcl::EvalError& err) {
      throw ModelError(located(s, std::string(what) + " '" + gcl::print_expr(e) + "': " + err.what()));
    }
  };

  std::unordered_map<std::vector<std::int64_t>, std::size_t, VectorHash> index;
  std::deque<std::size_t> queue;
  auto intern = [&](std::vector<std::int64_t> vals) {
    auto [it, inserted] = index.emplace(vals, m.states.size());
    if (inserted) {
      if (m.states.size() >= options.state_cap) {
        throw ModelError("state-space cap of " + std::to_string(options.state_cap) + " states exceeded");
      }
      m.states.push_back(std::move(vals));
      queue.push_back(it->second);
    }
    return it->second;
  };

  std::vector<std::int64_t> init(nvars);
  for (std::size_t i = 0; i < nvars; ++i) {
    const auto& v = module.variables[i];
    if (v.init < v.lo || v.init > v.hi) {
      throw ModelError("initial value of '" + v.name + "' lies outside its domain");
    }
    init[i] = v.init;
  }
  m.initial = intern(init);

  bool symbolic = false;
  while (!queue.empty()) {
    const std::size_t s = queue.front();
    queue.pop_front();
    const std::vector<std::int64_t> vals = m.states[s];
    for (std::size_t i = 0; i < nvars; ++i) current[i] = Rational(static_cast<long>(vals[i]));

    std::vector<Choice> choices;
    for (const auto& cmd : module.commands) {
      if (!truth(s, cmd.guard, "guard")) continue;
      Choice choice;
      choice.action = cmd.action;
      std::vector<std::pair<std::vector<std::int64_t>, Entry>> successors;
      std::vector<std::pair<std::vector<std::int64_t>, Entry>> branches;
      for (const auto& br : cmd.branches) {
        Expr prob;
        try {
          prob = residualize(br.probability, lookup);
        } catch (const gcl::EvalError& err) {
          throw ModelError(located(s, "probability '" + gcl::print_expr(br.probability) + "': " + err.what()));
        }
        std::vector<std::int64_t> next = vals;
        for (const auto& u : br.updates) {
          Rational v;
          try {
            v = gcl::evaluate(u.value, lookup);
          } catch (const gcl::EvalError& err) {
            throw ModelError(located(s, "update of '" + u.variable + "': " + err.what()));
          }
          const std::size_t i = var_index.at(u.variable);
          const auto& decl = module.variables[i];
          if (v.get_den() != 1) {
            throw ModelError(located(s, "update of '" + u.variable + "' yields non-integer " + to_string(v)));
          }
          if (v < decl.lo || v > decl.hi) {
            throw ModelError(located(s, "update of '" + u.variable + "' to " + to_string(v) + " leaves its domain [" +
                                            std::to_string(decl.lo) + ".." + std::to_string(decl.hi) + "]"));
          }
          next[i] = v.get_num().get_si();
        }
        Entry entry = to_entry(prob);
        if (const auto* r = std::get_if<Rational>(&entry); r != nullptr && (*r < 0 || *r > 1)) {
          const std::string what = located(s, "branch probability " + to_string(*r) + " outside [0,1]");
          if (params) throw WellDefinednessError(what);
          throw ModelError(what);
        }
        branches.push_back({next, entry});
        bool merged = false;
        for (auto& [target, acc] : successors) {
          if (target == next) {
            acc = add_entries(acc, entry);
            if (const auto* sum = std::get_if<Expr>(&acc)) acc = to_entry(residualize(*sum, nullptr));
            merged = true;
            break;
          }
        }
        if (!merged) successors.emplace_back(std::move(next), std::move(entry));
      }
      for (const auto& [target, entry] : branches) {
        const auto* e = std::get_if<Expr>(&entry);
        if (e == nullptr) continue;
        std::size_t sharing = 0;
        for (const auto& other : branches) sharing += other.first == target ? 1 : 0;
        if (sharing > 1) choice.merged_branches.push_back(*e);
      }
      for (auto& [target, entry] : successors) {
        if (is_zero(entry)) continue;
        symbolic = symbolic || !is_concrete(entry);
        choice.transitions.push_back({std::move(entry), intern(target)});
      }
      if (params) {
        validate_distribution<WellDefinednessError>(m, s, choice);
      } else {
        validate_distribution<ModelError>(m, s, choice);
      }
      choices.push_back(std::move(choice));
    }
    if (choices.empty()) {
      Choice loop;
      loop.transitions.push_back({Rational(1), s});
      choices.push_back(std::move(loop));
    }
    if (m.choices.size() <= s) m.choices.resize(s + 1);
    m.choices[s] = std::move(choices);
  }
  m.choices.resize(m.states.size());

  m.state_cost.assign(m.states.size(), Rational(0));
  for (std::size_t s = 0; s < m.states.size(); ++s) {
    for (std::size_t i = 0; i < nvars; ++i) current[i] = Rational(static_cast<long>(m.states[s][i]));
    for (const auto& r : p.rewards) {
      if (!truth(s, r.guard, "reward guard")) continue;
      Expr cost;
      try {
        cost = residualize(r.cost, lookup);
      } catch (const gcl::EvalError& err) {
        throw ModelError(located(s, "reward '" + gcl::print_expr(r.cost) + "': " + err.what()));
      }
      m.state_cost[s] = add_entries(m.state_cost[s], to_entry(cost));
      if (const auto* sum = std::get_if<Expr>(&m.state_cost[s])) m.state_cost[s] = to_entry(residualize(*sum, nullptr));
    }
    if (const auto* c = std::get_if<Rational>(&m.state_cost[s]); c != nullptr && *c < 0) {
      throw ModelError(located(s, "negative cost " + to_string(*c)));
    }
    symbolic = symbolic || !is_concrete(m.state_cost[s]);
    for (const auto& l : p.labels) {
      auto& bits = m.labels[l.name];
      bits.resize(m.states.size());
      bits[s] = truth(s, l.expr, "label");
    }
  }
  for (const auto& l : p.labels) m.labels[l.name].resize(m.states.size());

  if (symbolic) {
    m.kind = ModelKind::MIMDP;
  } else {
    m.kind = ModelKind::MC;
    for (const auto& cs : m.choices) {
      if (cs.size() != 1) m.kind = ModelKind::MDP;
    }
  }
  return m;
}

ExplicitModel instantiate(const ExplicitModel& m, const ParameterValuation& u)
{
  for (const auto& decl : m.parameters) {
    auto it = u.find(decl.name);
    if (it == u.end()) throw ModelError("valuation does not bind parameter '" + decl.name + "'");
    bool member = false;
    for (const auto& v : decl.values) member = member || v == it->second;
    if (!member) {
      throw ModelError("value " + to_string(it->second) + " is not in the value set of '" + decl.name + "'");
    }
  }
  const gcl::Lookup lookup = [&](const std::string& n) -> const Rational* {
    auto it = u.find(n);
    return it == u.end() ? nullptr : &it->second;
  };

  ExplicitModel out = m;
  bool nondeterministic = false;
  for (std::size_t s = 0; s < out.num_states(); ++s) {
    nondeterministic = nondeterministic || out.choices[s].size() != 1;
    for (auto& c : out.choices[s]) {
      std::vector<Transition> kept;
      for (auto& t : c.transitions) {
        if (const auto* e = std::get_if<Expr>(&t.probability)) {
          try {
            t.probability = gcl::evaluate(*e, lookup);
          } catch (const gcl::EvalError& err) {
            throw WellDefinednessError("well-definedness violation in " + choice_text(m, s, c) + ": " + err.what());
          }
        }
        if (!is_zero(t.probability)) kept.push_back(std::move(t));
      }
      c.transitions = std::move(kept);
      for (const auto& e : c.merged_branches) {
        Rational v;
        try {
          v = gcl::evaluate(e, lookup);
        } catch (const gcl::EvalError& err) {
          throw WellDefinednessError("well-definedness violation in " + choice_text(m, s, c) + ": " + err.what());
        }
        if (v < 0 || v > 1) {
          throw WellDefinednessError("well-definedness violation: branch probability " + to_string(v) +
                                     " outside [0,1] in " + choice_text(m, s, c) + " under " + valuation_text(u));
        }
      }
      c.merged_branches.clear();
      try {
        validate_distribution<WellDefinednessError>(out, s, c);
      } catch (const WellDefinednessError& err) {
        throw WellDefinednessError(std::string("well-definedness violation: ") + err.what() + " under " +
                                   valuation_text(u));
      }
    }
    if (const auto* e = std::get_if<Expr>(&out.state_cost[s])) {
      try {
        out.state_cost[s] = gcl::evaluate(*e, lookup);
      } catch (const gcl::EvalError& err) {
        throw WellDefinednessError("well-definedness violation in cost of state " + std::to_string(s) + ": " +
                                   err.what());
      }
      if (std::get<Rational>(out.state_cost[s]) < 0) {
        throw ModelError("negative cost in state " + std::to_string(s) + " under " + valuation_text(u));
      }
    }
  }
  out.kind = nondeterministic ? ModelKind::MDP : ModelKind::MC;
  return out;
}

std::vector<ParameterValuation> well_defined_valuations(const ExplicitModel& m)
{
  std::vector<ParameterValuation> result;
  for (auto& u : all_valuations(m.parameters)) {
    try {
      (void)instantiate(m, u);
      result.push_back(std::move(u));
    } catch (const WellDefinednessError&) {
    }
  }
  return result;
}

}  // namespace mimsynth
