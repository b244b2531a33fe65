#include "mimsynth/semantics/model.hpp"

#include "mimsynth/gcl/printer.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace mimsynth {

bool is_concrete(const Entry& e) { return std::holds_alternative<Rational>(e); }

std::string entry_text(const Entry& e)
{
  if (const auto* r = std::get_if<Rational>(&e)) return to_string(*r);
  return gcl::print_expr(std::get<gcl::Expr>(e));
}

double entry_value(const Entry& e)
{
  if (const auto* r = std::get_if<Rational>(&e)) return r->get_d();
  throw ModelError("entry '" + entry_text(e) + "' is not concrete; instantiate the model first");
}

const char* kind_name(ModelKind kind)
{
  switch (kind) {
    case ModelKind::MC: return "MC";
    case ModelKind::MDP: return "MDP";
    case ModelKind::MIMDP: return "MIMDP";
  }
  return "?";
}

std::size_t ExplicitModel::num_choices() const
{
  std::size_t n = 0;
  for (const auto& cs : choices) n += cs.size();
  return n;
}

std::size_t ExplicitModel::num_transitions() const
{
  std::size_t n = 0;
  for (const auto& cs : choices) {
    for (const auto& c : cs) {
      std::set<std::size_t> targets;
      for (const auto& t : c.transitions) targets.insert(t.target);
      n += targets.size();
    }
  }
  return n;
}

const std::vector<bool>& ExplicitModel::label(const std::string& name) const
{
  auto it = labels.find(name);
  if (it == labels.end()) throw std::out_of_range("unknown label \"" + name + "\"");
  return it->second;
}

VariableValuation ExplicitModel::valuation(std::size_t state) const
{
  VariableValuation v;
  for (std::size_t i = 0; i < variable_names.size(); ++i) v[variable_names[i]] = states[state][i];
  return v;
}

std::string ExplicitModel::state_text(std::size_t state) const
{
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < variable_names.size(); ++i) {
    out << (i > 0 ? "," : "") << variable_names[i] << "=" << states[state][i];
  }
  out << ")";
  return out.str();
}

Strategy Strategy::deterministic(const ExplicitModel& m, const std::vector<std::size_t>& picks)
{
  Strategy s;
  s.dist.resize(m.num_states());
  for (std::size_t i = 0; i < m.num_states(); ++i) {
    s.dist[i].assign(m.choices[i].size(), 0.0);
    s.dist[i][picks[i]] = 1.0;
  }
  return s;
}

ExplicitModel induced_mc(const ExplicitModel& m, const Strategy& sigma)
{
  if (sigma.dist.size() != m.num_states()) throw ModelError("strategy does not cover every state");
  ExplicitModel mc = m;
  mc.kind = ModelKind::MC;
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    const auto& weights = sigma.dist[s];
    if (weights.size() != m.choices[s].size()) {
      throw ModelError("strategy assigns mass to a disabled action in state " + m.state_text(s));
    }
    std::map<std::size_t, double> row;
    for (std::size_t a = 0; a < weights.size(); ++a) {
      if (weights[a] <= 0.0) continue;
      for (const auto& t : m.choices[s][a].transitions) row[t.target] += weights[a] * entry_value(t.probability);
    }
    Choice mixed;
    for (const auto& [target, prob] : row) {
      // Exact conversion of the double keeps downstream solvers on the same numbers.
      mixed.transitions.push_back({Rational(prob), target});
    }
    mc.choices[s] = {std::move(mixed)};
  }
  return mc;
}

std::string to_dot(const ExplicitModel& m)
{
  std::ostringstream out;
  out << "digraph model {\n";
  out << "  node [shape=box];\n";
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    out << "  s" << s << " [label=\"" << s << " " << m.state_text(s) << "\"";
    if (s == m.initial) out << " style=bold";
    out << "];\n";
  }
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    for (const auto& c : m.choices[s]) {
      for (const auto& t : c.transitions) {
        std::string text = entry_text(t.probability);
        std::replace(text.begin(), text.end(), '"', '\'');
        out << "  s" << s << " -> s" << t.target << " [label=\"";
        if (!c.action.empty()) out << c.action << ": ";
        out << text << "\"];\n";
      }
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace mimsynth
