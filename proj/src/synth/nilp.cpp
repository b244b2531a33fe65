#include "mimsynth/synth/nilp.hpp"

#include "mimsynth/semantics/build.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mimsynth::synth {

namespace {

std::string number(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string state_var(char kind, std::size_t s) { return std::string(1, kind) + "[s" + std::to_string(s) + "]"; }
std::string sig_var(std::size_t s, std::size_t a)
{
  return "sig[s" + std::to_string(s) + ",a" + std::to_string(a) + "]";
}
std::string x_var(std::size_t k) { return "x[u" + std::to_string(k + 1) + "]"; }

const char* sense_text(Sense s)
{
  switch (s) {
    case Sense::Le: return "<=";
    case Sense::Ge: return ">=";
    case Sense::Eq: return "=";
  }
  return "=";
}

std::string row_text(const NilpRow& row)
{
  std::string out = row.name + ":";
  for (const auto& t : row.terms) {
    out += t.coefficient < 0 ? " - " : " + ";
    out += number(std::fabs(t.coefficient));
    for (std::size_t i = 0; i < t.factors.size(); ++i) out += (i == 0 ? " " : " * ") + t.factors[i];
  }
  if (row.terms.empty()) out += " 0";
  return out + " " + sense_text(row.sense) + " " + number(row.rhs);
}

/// Value of the entry under valuation k.
struct EntryValues {
  const std::vector<ParameterValuation>* valuations;

  std::vector<double> operator()(const Entry& e) const
  {
    if (is_concrete(e)) return {entry_value(e)};
    std::vector<double> out;
    for (const auto& u : *valuations) out.push_back(eval_expr(std::get<gcl::Expr>(e), {}, u).get_d());
    return out;
  }
};

}  // namespace

NilpStats emit_nilp(const gcl::Program& p, const SynthesisQuery& q, std::ostream& sink)
{
  const ExplicitModel m = build_model(p);
  auto find_label = [&](const std::string& name) {
    auto it = m.labels.find(name);
    if (it == m.labels.end()) throw ModelError("unknown label '" + name + "'");
    return it->second;
  };
  const auto T = find_label(q.target);
  const auto G = find_label(q.goal);
  const auto valuations = well_defined_valuations(m);
  if (valuations.empty()) throw ModelError("no well-defined valuation exists");
  const EntryValues values{&valuations};

  std::vector<NilpRow> rows;
  rows.push_back({"bound", {{1.0, {state_var('p', m.initial)}}}, Sense::Le, q.lambda});
  NilpRow onehot{"onehot", {}, Sense::Eq, 1.0};
  for (std::size_t k = 0; k < valuations.size(); ++k) onehot.terms.push_back({1.0, {x_var(k)}});
  rows.push_back(std::move(onehot));

  std::set<std::string> actions;
  std::vector<std::string> sigs;
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    const std::string ps = state_var('p', s);
    const std::string cs = state_var('c', s);
    if (T[s] || G[s]) {
      rows.push_back({T[s] ? "target_s" + std::to_string(s) : "absorb_p_s" + std::to_string(s),
                      {{1.0, {ps}}},
                      Sense::Eq,
                      T[s] ? 1.0 : 0.0});
      rows.push_back({G[s] ? "goal_s" + std::to_string(s) : "absorb_c_s" + std::to_string(s), {{1.0, {cs}}}, Sense::Eq, 0.0});
      continue;
    }
    NilpRow prob{"prob_s" + std::to_string(s), {{1.0, {ps}}}, Sense::Eq, 0.0};
    NilpRow cost{"cost_s" + std::to_string(s), {{1.0, {cs}}}, Sense::Eq, 0.0};
    NilpRow sigsum{"sigsum_s" + std::to_string(s), {}, Sense::Eq, 1.0};
    const auto cost_values = values(m.state_cost[s]);
    for (std::size_t a = 0; a < m.choices[s].size(); ++a) {
      const auto& choice = m.choices[s][a];
      actions.insert(choice.action);
      const std::string sig = sig_var(s, a);
      sigs.push_back(sig);
      sigsum.terms.push_back({1.0, {sig}});
      if (cost_values.size() == 1) {
        if (cost_values[0] != 0.0) cost.terms.push_back({-cost_values[0], {sig}});
      } else {
        for (std::size_t k = 0; k < valuations.size(); ++k) {
          if (cost_values[k] != 0.0) cost.terms.push_back({-cost_values[k], {x_var(k), sig}});
        }
      }
      bool parametric = false;
      NilpRow wd{"wd_s" + std::to_string(s) + "_a" + std::to_string(a), {}, Sense::Eq, 1.0};
      for (const auto& t : choice.transitions) {
        const auto v = values(t.probability);
        parametric = parametric || v.size() > 1;
        for (std::size_t k = 0; k < v.size(); ++k) {
          if (v[k] == 0.0) continue;
          std::vector<std::string> prefix = v.size() == 1 ? std::vector<std::string>{} : std::vector{x_var(k)};
          prefix.push_back(sig);
          auto pf = prefix;
          pf.push_back(state_var('p', t.target));
          prob.terms.push_back({-v[k], pf});
          auto cf = prefix;
          cf.push_back(state_var('c', t.target));
          cost.terms.push_back({-v[k], cf});
        }
        for (std::size_t k = 0; k < valuations.size(); ++k) {
          const double vk = v.size() == 1 ? v[0] : v[k];
          if (vk != 0.0) wd.terms.push_back({vk, {x_var(k)}});
        }
      }
      if (parametric) rows.push_back(std::move(wd));
    }
    rows.push_back(std::move(prob));
    rows.push_back(std::move(cost));
    rows.push_back(std::move(sigsum));
  }

  NilpStats stats{m.num_states(), actions.size(), valuations.size(), rows.size()};
  sink << "\\ structured synthesis: minimize c at the initial state subject to p <= lambda\n";
  sink << "\\ states " << stats.states << ", actions " << stats.actions << ", valuations " << stats.valuations
       << ", rows " << stats.rows << "\n";
  sink << "\\ size |S|*|A| + |Val|^2 = " << stats.states * std::max<std::size_t>(1, stats.actions) +
                                               stats.valuations * stats.valuations
       << "\n";
  for (std::size_t k = 0; k < valuations.size(); ++k) {
    sink << "\\ " << x_var(k) << " : " << valuation_text(valuations[k]) << "\n";
  }
  sink << "MINIMIZE\n obj: + 1 " << state_var('c', m.initial) << "\nSUBJECT TO\n";
  for (const auto& row : rows) sink << " " << row_text(row) << "\n";
  sink << "BOUNDS\n";
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    sink << " 0 <= " << state_var('p', s) << " <= 1\n";
    sink << " " << state_var('c', s) << " >= 0\n";
  }
  for (const auto& sig : sigs) sink << " 0 <= " << sig << " <= 1\n";
  sink << "BINARY\n";
  for (std::size_t k = 0; k < valuations.size(); ++k) sink << " " << x_var(k) << "\n";
  sink << "END\n";
  if (!sink) throw std::runtime_error("cannot write the NILP output");
  return stats;
}

NilpModel parse_nilp(std::istream& in)
{
  NilpModel model;
  enum class Section { None, Objective, Constraints, Bounds, Binary, End } section = Section::None;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument("line " + std::to_string(line_no) + ": " + what);
  };
  auto parse_number = [&](const std::string& tok) {
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) fail("bad number '" + tok + "'");
      return v;
    } catch (const std::logic_error&) {
      fail("bad number '" + tok + "'");
    }
    return 0.0;
  };
  auto parse_terms = [&](std::vector<std::string>& toks, std::size_t& i) {
    std::vector<NilpTerm> terms;
    while (i < toks.size() && (toks[i] == "+" || toks[i] == "-")) {
      const double sign = toks[i] == "-" ? -1.0 : 1.0;
      if (i + 1 >= toks.size()) fail("truncated term");
      NilpTerm term;
      term.coefficient = sign * parse_number(toks[i + 1]);
      i += 2;
      if (i < toks.size() && toks[i].find('[') != std::string::npos) {
        term.factors.push_back(toks[i++]);
        while (i + 1 < toks.size() && toks[i] == "*") {
          term.factors.push_back(toks[i + 1]);
          i += 2;
        }
      }
      terms.push_back(std::move(term));
    }
    return terms;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '\\') continue;
    std::istringstream words(line);
    std::vector<std::string> toks;
    for (std::string w; words >> w;) toks.push_back(w);
    if (toks.empty()) continue;
    if (toks.size() == 1 && toks[0] == "MINIMIZE") {
      section = Section::Objective;
      continue;
    }
    if (toks.size() == 2 && toks[0] == "SUBJECT" && toks[1] == "TO") {
      section = Section::Constraints;
      continue;
    }
    if (toks.size() == 1 && toks[0] == "BOUNDS") {
      section = Section::Bounds;
      continue;
    }
    if (toks.size() == 1 && toks[0] == "BINARY") {
      section = Section::Binary;
      continue;
    }
    if (toks.size() == 1 && toks[0] == "END") {
      section = Section::End;
      continue;
    }
    switch (section) {
      case Section::Objective:
      case Section::Constraints: {
        if (toks[0].back() != ':') fail("expected a row name");
        std::size_t i = 1;
        auto terms = parse_terms(toks, i);
        if (section == Section::Objective) {
          if (i != toks.size()) fail("unexpected text in objective");
          model.objective = std::move(terms);
          break;
        }
        if (i < toks.size() && toks[i] == "0" && terms.empty()) ++i;
        if (i + 2 != toks.size()) fail("expected '<sense> <rhs>' after the terms");
        NilpRow row;
        row.name = toks[0].substr(0, toks[0].size() - 1);
        row.terms = std::move(terms);
        if (toks[i] == "<=") {
          row.sense = Sense::Le;
        } else if (toks[i] == ">=") {
          row.sense = Sense::Ge;
        } else if (toks[i] == "=") {
          row.sense = Sense::Eq;
        } else {
          fail("unknown relation '" + toks[i] + "'");
        }
        row.rhs = parse_number(toks[i + 1]);
        model.rows.push_back(std::move(row));
        break;
      }
      case Section::Bounds:
        if (toks.size() == 5 && toks[1] == "<=" && toks[3] == "<=") {
          model.bounds.push_back({toks[2], parse_number(toks[0]), parse_number(toks[4])});
        } else if (toks.size() == 3 && toks[1] == ">=") {
          model.bounds.push_back({toks[0], parse_number(toks[2]), std::numeric_limits<double>::infinity()});
        } else {
          fail("malformed bound");
        }
        break;
      case Section::Binary:
        for (const auto& t : toks) model.binaries.push_back(t);
        break;
      default: fail("text outside a section");
    }
  }
  if (section != Section::End) throw std::invalid_argument("missing END");
  return model;
}

double max_violation(const NilpModel& model, const std::map<std::string, double>& assignment)
{
  auto value = [&](const std::string& name) {
    auto it = assignment.find(name);
    if (it == assignment.end()) throw std::invalid_argument("no value for variable " + name);
    return it->second;
  };
  double worst = 0.0;
  for (const auto& row : model.rows) {
    double lhs = 0.0;
    for (const auto& t : row.terms) {
      double product = t.coefficient;
      for (const auto& f : t.factors) product *= value(f);
      lhs += product;
    }
    double v = 0.0;
    switch (row.sense) {
      case Sense::Eq: v = std::fabs(lhs - row.rhs); break;
      case Sense::Le: v = std::max(0.0, lhs - row.rhs); break;
      case Sense::Ge: v = std::max(0.0, row.rhs - lhs); break;
    }
    worst = std::max(worst, v);
  }
  for (const auto& b : model.bounds) {
    const double v = value(b.variable);
    worst = std::max({worst, b.lower - v, v - b.upper});
  }
  for (const auto& x : model.binaries) {
    const double v = value(x);
    worst = std::max(worst, std::min(std::fabs(v), std::fabs(v - 1.0)));
  }
  return worst;
}

std::map<std::string, double> nilp_assignment(const gcl::Program& p, const SynthesisQuery& q,
                                              const SynthesisResult& enumerated)
{
  if (!enumerated.feasible) throw std::invalid_argument("an infeasible result has no assignment");
  const ExplicitModel m = build_model(p);
  const auto valuations = well_defined_valuations(m);
  const ExplicitModel inst = instantiate(m, enumerated.valuation);
  const mc::StateSet& T = inst.label(q.target);
  const mc::StateSet& G = inst.label(q.goal);
  mc::StateSet A(T.size());
  for (std::size_t s = 0; s < A.size(); ++s) A[s] = T[s] || G[s];
  const mc::SparseMdp sparse = mc::SparseMdp::from_model(inst);

  // Chain induced by the strategy, with T and G absorbing.
  mc::SparseMdp chain;
  chain.initial = sparse.initial;
  for (std::size_t s = 0; s < sparse.num_states(); ++s) {
    if (A[s]) {
      chain.add_choice("", {{s, 1.0}});
      chain.end_state(0.0);
      continue;
    }
    std::map<std::size_t, double> mixed;
    for (std::size_t c = sparse.row_start[s]; c < sparse.row_start[s + 1]; ++c) {
      const double w = enumerated.strategy.dist[s][c - sparse.row_start[s]];
      for (std::size_t e = sparse.entry_start[c]; e < sparse.entry_start[c + 1]; ++e) {
        mixed[sparse.target[e]] += w * sparse.prob[e];
      }
    }
    chain.add_choice("", {mixed.begin(), mixed.end()});
    chain.end_state(sparse.cost[s]);
  }
  mc::ViOptions precise;
  precise.epsilon = 1e-14;
  const auto pr = mc::reach_prob(chain, T, mc::Direction::Max, precise);
  const auto ec = mc::expected_cost(chain, A, mc::Direction::Max, precise);

  std::map<std::string, double> out;
  for (std::size_t s = 0; s < inst.num_states(); ++s) {
    out[state_var('p', s)] = pr.at(s);
    out[state_var('c', s)] = ec.at(s);
    if (A[s]) continue;
    for (std::size_t a = 0; a < inst.choices[s].size(); ++a) out[sig_var(s, a)] = enumerated.strategy.dist[s][a];
  }
  for (std::size_t k = 0; k < valuations.size(); ++k) out[x_var(k)] = valuations[k] == enumerated.valuation ? 1.0 : 0.0;
  return out;
}

}  // namespace mimsynth::synth
