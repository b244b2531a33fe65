#include "mimsynth/synth/synth.hpp"

#include "mimsynth/semantics/build.hpp"
#include "mimsynth/synth/lp.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <stdexcept>
#include <thread>

namespace mimsynth::synth {

namespace {

constexpr double kLambdaTol = 1e-9;

double tie_tolerance(double incumbent) { return 1e-9 * std::max(1.0, std::fabs(incumbent)); }

mc::StateSet unite(const mc::StateSet& a, const mc::StateSet& b)
{
  mc::StateSet out(a.size());
  for (std::size_t s = 0; s < a.size(); ++s) out[s] = a[s] || b[s];
  return out;
}

std::vector<bool> reachable(const mc::SparseMdp& m)
{
  std::vector<bool> seen(m.num_states(), false);
  std::deque<std::size_t> queue{m.initial};
  seen[m.initial] = true;
  while (!queue.empty()) {
    const std::size_t s = queue.front();
    queue.pop_front();
    for (std::size_t c = m.row_start[s]; c < m.row_start[s + 1]; ++c) {
      for (std::size_t e = m.entry_start[c]; e < m.entry_start[c + 1]; ++e) {
        if (m.prob[e] > 0 && !seen[m.target[e]]) {
          seen[m.target[e]] = true;
          queue.push_back(m.target[e]);
        }
      }
    }
  }
  return seen;
}

Strategy uniform_strategy(const mc::SparseMdp& m)
{
  Strategy sigma;
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    const std::size_t k = m.row_start[s + 1] - m.row_start[s];
    sigma.dist.emplace_back(k, k == 0 ? 0.0 : 1.0 / static_cast<double>(k));
  }
  return sigma;
}

void require_sizes(const mc::SparseMdp& m, const mc::StateSet& T, const mc::StateSet& G)
{
  if (T.size() != m.num_states() || G.size() != m.num_states()) {
    throw std::invalid_argument("state set size does not match the model");
  }
}

void require_proper(const mc::SparseMdp& absorbed, const mc::StateSet& A)
{
  if (!mc::prob1(absorbed, A, mc::Direction::Min)[absorbed.initial]) {
    throw ImproperModelError("improper model: some strategy avoids the target and goal states with positive probability");
  }
}

struct Labels {
  mc::StateSet target;
  mc::StateSet goal;
};

Labels resolve_labels(const ExplicitModel& m, const SynthesisQuery& q)
{
  if (!(q.lambda >= 0.0 && q.lambda <= 1.0)) throw std::invalid_argument("probability bound outside [0,1]");
  Labels out;
  for (auto [name, set] : {std::pair{&q.target, &out.target}, std::pair{&q.goal, &out.goal}}) {
    auto it = m.labels.find(*name);
    if (it == m.labels.end()) throw ModelError("unknown label '" + *name + "'");
    *set = it->second;
  }
  return out;
}

bool consistent(const ParameterValuation& commits, const ParameterValuation& partial)
{
  for (const auto& [name, v] : commits) {
    auto it = partial.find(name);
    if (it != partial.end() && it->second != v) return false;
  }
  return true;
}

/// The sub-MDP keeping choices consistent with the partial valuation, state indices unchanged.
struct Restricted {
  mc::SparseMdp mdp;
  std::vector<std::size_t> source_choice;  // SIZE_MAX for an added self-loop
};

Restricted restrict_model(const mc::SparseMdp& m, const std::vector<const FreshAction*>& commits,
                          const ParameterValuation& partial)
{
  Restricted out;
  out.mdp.initial = m.initial;
  std::vector<std::pair<std::size_t, double>> row;
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    bool any = false;
    for (std::size_t c = m.row_start[s]; c < m.row_start[s + 1]; ++c) {
      if (commits[c] != nullptr && !consistent(commits[c]->commits, partial)) continue;
      row.clear();
      for (std::size_t e = m.entry_start[c]; e < m.entry_start[c + 1]; ++e) row.emplace_back(m.target[e], m.prob[e]);
      out.mdp.add_choice(m.action[c], row);
      out.source_choice.push_back(c);
      any = true;
    }
    if (!any) {
      out.mdp.add_choice("", {{s, 1.0}});
      out.source_choice.push_back(SIZE_MAX);
    }
    out.mdp.end_state(m.cost[s]);
  }
  return out;
}

}  // namespace

mc::SparseMdp absorb(const mc::SparseMdp& m, const mc::StateSet& A)
{
  mc::SparseMdp out;
  out.initial = m.initial;
  std::vector<std::pair<std::size_t, double>> row;
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    if (A[s]) {
      out.add_choice("", {{s, 1.0}});
      out.end_state(0.0);
      continue;
    }
    for (std::size_t c = m.row_start[s]; c < m.row_start[s + 1]; ++c) {
      row.clear();
      for (std::size_t e = m.entry_start[c]; e < m.entry_start[c + 1]; ++e) row.emplace_back(m.target[e], m.prob[e]);
      out.add_choice(m.action[c], row);
    }
    out.end_state(m.cost[s]);
  }
  return out;
}

ConstrainedResult constrained_mdp_lp(const mc::SparseMdp& m, const mc::StateSet& T, const mc::StateSet& G,
                                     double lambda)
{
  require_sizes(m, T, G);
  const mc::StateSet A = unite(T, G);
  ConstrainedResult result;
  result.strategy = uniform_strategy(m);
  if (A[m.initial]) {
    result.reach_probability = T[m.initial] ? 1.0 : 0.0;
    result.feasible = result.reach_probability <= lambda + kLambdaTol;
    return result;
  }
  const mc::SparseMdp absorbed = absorb(m, A);
  require_proper(absorbed, A);
  const auto seen = reachable(absorbed);

  // One occupation variable per choice of a reachable transient state.
  LinearProgram lp;
  std::vector<std::size_t> var(m.num_choices(), SIZE_MAX);
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    if (!seen[s] || A[s]) continue;
    for (std::size_t c = m.row_start[s]; c < m.row_start[s + 1]; ++c) var[c] = lp.add_variable(m.cost[s]);
  }
  std::vector<std::map<std::size_t, double>> flow(m.num_states());
  std::map<std::size_t, double> into_target;
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    for (std::size_t c = m.row_start[s]; c < m.row_start[s + 1]; ++c) {
      if (var[c] == SIZE_MAX) continue;
      flow[s][var[c]] += 1.0;
      for (std::size_t e = m.entry_start[c]; e < m.entry_start[c + 1]; ++e) {
        const std::size_t t = m.target[e];
        if (T[t]) into_target[var[c]] += m.prob[e];
        if (!A[t]) flow[t][var[c]] -= m.prob[e];
      }
    }
  }
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    if (!seen[s] || A[s]) continue;
    lp.add_constraint({flow[s].begin(), flow[s].end()}, Sense::Eq, s == m.initial ? 1.0 : 0.0);
  }
  lp.add_constraint({into_target.begin(), into_target.end()}, Sense::Le, lambda);

  const LpSolution sol = solve(lp);
  if (sol.status == LpStatus::Unbounded) throw std::logic_error("occupation LP unbounded on a proper model");
  if (sol.status == LpStatus::Infeasible) return result;

  result.feasible = true;
  result.expected_cost = sol.objective;
  for (const auto& [v, p] : into_target) result.reach_probability += std::max(0.0, sol.x[v]) * p;
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    const std::size_t first = m.row_start[s];
    if (first == m.row_start[s + 1] || var[first] == SIZE_MAX) continue;
    double total = 0.0;
    for (std::size_t c = first; c < m.row_start[s + 1]; ++c) total += std::max(0.0, sol.x[var[c]]);
    if (total <= 1e-12) continue;
    for (std::size_t c = first; c < m.row_start[s + 1]; ++c) {
      result.strategy.dist[s][c - first] = std::max(0.0, sol.x[var[c]]) / total;
    }
  }
  return result;
}

ConstrainedResult evaluate_chain(const mc::SparseMdp& m, const mc::StateSet& T, const mc::StateSet& G, double lambda)
{
  require_sizes(m, T, G);
  const mc::StateSet A = unite(T, G);
  ConstrainedResult result;
  result.strategy = uniform_strategy(m);
  if (A[m.initial]) {
    result.reach_probability = T[m.initial] ? 1.0 : 0.0;
  } else {
    const mc::SparseMdp absorbed = absorb(m, A);
    require_proper(absorbed, A);
    result.reach_probability = mc::reach_prob(absorbed, T, mc::Direction::Max).at(m.initial);
    result.expected_cost = mc::expected_cost(absorbed, A, mc::Direction::Max).at(m.initial);
  }
  result.feasible = result.reach_probability <= lambda + kLambdaTol;
  return result;
}

SynthesisResult synthesize_enumerate(const gcl::Program& p, const SynthesisQuery& q)
{
  const ExplicitModel base = build_model(p);
  resolve_labels(base, q);
  const auto valuations = all_valuations(base.parameters);

  SynthesisResult result;
  result.table.resize(valuations.size());
  std::vector<ConstrainedResult> solved(valuations.size());
  auto solve_one = [&](std::size_t i) {
    ValuationOutcome& out = result.table[i];
    out.valuation = valuations[i];
    ExplicitModel inst;
    try {
      inst = instantiate(base, valuations[i]);
    } catch (const WellDefinednessError&) {
      out.note = "ill-defined";
      return;
    }
    out.well_defined = true;
    const Labels labels = resolve_labels(inst, q);
    const mc::SparseMdp sparse = mc::SparseMdp::from_model(inst);
    try {
      solved[i] = inst.kind == ModelKind::MC ? evaluate_chain(sparse, labels.target, labels.goal, q.lambda)
                                             : constrained_mdp_lp(sparse, labels.target, labels.goal, q.lambda);
    } catch (const ImproperModelError&) {
      out.note = "improper";
      return;
    }
    out.feasible = solved[i].feasible;
    out.expected_cost = solved[i].expected_cost;
    out.reach_probability = solved[i].reach_probability;
    if (!out.feasible) out.note = "infeasible";
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(q.workers, valuations.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < valuations.size(); ++i) solve_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < valuations.size(); i = next++) solve_one(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  bool any_defined = false;
  std::size_t best = SIZE_MAX;
  for (std::size_t i = 0; i < valuations.size(); ++i) {
    const auto& row = result.table[i];
    any_defined = any_defined || row.well_defined;
    if (!row.feasible) continue;
    if (best == SIZE_MAX ||
        row.expected_cost < result.table[best].expected_cost - tie_tolerance(result.table[best].expected_cost)) {
      best = i;
    }
  }
  if (!any_defined) throw ModelError("no well-defined valuation exists");
  result.search_nodes = valuations.size();
  if (best == SIZE_MAX) return result;
  result.feasible = true;
  result.valuation = valuations[best];
  result.expected_cost = result.table[best].expected_cost;
  result.reach_probability = result.table[best].reach_probability;
  result.strategy = solved[best].strategy;
  result.model = std::make_shared<const ExplicitModel>(instantiate(base, valuations[best]));
  return result;
}

SynthesisResult synthesize_transformed(const gcl::Program& p, const SynthesisQuery& q)
{
  const ExplicitModel base = build_model(p);
  resolve_labels(base, q);
  const auto well_defined = well_defined_valuations(base);
  if (well_defined.empty()) throw ModelError("no well-defined valuation exists");
  const auto& params = base.parameters;

  auto [controlled_program, report] = transform_all(p);
  auto controlled = std::make_shared<const ExplicitModel>(build_model(controlled_program));
  if (controlled->kind == ModelKind::MIMDP) throw std::logic_error("controlled model still has parameters");
  const Labels labels = resolve_labels(*controlled, q);
  const mc::StateSet A = unite(labels.target, labels.goal);
  const mc::SparseMdp sparse = mc::SparseMdp::from_model(*controlled);
  std::vector<const FreshAction*> commits(sparse.num_choices());
  for (std::size_t c = 0; c < sparse.num_choices(); ++c) commits[c] = report.find_action(sparse.action[c]);

  SynthesisResult result;
  result.model = controlled;
  ParameterValuation partial;
  std::function<void(std::size_t)> search = [&](std::size_t k) {
    ++result.search_nodes;
    bool extendable = false;
    for (const auto& u : well_defined) extendable = extendable || consistent(u, partial);
    if (!extendable) return;
    const Restricted r = restrict_model(sparse, commits, partial);

    if (k == params.size()) {
      ValuationOutcome out;
      out.valuation = partial;
      out.well_defined = true;
      ConstrainedResult solved;
      try {
        solved = constrained_mdp_lp(r.mdp, labels.target, labels.goal, q.lambda);
      } catch (const ImproperModelError&) {
        out.note = "improper";
        result.table.push_back(out);
        return;
      }
      out.feasible = solved.feasible;
      out.expected_cost = solved.expected_cost;
      out.reach_probability = solved.reach_probability;
      if (!out.feasible) out.note = "infeasible";
      result.table.push_back(out);
      if (!solved.feasible) return;
      if (result.feasible && solved.expected_cost >= result.expected_cost - tie_tolerance(result.expected_cost)) return;
      result.feasible = true;
      result.valuation = partial;
      result.expected_cost = solved.expected_cost;
      result.reach_probability = solved.reach_probability;
      Strategy sigma;
      for (std::size_t s = 0; s < sparse.num_states(); ++s) {
        const std::size_t width = sparse.row_start[s + 1] - sparse.row_start[s];
        sigma.dist.emplace_back(width, 0.0);
        bool placed = false;
        for (std::size_t c = r.mdp.row_start[s]; c < r.mdp.row_start[s + 1]; ++c) {
          const std::size_t source = r.source_choice[c];
          if (source == SIZE_MAX) continue;
          sigma.dist[s][source - sparse.row_start[s]] = solved.strategy.dist[s][c - r.mdp.row_start[s]];
          placed = true;
        }
        if (!placed) sigma.dist[s].assign(width, width == 0 ? 0.0 : 1.0 / static_cast<double>(width));
      }
      result.strategy = std::move(sigma);
      return;
    }

    const mc::SparseMdp absorbed = absorb(r.mdp, A);
    if (!A[sparse.initial]) {
      const double pr = mc::reach_prob(absorbed, labels.target, mc::Direction::Min).at(sparse.initial);
      if (pr > q.lambda + kLambdaTol) return;
      if (result.feasible) {
        try {
          const double ec = mc::expected_cost(absorbed, A, mc::Direction::Min).at(sparse.initial);
          if (ec >= result.expected_cost - tie_tolerance(result.expected_cost)) return;
        } catch (const ModelError&) {
          // No finite bound; keep searching.
        }
      }
    }
    const auto& decl = params[k];
    for (const auto& v : decl.values) {
      partial[decl.name] = v;
      search(k + 1);
    }
    partial.erase(decl.name);
  };
  search(0);

  if (result.feasible) {
    const auto recovered = recover_valuation(*controlled, report, params, result.strategy);
    for (const auto& decl : params) {
      const bool defaulted =
          std::find(recovered.defaulted.begin(), recovered.defaulted.end(), decl.name) != recovered.defaulted.end();
      if (defaulted) {
        result.uncommitted.push_back(decl.name);
      } else if (recovered.valuation.at(decl.name) != result.valuation.at(decl.name)) {
        throw std::logic_error("strategy support commits '" + decl.name + "' to a value the search did not choose");
      }
    }
  }
  return result;
}

RecoveredValuation recover_valuation(const ExplicitModel& controlled, const TransformReport& report,
                                     const std::vector<gcl::ParameterDecl>& params, const Strategy& sigma)
{
  std::vector<std::pair<std::size_t, std::size_t>> columns;  // (variable column, report index)
  for (std::size_t i = 0; i < report.control_variables.size(); ++i) {
    const auto& var = report.control_variables[i].second;
    for (std::size_t col = 0; col < controlled.variable_names.size(); ++col) {
      if (controlled.variable_names[col] == var) columns.emplace_back(col, i);
    }
  }
  std::map<std::string, std::size_t> committed;
  std::vector<bool> seen(controlled.num_states(), false);
  std::deque<std::size_t> queue{controlled.initial};
  seen[controlled.initial] = true;
  while (!queue.empty()) {
    const std::size_t s = queue.front();
    queue.pop_front();
    for (const auto& [col, i] : columns) {
      if (controlled.states[s][col] != 1) continue;
      const auto& [param, value_index] = report.control_variables[i].first;
      auto [it, inserted] = committed.emplace(param, value_index);
      if (!inserted && it->second != value_index) {
        throw std::logic_error("strategy support commits '" + param + "' to two values");
      }
    }
    for (std::size_t a = 0; a < controlled.choices[s].size(); ++a) {
      if (a < sigma.dist[s].size() && sigma.dist[s][a] <= 0.0) continue;
      for (const auto& t : controlled.choices[s][a].transitions) {
        if (!seen[t.target]) {
          seen[t.target] = true;
          queue.push_back(t.target);
        }
      }
    }
  }
  RecoveredValuation out;
  for (const auto& decl : params) {
    auto it = committed.find(decl.name);
    if (it != committed.end()) {
      out.valuation[decl.name] = decl.values[it->second];
    } else if (!decl.values.empty()) {
      out.valuation[decl.name] = decl.values.front();
      out.defaulted.push_back(decl.name);
    }
  }
  return out;
}

bool results_agree(const SynthesisResult& a, const SynthesisResult& b, double tolerance)
{
  if (a.feasible != b.feasible) return false;
  if (!a.feasible) return true;
  return std::fabs(a.expected_cost - b.expected_cost) <= tolerance &&
         std::fabs(a.reach_probability - b.reach_probability) <= tolerance && a.valuation == b.valuation;
}

}  // namespace mimsynth::synth
