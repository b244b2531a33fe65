#include "mimsynth/mc/sparse.hpp"

namespace mimsynth::mc {

SparseMdp SparseMdp::from_model(const ExplicitModel& m)
{
  if (m.kind == ModelKind::MIMDP) throw ModelError("model checking requires an instantiated model");
  SparseMdp out;
  out.initial = m.initial;
  std::vector<std::pair<std::size_t, double>> row;
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    for (const auto& c : m.choices[s]) {
      row.clear();
      for (const auto& t : c.transitions) row.emplace_back(t.target, entry_value(t.probability));
      out.add_choice(c.action, row);
    }
    out.end_state(entry_value(m.state_cost[s]));
  }
  return out;
}

void SparseMdp::add_choice(const std::string& label, const std::vector<std::pair<std::size_t, double>>& row)
{
  for (const auto& [t, p] : row) {
    target.push_back(t);
    prob.push_back(p);
  }
  entry_start.push_back(target.size());
  action.push_back(label);
}

void SparseMdp::end_state(double state_cost)
{
  row_start.push_back(action.size());
  cost.push_back(state_cost);
}

}  // namespace mimsynth::mc
