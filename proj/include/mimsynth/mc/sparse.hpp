#pragma once

#include "mimsynth/semantics/model.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace mimsynth::mc {

/// Concrete MDP in compressed row-group form: state s owns choices
/// [row_start[s], row_start[s+1]); choice c owns entries [entry_start[c], entry_start[c+1]).
struct SparseMdp {
  std::size_t initial = 0;
  std::vector<std::size_t> row_start{0};
  std::vector<std::size_t> entry_start{0};
  std::vector<std::size_t> target;
  std::vector<double> prob;
  std::vector<double> cost;
  std::vector<std::string> action;  // per choice

  std::size_t num_states() const { return row_start.size() - 1; }
  std::size_t num_choices() const { return entry_start.size() - 1; }

  /// Requires a concrete model; throws ModelError otherwise.
  static SparseMdp from_model(const ExplicitModel& m);

  /// Appends a choice to the state currently being built.
  void add_choice(const std::string& label, const std::vector<std::pair<std::size_t, double>>& row);
  /// Closes the current state with the given cost.
  void end_state(double state_cost);
};

}  // namespace mimsynth::mc
