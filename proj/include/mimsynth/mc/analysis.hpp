#pragma once

#include "mimsynth/mc/sparse.hpp"

#include <cstdint>
#include <vector>

namespace mimsynth::mc {

enum class Direction { Min, Max };

struct ViOptions {
  double epsilon = 1e-10;  // relative residual
  std::size_t max_iterations = 50'000'000;
};

struct ValueVector {
  std::vector<double> values;
  std::size_t iterations = 0;
  double residual = 0.0;
};

struct Solution {
  ValueVector value;
  std::vector<std::size_t> choice;  // local choice index per state

  double at(std::size_t s) const { return value.values[s]; }
};

using StateSet = std::vector<bool>;

/// States with zero probability of reaching T: under every strategy (dir Max)
/// or under some strategy (dir Min).
StateSet prob0(const SparseMdp& m, const StateSet& T, Direction dir);

/// States reaching T almost surely: under some strategy (dir Max) or every strategy (dir Min).
StateSet prob1(const SparseMdp& m, const StateSet& T, Direction dir);

/// Optimal reachability probabilities; ties in the extracted strategy go to the lowest choice.
Solution reach_prob(const SparseMdp& m, const StateSet& T, Direction dir, const ViOptions& options = {});

/// Minimal or maximal expected cost accrued in non-goal states until G.
/// Values are +inf where G is not reached almost surely under every strategy;
/// throws ModelError when that happens at the initial state.
Solution expected_cost(const SparseMdp& m, const StateSet& G, Direction dir, const ViOptions& options = {});

/// Probability of entering T with accumulated cost strictly below n. Costs must be
/// nonnegative integers; a T state's own cost is not accrued.
double cost_bounded_reach(const SparseMdp& m, const StateSet& T, std::int64_t n, Direction dir,
                          const ViOptions& options = {});

/// Same operations on a concrete ExplicitModel.
Solution reach_prob(const ExplicitModel& m, const StateSet& T, Direction dir, const ViOptions& options = {});
Solution expected_cost(const ExplicitModel& m, const StateSet& G, Direction dir, const ViOptions& options = {});
double cost_bounded_reach(const ExplicitModel& m, const StateSet& T, std::int64_t n, Direction dir,
                          const ViOptions& options = {});

}  // namespace mimsynth::mc
