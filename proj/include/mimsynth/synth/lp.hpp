#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace mimsynth::synth {

enum class Sense { Le, Eq, Ge };

struct LinearConstraint {
  std::vector<std::pair<std::size_t, double>> terms;
  Sense sense = Sense::Eq;
  double rhs = 0.0;
};

/// min c.x subject to the constraints and lower <= x <= upper. Lower bounds must be finite.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<LinearConstraint> constraints;

  std::size_t num_variables() const { return objective.size(); }
  std::size_t add_variable(double cost, double lo = 0.0, double hi = std::numeric_limits<double>::infinity());
  void add_constraint(std::vector<std::pair<std::size_t, double>> terms, Sense sense, double rhs);
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  std::size_t pivots = 0;
};

/// Dense two-phase primal simplex with Bland's rule.
LpSolution solve(const LinearProgram& lp);

}  // namespace mimsynth::synth
