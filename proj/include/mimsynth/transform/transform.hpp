#pragma once

#include "mimsynth/gcl/ast.hpp"
#include "mimsynth/semantics/model.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mimsynth {

class TransformError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FreshVariable {
  std::string name;
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

/// A value-selection action and the parameter values taking it commits to.
struct FreshAction {
  std::string name;
  ParameterValuation commits;
};

struct TransformReport {
  std::vector<FreshVariable> fresh_variables;
  std::vector<FreshAction> fresh_actions;
  /// Original command index (in the composed module) to produced command indices.
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> command_mapping;
  /// Control variable per (parameter, value index); filled by add_control.
  std::vector<std::pair<std::pair<std::string, std::size_t>, std::string>> control_variables;

  const FreshAction* find_action(const std::string& name) const;
  void merge(const TransformReport& other);
};

/// Replaces every parametric reward by a nondeterministic choice among its joint
/// parameter rows, one fresh selector variable per reward.
std::pair<gcl::Program, TransformReport> transform_rewards(const gcl::Program& p);

/// Replaces every command with parametric probabilities by one command per
/// locally well-defined joint row, each under a fresh action.
std::pair<gcl::Program, TransformReport> transform_probabilities(const gcl::Program& p);

/// Adds the control module that forbids committing one parameter to two values.
gcl::Program add_control(const gcl::Program& p, TransformReport& report);

/// compose, then rewards, probabilities and control; the merged report.
std::pair<gcl::Program, TransformReport> transform_all(const gcl::Program& p);

}  // namespace mimsynth
