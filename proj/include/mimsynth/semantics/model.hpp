#pragma once

#include "mimsynth/gcl/ast.hpp"
#include "mimsynth/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace mimsynth {

using ParameterValuation = std::map<std::string, Rational>;
using VariableValuation = std::map<std::string, std::int64_t>;

/// Concrete value or residual expression over parameters.
using Entry = std::variant<Rational, gcl::Expr>;

bool is_concrete(const Entry& e);
std::string entry_text(const Entry& e);

enum class ModelKind { MC, MDP, MIMDP };

const char* kind_name(ModelKind kind);

struct Transition {
  Entry probability;
  std::size_t target = 0;
};

struct Choice {
  std::string action;  // empty for the internal action
  std::vector<Transition> transitions;
  // Symbolic probabilities of branches merged into a shared target; each must lie in [0,1].
  std::vector<gcl::Expr> merged_branches;
};

struct ExplicitModel {
  ModelKind kind = ModelKind::MC;
  std::vector<std::string> variable_names;
  std::vector<std::vector<std::int64_t>> states;  // indexed by BFS discovery order
  std::size_t initial = 0;
  std::vector<std::vector<Choice>> choices;
  std::vector<Entry> state_cost;
  std::vector<gcl::ParameterDecl> parameters;
  std::map<std::string, std::vector<bool>> labels;

  std::size_t num_states() const { return states.size(); }
  std::size_t num_choices() const;
  /// Distinct (state, action choice, successor) triples.
  std::size_t num_transitions() const;
  /// Throws std::out_of_range naming the label when absent.
  const std::vector<bool>& label(const std::string& name) const;
  VariableValuation valuation(std::size_t state) const;
  std::string state_text(std::size_t state) const;
};

/// Memoryless, possibly randomized; dist[s][i] is the weight of choice i in state s.
struct Strategy {
  std::vector<std::vector<double>> dist;

  static Strategy deterministic(const ExplicitModel& m, const std::vector<std::size_t>& picks);
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Probability of the choice's transitions as doubles; throws for residual entries.
double entry_value(const Entry& e);

/// Mixes each state's choices according to sigma into one distribution.
ExplicitModel induced_mc(const ExplicitModel& m, const Strategy& sigma);

std::string to_dot(const ExplicitModel& m);

}  // namespace mimsynth
