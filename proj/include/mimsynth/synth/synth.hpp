#pragma once

#include "mimsynth/gcl/ast.hpp"
#include "mimsynth/mc/analysis.hpp"
#include "mimsynth/semantics/model.hpp"
#include "mimsynth/transform/transform.hpp"

#include <memory>
#include <string>
#include <vector>

namespace mimsynth::synth {

class ImproperModelError : public ModelError {
 public:
  using ModelError::ModelError;
};

enum class Method { Enumerate, Transformed, Both };

struct SynthesisQuery {
  std::string target;  // label T
  double lambda = 1.0;
  std::string goal;  // label G
  Method method = Method::Both;
  std::size_t workers = 1;  // enumeration only
};

struct ValuationOutcome {
  ParameterValuation valuation;
  bool well_defined = false;
  bool feasible = false;
  double expected_cost = 0.0;
  double reach_probability = 0.0;
  std::string note;  // "ill-defined", "improper", "infeasible", "pruned" or empty
};

struct SynthesisResult {
  bool feasible = false;
  ParameterValuation valuation;
  Strategy strategy;
  /// The model the strategy refers to: M[u] for enumeration, the controlled model otherwise.
  std::shared_ptr<const ExplicitModel> model;
  double expected_cost = 0.0;
  double reach_probability = 0.0;
  std::vector<ValuationOutcome> table;
  /// Parameters the strategy support never commits; reported with the searched value.
  std::vector<std::string> uncommitted;
  std::size_t search_nodes = 0;
};

struct ConstrainedResult {
  bool feasible = false;
  double expected_cost = 0.0;
  double reach_probability = 0.0;
  Strategy strategy;  // over the choices of the input model
};

/// Copy of m where every state of A has a single self-loop and cost 0.
mc::SparseMdp absorb(const mc::SparseMdp& m, const mc::StateSet& A);

/// Minimal expected cost until T or G subject to Pr(reach T) <= lambda, over randomized
/// memoryless strategies, via the occupation-measure LP. T and G are made absorbing first.
/// Throws ImproperModelError unless every strategy reaches T or G almost surely.
ConstrainedResult constrained_mdp_lp(const mc::SparseMdp& m, const mc::StateSet& T, const mc::StateSet& G,
                                     double lambda);

/// Pr and EC of the Markov chain m with T and G absorbing; throws ImproperModelError.
ConstrainedResult evaluate_chain(const mc::SparseMdp& m, const mc::StateSet& T, const mc::StateSet& G, double lambda);

/// Solves every well-defined valuation separately; the feasible one with least expected
/// cost wins, earlier valuations winning ties.
SynthesisResult synthesize_enumerate(const gcl::Program& p, const SynthesisQuery& q);

/// Searches the controlled model, restricting it to the actions consistent with a
/// growing partial valuation and pruning with value-iteration bounds.
SynthesisResult synthesize_transformed(const gcl::Program& p, const SynthesisQuery& q);

struct RecoveredValuation {
  ParameterValuation valuation;
  std::vector<std::string> defaulted;  // completed with the first declared value
};

/// Reads the control booleans on the states reachable under sigma.
RecoveredValuation recover_valuation(const ExplicitModel& controlled, const TransformReport& report,
                                     const std::vector<gcl::ParameterDecl>& params, const Strategy& sigma);

/// True when the two results agree on feasibility and, if feasible, on EC, Pr and valuation.
bool results_agree(const SynthesisResult& a, const SynthesisResult& b, double tolerance = 1e-6);

}  // namespace mimsynth::synth
