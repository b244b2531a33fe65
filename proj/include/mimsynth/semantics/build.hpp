#pragma once

#include "mimsynth/gcl/ast.hpp"
#include "mimsynth/gcl/eval.hpp"
#include "mimsynth/semantics/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mimsynth {

class WellDefinednessError : public ModelError {
 public:
  using ModelError::ModelError;
};

struct BuildOptions {
  std::size_t state_cap = 10'000'000;
};

/// Exact value of e; constants of the program are bound when given.
Rational eval_expr(const gcl::Expr& e, const VariableValuation& vars, const ParameterValuation& params,
                   const gcl::Program* program = nullptr);

/// { u(e) } over the joint values of the parameters occurring in e, ascending.
std::vector<Rational> expr_value_set(const gcl::Expr& e, const gcl::Program& program);

/// Replaces bound identifiers by their values and folds closed subterms.
gcl::Expr residualize(const gcl::Expr& e, const gcl::Lookup& lookup);

/// Parameters occurring in e, in program declaration order.
std::vector<std::string> parameters_of(const gcl::Expr& e, const gcl::Program& program);

/// Cartesian product in declaration order, then value index.
std::vector<ParameterValuation> all_valuations(const std::vector<gcl::ParameterDecl>& params);

/// Restricts the product to the named parameters (kept in declaration order).
std::vector<ParameterValuation> joint_rows(const std::vector<gcl::ParameterDecl>& params,
                                           const std::vector<std::string>& names);

std::string valuation_text(const ParameterValuation& u);

/// Breadth-first exploration of the composed program. Without params the result
/// is a MIMDP when any entry stays symbolic.
ExplicitModel build_model(const gcl::Program& p, const std::optional<ParameterValuation>& params = std::nullopt,
                          const BuildOptions& options = {});

/// Throws WellDefinednessError naming the first offending state and action.
ExplicitModel instantiate(const ExplicitModel& m, const ParameterValuation& u);

std::vector<ParameterValuation> well_defined_valuations(const ExplicitModel& m);

}  // namespace mimsynth
