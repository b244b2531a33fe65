#pragma once

#include "mimsynth/gcl/ast.hpp"

#include <functional>
#include <stdexcept>
#include <string>

namespace mimsynth::gcl {

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Returns nullptr for names the caller cannot bind.
using Lookup = std::function<const Rational*(const std::string&)>;

/// Exact evaluation. Booleans are 0/1; &, |, => and ?: short-circuit.
/// Throws EvalError on division by zero or an unbound identifier.
Rational evaluate(const Expr& e, const Lookup& lookup);

bool evaluate_bool(const Expr& e, const Lookup& lookup);

}  // namespace mimsynth::gcl
