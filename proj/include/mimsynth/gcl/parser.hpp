#pragma once

#include "mimsynth/gcl/ast.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mimsynth::gcl {

struct Diagnostic {
  int line = 0;
  int column = 0;
  std::string message;
};

std::string format_diagnostics(const std::vector<Diagnostic>& diagnostics);

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

/// Parses `.mgcl` source. Syntax errors stop at the first offending token;
/// name resolution reports every unknown or duplicate name.
Program parse_program(std::string_view source);

/// Parses a standalone expression without name resolution.
Expr parse_expression(std::string_view source);

}  // namespace mimsynth::gcl
