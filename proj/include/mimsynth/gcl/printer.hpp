#pragma once

#include "mimsynth/gcl/ast.hpp"

#include <string>

namespace mimsynth::gcl {

std::string print_expr(const Expr& e);

/// Canonical source text; parse_program(pretty_print(p)) == p.
std::string pretty_print(const Program& p);

}  // namespace mimsynth::gcl
