#pragma once

#include "mimsynth/gcl/ast.hpp"
#include "mimsynth/gcl/parser.hpp"

#include <vector>

namespace mimsynth::gcl {

/// Well-formedness diagnostics; empty iff the program is well formed.
std::vector<Diagnostic> check_program(const Program& p);

}  // namespace mimsynth::gcl
