#pragma once

#include "mimsynth/gcl/ast.hpp"

#include <string>
#include <vector>

namespace mimsynth {

/// Parallel composition into a single module. Commands on a shared action are
/// multiplied; an action declared by one side without commands blocks it and the
/// other side's commands are dropped with a warning.
gcl::Program compose(const gcl::Program& p, std::vector<std::string>* warnings = nullptr);

}  // namespace mimsynth
