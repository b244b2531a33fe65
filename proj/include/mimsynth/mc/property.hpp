#pragma once

#include "mimsynth/mc/analysis.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace mimsynth::mc {

struct Property {
  enum class Kind { Reach, ExpectedCost, CostBounded };

  Kind kind = Kind::Reach;
  std::optional<Direction> direction;  // absent for "P=?" and "EC=?" and for bounds
  std::optional<double> bound;         // "P<=b"
  std::string label;
  std::int64_t cost_bound = 0;  // n in F{C<n}
};

/// Accepts `P<=0.3 [F "t"]`, `Pmin=? [F "t"]`, `Pmax=? [F "t"]`, `P=? [F "t"]`,
/// `ECmin=? [F "g"]`, `ECmax=? [F "g"]`, `EC=? [F "g"]` and `P=? [F{C<10} "t"]`.
/// Throws std::invalid_argument.
Property parse_property(const std::string& text);

struct CheckResult {
  double value = 0.0;
  std::optional<bool> satisfied;  // only for bounded properties
};

/// Evaluates at the initial state. A probability bound on an MDP is checked
/// against the maximum, or against the minimum when `existential` is set.
CheckResult check_spec(const ExplicitModel& m, const Property& phi, bool existential = false);

}  // namespace mimsynth::mc
