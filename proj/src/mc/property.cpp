#include "mimsynth/mc/property.hpp"

#include <regex>
#include <stdexcept>

namespace mimsynth::mc {

Property parse_property(const std::string& text)
{
  static const std::regex pattern(
      R"re(^\s*(P|Pmin|Pmax|EC|ECmin|ECmax)\s*(=\s*\?|<=\s*([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?))\s*)re"
      R"re(\[\s*F\s*(\{\s*C\s*<\s*([0-9]+)\s*\})?\s*"([^"]+)"\s*\]\s*$)re");
  std::smatch match;
  if (!std::regex_match(text, match, pattern)) {
    throw std::invalid_argument("cannot parse property '" + text + "'");
  }
  Property phi;
  const std::string op = match[1];
  const bool bounded = match[3].matched;
  phi.label = match[6];
  if (op.rfind("EC", 0) == 0) {
    if (bounded || match[4].matched) throw std::invalid_argument("expected-cost properties take the form ECmin=? [F \"g\"]");
    phi.kind = Property::Kind::ExpectedCost;
  } else {
    phi.kind = match[4].matched ? Property::Kind::CostBounded : Property::Kind::Reach;
  }
  if (op.size() > 2 && op.compare(op.size() - 3, 3, "min") == 0) phi.direction = Direction::Min;
  if (op.size() > 2 && op.compare(op.size() - 3, 3, "max") == 0) phi.direction = Direction::Max;
  if (bounded) {
    if (phi.direction) throw std::invalid_argument("a bound cannot be combined with min/max");
    phi.bound = std::stod(match[3]);
    if (*phi.bound < 0 || *phi.bound > 1) throw std::invalid_argument("probability bound outside [0,1]");
  }
  if (match[4].matched) phi.cost_bound = std::stoll(match[5]);
  return phi;
}

CheckResult check_spec(const ExplicitModel& m, const Property& phi, bool existential)
{
  const StateSet& set = m.label(phi.label);
  const SparseMdp sparse = SparseMdp::from_model(m);
  const bool mdp = m.kind == ModelKind::MDP;

  Direction dir = Direction::Max;
  if (phi.direction) {
    dir = *phi.direction;
  } else if (phi.bound) {
    dir = existential ? Direction::Min : Direction::Max;
  } else if (mdp) {
    throw ModelError("the model is an MDP; use a min or max property");
  }

  CheckResult result;
  switch (phi.kind) {
    case Property::Kind::Reach: result.value = reach_prob(sparse, set, dir).at(sparse.initial); break;
    case Property::Kind::ExpectedCost: result.value = expected_cost(sparse, set, dir).at(sparse.initial); break;
    case Property::Kind::CostBounded: result.value = cost_bounded_reach(sparse, set, phi.cost_bound, dir); break;
  }
  if (phi.bound) result.satisfied = result.value <= *phi.bound + 1e-9;
  return result;
}

}  // namespace mimsynth::mc
