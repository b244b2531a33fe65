#include "mimsynth/gcl/parser.hpp"
#include "mimsynth/mc/analysis.hpp"
#include "mimsynth/mc/property.hpp"
#include "mimsynth/semantics/build.hpp"

#include "support/models.hpp"
#include "support/oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace gcl = mimsynth::gcl;
namespace mc = mimsynth::mc;
using mimsynth::ParameterValuation;
using mimsynth::Rational;

namespace {

Rational dec(const char* s) { return mimsynth::parse_decimal(s); }

mimsynth::ExplicitModel fig2_instance(const char* p, const char* q, const char* r, const char* s)
{
  auto prog = gcl::parse_program(mimsynth::test::read_model("fig2.mgcl"));
  return mimsynth::build_model(prog, ParameterValuation{{"p", dec(p)}, {"q", dec(q)}, {"r", dec(r)}, {"s", dec(s)}});
}

mc::SparseMdp to_sparse(const mimsynth::test::DenseChain& c)
{
  mc::SparseMdp m;
  for (std::size_t s = 0; s < c.n; ++s) {
    std::vector<std::pair<std::size_t, double>> row;
    for (std::size_t t = 0; t < c.n; ++t) {
      if (c.P[s][t] > 0) row.emplace_back(t, c.P[s][t]);
    }
    m.add_choice("", row);
    m.end_state(c.cost[s]);
  }
  return m;
}

mc::SparseMdp chain(const std::vector<std::vector<std::vector<std::pair<std::size_t, double>>>>& rows,
                    const std::vector<double>& costs)
{
  mc::SparseMdp m;
  for (std::size_t s = 0; s < rows.size(); ++s) {
    for (const auto& r : rows[s]) m.add_choice("", r);
    m.end_state(costs[s]);
  }
  return m;
}

}  // namespace

TEST(Reach, InitialInTarget)
{
  auto m = chain({{{{1, 1.0}}}, {{{1, 1.0}}}}, {0, 0});
  EXPECT_EQ(mc::reach_prob(m, {true, false}, mc::Direction::Max).at(0), 1.0);
}

TEST(Reach, Fig2Instance)
{
  auto m = fig2_instance("0.6", "0.3", "0.4", "0.7");
  EXPECT_NEAR(mc::reach_prob(m, m.label("s2"), mc::Direction::Max).at(m.initial), 0.42, 1e-12);
}

TEST(Reach, FairDieIsUniform)
{
  auto prog = gcl::parse_program(mimsynth::test::read_model("die.mgcl"));
  auto m = mimsynth::build_model(prog, ParameterValuation{{"p", dec("0.5")}});
  for (const char* face : {"one", "two", "three", "four", "five", "six"}) {
    EXPECT_NEAR(mc::reach_prob(m, m.label(face), mc::Direction::Max).at(m.initial), 1.0 / 6.0, 1e-8) << face;
  }
}

TEST(Reach, BiasedDieClosedForm)
{
  auto prog = gcl::parse_program(mimsynth::test::read_model("die.mgcl"));
  for (const char* text : {"0.4", "0.6"}) {
    const double p = std::stod(text);
    auto m = mimsynth::build_model(prog, ParameterValuation{{"p", dec(text)}});
    const double expected = p * p * (1 - p) / (1 - p * p);
    EXPECT_NEAR(mc::reach_prob(m, m.label("one"), mc::Direction::Max).at(m.initial), expected, 1e-9);
  }
}

TEST(Reach, QualitativeSetsExact)
{
  // 0 -> {1: 0.5, 2: 0.5}; 1 absorbing target; 2 absorbing non-target; 3 -> 1 surely.
  auto m = chain({{{{1, 0.5}, {2, 0.5}}}, {{{1, 1.0}}}, {{{2, 1.0}}}, {{{1, 1.0}}}}, {0, 0, 0, 0});
  auto sol = mc::reach_prob(m, {false, true, false, false}, mc::Direction::Max);
  EXPECT_EQ(sol.at(2), 0.0);
  EXPECT_EQ(sol.at(3), 1.0);
  EXPECT_DOUBLE_EQ(sol.at(0), 0.5);
}

TEST(Reach, MdpMinMaxAndStrategy)
{
  // State 0: choice a loops on itself, choice b goes to T with 0.3 and to sink with 0.7,
  // choice c goes to T surely.
  auto m = chain({{{{0, 1.0}}, {{1, 0.3}, {2, 0.7}}, {{1, 1.0}}}, {{{1, 1.0}}}, {{{2, 1.0}}}}, {0, 0, 0});
  const mc::StateSet T{false, true, false};
  auto hi = mc::reach_prob(m, T, mc::Direction::Max);
  EXPECT_EQ(hi.at(0), 1.0);
  EXPECT_EQ(hi.choice[0], 2u);
  auto lo = mc::reach_prob(m, T, mc::Direction::Min);
  EXPECT_EQ(lo.at(0), 0.0);
  EXPECT_EQ(lo.choice[0], 0u);
}

TEST(Reach, MaxStrategyLeavesEndComponent)
{
  // 0 <-> 1 forms an end component; only 1 can exit to T. Staying is also "optimal" by value.
  auto m = chain({{{{1, 1.0}}}, {{{0, 1.0}}, {{2, 1.0}}}, {{{2, 1.0}}}}, {0, 0, 0});
  auto sol = mc::reach_prob(m, {false, false, true}, mc::Direction::Max);
  EXPECT_EQ(sol.at(0), 1.0);
  EXPECT_EQ(sol.choice[1], 1u);
}

TEST(ExpectedCost, Fig2Instance)
{
  auto m = fig2_instance("0.4", "0.3", "0.6", "0.7");
  EXPECT_NEAR(mc::expected_cost(m, m.label("absorb"), mc::Direction::Min).at(m.initial), 1.02, 1e-12);
}

TEST(ExpectedCost, ZeroCostsGiveZero)
{
  auto m = chain({{{{0, 0.5}, {1, 0.5}}}, {{{1, 1.0}}}}, {0, 0});
  auto sol = mc::expected_cost(m, {false, true}, mc::Direction::Min);
  EXPECT_EQ(sol.at(0), 0.0);
}

TEST(ExpectedCost, GoalUnreachableIsAnError)
{
  auto m = chain({{{{0, 1.0}}}, {{{1, 1.0}}}}, {1, 0});
  EXPECT_THROW(mc::expected_cost(m, {false, true}, mc::Direction::Min), mimsynth::ModelError);
}

TEST(ExpectedCost, ImproperUnderSomeStrategyIsAnError)
{
  // Choice 0 loops forever, so the goal is not reached almost surely under every strategy.
  auto m = chain({{{{0, 1.0}}, {{1, 1.0}}}, {{{1, 1.0}}}}, {1, 0});
  EXPECT_THROW(mc::expected_cost(m, {false, true}, mc::Direction::Min), mimsynth::ModelError);
}

TEST(ExpectedCost, ScalingByConstant)
{
  std::mt19937_64 rng(7);
  for (int round = 0; round < 20; ++round) {
    // Two-choice MDP layered on a random chain: choice 1 jumps to the goal at fixed cost.
    auto c = mimsynth::test::random_chain(rng, 15);
    mc::StateSet G(c.n, false);
    G[c.n - 1] = true;
    auto build = [&](double k) {
      mc::SparseMdp m;
      for (std::size_t s = 0; s < c.n; ++s) {
        std::vector<std::pair<std::size_t, double>> row;
        for (std::size_t t = 0; t < c.n; ++t) {
          if (c.P[s][t] > 0) row.emplace_back(t, c.P[s][t]);
        }
        m.add_choice("a", {{c.n - 1, 1.0}});
        m.add_choice("b", row);
        m.end_state(k * c.cost[s]);
      }
      return m;
    };
    mc::SparseMdp base = build(1.0);
    mc::StateSet proper = mc::prob1(base, G, mc::Direction::Min);
    if (!proper[0]) continue;
    auto a = mc::expected_cost(base, G, mc::Direction::Min);
    auto b = mc::expected_cost(build(7.0), G, mc::Direction::Min);
    for (std::size_t s = 0; s < c.n; ++s) {
      if (std::isinf(a.at(s))) continue;
      EXPECT_NEAR(b.at(s), 7.0 * a.at(s), 1e-9 * (1 + b.at(s)));
    }
    EXPECT_EQ(a.choice, b.choice);
  }
}

TEST(Oracle, RandomChainsMatchGaussianElimination)
{
  std::mt19937_64 rng(2024);
  for (int round = 0; round < 50; ++round) {
    auto c = mimsynth::test::random_chain(rng, 50);
    mc::StateSet T(c.n, false);
    std::bernoulli_distribution in_target(0.2);
    for (std::size_t s = 0; s < c.n; ++s) T[s] = in_target(rng);
    const auto m = to_sparse(c);
    const auto want = mimsynth::test::oracle_reach(c, T);
    const auto got = mc::reach_prob(m, T, mc::Direction::Max);
    for (std::size_t s = 0; s < c.n; ++s) EXPECT_NEAR(got.at(s), want[s], 1e-7) << "round " << round;

    const auto cost_want = mimsynth::test::oracle_cost(c, T);
    for (std::size_t init = 0; init < c.n; ++init) {
      if (std::isinf(cost_want[init])) continue;
      auto rooted = m;
      rooted.initial = init;
      const auto cost_got = mc::expected_cost(rooted, T, mc::Direction::Min);
      EXPECT_NEAR(cost_got.at(init), cost_want[init], 1e-7 * (1 + cost_want[init])) << "round " << round;
      break;
    }
  }
}

TEST(CostBounded, StrictBoundOnChain)
{
  auto m = chain({{{{1, 1.0}}}, {{{2, 1.0}}}, {{{3, 1.0}}}, {{{3, 1.0}}}}, {1, 1, 1, 1});
  const mc::StateSet T{false, false, false, true};
  EXPECT_EQ(mc::cost_bounded_reach(m, T, 3, mc::Direction::Max), 0.0);
  EXPECT_EQ(mc::cost_bounded_reach(m, T, 4, mc::Direction::Max), 1.0);
}

TEST(CostBounded, EmptyBudget)
{
  auto m = chain({{{{0, 1.0}}}}, {0});
  EXPECT_EQ(mc::cost_bounded_reach(m, {true}, 0, mc::Direction::Max), 0.0);
  EXPECT_EQ(mc::cost_bounded_reach(m, {true}, 1, mc::Direction::Max), 1.0);
}

TEST(CostBounded, TwoBranches)
{
  // 0 -> cheap (cost 1) or expensive (cost 5), both then reach T.
  auto m = chain({{{{1, 0.5}, {2, 0.5}}}, {{{3, 1.0}}}, {{{3, 1.0}}}, {{{3, 1.0}}}}, {0, 1, 5, 0});
  EXPECT_DOUBLE_EQ(mc::cost_bounded_reach(m, {false, false, false, true}, 3, mc::Direction::Max), 0.5);
}

TEST(CostBounded, NonIntegerCostRejected)
{
  auto m = chain({{{{0, 1.0}}}}, {0.5});
  EXPECT_THROW(mc::cost_bounded_reach(m, {false}, 2, mc::Direction::Max), mimsynth::ModelError);
}

TEST(CostBounded, MonotoneAndConvergesToReach)
{
  std::mt19937_64 rng(99);
  for (int round = 0; round < 10; ++round) {
    auto c = mimsynth::test::random_chain(rng, 12);
    mc::StateSet T(c.n, false);
    T[0] = true;
    for (std::size_t s = 0; s < c.n; ++s) c.cost[s] = std::max(1.0, c.cost[s]);
    auto m = to_sparse(c);
    m.initial = c.n - 1;
    double previous = 0.0;
    for (std::int64_t n = 0; n <= 400; n += 20) {
      const double v = mc::cost_bounded_reach(m, T, n, mc::Direction::Max);
      EXPECT_GE(v, previous - 1e-12);
      previous = v;
    }
    EXPECT_NEAR(previous, mc::reach_prob(m, T, mc::Direction::Max).at(m.initial), 1e-6);
  }
}

TEST(Property, ParsesForms)
{
  auto a = mc::parse_property("P<=0.3 [F \"target\"]");
  EXPECT_EQ(a.kind, mc::Property::Kind::Reach);
  EXPECT_DOUBLE_EQ(*a.bound, 0.3);
  EXPECT_EQ(a.label, "target");
  auto b = mc::parse_property("Pmin=? [F \"t\"]");
  EXPECT_EQ(*b.direction, mc::Direction::Min);
  auto c = mc::parse_property("ECmin=? [F \"goal\"]");
  EXPECT_EQ(c.kind, mc::Property::Kind::ExpectedCost);
  auto d = mc::parse_property("P=? [F{C<10} \"target\"]");
  EXPECT_EQ(d.kind, mc::Property::Kind::CostBounded);
  EXPECT_EQ(d.cost_bound, 10);
  EXPECT_FALSE(d.direction.has_value());
  EXPECT_THROW(mc::parse_property("P<=1.5 [F \"t\"]"), std::invalid_argument);
  EXPECT_THROW(mc::parse_property("Q=? [F \"t\"]"), std::invalid_argument);
}

TEST(Property, CheckSpecVerdicts)
{
  auto m = fig2_instance("0.6", "0.3", "0.4", "0.7");
  auto r = mc::check_spec(m, mc::parse_property("P<=0.3 [F \"s2\"]"));
  EXPECT_FALSE(*r.satisfied);
  EXPECT_NEAR(r.value, 0.42, 1e-12);
  EXPECT_TRUE(*mc::check_spec(m, mc::parse_property("P<=1 [F \"s3\"]")).satisfied);
  auto zero = gcl::parse_program("module m x : [0..1]; [] x=0 -> (x'=1); endmodule\nlabel \"g\" = x=1;");
  EXPECT_EQ(mc::check_spec(mimsynth::build_model(zero), mc::parse_property("EC=? [F \"g\"]")).value, 0.0);
}

TEST(Property, PlainQueryOnMdpRejected)
{
  auto p = gcl::parse_program("module m x : [0..1]; [a] x=0 -> (x'=1); [b] x=0 -> true; endmodule\nlabel \"g\" = x=1;");
  auto m = mimsynth::build_model(p);
  EXPECT_THROW(mc::check_spec(m, mc::parse_property("P=? [F \"g\"]")), mimsynth::ModelError);
  EXPECT_EQ(mc::check_spec(m, mc::parse_property("Pmax=? [F \"g\"]")).value, 1.0);
  auto bound = mc::parse_property("P<=0.5 [F \"g\"]");
  EXPECT_FALSE(*mc::check_spec(m, bound).satisfied);
  EXPECT_TRUE(*mc::check_spec(m, bound, true).satisfied);
}
