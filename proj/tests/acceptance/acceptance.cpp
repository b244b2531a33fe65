// One line per acceptance criterion; exit status 1 when any fails.

#include "mimsynth/casestudy/formulas.hpp"
#include "mimsynth/casestudy/shipyard.hpp"
#include "mimsynth/gcl/parser.hpp"
#include "mimsynth/mc/analysis.hpp"
#include "mimsynth/semantics/build.hpp"
#include "mimsynth/semantics/compose.hpp"
#include "mimsynth/synth/nilp.hpp"
#include "mimsynth/synth/synth.hpp"
#include "mimsynth/transform/transform.hpp"

#include "support/models.hpp"
#include "support/oracle.hpp"
#include "support/random_mimdp.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <string>

namespace gcl = mimsynth::gcl;
namespace mc = mimsynth::mc;
namespace synth = mimsynth::synth;
namespace cs = mimsynth::casestudy;
using mimsynth::ParameterValuation;
using mimsynth::Rational;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what)
  {
    if (ok) return;
    if (pass) detail.clear();
    if (!detail.empty()) detail += "; ";
    detail += what;
    pass = false;
  }
};

std::string fmt(double x)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

gcl::Program load(const char* file) { return gcl::parse_program(mimsynth::test::read_model(file)); }

gcl::Program scaled(gcl::Program p, long factor)
{
  for (auto& item : p.rewards) item.cost = gcl::binary(gcl::Op::Mul, gcl::num(factor), item.cost);
  return p;
}

synth::SynthesisQuery fig2_query(double lambda)
{
  synth::SynthesisQuery q;
  q.target = "s2";
  q.goal = "absorb";
  q.lambda = lambda;
  return q;
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

mc::SparseMdp chain(const std::vector<std::vector<std::pair<std::size_t, double>>>& rows,
                    const std::vector<double>& costs)
{
  mc::SparseMdp m;
  for (std::size_t s = 0; s < rows.size(); ++s) {
    m.add_choice("", rows[s]);
    m.end_state(costs[s]);
  }
  return m;
}

double value_of(const ParameterValuation& u, const std::string& name) { return u.at(name).get_d(); }

// Hand enumeration of the 16 raw fig2 combinations in tenths.
struct Fig2Oracle {
  bool feasible = false;
  int p = 0, q = 0, r = 0, s = 0;
  double ec = 0.0;
  double pr = 0.0;
};

Fig2Oracle fig2_oracle(double lambda)
{
  Fig2Oracle best;
  for (int p : {4, 6}) {
    for (int q : {3, 7}) {
      for (int r : {6, 4}) {
        for (int s : {7, 3}) {
          if (p + r != 10 || q + s != 10) continue;
          const double pr = p * s / 100.0;
          const double ec = (p + q) / 10.0 + (p / 10.0) * (2.0 * p / 10.0);
          if (pr > lambda + 1e-12) continue;
          if (best.feasible && ec >= best.ec - 1e-12) continue;
          best = {true, p, q, r, s, ec, pr};
        }
      }
    }
  }
  return best;
}

bool matches_oracle(const ParameterValuation& u, const Fig2Oracle& o)
{
  return std::fabs(value_of(u, "p") - o.p / 10.0) < 1e-12 && std::fabs(value_of(u, "q") - o.q / 10.0) < 1e-12 &&
         std::fabs(value_of(u, "r") - o.r / 10.0) < 1e-12 && std::fabs(value_of(u, "s") - o.s / 10.0) < 1e-12;
}

Verdict criterion1()
{
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  const auto program = load("fig2.mgcl");
  for (double lambda : {0.2, 1.0, 0.1}) {
    const auto oracle = fig2_oracle(lambda);
    const auto enumerated = synth::synthesize_enumerate(program, fig2_query(lambda));
    const auto transformed = synth::synthesize_transformed(program, fig2_query(lambda));
    for (const auto* r : {&enumerated, &transformed}) {
      const std::string who = std::string(r == &enumerated ? "enum" : "transformed") + " lambda=" + fmt(lambda);
      v.require(r->feasible == oracle.feasible, who + " feasibility differs from oracle");
      if (!r->feasible || !oracle.feasible) continue;
      v.require(matches_oracle(r->valuation, oracle), who + " valuation " + mimsynth::valuation_text(r->valuation));
      v.require(std::fabs(r->expected_cost - oracle.ec) <= 1e-6, who + " EC " + fmt(r->expected_cost));
      v.require(std::fabs(r->reach_probability - oracle.pr) <= 1e-6, who + " Pr " + fmt(r->reach_probability));
    }
    if (lambda == 0.2) {
      v.require(oracle.p == 4 && oracle.q == 7 && oracle.r == 6 && oracle.s == 3, "oracle optimum at 0.2");
      v.require(std::fabs(oracle.ec - 1.42) <= 1e-6 && std::fabs(oracle.pr - 0.12) <= 1e-6, "oracle values at 0.2");
    }
    if (lambda == 1.0) {
      v.require(oracle.p == 4 && oracle.q == 3 && oracle.r == 6 && oracle.s == 7, "oracle optimum at 1");
      v.require(std::fabs(oracle.ec - 1.02) <= 1e-6, "oracle EC at 1");
    }
    if (lambda == 0.1) v.require(!oracle.feasible, "oracle feasible at 0.1");
  }
  const double t = seconds_since(start);
  v.require(t < 1.0, "runtime " + fmt(t) + " s");
  if (v.pass) v.detail = "EC 1.42 / Pr 0.12 at 0.2, EC 1.02 at 1, infeasible at 0.1; " + fmt(t) + " s";
  return v;
}

Verdict criterion2()
{
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  int feasible = 0;
  for (int round = 0; round < 100; ++round) {
    const auto gen = mimsynth::test::random_mimdp(rng, 20, 3, 3);
    const auto program = gcl::parse_program(gen.text);
    synth::SynthesisQuery q;
    q.target = "target";
    q.goal = "goal";
    q.lambda = gen.lambda;
    const auto a = synth::synthesize_enumerate(program, q);
    const auto b = synth::synthesize_transformed(program, q);
    const std::string tag = "model " + std::to_string(round);
    v.require(a.feasible == b.feasible, tag + " feasibility");
    if (a.feasible && b.feasible) {
      ++feasible;
      v.require(std::fabs(a.expected_cost - b.expected_cost) <= 1e-6,
                tag + " EC " + fmt(a.expected_cost) + " vs " + fmt(b.expected_cost));
      v.require(std::fabs(a.reach_probability - b.reach_probability) <= 1e-6,
                tag + " Pr " + fmt(a.reach_probability) + " vs " + fmt(b.reach_probability));
    }
  }
  const double t = seconds_since(start);
  v.require(t < 60.0, "runtime " + fmt(t) + " s");
  if (v.pass) v.detail = "100 models agree (" + std::to_string(feasible) + " feasible); " + fmt(t) + " s";
  return v;
}

Verdict criterion3()
{
  Verdict v;
  const auto program = load("die.mgcl");
  const auto m = mimsynth::build_model(program, ParameterValuation{{"p", mimsynth::parse_decimal("0.5")}});
  double worst = 0.0;
  for (const char* face : {"one", "two", "three", "four", "five", "six"}) {
    const double got = mc::reach_prob(m, m.label(face), mc::Direction::Max).at(m.initial);
    worst = std::max(worst, std::fabs(got - 1.0 / 6.0));
    v.require(std::fabs(got - 1.0 / 6.0) <= 1e-8, std::string(face) + " = " + fmt(got));
  }
  // Closed form for a biased coin: p^2(1-p)/(1-p(1-p)) at p = 1/2 is 1/6.
  const double p = 0.5;
  v.require(std::fabs(p * p * (1 - p) / (1 - p * (1 - p)) - 1.0 / 6.0) < 1e-15, "closed form at 1/2");
  if (v.pass) v.detail = "max |Pr - 1/6| = " + fmt(worst);
  return v;
}

Verdict criterion4()
{
  Verdict v;
  const auto die = load("die.mgcl");
  const auto parametric = mimsynth::build_model(die);
  v.require(parametric.num_states() == 13 && parametric.num_transitions() == 20,
            "parametric " + std::to_string(parametric.num_states()) + "/" +
                std::to_string(parametric.num_transitions()));
  const auto t1 = mimsynth::transform_rewards(mimsynth::compose(die)).first;
  const auto t2 = mimsynth::transform_probabilities(t1).first;
  const auto transformed = mimsynth::build_model(t2);
  v.require(transformed.num_states() == 13 && transformed.num_transitions() == 48,
            "transformed " + std::to_string(transformed.num_states()) + "/" +
                std::to_string(transformed.num_transitions()));
  const auto controlled = mimsynth::build_model(mimsynth::transform_all(die).first);
  v.require(controlled.num_states() > transformed.num_states(),
            "controlled states " + std::to_string(controlled.num_states()));
  for (double lambda : {0.1, 0.15, 0.2, 0.3}) {
    synth::SynthesisQuery q;
    q.target = "one";
    q.goal = "done";
    q.lambda = lambda;
    const auto a = synth::synthesize_enumerate(die, q);
    const auto b = synth::synthesize_transformed(die, q);
    v.require(synth::results_agree(a, b, 1e-6), "die methods disagree at lambda " + fmt(lambda));
  }
  if (v.pass) {
    v.detail = "parametric 13/20, transformed 13/48, controlled " + std::to_string(controlled.num_states()) + "/" +
               std::to_string(controlled.num_transitions()) + ", methods agree";
  }
  return v;
}

Verdict criterion5()
{
  Verdict v;
  const auto program = load("fig2.mgcl");
  const auto raw = mimsynth::all_valuations(program.parameters);
  const auto good = mimsynth::well_defined_valuations(mimsynth::build_model(program));
  v.require(raw.size() == 16, "raw " + std::to_string(raw.size()));
  v.require(good.size() == 4, "well-defined " + std::to_string(good.size()));
  for (const auto& u : good) {
    v.require(u.at("p") + u.at("r") == 1 && u.at("q") + u.at("s") == 1, "ill-defined " + mimsynth::valuation_text(u));
  }
  if (v.pass) v.detail = "4 of 16";
  return v;
}

Verdict criterion6()
{
  Verdict v;
  const auto program = load("fig2.mgcl");
  double worst = 0.0;
  for (double lambda : {0.2, 1.0}) {
    const auto q = fig2_query(lambda);
    std::ostringstream text;
    synth::emit_nilp(program, q, text);
    std::istringstream in(text.str());
    const auto model = synth::parse_nilp(in);
    v.require(model.binaries.size() == 4, "binaries " + std::to_string(model.binaries.size()));
    int onehot = 0;
    for (const auto& row : model.rows) {
      if (row.sense != synth::Sense::Eq || row.rhs != 1.0 || row.terms.size() != 4) continue;
      bool unit = true;
      for (const auto& t : row.terms) {
        unit = unit && t.coefficient == 1.0 && t.factors.size() == 1 && t.factors[0].rfind("x[", 0) == 0;
      }
      onehot += unit ? 1 : 0;
    }
    v.require(onehot == 1, "onehot rows " + std::to_string(onehot));
    const auto result = synth::synthesize_enumerate(program, q);
    const double viol = synth::max_violation(model, synth::nilp_assignment(program, q, result));
    worst = std::max(worst, viol);
    v.require(viol <= 1e-9, "violation " + fmt(viol) + " at lambda " + fmt(lambda));
  }
  if (v.pass) v.detail = "one selection row over 4 binaries; max violation " + fmt(worst);
  return v;
}

Verdict criterion7()
{
  Verdict v;
  std::mt19937_64 rng(7);
  double worst = 0.0;
  int cost_checks = 0;
  for (int round = 0; round < 50; ++round) {
    const auto c = mimsynth::test::random_chain(rng, 50);
    mc::StateSet T(c.n, false);
    std::bernoulli_distribution in_target(0.2);
    for (std::size_t s = 0; s < c.n; ++s) T[s] = in_target(rng);
    const auto m = to_sparse(c);
    const auto want = mimsynth::test::oracle_reach(c, T);
    const auto got = mc::reach_prob(m, T, mc::Direction::Max);
    for (std::size_t s = 0; s < c.n; ++s) worst = std::max(worst, std::fabs(got.at(s) - want[s]));

    const auto cost_want = mimsynth::test::oracle_cost(c, T);
    // Rooted at every state where the goal is reached almost surely.
    int rooted_states = 0;
    for (std::size_t init = 0; init < c.n; ++init) {
      if (std::isinf(cost_want[init])) continue;
      auto rooted = m;
      rooted.initial = init;
      const double got_cost = mc::expected_cost(rooted, T, mc::Direction::Min).at(init);
      worst = std::max(worst, std::fabs(got_cost - cost_want[init]) / std::max(1.0, std::fabs(cost_want[init])));
      ++rooted_states;
    }
    cost_checks += rooted_states;
  }
  v.require(worst <= 1e-7, "max error " + fmt(worst));
  if (v.pass) v.detail = "50 chains, " + std::to_string(cost_checks) + " cost roots, max error " + fmt(worst);
  return v;
}

bool nondecreasing(const mc::SparseMdp& m, const mc::StateSet& T, std::int64_t max_n, std::int64_t step)
{
  double previous = 0.0;
  for (std::int64_t n = 0; n <= max_n; n += step) {
    const double value = mc::cost_bounded_reach(m, T, n, mc::Direction::Max);
    if (value < previous - 1e-12) return false;
    previous = value;
  }
  return true;
}

Verdict criterion8()
{
  Verdict v;
  const auto unit = chain({{{1, 1.0}}, {{2, 1.0}}, {{3, 1.0}}, {{3, 1.0}}}, {1, 1, 1, 1});
  const mc::StateSet last{false, false, false, true};
  v.require(mc::cost_bounded_reach(unit, last, 3, mc::Direction::Max) == 0.0, "unit chain n=3");
  v.require(mc::cost_bounded_reach(unit, last, 4, mc::Direction::Max) == 1.0, "unit chain n=4");
  const auto branches = chain({{{1, 0.5}, {2, 0.5}}, {{3, 1.0}}, {{3, 1.0}}, {{3, 1.0}}}, {0, 1, 5, 0});
  v.require(std::fabs(mc::cost_bounded_reach(branches, last, 3, mc::Direction::Max) - 0.5) < 1e-15,
            "two-branch n=3");

  int instances = 0;
  // Corpus models with integer costs: die as is, fig2 with costs times 10.
  const auto die = load("die.mgcl");
  const auto die_model = mimsynth::build_model(die);
  for (const auto& u : mimsynth::well_defined_valuations(die_model)) {
    const auto m = mc::SparseMdp::from_model(mimsynth::instantiate(die_model, u));
    for (const char* face : {"one", "six", "done"}) {
      v.require(nondecreasing(m, die_model.label(face), 40, 1), std::string("die ") + face);
      ++instances;
    }
  }
  const auto fig2_model = mimsynth::build_model(scaled(load("fig2.mgcl"), 10));
  for (const auto& u : mimsynth::well_defined_valuations(fig2_model)) {
    const auto m = mc::SparseMdp::from_model(mimsynth::instantiate(fig2_model, u));
    v.require(nondecreasing(m, fig2_model.label("s2"), 40, 1), "fig2 " + mimsynth::valuation_text(u));
    ++instances;
  }
  std::mt19937_64 rng(88);
  for (int round = 0; round < 20; ++round) {
    auto c = mimsynth::test::random_chain(rng, 12);
    for (auto& cost : c.cost) cost = std::round(cost);
    mc::StateSet T(c.n, false);
    T[0] = true;
    auto m = to_sparse(c);
    m.initial = c.n - 1;
    v.require(nondecreasing(m, T, 200, 5), "random chain " + std::to_string(round));
    ++instances;
  }
  if (v.pass) v.detail = "0 at n=3, 1 at n=4, 0.5 two-branch; monotone on " + std::to_string(instances) + " instances";
  return v;
}

Verdict criterion9()
{
  Verdict v;
  const double want[] = {0.951075, 0.9511169, 0.9505};
  const cs::EoOption options[] = {cs::EoOption::R480, cs::EoOption::R720, cs::EoOption::R1080};
  std::string got_text;
  for (int i = 0; i < 3; ++i) {
    const double got = cs::detection_probability(options[i], 0.0, cs::Form::Quadratic);
    got_text += (i ? "," : "") + fmt(got);
    v.require(std::fabs(got - want[i]) < 1e-12, cs::eo_name(options[i]) + " detection " + fmt(got));
  }
  v.require(cs::johnson_probability(1.0, 1.0) == 0.5 && cs::johnson_probability(3.5, 3.5) == 0.5,
            "johnson at n50");
  bool rejected = false;
  try {
    cs::roc_true_positive(cs::SensorGrade::High, 0.5, cs::Form::Linear);
  } catch (const cs::CaseStudyError&) {
    rejected = true;
  }
  v.require(rejected, "high linear ROC accepted");
  if (v.pass) v.detail = "detection {" + got_text + "}, johnson 0.5, high linear ROC rejected";
  return v;
}

Verdict criterion10()
{
  Verdict v;
  cs::ShipyardConfig cfg;
  const auto uniform = cs::parameter_space_size(cs::generate_program(cfg, true).program);
  cfg.uniform_grade = false;
  const auto free = cs::parameter_space_size(cs::generate_program(cfg, true).program);
  v.require(free == 1440, "free-grade space " + std::to_string(free) + " (expected 1440)");
  v.require(uniform == 360, "uniform-grade space " + std::to_string(uniform));
  const auto rows = cs::sweep(cs::ShipyardConfig{}, 10);
  bool monotone = true;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    monotone = monotone && rows[i].failure_probability >= rows[i - 1].failure_probability - 1e-12;
  }
  v.require(monotone, "failure curve decreases");
  v.require(rows.size() == 10, "sweep rows " + std::to_string(rows.size()));
  if (v.pass) v.detail = "1440 / 360, failure curve nondecreasing over 10 missions";
  return v;
}

bool scaled_agrees(Verdict& v, const std::string& tag, const synth::SynthesisResult& base,
                   const synth::SynthesisResult& big)
{
  bool ok = big.feasible == base.feasible;
  if (ok && base.feasible) {
    ok = std::fabs(big.expected_cost - 7.0 * base.expected_cost) <= 1e-9 * std::max(1.0, big.expected_cost) &&
         big.valuation == base.valuation;
  }
  ok = ok && big.table.size() == base.table.size();
  for (std::size_t i = 0; ok && i < base.table.size(); ++i) {
    const auto& a = base.table[i];
    const auto& b = big.table[i];
    ok = a.valuation == b.valuation && a.feasible == b.feasible;
    if (ok && a.feasible) ok = std::fabs(b.expected_cost - 7.0 * a.expected_cost) <= 1e-9 * std::max(1.0, b.expected_cost);
  }
  v.require(ok, tag);
  return ok;
}

Verdict criterion11()
{
  Verdict v;
  const auto fig2 = load("fig2.mgcl");
  int checked = 0;
  for (double lambda : {0.12, 0.2, 0.3, 1.0}) {
    const auto q = fig2_query(lambda);
    scaled_agrees(v, "fig2 enum lambda " + fmt(lambda), synth::synthesize_enumerate(fig2, q),
                  synth::synthesize_enumerate(scaled(fig2, 7), q));
    scaled_agrees(v, "fig2 transformed lambda " + fmt(lambda), synth::synthesize_transformed(fig2, q),
                  synth::synthesize_transformed(scaled(fig2, 7), q));
    checked += 2;
  }
  std::mt19937_64 rng(77);
  for (int round = 0; round < 20; ++round) {
    const auto gen = mimsynth::test::random_mimdp(rng, 12, 3, 3);
    const auto program = gcl::parse_program(gen.text);
    synth::SynthesisQuery q;
    q.target = "target";
    q.goal = "goal";
    q.lambda = gen.lambda;
    scaled_agrees(v, "random enum " + std::to_string(round), synth::synthesize_enumerate(program, q),
                  synth::synthesize_enumerate(scaled(program, 7), q));
    scaled_agrees(v, "random transformed " + std::to_string(round), synth::synthesize_transformed(program, q),
                  synth::synthesize_transformed(scaled(program, 7), q));
    checked += 2;
  }
  if (v.pass) v.detail = std::to_string(checked) + " syntheses scale by 7 with unchanged valuation";
  return v;
}

}  // namespace

int main()
{
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"fig2 synthesis", criterion1},          {"enumerate vs transformed", criterion2},
      {"fair die uniform", criterion3},        {"die model sizes", criterion4},
      {"well-defined valuations", criterion5}, {"NILP emission", criterion6},
      {"value iteration vs elimination", criterion7}, {"cost-bounded reachability", criterion8},
      {"case-study formulas", criterion9},     {"case-study pipeline", criterion10},
      {"cost scaling invariance", criterion11},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    failures += v.pass ? 0 : 1;
    std::printf("[%s] %d %s: %s\n", v.pass ? "PASS" : "FAIL", index, name, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", index - failures, index);
  return failures == 0 ? 0 : 1;
}
