#include "mimsynth/casestudy/formulas.hpp"
#include "mimsynth/casestudy/shipyard.hpp"
#include "mimsynth/gcl/check.hpp"
#include "mimsynth/gcl/parser.hpp"
#include "mimsynth/semantics/build.hpp"
#include "mimsynth/synth/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace cs = mimsynth::casestudy;
using cs::EoOption;
using cs::Form;
using cs::SensorGrade;
using mimsynth::Rational;

namespace {

Rational dec(const char* s) { return mimsynth::parse_decimal(s); }

}  // namespace

TEST(Distances, PointLineArea)
{
  EXPECT_DOUBLE_EQ(cs::task_distance(cs::find_task("Main Gate")), 2000.0);
  EXPECT_DOUBLE_EQ(cs::task_distance(cs::find_task("Highway")), 6875.0);
  EXPECT_DOUBLE_EQ(cs::task_distance(cs::find_task("Bridge"), 100.0), 9500.0);
  // d_s + d_s' + (600/100)*375 + d_g'
  EXPECT_DOUBLE_EQ(cs::task_distance(cs::find_task("Bridge"), 100.0, true), 3250.0 + 500.0 + 2250.0 + 3500.0);
  EXPECT_THROW(cs::task_distance(cs::find_task("Bridge")), cs::CaseStudyError);
  EXPECT_THROW(cs::find_task("Lighthouse"), cs::CaseStudyError);
  for (const auto& t : cs::task_table()) EXPECT_GE(t.d_g, 0.0) << t.name;
}

TEST(Distances, BasicCost)
{
  EXPECT_DOUBLE_EQ(cs::basic_task_cost(0.0), 0.0);
  EXPECT_NEAR(cs::basic_task_cost(2000.0), 37.037, 1e-3);
  EXPECT_DOUBLE_EQ(cs::basic_task_cost(4000.0), 2.0 * cs::basic_task_cost(2000.0));
  EXPECT_THROW(cs::basic_task_cost(10.0, 5.0 / 18.0, 0.0), cs::CaseStudyError);
}

TEST(Imaging, GroundSampleDistance)
{
  EXPECT_DOUBLE_EQ(cs::gsd(0.0, 1080.0), 0.0);
  EXPECT_NEAR(cs::gsd(889.0, 1080.0), 0.2167, 1e-4);
  EXPECT_DOUBLE_EQ(cs::gsd(600.0, 720.0), 2.0 * cs::gsd(300.0, 720.0));
  EXPECT_THROW(cs::gsd(100.0, 0.0), cs::CaseStudyError);
}

TEST(Imaging, LinePairs)
{
  const double eta = std::numbers::pi / 12.0;
  EXPECT_NEAR(cs::line_pairs(0.5, 480.0, 296.0, eta), 1.54, 5e-3);
  EXPECT_DOUBLE_EQ(cs::line_pairs(0.0, 480.0, 296.0, eta), 0.0);
  EXPECT_NEAR(cs::line_pairs(0.5, 480.0, 592.0, eta), cs::line_pairs(0.5, 480.0, 296.0, eta) / 2.0, 1e-12);
  EXPECT_THROW(cs::line_pairs(0.5, 480.0, 0.0, eta), cs::CaseStudyError);
  for (double h : {50.0, 296.0, 889.0}) {
    for (double r : {480.0, 720.0, 1080.0}) {
      EXPECT_NEAR(cs::line_pairs(0.5, r, h, eta), 0.5 / (2.0 * cs::gsd(h, r)), 1e-12);
    }
  }
}

TEST(Imaging, Johnson)
{
  EXPECT_EQ(cs::johnson_probability(4.0, 4.0), 0.5);
  EXPECT_EQ(cs::johnson_probability(1.0, 1.0), 0.5);
  EXPECT_NEAR(cs::johnson_probability(2.0, 1.0), std::pow(2.0, 4.1) / (1.0 + std::pow(2.0, 4.1)), 1e-15);
  EXPECT_NEAR(cs::johnson_probability(2.0, 1.0), 0.9449, 1e-4);
  EXPECT_EQ(cs::johnson_probability(0.0, 1.0), 0.0);
  EXPECT_THROW(cs::johnson_probability(1.0, 0.0), cs::CaseStudyError);
  double previous = 0.0;
  for (int k = 1; k <= 60; ++k) {
    const double p = cs::johnson_probability(0.1 * k, 3.0);
    EXPECT_GT(p, previous);
    EXPECT_LT(p, 1.0);
    previous = p;
  }
}

TEST(Approximations, Detection)
{
  EXPECT_EQ(cs::detection_probability_exact(EoOption::R480, 0, Form::Quadratic), dec("0.951075"));
  EXPECT_EQ(cs::detection_probability_exact(EoOption::R720, 0, Form::Quadratic), dec("0.9511169"));
  EXPECT_EQ(cs::detection_probability_exact(EoOption::R1080, 0, Form::Quadratic), dec("0.9505"));
  EXPECT_EQ(cs::detection_probability_exact(EoOption::R1080, 0, Form::Linear), dec("0.9505"));
  EXPECT_EQ(cs::detection_probability_exact(EoOption::R480, 60, Form::Linear), dec("0.8981"));
  for (long h = -60; h <= 60; h += 10) {
    EXPECT_EQ(cs::detection_probability_exact(EoOption::R1080, h, Form::Linear),
              cs::detection_probability_exact(EoOption::R1080, h, Form::Quadratic));
  }
  EXPECT_THROW(cs::detection_probability(EoOption::R480, 61.0, Form::Linear), cs::CaseStudyError);
}

TEST(Approximations, Roc)
{
  EXPECT_EQ(cs::roc_true_positive_exact(SensorGrade::Low, 1, Form::Quadratic), dec("0.9978"));
  EXPECT_EQ(cs::roc_true_positive_exact(SensorGrade::Mid, dec("0.2"), Form::Quadratic), dec("0.905708"));
  EXPECT_THROW(cs::roc_true_positive(SensorGrade::High, 0.5, Form::Linear), cs::CaseStudyError);
  EXPECT_THROW(cs::roc_true_positive(SensorGrade::Low, 0.1, Form::Quadratic), cs::CaseStudyError);
}

TEST(Approximations, InverseFootprint)
{
  EXPECT_EQ(cs::inverse_footprint_exact(EoOption::R480, 0, Form::Linear), dec("0.013026"));
  EXPECT_EQ(cs::inverse_footprint_exact(EoOption::R1080, 0, Form::Linear), dec("0.004279"));
  EXPECT_EQ(cs::inverse_footprint_exact(EoOption::R1080, 0, Form::Quadratic), dec("0.004279"));
  EXPECT_EQ(cs::inverse_footprint_exact(EoOption::R480, 0, Form::Quadratic), dec("0.0128284"));
}

TEST(Approximations, ProbabilitiesStayInUnitInterval)
{
  cs::ClampLog log;
  for (auto form : {Form::Linear, Form::Quadratic}) {
    for (long h = -60; h <= 60; ++h) {
      for (auto e : cs::kEoOptions) {
        const double p = cs::detection_probability(e, static_cast<double>(h), form, &log);
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
      }
    }
    for (int k = 20; k <= 100; ++k) {
      for (auto g : cs::kGrades) {
        if (g == SensorGrade::High && form == Form::Linear) continue;
        const double p = cs::roc_true_positive(g, k / 100.0, form, &log);
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
      }
    }
  }
  EXPECT_EQ(log.events, 0u);
}

TEST(AreaCost, IntruderSearch)
{
  const auto& bridge = cs::find_task("Bridge");
  // 1/e_w * d_w * d_h / v_g = 0.0128284 * 600 * 375 / 15 = 192.426; 2 (889 - 296) / 5 = 237.2
  const Rational expected = Rational(5, 18) * (3250 + 500 + dec("192.426") + dec("237.2") + 3500);
  EXPECT_EQ(cs::intruder_area_cost_exact(bridge, EoOption::R480, 0, Form::Quadratic), expected);
  EXPECT_NEAR(cs::intruder_area_cost(bridge, EoOption::R480, 0.0, Form::Quadratic), 2133.23, 1e-2);

  const Rational sweep = dec("0.004279") * 600 * 375 / 15;
  EXPECT_EQ(cs::intruder_area_cost_exact(bridge, EoOption::R1080, 0, Form::Linear),
            Rational(5, 18) * (3250 + 500 + sweep + 3500));

  double previous = -1.0;
  for (long h = 60; h >= -60; h -= 30) {
    const double c = cs::intruder_area_cost(bridge, EoOption::R480, static_cast<double>(h), Form::Linear);
    EXPECT_GT(c, previous);
    previous = c;
  }
  EXPECT_THROW(cs::intruder_area_cost(cs::find_task("Main Gate"), EoOption::R480, 0.0, Form::Linear),
               cs::CaseStudyError);
}

TEST(Shipyard, ParameterSpaceSizes)
{
  cs::ShipyardConfig cfg;
  const auto uniform = cs::generate_program(cfg, true);
  EXPECT_EQ(cs::parameter_space_size(uniform.program), 360u);
  cfg.uniform_grade = false;
  const auto free = cs::generate_program(cfg, true);
  // Independent grades for four sensors: 3 * 5 * 8 * 3^4.
  EXPECT_EQ(cs::parameter_space_size(free.program), 9720u);
}

TEST(Shipyard, GeneratedProgramIsWellFormed)
{
  cs::ShipyardConfig cfg;
  for (bool parametric : {false, true}) {
    for (bool uniform : {true, false}) {
      cfg.uniform_grade = uniform;
      const auto g = cs::generate_program(cfg, parametric);
      EXPECT_TRUE(mimsynth::gcl::check_program(g.program).empty());
      const auto reparsed = mimsynth::gcl::parse_program(g.text);
      EXPECT_EQ(reparsed, g.program);
      EXPECT_EQ(g.clamped, 0u);
    }
  }
}

TEST(Shipyard, RejectsBadConfig)
{
  cs::ShipyardConfig cfg;
  cfg.altitude_delta = 90;
  EXPECT_THROW(cs::generate_program(cfg, false), cs::CaseStudyError);
  cfg = {};
  cfg.false_positive_rate = 0.1;
  EXPECT_THROW(cs::generate_program(cfg, false), cs::CaseStudyError);
  cfg = {};
  cfg.missions = 0;
  EXPECT_THROW(cs::generate_program(cfg, false), cs::CaseStudyError);
}

TEST(Shipyard, SweepMatchesClosedForm)
{
  cs::ShipyardConfig cfg;
  cfg.eo = EoOption::R480;
  cfg.altitude_delta = -30;
  cfg.roc = {SensorGrade::Low, SensorGrade::Mid, SensorGrade::High, SensorGrade::Mid};
  cfg.false_positive_rate = 0.4;

  // Per mission: fail = sum_i 1/4 * pi * (1 - pt_i * pd); cost = sum_i 1/4 * (query_i + alarm_i * search_i).
  const double pi = cfg.intruder_probability;
  const double pd = cs::detection_probability(cfg.eo, -30.0, Form::Quadratic);
  double fail = 0.0;
  double mission_cost = 0.0;
  for (std::size_t i = 0; i < cs::kGroundSensors; ++i) {
    const double pt = cs::roc_true_positive(cfg.roc[i], 0.4, Form::Quadratic);
    fail += 0.25 * pi * (1.0 - pt * pd);
    const double query = cs::basic_task_cost(cs::task_distance(cs::find_task(cs::sensor_names()[i])));
    const double search = cs::intruder_area_cost(cs::find_task(cs::sensor_areas()[i]), cfg.eo, -30.0, Form::Quadratic);
    mission_cost += 0.25 * (query + (pi * pt + (1.0 - pi) * 0.4) * search);
  }
  double purchase = static_cast<double>(cs::purchase_cost(cfg.eo));
  for (auto g : cfg.roc) purchase += static_cast<double>(cs::purchase_cost(g));

  const auto rows = cs::sweep(cfg, 6);
  ASSERT_EQ(rows.size(), 6u);
  double survive = 1.0;
  double cost = purchase;
  for (const auto& row : rows) {
    cost += survive * mission_cost;
    survive *= 1.0 - fail;
    EXPECT_NEAR(row.failure_probability, 1.0 - survive, 1e-9) << row.missions;
    EXPECT_NEAR(row.expected_cost, cost, 1e-6 * cost) << row.missions;
  }
}

TEST(Shipyard, FailureCurveNondecreasing)
{
  for (auto eo : cs::kEoOptions) {
    for (long h : cs::altitude_values()) {
      cs::ShipyardConfig cfg;
      cfg.eo = eo;
      cfg.altitude_delta = h;
      const auto rows = cs::sweep(cfg, 5);
      for (std::size_t k = 1; k < rows.size(); ++k) {
        EXPECT_GE(rows[k].failure_probability, rows[k - 1].failure_probability);
      }
    }
  }
}

TEST(Shipyard, SynthesisMethodsAgreeOnOneMission)
{
  cs::ShipyardConfig cfg;
  cfg.missions = 1;
  const auto g = cs::generate_program(cfg, true);
  mimsynth::synth::SynthesisQuery q;
  q.target = "failed";
  q.goal = "done";
  q.lambda = 0.05;
  const auto a = mimsynth::synth::synthesize_enumerate(g.program, q);
  const auto b = mimsynth::synth::synthesize_transformed(g.program, q);
  EXPECT_TRUE(a.feasible);
  EXPECT_TRUE(mimsynth::synth::results_agree(a, b));
  EXPECT_LE(a.reach_probability, 0.05 + 1e-9);
}
