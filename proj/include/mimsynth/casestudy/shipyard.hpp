#pragma once

#include "mimsynth/casestudy/formulas.hpp"
#include "mimsynth/gcl/ast.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace mimsynth::casestudy {

/// Ground sensors in declaration order: Sensor 1, Sensor 2, Sensor 3, Bay Sensor Network.
inline constexpr std::size_t kGroundSensors = 4;
const std::array<std::string, kGroundSensors>& sensor_names();
/// Area searched after an alarm of each sensor: Bridge, Truck Depot, Airfield, West Bay.
const std::array<std::string, kGroundSensors>& sensor_areas();

/// Parameter value sets of the parametric model.
const std::vector<long>& altitude_values();     // -60, -30, 0, 30, 60
const std::vector<Rational>& fp_values();       // 0.2 .. 0.9

struct ShipyardConfig {
  EoOption eo = EoOption::R1080;
  long altitude_delta = 0;
  std::array<SensorGrade, kGroundSensors> roc{SensorGrade::High, SensorGrade::High, SensorGrade::High,
                                               SensorGrade::High};
  bool uniform_grade = true;  // parametric model: one grade parameter for all sensors
  double false_positive_rate = 0.2;
  long missions = 3;
  Form form = Form::Quadratic;
  double intruder_probability = 0.25;
};

/// Throws CaseStudyError when Δh, fp, missions or the intruder probability is out of range.
void validate(const ShipyardConfig& cfg);

struct GeneratedProgram {
  std::string text;
  gcl::Program program;
  std::size_t clamped = 0;  // approximations pushed back into [0,1]
};

/// Mission-loop model: per mission one sensor is queried uniformly, an intruder is present with
/// the configured probability, the sensor alarms per its ROC, an alarm triggers an area search,
/// and a present intruder is recognized per the detection approximation. A missed intruder or a
/// failed recognition is absorbing. Labels: "failed", "done" (failed or all missions flown).
GeneratedProgram generate_program(const ShipyardConfig& cfg, bool parametric);

/// Product of the value-set sizes.
std::uint64_t parameter_space_size(const gcl::Program& p);

struct SweepRow {
  long missions = 0;
  double failure_probability = 0;
  double expected_cost = 0;
};

/// Instantiated model for 1..max_missions missions; cfg.missions is ignored.
std::vector<SweepRow> sweep(const ShipyardConfig& cfg, long max_missions);

}  // namespace mimsynth::casestudy
