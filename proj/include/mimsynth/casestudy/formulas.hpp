#pragma once

#include "mimsynth/rational.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mimsynth::casestudy {

class CaseStudyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class SensorGrade { Low, Mid, High };
enum class EoOption { R480, R720, R1080 };
enum class Form { Linear, Quadratic };

inline constexpr std::array<SensorGrade, 3> kGrades{SensorGrade::Low, SensorGrade::Mid, SensorGrade::High};
inline constexpr std::array<EoOption, 3> kEoOptions{EoOption::R480, EoOption::R720, EoOption::R1080};

std::string grade_name(SensorGrade g);  // "low", "mid", "high"
std::string eo_name(EoOption e);        // "480p", "720p", "1080p"
SensorGrade parse_grade(const std::string& text);
EoOption parse_eo(const std::string& text);

long purchase_cost(SensorGrade g);
long purchase_cost(EoOption e);
long horizontal_resolution(EoOption e);
long vertical_resolution(EoOption e);
long operating_altitude(EoOption e);  // h_0 per option, meters

struct TaskGeometry {
  enum class Kind { Point, Line, Area };
  std::string name;
  Kind kind = Kind::Point;
  double d_g = 0;
  double d_g_back = 0;
  double d_l = 0;  // lines only
  double d_s = 0;  // areas only
  double d_s_back = 0;
  double d_h = 0;
  double d_w = 0;
};

/// The point, line and area task tables. Shipyard lists two sensor distances; the first is kept.
const std::vector<TaskGeometry>& task_table();
const TaskGeometry& find_task(const std::string& name);

/// Sum of the kind's distances. Area tasks need a footprint width; sensor_response
/// switches an area task to the d_s/d_s' variant.
double task_distance(const TaskGeometry& t, std::optional<double> footprint_width = std::nullopt,
                     bool sensor_response = false);

double basic_task_cost(double distance, double c_f = 5.0 / 18.0, double v_g = 15.0);

/// Ground sample distance at eta = pi/12 and a downward gimbal.
double gsd(double h_alt, double r_h);
double line_pairs(double d_o, double r_v, double h_alt, double eta_h);
double johnson_probability(double n, double n50);

/// Counts values pushed back into [0,1].
struct ClampLog {
  std::size_t events = 0;
};

// Polynomial approximations are evaluated exactly; Δh in [-60,60], p_f in [0.2,1.0].
Rational detection_probability_exact(EoOption e, const Rational& delta_h, Form form, ClampLog* log = nullptr);
Rational roc_true_positive_exact(SensorGrade g, const Rational& p_f, Form form, ClampLog* log = nullptr);
Rational inverse_footprint_exact(EoOption e, const Rational& delta_h, Form form);

double detection_probability(EoOption e, double delta_h, Form form, ClampLog* log = nullptr);
double roc_true_positive(SensorGrade g, double p_f, Form form, ClampLog* log = nullptr);
double inverse_footprint(EoOption e, double delta_h, Form form);

/// Intruder area-search cost with h_0 = h_0^h, c_f = 5/18, v_g = 15, v_a = 5. The
/// distance terms and the altitude time term are summed as printed, units mixed.
Rational intruder_area_cost_exact(const TaskGeometry& t, EoOption e, const Rational& delta_h, Form form);
double intruder_area_cost(const TaskGeometry& t, EoOption e, double delta_h, Form form);

/// Exact decimal of a double written with at most 12 significant digits.
Rational decimal(double x);

}  // namespace mimsynth::casestudy
