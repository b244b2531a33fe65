#include "mimsynth/casestudy/formulas.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace mimsynth::casestudy {

namespace {

struct Polynomial {
  const char* a2;  // nullptr for linear fits
  const char* a1;
  const char* a0;
};

// Fitted approximations, coefficients as printed.
constexpr Polynomial kDetectionLinear[] = {
    {nullptr, "-0.0008", "0.9461"}, {nullptr, "-0.0004", "0.9498"}, {nullptr, "-0.0003", "0.9505"}};
constexpr Polynomial kDetectionQuadratic[] = {{"-0.000004", "-0.000810", "0.951075"},
                                              {"-0.000001", "-0.0004051", "0.9511169"},
                                              {"-0.000000", "-0.000300", "0.950500"}};
constexpr Polynomial kRocLinear[] = {{nullptr, "0.0041", "0.9949"}, {nullptr, "0.0853", "0.9137"}};
constexpr Polynomial kRocQuadratic[] = {
    {"-0.0183", "0.0273", "0.9888"}, {"-0.2243", "0.3779", "0.8391"}, {"-0.4676", "0.9213", "0.5346"}};
constexpr Polynomial kFootprintLinear[] = {
    {nullptr, "-0.000045", "0.013026"}, {nullptr, "-0.000011", "0.006428"}, {nullptr, "-0.000005", "0.004279"}};
constexpr Polynomial kFootprintQuadratic[] = {{"0.0000002", "-0.0000445", "0.0128284"},
                                              {"-0.0000000", "-0.0000110", "0.0064280"},
                                              {"-0.0000000", "-0.0000050", "0.0042790"}};

Rational coefficient(const char* text)
{
  if (text[0] == '-') return -parse_decimal(text + 1);
  return parse_decimal(text);
}

Rational evaluate(const Polynomial& p, const Rational& x)
{
  Rational v = coefficient(p.a1) * x + coefficient(p.a0);
  if (p.a2 != nullptr) v += coefficient(p.a2) * x * x;
  return v;
}

Rational clamp_unit(Rational v, ClampLog* log)
{
  if (v < 0 || v > 1) {
    if (log != nullptr) ++log->events;
    v = v < 0 ? Rational(0) : Rational(1);
  }
  return v;
}

void require_delta(const Rational& delta_h)
{
  if (delta_h < -60 || delta_h > 60) throw CaseStudyError("altitude deviation " + to_string(delta_h) + " outside [-60,60]");
}

std::size_t index(EoOption e) { return static_cast<std::size_t>(e); }
std::size_t index(SensorGrade g) { return static_cast<std::size_t>(g); }

}  // namespace

std::string grade_name(SensorGrade g)
{
  static const char* names[] = {"low", "mid", "high"};
  return names[index(g)];
}

std::string eo_name(EoOption e)
{
  static const char* names[] = {"480p", "720p", "1080p"};
  return names[index(e)];
}

SensorGrade parse_grade(const std::string& text)
{
  for (auto g : kGrades) {
    if (grade_name(g) == text) return g;
  }
  if (text == "med") return SensorGrade::Mid;
  throw CaseStudyError("unknown sensor grade '" + text + "' (expected low, mid or high)");
}

EoOption parse_eo(const std::string& text)
{
  for (auto e : kEoOptions) {
    const std::string name = eo_name(e);
    if (name == text || name.substr(0, name.size() - 1) == text) return e;
  }
  throw CaseStudyError("unknown EO option '" + text + "' (expected 480p, 720p or 1080p)");
}

long purchase_cost(SensorGrade g) { return 15000L * static_cast<long>(index(g) + 1); }
long purchase_cost(EoOption e) { return 15000L * static_cast<long>(index(e) + 1); }

long horizontal_resolution(EoOption e)
{
  static const long r[] = {640, 1280, 1920};
  return r[index(e)];
}

long vertical_resolution(EoOption e)
{
  static const long r[] = {480, 720, 1080};
  return r[index(e)];
}

long operating_altitude(EoOption e)
{
  static const long h[] = {296, 593, 889};
  return h[index(e)];
}

const std::vector<TaskGeometry>& task_table()
{
  using K = TaskGeometry::Kind;
  static const std::vector<TaskGeometry> tasks{
      {"Main Gate", K::Point, 1000, 1000},
      {"Power Generator", K::Point, 1100, 1100},
      {"Sensor 1", K::Point, 3250, 3250},
      {"Sensor 2", K::Point, 3375, 3375},
      {"Sensor 3", K::Point, 2375, 2375},
      {"Bay Sensor Network", K::Point, 3750, 3750},
      {"Highway", K::Line, 2000, 2000, 2875},
      {"Runway", K::Line, 1000, 1250, 2000},
      {"Stream", K::Line, 3250, 3250, 2050},
      {"Bridge", K::Area, 3750, 3500, 0, 3250, 500, 375, 600},
      {"Main Office", K::Area, 2600, 1525, 0, 3250, 625, 500, 1100},
      {"Warehouse", K::Area, 2750, 1250, 0, 3250, 575, 700, 1500},
      {"Truck Depot", K::Area, 2950, 2100, 0, 3375, 450, 625, 1200},
      {"Shipyard Office", K::Area, 3350, 3150, 0, 3375, 425, 550, 1000},
      {"Shipyard", K::Area, 3625, 3050, 0, 3375, 500, 800, 700},
      {"West Bay", K::Area, 4250, 4900, 0, 3750, 1000, 575, 1000},
      {"East Bay", K::Area, 3125, 3350, 0, 3750, 1500, 575, 2000},
      {"Airfield Office", K::Area, 2100, 2000, 0, 2375, 450, 550, 500},
      {"Airfield", K::Area, 1750, 2875, 0, 2375, 700, 950, 1625},
  };
  return tasks;
}

const TaskGeometry& find_task(const std::string& name)
{
  for (const auto& t : task_table()) {
    if (t.name == name) return t;
  }
  throw CaseStudyError("unknown task '" + name + "'");
}

double task_distance(const TaskGeometry& t, std::optional<double> footprint_width, bool sensor_response)
{
  for (double d : {t.d_g, t.d_g_back, t.d_l, t.d_s, t.d_s_back, t.d_h, t.d_w}) {
    if (d < 0) throw CaseStudyError("negative distance in task '" + t.name + "'");
  }
  switch (t.kind) {
    case TaskGeometry::Kind::Point: return t.d_g + t.d_g_back;
    case TaskGeometry::Kind::Line: return t.d_g + t.d_l + t.d_g_back;
    case TaskGeometry::Kind::Area: break;
  }
  if (!footprint_width || *footprint_width <= 0) {
    throw CaseStudyError("area task '" + t.name + "' needs a positive footprint width");
  }
  const double sweep = t.d_w / *footprint_width * t.d_h;
  if (sensor_response) return t.d_s + t.d_s_back + sweep + t.d_g_back;
  return t.d_g + sweep + t.d_g_back;
}

double basic_task_cost(double distance, double c_f, double v_g)
{
  if (v_g <= 0) throw CaseStudyError("ground speed must be positive");
  if (distance < 0) throw CaseStudyError("distance must be nonnegative");
  return distance * c_f / v_g;
}

double gsd(double h_alt, double r_h)
{
  if (r_h <= 0) throw CaseStudyError("horizontal resolution must be positive");
  if (h_alt < 0) throw CaseStudyError("altitude must be nonnegative");
  return 2.0 * h_alt * std::tan(std::numbers::pi / 24.0) / r_h;
}

double line_pairs(double d_o, double r_v, double h_alt, double eta_h)
{
  if (h_alt <= 0) throw CaseStudyError("altitude must be positive");
  return d_o * r_v / (4.0 * h_alt * std::tan(eta_h / 2.0));
}

double johnson_probability(double n, double n50)
{
  if (n50 <= 0) throw CaseStudyError("n50 must be positive");
  if (n < 0) throw CaseStudyError("line pairs must be nonnegative");
  const double ratio = n / n50;
  const double x0 = 2.7 + 0.7 * ratio;
  const double power = std::pow(ratio, x0);
  return power / (1.0 + power);
}

Rational detection_probability_exact(EoOption e, const Rational& delta_h, Form form, ClampLog* log)
{
  require_delta(delta_h);
  const auto& table = form == Form::Linear ? kDetectionLinear : kDetectionQuadratic;
  return clamp_unit(evaluate(table[index(e)], delta_h), log);
}

Rational roc_true_positive_exact(SensorGrade g, const Rational& p_f, Form form, ClampLog* log)
{
  if (p_f < Rational(1, 5) || p_f > 1) throw CaseStudyError("false positive rate " + to_string(p_f) + " outside [0.2,1]");
  if (form == Form::Linear) {
    if (g == SensorGrade::High) throw CaseStudyError("no linear ROC approximation for the high grade sensor");
    return clamp_unit(evaluate(kRocLinear[index(g)], p_f), log);
  }
  return clamp_unit(evaluate(kRocQuadratic[index(g)], p_f), log);
}

Rational inverse_footprint_exact(EoOption e, const Rational& delta_h, Form form)
{
  require_delta(delta_h);
  const auto& table = form == Form::Linear ? kFootprintLinear : kFootprintQuadratic;
  return evaluate(table[index(e)], delta_h);
}

double detection_probability(EoOption e, double delta_h, Form form, ClampLog* log)
{
  return to_double(detection_probability_exact(e, decimal(delta_h), form, log));
}

double roc_true_positive(SensorGrade g, double p_f, Form form, ClampLog* log)
{
  return to_double(roc_true_positive_exact(g, decimal(p_f), form, log));
}

double inverse_footprint(EoOption e, double delta_h, Form form)
{
  return to_double(inverse_footprint_exact(e, decimal(delta_h), form));
}

Rational intruder_area_cost_exact(const TaskGeometry& t, EoOption e, const Rational& delta_h, Form form)
{
  if (t.kind != TaskGeometry::Kind::Area) throw CaseStudyError("task '" + t.name + "' is not an area search");
  const Rational c_f(5, 18);
  const Rational v_g(15);
  const Rational v_a(5);
  const Rational h0(operating_altitude(EoOption::R1080));
  const Rational altitude_change = 2 * (h0 - operating_altitude(e) - delta_h) / v_a;
  const Rational sweep = inverse_footprint_exact(e, delta_h, form) * decimal(t.d_w) * decimal(t.d_h) / v_g;
  return c_f * (decimal(t.d_s) + decimal(t.d_s_back) + sweep + altitude_change + decimal(t.d_g_back));
}

double intruder_area_cost(const TaskGeometry& t, EoOption e, double delta_h, Form form)
{
  return to_double(intruder_area_cost_exact(t, e, decimal(delta_h), form));
}

Rational decimal(double x)
{
  if (!std::isfinite(x)) throw CaseStudyError("non-finite value");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", std::fabs(x));
  const Rational v = parse_decimal(buf);
  return x < 0 ? Rational(-v) : v;
}

}  // namespace mimsynth::casestudy
