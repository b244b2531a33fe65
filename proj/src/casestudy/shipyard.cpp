#include "mimsynth/casestudy/shipyard.hpp"

#include "mimsynth/gcl/printer.hpp"
#include "mimsynth/mc/property.hpp"
#include "mimsynth/semantics/build.hpp"

#include <functional>
#include <sstream>

namespace mimsynth::casestudy {

namespace {

using gcl::Expr;
using gcl::Op;

// One input of a tabulated quantity: a parameter with its value set, or a fixed value.
struct Dim {
  std::string param;  // empty when fixed
  std::vector<Rational> values;
};

// Negative values in the form the parser produces.
Expr literal(const Rational& v) { return v < 0 ? gcl::unary(Op::Neg, gcl::num(Rational(-v))) : gcl::num(v); }

Expr eq(const std::string& name, const Rational& v) { return gcl::binary(Op::Eq, gcl::ident(name), literal(v)); }

// Nested conditional over the parametric dims; the last combination is the fallback.
Expr table(const std::vector<Dim>& dims, const std::function<Rational(const std::vector<Rational>&)>& f)
{
  std::vector<std::vector<Rational>> combos{{}};
  for (const auto& d : dims) {
    std::vector<std::vector<Rational>> next;
    for (const auto& c : combos) {
      for (const auto& v : d.values) {
        auto e = c;
        e.push_back(v);
        next.push_back(std::move(e));
      }
    }
    combos = std::move(next);
  }
  std::vector<Rational> values;
  for (const auto& c : combos) values.push_back(f(c));
  bool constant = true;
  for (const auto& v : values) constant = constant && v == values.front();
  if (constant) return literal(values.front());

  Expr result = literal(values.back());
  for (std::size_t k = combos.size() - 1; k-- > 0;) {
    std::vector<Expr> parts;
    for (std::size_t j = 0; j < dims.size(); ++j) {
      if (!dims[j].param.empty()) parts.push_back(eq(dims[j].param, combos[k][j]));
    }
    result = Expr::apply(Op::Ite, {gcl::conj(parts), literal(values[k]), result});
  }
  return result;
}

EoOption eo_of(const Rational& r)
{
  for (auto e : kEoOptions) {
    if (r == vertical_resolution(e)) return e;
  }
  throw CaseStudyError("bad EO encoding " + to_string(r));
}

SensorGrade grade_of(const Rational& r) { return kGrades.at(r.get_num().get_ui()); }

gcl::Update set(const std::string& v, Expr e) { return {v, std::move(e)}; }

gcl::Command command(Expr guard, std::vector<gcl::Branch> branches)
{
  gcl::Command c;
  c.guard = std::move(guard);
  c.branches = std::move(branches);
  return c;
}

Expr one_minus(const Expr& e) { return gcl::binary(Op::Sub, gcl::num(1), e); }

}  // namespace

const std::array<std::string, kGroundSensors>& sensor_names()
{
  static const std::array<std::string, kGroundSensors> names{"Sensor 1", "Sensor 2", "Sensor 3", "Bay Sensor Network"};
  return names;
}

const std::array<std::string, kGroundSensors>& sensor_areas()
{
  static const std::array<std::string, kGroundSensors> areas{"Bridge", "Truck Depot", "Airfield", "West Bay"};
  return areas;
}

const std::vector<long>& altitude_values()
{
  static const std::vector<long> v{-60, -30, 0, 30, 60};
  return v;
}

const std::vector<Rational>& fp_values()
{
  static const std::vector<Rational> v = [] {
    std::vector<Rational> out;
    for (long k = 2; k <= 9; ++k) {
      out.emplace_back(k, 10);
      out.back().canonicalize();
    }
    return out;
  }();
  return v;
}

void validate(const ShipyardConfig& cfg)
{
  if (cfg.altitude_delta < -60 || cfg.altitude_delta > 60) {
    throw CaseStudyError("altitude deviation " + std::to_string(cfg.altitude_delta) + " outside [-60,60]");
  }
  if (!(cfg.false_positive_rate >= 0.2 && cfg.false_positive_rate <= 1.0)) {
    throw CaseStudyError("false positive rate outside [0.2,1]");
  }
  if (cfg.missions < 1) throw CaseStudyError("missions must be positive");
  if (!(cfg.intruder_probability >= 0.0 && cfg.intruder_probability <= 1.0)) {
    throw CaseStudyError("intruder probability outside [0,1]");
  }
}

GeneratedProgram generate_program(const ShipyardConfig& cfg, bool parametric)
{
  validate(cfg);
  ClampLog clamps;
  gcl::Program p;

  std::vector<Rational> eo_values;
  for (auto e : kEoOptions) eo_values.emplace_back(vertical_resolution(e));
  std::vector<Rational> alt_values;
  for (long a : altitude_values()) alt_values.emplace_back(a);
  const std::vector<Rational> grade_values{0, 1, 2};

  Dim eo{"", {Rational(vertical_resolution(cfg.eo))}};
  Dim alt{"", {Rational(cfg.altitude_delta)}};
  Dim fp{"", {decimal(cfg.false_positive_rate)}};
  std::array<Dim, kGroundSensors> roc;
  for (std::size_t i = 0; i < kGroundSensors; ++i) roc[i] = {"", {Rational(static_cast<long>(cfg.roc[i]))}};

  if (parametric) {
    eo = {"eo", eo_values};
    alt = {"alt", alt_values};
    p.parameters.push_back({"eo", eo_values, {}});
    p.parameters.push_back({"alt", alt_values, {}});
    if (cfg.uniform_grade) {
      p.parameters.push_back({"roc", grade_values, {}});
      for (auto& r : roc) r = {"roc", grade_values};
    } else {
      for (std::size_t i = 0; i < kGroundSensors; ++i) {
        const std::string name = "roc" + std::to_string(i + 1);
        p.parameters.push_back({name, grade_values, {}});
        roc[i] = {name, grade_values};
      }
    }
    fp = {"fp", fp_values()};
    p.parameters.push_back({"fp", fp_values(), {}});
  }

  const Expr fp_expr = table({fp}, [](const auto& v) { return v[0]; });
  const Expr pd = table({eo, alt}, [&](const auto& v) {
    return detection_probability_exact(eo_of(v[0]), v[1], cfg.form, &clamps);
  });

  const long K = cfg.missions;
  gcl::Module mod;
  mod.name = "shipyard";
  mod.variables.push_back({"m", 0, K, 0, {}});
  mod.variables.push_back({"ph", 0, 5, 0, {}});
  mod.variables.push_back({"site", 0, static_cast<std::int64_t>(kGroundSensors), 0, {}});
  const Expr m = gcl::ident("m");
  const Expr next_mission = gcl::binary(Op::Add, m, gcl::num(1));
  const std::vector<gcl::Update> finish{set("ph", gcl::num(0)), set("m", next_mission), set("site", gcl::num(0))};
  const Rational intruder = decimal(cfg.intruder_probability);
  const Rational share(1, static_cast<long>(kGroundSensors));

  std::vector<gcl::Branch> query;
  for (std::size_t i = 0; i < kGroundSensors; ++i) {
    const Expr s = gcl::num(static_cast<long>(i + 1));
    if (intruder != 0) query.push_back({gcl::num(intruder * share), {set("ph", gcl::num(1)), set("site", s)}});
    if (intruder != 1) query.push_back({gcl::num((1 - intruder) * share), {set("ph", gcl::num(2)), set("site", s)}});
  }
  mod.commands.push_back(command(gcl::conj({eq("ph", 0), gcl::binary(Op::Lt, m, gcl::num(K))}), query));
  for (std::size_t i = 0; i < kGroundSensors; ++i) {
    const Rational s(static_cast<long>(i + 1));
    const Expr pt = table({roc[i], fp}, [&](const auto& v) {
      return roc_true_positive_exact(grade_of(v[0]), v[1], cfg.form, &clamps);
    });
    mod.commands.push_back(command(gcl::conj({eq("ph", 1), eq("site", s)}),
                                   {{pt, {set("ph", gcl::num(3))}}, {one_minus(pt), {set("ph", gcl::num(5))}}}));
    mod.commands.push_back(
        command(gcl::conj({eq("ph", 2), eq("site", s)}), {{fp_expr, {set("ph", gcl::num(4))}}, {one_minus(fp_expr), finish}}));
  }
  mod.commands.push_back(command(eq("ph", 3), {{pd, finish}, {one_minus(pd), {set("ph", gcl::num(5))}}}));
  mod.commands.push_back(command(eq("ph", 4), {{gcl::num(1), finish}}));
  mod.commands.push_back(command(gcl::binary(Op::Or, eq("ph", 5), gcl::conj({eq("ph", 0), eq("m", K)})), {{gcl::num(1), {}}}));
  p.modules.push_back(std::move(mod));

  // One-time purchases are charged in the initial state.
  {
    std::vector<Dim> dims{eo};
    for (const auto& r : roc) dims.push_back(r);
    if (parametric && cfg.uniform_grade) dims.resize(2);
    const bool shared = parametric && cfg.uniform_grade;
    const Expr purchase = table(dims, [&](const auto& v) {
      Rational total = purchase_cost(eo_of(v[0]));
      for (std::size_t i = 0; i < kGroundSensors; ++i) {
        total += purchase_cost(grade_of(shared ? v[1] : v[1 + i]));
      }
      return total;
    });
    p.rewards.push_back({gcl::conj({eq("m", 0), eq("ph", 0)}), purchase, {}});
  }
  for (std::size_t i = 0; i < kGroundSensors; ++i) {
    const Rational s(static_cast<long>(i + 1));
    const auto& point = find_task(sensor_names()[i]);
    const Rational query_cost = Rational(5, 18) * decimal(point.d_g + point.d_g_back) / 15;
    p.rewards.push_back({gcl::conj({gcl::binary(Op::Or, eq("ph", 1), eq("ph", 2)), eq("site", s)}), gcl::num(query_cost), {}});
    const auto& area = find_task(sensor_areas()[i]);
    const Expr search = table({eo, alt}, [&](const auto& v) {
      return intruder_area_cost_exact(area, eo_of(v[0]), v[1], cfg.form);
    });
    p.rewards.push_back({gcl::conj({gcl::binary(Op::Or, eq("ph", 3), eq("ph", 4)), eq("site", s)}), search, {}});
  }
  p.labels.push_back({"failed", eq("ph", 5), {}});
  p.labels.push_back({"done", gcl::binary(Op::Or, eq("ph", 5), gcl::conj({eq("ph", 0), eq("m", K)})), {}});

  std::ostringstream out;
  out << "// Shipyard surveillance, simplified mission loop (" << K << " missions).\n"
      << "// Simplifications against the full scenario:\n"
      << "//   one UAV; each mission queries one ground sensor chosen uniformly;\n"
      << "//   an intruder is present at the queried sensor with probability " << to_string(intruder) << ";\n"
      << "//   alarms trigger the sensor's area search (Sensor 1: Bridge, Sensor 2: Truck Depot,\n"
      << "//   Sensor 3: Airfield, Bay Sensor Network: West Bay); no other surveillance tasks;\n"
      << "//   a missed intruder (no alarm) or a failed recognition ends the run in ph = 5.\n"
      << "// ph: 0 mission start, 1 intruder present, 2 no intruder, 3 search for intruder,\n"
      << "//     4 search after false alarm, 5 recognition failure.\n"
      << "// Costs: purchases in the initial state, sensor query flights, intruder area searches.\n"
      << "// Encodings: eo is the vertical resolution, roc 0/1/2 is low/mid/high.\n";
  if (clamps.events != 0) out << "// Approximations clamped into [0,1]: " << clamps.events << "\n";
  out << "\n" << gcl::pretty_print(p);

  GeneratedProgram g;
  g.text = out.str();
  g.program = std::move(p);
  g.clamped = clamps.events;
  return g;
}

std::uint64_t parameter_space_size(const gcl::Program& p)
{
  std::uint64_t size = 1;
  for (const auto& d : p.parameters) size *= d.values.size();
  return size;
}

std::vector<SweepRow> sweep(const ShipyardConfig& cfg, long max_missions)
{
  if (max_missions < 1) throw CaseStudyError("missions must be positive");
  const auto failure = mc::parse_property("P=? [F \"failed\"]");
  const auto cost = mc::parse_property("EC=? [F \"done\"]");
  std::vector<SweepRow> rows;
  for (long k = 1; k <= max_missions; ++k) {
    ShipyardConfig c = cfg;
    c.missions = k;
    const ExplicitModel model = build_model(generate_program(c, false).program);
    rows.push_back({k, mc::check_spec(model, failure).value, mc::check_spec(model, cost).value});
  }
  return rows;
}

}  // namespace mimsynth::casestudy
