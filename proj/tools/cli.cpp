#include "cli.hpp"

#include "mimsynth/casestudy/shipyard.hpp"
#include "mimsynth/gcl/check.hpp"
#include "mimsynth/gcl/parser.hpp"
#include "mimsynth/gcl/printer.hpp"
#include "mimsynth/mc/analysis.hpp"
#include "mimsynth/mc/property.hpp"
#include "mimsynth/semantics/build.hpp"
#include "mimsynth/semantics/compose.hpp"
#include "mimsynth/synth/nilp.hpp"
#include "mimsynth/synth/synth.hpp"
#include "mimsynth/transform/transform.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace mimsynth::cli {

namespace {

using nlohmann::ordered_json;
namespace cs = casestudy;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fixed 9 significant digits; non-finite values become strings.
ordered_json number(double v)
{
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return std::strtod(buf, nullptr);
}

std::string csv_number(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

gcl::Program load(const std::string& path) { return gcl::parse_program(read_file(path)); }

ParameterValuation parse_valuation(const std::string& text)
{
  ParameterValuation u;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("valuation item '" + item + "' is not name=value");
    std::string value = item.substr(eq + 1);
    const bool negative = !value.empty() && value[0] == '-';
    Rational v = parse_decimal(negative ? value.substr(1) : value);
    u[item.substr(0, eq)] = negative ? Rational(-v) : v;
  }
  return u;
}

ordered_json valuation_json(const ParameterValuation& u, const std::vector<gcl::ParameterDecl>& order)
{
  ordered_json out = ordered_json::object();
  for (const auto& d : order) {
    if (auto it = u.find(d.name); it != u.end()) out[d.name] = number(to_double(it->second));
  }
  return out;
}

std::size_t env_size(const char* name, std::size_t fallback)
{
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return fallback;
  try {
    return static_cast<std::size_t>(std::stoull(v));
  } catch (const std::exception&) {
    throw UsageError(std::string("environment variable ") + name + " is not a count");
  }
}

double env_double(const char* name, double fallback)
{
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return fallback;
  try {
    return std::stod(v);
  } catch (const std::exception&) {
    throw UsageError(std::string("environment variable ") + name + " is not a number");
  }
}

void emit(std::ostream& out, const ordered_json& j) { out << j.dump(2) << "\n"; }

void write_output(const std::string& path, const std::string& text, std::ostream& out)
{
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw UsageError("cannot write '" + path + "'");
  file << text;
}

synth::SynthesisQuery query_from(const std::string& phi, const std::string& goal)
{
  const mc::Property p = mc::parse_property(phi);
  if (p.kind != mc::Property::Kind::Reach || !p.bound) {
    throw UsageError("--phi must be a bounded reachability property such as 'P<=0.2 [F \"t\"]'");
  }
  synth::SynthesisQuery q;
  q.target = p.label;
  q.lambda = *p.bound;
  q.goal = goal;
  return q;
}

ordered_json result_json(const synth::SynthesisResult& r, const gcl::Program& p)
{
  ordered_json j;
  j["feasible"] = r.feasible;
  if (r.feasible) {
    j["valuation"] = valuation_json(r.valuation, p.parameters);
    j["expected_cost"] = number(r.expected_cost);
    j["reach_probability"] = number(r.reach_probability);
  }
  if (!r.uncommitted.empty()) j["uncommitted"] = r.uncommitted;
  return j;
}

struct ShipyardFlags {
  std::string eo = "1080p";
  long alt = 0;
  std::string roc = "high";
  double fp = 0.2;
  long missions = 3;
  std::string form = "quadratic";
  double intruder = 0.25;
  bool free_grades = false;

  void attach(CLI::App* app)
  {
    app->add_option("--eo", eo, "EO sensor: 480p, 720p or 1080p")->capture_default_str();
    app->add_option("--alt", alt, "altitude deviation in meters, within [-60,60]")->capture_default_str();
    app->add_option("--roc", roc, "ground sensor grade, or four comma-separated grades")->capture_default_str();
    app->add_option("--fp", fp, "false positive rate in [0.2,1]")->capture_default_str();
    app->add_option("--form", form, "approximation form: linear or quadratic")->capture_default_str();
    app->add_option("--intruder", intruder, "intruder probability per mission")->capture_default_str();
    app->add_flag("--free-grades", free_grades, "one grade parameter per ground sensor");
  }

  cs::ShipyardConfig config() const
  {
    cs::ShipyardConfig c;
    c.eo = cs::parse_eo(eo);
    c.altitude_delta = alt;
    std::vector<std::string> grades;
    std::stringstream in(roc);
    for (std::string g; std::getline(in, g, ',');) grades.push_back(g);
    if (grades.size() == 1) grades.assign(cs::kGroundSensors, grades[0]);
    if (grades.size() != cs::kGroundSensors) throw UsageError("--roc needs one grade or four grades");
    for (std::size_t i = 0; i < cs::kGroundSensors; ++i) c.roc[i] = cs::parse_grade(grades[i]);
    c.uniform_grade = !free_grades;
    c.false_positive_rate = fp;
    c.missions = missions;
    if (form == "linear") {
      c.form = cs::Form::Linear;
    } else if (form == "quadratic") {
      c.form = cs::Form::Quadratic;
    } else {
      throw UsageError("--form must be linear or quadratic");
    }
    c.intruder_probability = intruder;
    return c;
  }
};

long parse_mission_range(const std::string& text)
{
  std::string upper = text;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    if (text.substr(0, dots) != "1") throw UsageError("--missions ranges start at 1");
    upper = text.substr(dots + 2);
  }
  try {
    std::size_t used = 0;
    const long k = std::stol(upper, &used);
    if (used != upper.size() || k < 1) throw UsageError("");
    return k;
  } catch (const std::exception&) {
    throw UsageError("--missions must be K or 1..K with K >= 1");
  }
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Time to compute Pmax of reaching the target in every concrete instance of m.
double time_reachability(const ExplicitModel& m, const std::string& target)
{
  const auto start = std::chrono::steady_clock::now();
  if (m.kind == ModelKind::MIMDP) {
    for (const auto& u : well_defined_valuations(m)) {
      const ExplicitModel inst = instantiate(m, u);
      (void)mc::reach_prob(inst, inst.label(target), mc::Direction::Max);
    }
  } else {
    (void)mc::reach_prob(m, m.label(target), mc::Direction::Max);
  }
  return seconds_since(start);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Valuation and strategy synthesis for multiple-instance MDPs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mimsynth 1.0");

  std::size_t state_cap = 0;
  double tolerance = 0;
  app.add_option("--state-cap", state_cap, "state-space cap (env MIMSYNTH_STATE_CAP)");
  app.add_option("--tolerance", tolerance, "agreement tolerance for --method both (env MIMSYNTH_TOLERANCE)")
      ->check(CLI::PositiveNumber);

  std::string input;
  std::string format = "json";
  std::string valuation;
  std::string output;

  auto* parse_cmd = app.add_subcommand("parse", "parse and check a program");
  parse_cmd->add_option("file", input, "program (.mgcl)")->required();
  parse_cmd->add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));

  auto* build_cmd = app.add_subcommand("build", "build the explicit model");
  build_cmd->add_option("file", input, "program (.mgcl)")->required();
  build_cmd->add_option("--valuation", valuation, "name=value,...");
  build_cmd->add_option("--format", format, "json, dot or text")->check(CLI::IsMember({"json", "dot", "text"}));

  std::string stage = "all";
  std::string report_path;
  auto* transform_cmd = app.add_subcommand("transform", "rewrite a parametric program into an MDP program");
  transform_cmd->add_option("file", input, "program (.mgcl)")->required();
  transform_cmd->add_option("--stage", stage, "rewards, probs, control or all; control implies all")
      ->check(CLI::IsMember({"rewards", "probs", "control", "all"}));
  transform_cmd->add_option("--report", report_path, "write the JSON report here");
  transform_cmd->add_option("-o,--output", output, "write the program here");

  std::string prop;
  bool existential = false;
  auto* check_cmd = app.add_subcommand("check", "model check one property");
  check_cmd->add_option("file", input, "program (.mgcl)")->required();
  check_cmd->add_option("--prop", prop, "property text")->required();
  check_cmd->add_option("--valuation", valuation, "name=value,...");
  check_cmd->add_flag("--existential", existential, "check probability bounds against the minimum");

  std::string phi;
  std::string goal;
  std::string method = "both";
  std::size_t workers = 1;
  bool with_table = false;
  auto* synth_cmd = app.add_subcommand("synthesize", "cheapest valuation and strategy under a reachability bound");
  synth_cmd->add_option("file", input, "program (.mgcl)")->required();
  synth_cmd->add_option("--phi", phi, "bound such as 'P<=0.2 [F \"t\"]'")->required();
  synth_cmd->add_option("--goal", goal, "goal label of the expected cost")->required();
  synth_cmd->add_option("--method", method, "enum, transformed or both")
      ->check(CLI::IsMember({"enum", "transformed", "both"}));
  synth_cmd->add_option("--workers", workers, "parallel valuation solves")->check(CLI::PositiveNumber);
  synth_cmd->add_flag("--table", with_table, "include the per-valuation table");

  auto* nilp_cmd = app.add_subcommand("emit-nilp", "write the nonlinear integer program");
  nilp_cmd->add_option("file", input, "program (.mgcl)")->required();
  nilp_cmd->add_option("--phi", phi, "bound such as 'P<=0.2 [F \"t\"]'")->required();
  nilp_cmd->add_option("--goal", goal, "goal label")->required();
  nilp_cmd->add_option("-o,--output", output, "write the program here and print statistics");

  auto* case_cmd = app.add_subcommand("casestudy", "shipyard surveillance model");
  case_cmd->require_subcommand(1);
  ShipyardFlags shipyard;
  bool parametric = false;
  auto* gen_cmd = case_cmd->add_subcommand("generate", "emit the shipyard program");
  shipyard.attach(gen_cmd);
  gen_cmd->add_option("--missions", shipyard.missions, "missions flown")->capture_default_str();
  gen_cmd->add_flag("--parametric", parametric, "configuration choices become parameters");
  gen_cmd->add_option("-o,--output", output, "write the program here");
  std::string missions_range = "1..10";
  auto* sweep_cmd = case_cmd->add_subcommand("sweep", "failure probability and cost per mission count (CSV)");
  shipyard.attach(sweep_cmd);
  sweep_cmd->add_option("--missions", missions_range, "K or 1..K")->capture_default_str();

  std::string bench_dir;
  std::string bench_target;
  bool no_timing = false;
  auto* bench_cmd = app.add_subcommand("bench", "sizes and checking times per program (CSV)");
  bench_cmd->add_option("dir", bench_dir, "directory of .mgcl programs")->required()->check(CLI::ExistingDirectory);
  bench_cmd->add_option("--target", bench_target, "label to check; default the first label");
  bench_cmd->add_flag("--no-timing", no_timing, "print 0 for mc_seconds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    BuildOptions build_options;
    build_options.state_cap = state_cap != 0 ? state_cap : env_size("MIMSYNTH_STATE_CAP", build_options.state_cap);
    const double agree_tolerance = tolerance > 0 ? tolerance : env_double("MIMSYNTH_TOLERANCE", 1e-6);
    if (!(agree_tolerance > 0)) throw UsageError("tolerance must be positive");

    if (*parse_cmd) {
      const gcl::Program p = load(input);
      if (const auto diagnostics = gcl::check_program(p); !diagnostics.empty()) {
        err << gcl::format_diagnostics(diagnostics);
        return kExitUsage;
      }
      if (format == "text") {
        out << gcl::pretty_print(p);
        return kExitOk;
      }
      ordered_json j;
      j["schema"] = 1;
      j["parameters"] = ordered_json::array();
      for (const auto& d : p.parameters) {
        ordered_json values = ordered_json::array();
        for (const auto& v : d.values) values.push_back(number(to_double(v)));
        j["parameters"].push_back({{"name", d.name}, {"values", values}});
      }
      j["modules"] = ordered_json::array();
      std::size_t commands = 0;
      for (const auto& m : p.modules) {
        j["modules"].push_back(m.name);
        commands += m.commands.size();
      }
      j["commands"] = commands;
      j["rewards"] = p.rewards.size();
      j["labels"] = ordered_json::array();
      for (const auto& l : p.labels) j["labels"].push_back(l.name);
      j["valuations"] = all_valuations(p.parameters).size();
      emit(out, j);
      return kExitOk;
    }

    if (*build_cmd) {
      const gcl::Program p = load(input);
      std::optional<ParameterValuation> u;
      if (!valuation.empty()) u = parse_valuation(valuation);
      const ExplicitModel m = build_model(p, u, build_options);
      if (format == "dot") {
        out << to_dot(m);
        return kExitOk;
      }
      if (format == "text") {
        out << kind_name(m.kind) << ": " << m.num_states() << " states, " << m.num_choices() << " choices, "
            << m.num_transitions() << " transitions\n";
        return kExitOk;
      }
      ordered_json j;
      j["schema"] = 1;
      j["kind"] = kind_name(m.kind);
      j["states"] = m.num_states();
      j["choices"] = m.num_choices();
      j["transitions"] = m.num_transitions();
      j["initial"] = m.state_text(m.initial);
      ordered_json labels = ordered_json::object();
      for (const auto& [name, bits] : m.labels) labels[name] = std::count(bits.begin(), bits.end(), true);
      j["labels"] = labels;
      emit(out, j);
      return kExitOk;
    }

    if (*transform_cmd) {
      const gcl::Program p = load(input);
      std::pair<gcl::Program, TransformReport> result;
      if (stage == "rewards") {
        result = transform_rewards(compose(p));
      } else if (stage == "probs") {
        result = transform_probabilities(compose(p));
      } else {
        result = transform_all(p);
      }
      const auto& [program, report] = result;
      write_output(output, gcl::pretty_print(program), out);
      if (!report_path.empty()) {
        ordered_json j;
        j["schema"] = 1;
        j["stage"] = stage;
        j["fresh_variables"] = ordered_json::array();
        for (const auto& v : report.fresh_variables) {
          j["fresh_variables"].push_back({{"name", v.name}, {"lo", v.lo}, {"hi", v.hi}});
        }
        j["fresh_actions"] = ordered_json::array();
        for (const auto& a : report.fresh_actions) {
          j["fresh_actions"].push_back({{"name", a.name}, {"commits", valuation_json(a.commits, p.parameters)}});
        }
        j["command_mapping"] = ordered_json::array();
        for (const auto& [from, to] : report.command_mapping) j["command_mapping"].push_back({{"command", from}, {"produced", to}});
        j["control_variables"] = ordered_json::array();
        for (const auto& [key, name] : report.control_variables) {
          j["control_variables"].push_back({{"parameter", key.first}, {"value_index", key.second}, {"variable", name}});
        }
        std::ofstream file(report_path, std::ios::binary);
        if (!file) throw UsageError("cannot write '" + report_path + "'");
        file << j.dump(2) << "\n";
      }
      return kExitOk;
    }

    if (*check_cmd) {
      const gcl::Program p = load(input);
      const mc::Property property = mc::parse_property(prop);
      std::optional<ParameterValuation> u;
      if (!valuation.empty()) u = parse_valuation(valuation);
      const ExplicitModel m = build_model(p, u, build_options);
      if (m.kind == ModelKind::MIMDP) throw UsageError("the program is parametric; pass --valuation");
      const mc::CheckResult r = mc::check_spec(m, property, existential);
      ordered_json j;
      j["schema"] = 1;
      j["property"] = prop;
      j["value"] = number(r.value);
      if (r.satisfied) j["satisfied"] = *r.satisfied;
      emit(out, j);
      return r.satisfied.value_or(true) ? kExitOk : kExitViolation;
    }

    if (*synth_cmd) {
      const gcl::Program p = load(input);
      synth::SynthesisQuery q = query_from(phi, goal);
      q.workers = workers;
      ordered_json j;
      j["schema"] = 1;
      j["method"] = method;
      j["target"] = q.target;
      j["lambda"] = number(q.lambda);
      j["goal"] = q.goal;
      std::optional<synth::SynthesisResult> enumerated;
      std::optional<synth::SynthesisResult> transformed;
      if (method != "transformed") enumerated = synth::synthesize_enumerate(p, q);
      if (method != "enum") transformed = synth::synthesize_transformed(p, q);
      const synth::SynthesisResult& primary = enumerated ? *enumerated : *transformed;
      j.update(result_json(primary, p));
      bool agree = true;
      if (enumerated && transformed) {
        agree = synth::results_agree(*enumerated, *transformed, agree_tolerance);
        j["transformed"] = result_json(*transformed, p);
        j["transformed"]["search_nodes"] = transformed->search_nodes;
        j["agree"] = agree;
      }
      if (with_table && enumerated) {
        j["table"] = ordered_json::array();
        for (const auto& row : enumerated->table) {
          ordered_json r;
          r["valuation"] = valuation_json(row.valuation, p.parameters);
          r["well_defined"] = row.well_defined;
          r["feasible"] = row.feasible;
          if (row.feasible) {
            r["expected_cost"] = number(row.expected_cost);
            r["reach_probability"] = number(row.reach_probability);
          }
          if (!row.note.empty()) r["note"] = row.note;
          j["table"].push_back(r);
        }
      }
      emit(out, j);
      if (!agree) {
        err << "error: enumeration and transformed synthesis disagree\n";
        return kExitViolation;
      }
      return primary.feasible ? kExitOk : kExitViolation;
    }

    if (*nilp_cmd) {
      const gcl::Program p = load(input);
      const synth::SynthesisQuery q = query_from(phi, goal);
      std::ostringstream text;
      const synth::NilpStats stats = synth::emit_nilp(p, q, text);
      write_output(output, text.str(), out);
      if (!output.empty()) {
        ordered_json j;
        j["schema"] = 1;
        j["states"] = stats.states;
        j["actions"] = stats.actions;
        j["valuations"] = stats.valuations;
        j["rows"] = stats.rows;
        emit(out, j);
      }
      return kExitOk;
    }

    if (*gen_cmd) {
      const auto g = cs::generate_program(shipyard.config(), parametric);
      write_output(output, g.text, out);
      if (parametric) err << "parameter space: " << cs::parameter_space_size(g.program) << " valuations\n";
      return kExitOk;
    }

    if (*sweep_cmd) {
      const auto rows = cs::sweep(shipyard.config(), parse_mission_range(missions_range));
      out << "missions,failure_probability,expected_cost\n";
      for (const auto& r : rows) {
        out << r.missions << "," << csv_number(r.failure_probability) << "," << csv_number(r.expected_cost) << "\n";
      }
      return kExitOk;
    }

    if (*bench_cmd) {
      std::vector<std::filesystem::path> files;
      for (const auto& entry : std::filesystem::directory_iterator(bench_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".mgcl") files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      out << "model,variant,states,transitions,mc_seconds\n";
      for (const auto& file : files) {
        const gcl::Program p = load(file.string());
        if (p.labels.empty() && bench_target.empty()) throw UsageError(file.string() + " declares no label");
        const std::string target = bench_target.empty() ? p.labels.front().name : bench_target;
        const gcl::Program composed = compose(p);
        const gcl::Program intermediate = transform_probabilities(transform_rewards(composed).first).first;
        const std::pair<std::string, const gcl::Program*> variants[] = {
            {"parametric", &p}, {"transformed", &intermediate}, {"controlled", nullptr}};
        const gcl::Program controlled = transform_all(p).first;
        for (const auto& [name, program] : variants) {
          const ExplicitModel m = build_model(program != nullptr ? *program : controlled, std::nullopt, build_options);
          const double seconds = no_timing ? 0.0 : time_reachability(m, target);
          out << file.stem().string() << "," << name << "," << m.num_states() << "," << m.num_transitions() << ","
              << csv_number(seconds) << "\n";
        }
      }
      return kExitOk;
    }
  } catch (const gcl::ParseError& e) {
    err << gcl::format_diagnostics(e.diagnostics());
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace mimsynth::cli
