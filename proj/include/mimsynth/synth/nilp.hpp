#pragma once

#include "mimsynth/gcl/ast.hpp"
#include "mimsynth/synth/lp.hpp"
#include "mimsynth/synth/synth.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace mimsynth::synth {

struct NilpTerm {
  double coefficient = 0.0;
  std::vector<std::string> factors;  // product of variables; empty for a constant
};

struct NilpRow {
  std::string name;
  std::vector<NilpTerm> terms;
  Sense sense = Sense::Eq;
  double rhs = 0.0;
};

struct NilpBound {
  std::string variable;
  double lower = 0.0;
  double upper = 0.0;  // +inf when absent
};

struct NilpModel {
  std::vector<NilpTerm> objective;
  std::vector<NilpRow> rows;
  std::vector<NilpBound> bounds;
  std::vector<std::string> binaries;
};

struct NilpStats {
  std::size_t states = 0;
  std::size_t actions = 0;  // distinct action labels
  std::size_t valuations = 0;
  std::size_t rows = 0;
};

/// Writes the nonlinear integer program for the query. States of T and G keep only
/// their fixed p and c rows; the cost recursion uses the successors' c variables.
NilpStats emit_nilp(const gcl::Program& p, const SynthesisQuery& q, std::ostream& sink);

/// Reads the text written by emit_nilp; throws std::invalid_argument with a line number.
NilpModel parse_nilp(std::istream& in);

/// Largest violation over rows, bounds and integrality. Throws on unassigned variables.
double max_violation(const NilpModel& model, const std::map<std::string, double>& assignment);

/// Values of p, c, sig and x induced by an enumeration result on its instantiated model.
std::map<std::string, double> nilp_assignment(const gcl::Program& p, const SynthesisQuery& q,
                                              const SynthesisResult& enumerated);

}  // namespace mimsynth::synth
