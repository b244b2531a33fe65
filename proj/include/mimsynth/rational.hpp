#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace mimsynth {

/// Exact rational used for every literal, parameter value and probability
/// until a numeric solver converts to double.
using Rational = mpq_class;

/// Parses an unsigned decimal literal such as "12", "0.4" or "2.5e-3" exactly.
/// Throws std::invalid_argument on malformed input.
Rational parse_decimal(std::string_view text);

/// True when the value has a finite decimal expansion (denominator 2^a 5^b).
bool is_terminating_decimal(const Rational& value);

/// Exact decimal rendering for terminating values ("-0.25", "3"), otherwise "n/d".
std::string to_string(const Rational& value);

double to_double(const Rational& value);

}  // namespace mimsynth
