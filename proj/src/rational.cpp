#include "mimsynth/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace mimsynth {

namespace {

mpz_class pow10(unsigned long exponent)
{
  mpz_class result;
  mpz_ui_pow_ui(result.get_mpz_t(), 10, exponent);
  return result;
}

}  // namespace

Rational parse_decimal(std::string_view text)
{
  std::size_t i = 0;
  std::string digits;
  long fraction_digits = 0;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    digits.push_back(text[i++]);
  }
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      digits.push_back(text[i++]);
      ++fraction_digits;
    }
  }
  if (digits.empty()) {
    throw std::invalid_argument("malformed decimal literal '" + std::string(text) + "'");
  }
  long exponent = 0;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      negative = text[i] == '-';
      ++i;
    }
    std::string exp_digits;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      exp_digits.push_back(text[i++]);
    }
    if (exp_digits.empty() || exp_digits.size() > 6) {
      throw std::invalid_argument("malformed exponent in '" + std::string(text) + "'");
    }
    exponent = std::stol(exp_digits);
    if (negative) exponent = -exponent;
  }
  if (i != text.size()) {
    throw std::invalid_argument("malformed decimal literal '" + std::string(text) + "'");
  }

  Rational value{mpz_class(digits, 10)};
  const long shift = exponent - fraction_digits;
  if (shift > 0) {
    value *= Rational(pow10(static_cast<unsigned long>(shift)));
  } else if (shift < 0) {
    value /= Rational(pow10(static_cast<unsigned long>(-shift)));
  }
  value.canonicalize();
  return value;
}

bool is_terminating_decimal(const Rational& value)
{
  mpz_class den = value.get_den();
  while (mpz_divisible_ui_p(den.get_mpz_t(), 2) != 0) den /= 2;
  while (mpz_divisible_ui_p(den.get_mpz_t(), 5) != 0) den /= 5;
  return den == 1;
}

std::string to_string(const Rational& value)
{
  if (!is_terminating_decimal(value)) {
    return value.get_str();
  }
  const mpz_class& den = value.get_den();
  if (den == 1) {
    return value.get_num().get_str();
  }
  // Smallest k with den | 10^k.
  unsigned long k = 0;
  mpz_class scale = 1;
  while (mpz_divisible_p(scale.get_mpz_t(), den.get_mpz_t()) == 0) {
    scale *= 10;
    ++k;
  }
  mpz_class scaled = value.get_num() * (scale / den);
  const bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string digits = scaled.get_str();
  if (digits.size() <= k) {
    digits.insert(0, k + 1 - digits.size(), '0');
  }
  digits.insert(digits.size() - k, ".");
  return negative ? "-" + digits : digits;
}

double to_double(const Rational& value) { return value.get_d(); }

}  // namespace mimsynth
