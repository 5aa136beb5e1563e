#include "tropot/rational.hpp"

#include <cctype>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tropot {

using boost::multiprecision::mpz_int;

Rational exact_rational(double value) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("cannot convert a non-finite double to a rational");
  }
  return Rational(value);
}

Rational rationalize(double value, std::int64_t max_denominator) {
  if (max_denominator < 1) {
    throw std::invalid_argument("max_denominator must be positive");
  }
  const Rational exact = exact_rational(value);
  const mpz_int limit(max_denominator);
  if (denominator(exact) <= limit) {
    return exact;
  }

  const bool negative = exact < 0;
  const Rational target = negative ? Rational(-exact) : exact;
  mpz_int num = numerator(target);
  mpz_int den = denominator(target);

  mpz_int p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  while (true) {
    const mpz_int a = num / den;
    const mpz_int q2 = q0 + a * q1;
    if (q2 > limit) {
      break;
    }
    const mpz_int p2 = p0 + a * p1;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const mpz_int rem = num - a * den;
    num = den;
    den = rem;
    if (den == 0) {
      break;
    }
  }
  const mpz_int k = (limit - q0) / q1;
  const Rational semi(mpz_int(p0 + k * p1), mpz_int(q0 + k * q1));
  const Rational convergent(p1, q1);
  const Rational d_semi = abs(Rational(semi - target));
  const Rational d_conv = abs(Rational(convergent - target));
  Rational best = d_conv <= d_semi ? convergent : semi;
  return negative ? Rational(-best) : best;
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

std::string to_string(const Rational& value) {
  if (denominator(value) == 1) {
    return numerator(value).str();
  }
  return numerator(value).str() + "/" + denominator(value).str();
}

std::optional<std::string> to_decimal(const Rational& value) {
  mpz_int den = denominator(value);
  unsigned twos = 0, fives = 0;
  while (den % 2 == 0) {
    den /= 2;
    ++twos;
  }
  while (den % 5 == 0) {
    den /= 5;
    ++fives;
  }
  if (den != 1) return std::nullopt;
  const unsigned digits = std::max(twos, fives);
  const mpz_int scaled = numerator(value) * boost::multiprecision::pow(mpz_int(10), digits) /
                         denominator(value);
  const bool negative = scaled < 0;
  std::string text = (negative ? mpz_int(-scaled) : scaled).str();
  if (digits > 0) {
    if (text.size() <= digits) text.insert(0, digits + 1 - text.size(), '0');
    text.insert(text.size() - digits, ".");
    while (text.back() == '0') text.pop_back();
    if (text.back() == '.') text.pop_back();
  }
  return negative ? "-" + text : text;
}

namespace {

mpz_int parse_integer(std::string_view digits, std::string_view original) {
  if (digits.empty()) {
    throw std::invalid_argument("malformed rational: '" + std::string(original) + "'");
  }
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw std::invalid_argument("malformed rational: '" + std::string(original) + "'");
    }
  }
  // A leading zero would select octal.
  const auto first = std::min(digits.find_first_not_of('0'), digits.size() - 1);
  return mpz_int(std::string(digits.substr(first)));
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view original = text;
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
    text.remove_prefix(1);
  }
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
    text.remove_suffix(1);
  }
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }

  Rational result;
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const mpz_int num = parse_integer(text.substr(0, slash), original);
    const mpz_int den = parse_integer(text.substr(slash + 1), original);
    if (den == 0) {
      throw std::invalid_argument("zero denominator in '" + std::string(original) + "'");
    }
    result = Rational(num, den);
  } else {
    std::string_view mantissa = text;
    long exponent = 0;
    if (const auto e = text.find_first_of("eE"); e != std::string_view::npos) {
      mantissa = text.substr(0, e);
      std::string_view exp_text = text.substr(e + 1);
      bool exp_negative = false;
      if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
        exp_negative = exp_text.front() == '-';
        exp_text.remove_prefix(1);
      }
      const mpz_int exp_value = parse_integer(exp_text, original);
      if (exp_value > 4000) {
        throw std::invalid_argument("exponent out of range in '" + std::string(original) + "'");
      }
      exponent = exp_value.convert_to<long>();
      if (exp_negative) {
        exponent = -exponent;
      }
    }
    std::string digits;
    long fraction_digits = 0;
    if (const auto dot = mantissa.find('.'); dot != std::string_view::npos) {
      digits = std::string(mantissa.substr(0, dot));
      const std::string_view frac = mantissa.substr(dot + 1);
      digits += frac;
      fraction_digits = static_cast<long>(frac.size());
      if (digits.empty()) {
        throw std::invalid_argument("malformed rational: '" + std::string(original) + "'");
      }
    } else {
      digits = std::string(mantissa);
    }
    result = Rational(parse_integer(digits, original));
    const long shift = exponent - fraction_digits;
    const mpz_int power = boost::multiprecision::pow(mpz_int(10), static_cast<unsigned>(shift < 0 ? -shift : shift));
    if (shift < 0) {
      result /= Rational(power);
    } else {
      result *= Rational(power);
    }
  }
  return negative ? Rational(-result) : result;
}

}  // namespace tropot
