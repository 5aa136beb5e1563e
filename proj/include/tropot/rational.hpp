#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>

namespace tropot {

/// Exact rational scalar used for every tie-sensitive computation.
using Rational = boost::multiprecision::mpq_rational;

/// Best rational approximation of `value` with denominator at most
/// `max_denominator` (continued-fraction convergents, then the best
/// semiconvergent). Throws std::invalid_argument on non-finite input.
Rational rationalize(double value, std::int64_t max_denominator = 1'000'000);

/// Exact conversion of a finite double (every double is a dyadic rational).
Rational exact_rational(double value);

double to_double(const Rational& value);

/// "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& value);

/// Exact decimal expansion ("-0.125"), or nullopt when it does not terminate.
std::optional<std::string> to_decimal(const Rational& value);

/// Accepts "p", "p/q", and decimal literals such as "-0.125" or "1e-3"
/// (decimals are converted exactly, not through a double).
Rational parse_rational(std::string_view text);

}  // namespace tropot
