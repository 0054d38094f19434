#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>

namespace rsg {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// Formats q as "num/den" ("num" alone when the denominator is 1).
std::string rational_to_string(const Rational& q);

/// Parses "num/den" or a plain integer. Returns nullopt on malformed input,
/// a zero or negative denominator, or embedded whitespace.
std::optional<Rational> parse_rational(const std::string& text);

}  // namespace rsg
