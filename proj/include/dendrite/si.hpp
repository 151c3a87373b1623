#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace dendrite::si {

/// Parses a number with an optional engineering suffix: p, n, u, m, k, meg
/// (case-insensitive; "meg" rather than "M" so mega cannot be confused with
/// milli).  Suffix scaling is applied by extending the decimal exponent, so
/// "22n" parses to exactly the double 22e-9.  Returns nullopt on malformed
/// input or trailing garbage.
std::optional<double> parse_value(std::string_view text);

/// Shortest decimal form that parses back to exactly the same double,
/// using a suffix when one gives an exact round-trip ("2180" -> "2.18k").
std::string format_value(double value);

/// Shortest round-trip plain decimal (no suffix).
std::string format_double(double value);

} // namespace dendrite::si
