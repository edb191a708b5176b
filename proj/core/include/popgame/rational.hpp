#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace popgame {

using Rational = boost::rational<std::int64_t>;

/// Parses an integer ("-3"), a decimal ("2.75") or a fraction ("7/4").
/// Decimals are converted exactly by shifting powers of ten.
/// Throws std::invalid_argument on malformed text or overflow.
Rational parse_rational(std::string_view text);

/// Integers print without a denominator, everything else as "p/q".
std::string to_string(const Rational &value);

} // namespace popgame
