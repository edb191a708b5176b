#include "popgame/rational.hpp"

#include <charconv>
#include <limits>
#include <stdexcept>

namespace popgame {

namespace {

std::int64_t parse_digits(std::string_view digits, std::string_view whole) {
  if (digits.empty() || digits.front() < '0' || digits.front() > '9') {
    throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
  }
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec == std::errc::result_out_of_range) {
    throw std::invalid_argument("rational out of range '" + std::string(whole) + "'");
  }
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
    throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
  }
  return value;
}

} // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view whole = text;
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  if (text.empty() || text.front() == '-' || text.front() == '+') {
    throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
  }

  Rational value;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const std::int64_t num = parse_digits(text.substr(0, slash), whole);
    const std::int64_t den = parse_digits(text.substr(slash + 1), whole);
    if (den == 0) {
      throw std::invalid_argument("zero denominator in '" + std::string(whole) + "'");
    }
    value = Rational(num, den);
  } else if (auto dot = text.find('.'); dot != std::string_view::npos) {
    const std::string_view int_part = text.substr(0, dot);
    const std::string_view frac_part = text.substr(dot + 1);
    if (frac_part.empty() || frac_part.size() > 18) {
      throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
    }
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i) {
      scale *= 10;
    }
    const std::int64_t ip = int_part.empty() ? 0 : parse_digits(int_part, whole);
    const std::int64_t fp = parse_digits(frac_part, whole);
    if (ip > (std::numeric_limits<std::int64_t>::max() - fp) / scale) {
      throw std::invalid_argument("rational out of range '" + std::string(whole) + "'");
    }
    value = Rational(ip * scale + fp, scale);
  } else {
    value = Rational(parse_digits(text, whole));
  }
  return negative ? -value : value;
}

std::string to_string(const Rational &value) {
  if (value.denominator() == 1) {
    return std::to_string(value.numerator());
  }
  return std::to_string(value.numerator()) + "/" + std::to_string(value.denominator());
}

} // namespace popgame
