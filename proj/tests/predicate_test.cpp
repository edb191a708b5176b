#include <doctest.h>

#include "popgame/errors.hpp"
#include "popgame/predicate.hpp"

using namespace popgame;

namespace {

bool eval(const char *text, std::uint32_t n0, std::uint32_t n1) {
  return eval_predicate(parse_predicate(text), {{"0", n0}, {"1", n1}});
}

} // namespace

TEST_CASE("threshold atoms") {
  CHECK(eval("n_1 >= 1", 3, 1));
  CHECK_FALSE(eval("n_1 >= 1", 3, 0));
  CHECK(eval("n_0 >= n_1", 2, 2));
  CHECK_FALSE(eval("n_0 > n_1", 2, 2));
  CHECK(eval("n_0 = 0", 0, 4));
  CHECK(eval("n_0 == 0", 0, 4));
  CHECK(eval("2*n_0 - 3*n_1 + 1 <= 0", 1, 1));
  CHECK_FALSE(eval("2*n_0 - 3*n_1 + 1 < 0", 1, 1));
  CHECK(eval("-n_0 <= -2", 2, 0));
  CHECK(eval("n_0 + n_1 = 5", 2, 3));
}

TEST_CASE("congruence atoms") {
  CHECK(eval("n_1 mod 2 = 1", 0, 3));
  CHECK_FALSE(eval("n_1 mod 2 = 1", 0, 4));
  CHECK(eval("n_0 - n_1 mod 3 = 2", 0, 1));
  CHECK(eval("n_1 mod 2 = -1", 0, 1));
}

TEST_CASE("boolean structure and precedence") {
  CHECK(eval("n_0 = 1 || n_1 = 1 && n_0 = 5", 1, 0));
  CHECK_FALSE(eval("(n_0 = 1 || n_1 = 1) && n_0 = 5", 1, 0));
  CHECK(eval("!(n_1 >= 1)", 3, 0));
  CHECK(eval("!!(n_1 >= 1)", 3, 1));
}

TEST_CASE("symbols collects every count") {
  const auto syms = symbols(parse_predicate("n_a + 2*n_b >= 3 && n_c mod 2 = 0"));
  CHECK(syms == std::set<std::string, std::less<>>{"a", "b", "c"});
  // Cancelled terms vanish.
  CHECK(symbols(parse_predicate("n_a >= n_a")).empty());
}

TEST_CASE("unbound symbols are reported") {
  CHECK_THROWS_AS(eval_predicate(parse_predicate("n_x >= 1"), {{"0", 1}}), std::out_of_range);
}

TEST_CASE("parse errors carry columns") {
  auto column_of = [](const char *text) -> std::size_t {
    try {
      parse_predicate(text);
    } catch (const ParseError &e) {
      return e.column();
    }
    return 0;
  };
  CHECK(column_of("n_1 >= ") == 8);
  CHECK(column_of("n_1 ? 1") == 5);
  CHECK(column_of("x >= 1") == 1);
  CHECK(column_of("(n_1 >= 1") == 10);
  CHECK(column_of("n_1 mod 1 = 0") == 9);
  CHECK(column_of("n_1 >= 1 )") == 10);
}

TEST_CASE("canonical text parses back to an equivalent predicate") {
  const char *cases[] = {
      "n_1 >= 1", "n_0 = 0", "n_0 >= n_1", "n_1 mod 2 = 1", "!(n_0 < 2) && (n_1 > 0 || n_0 - n_1 mod 3 = 1)",
      "3*n_0 - 2 <= n_1",
  };
  for (const char *text : cases) {
    CAPTURE(text);
    const PredicateExpr e = parse_predicate(text);
    const std::string canon = to_string(e);
    CHECK(to_string(parse_predicate(canon)) == canon);
    for (std::uint32_t a = 0; a < 6; ++a) {
      for (std::uint32_t b = 0; b < 6; ++b) {
        const InputCounts counts{{"0", a}, {"1", b}};
        CHECK(eval_predicate(e, counts) == eval_predicate(parse_predicate(canon), counts));
      }
    }
  }
}
