#include "popgame/predicate.hpp"

#include <cctype>
#include <charconv>
#include <stdexcept>
#include <vector>

#include "popgame/errors.hpp"

namespace popgame {


namespace {

enum class Tok { Int, Var, Mod, Plus, Minus, Star, LParen, RParen, Not, And, Or, Cmp, End };

struct Token {
  Tok kind;
  std::size_t column;  // 1-based
  std::string text;
  std::int64_t value = 0;
  Comparison cmp = Comparison::Equal;
};

bool symbol_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto error = [&](const std::string &msg) { throw ParseError(msg, 0, i + 1); };
  while (i < s.size()) {
    const char c = s[i];
    const std::size_t col = i + 1;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    auto two = s.substr(i, 2);
    if (two == "&&") {
      out.push_back({Tok::And, col, "&&"});
      i += 2;
    } else if (two == "||") {
      out.push_back({Tok::Or, col, "||"});
      i += 2;
    } else if (two == "<=" || two == ">=" || two == "==") {
      Token t{Tok::Cmp, col, std::string(two)};
      t.cmp = two == "<=" ? Comparison::LessEqual : two == ">=" ? Comparison::GreaterEqual : Comparison::Equal;
      out.push_back(t);
      i += 2;
    } else if (c == '<' || c == '>' || c == '=') {
      Token t{Tok::Cmp, col, std::string(1, c)};
      t.cmp = c == '<' ? Comparison::Less : c == '>' ? Comparison::Greater : Comparison::Equal;
      out.push_back(t);
      ++i;
    } else if (c == '!') {
      out.push_back({Tok::Not, col, "!"});
      ++i;
    } else if (c == '(' || c == ')' || c == '+' || c == '-' || c == '*') {
      const Tok kind = c == '(' ? Tok::LParen : c == ')' ? Tok::RParen : c == '+' ? Tok::Plus
                       : c == '-' ? Tok::Minus : Tok::Star;
      out.push_back({kind, col, std::string(1, c)});
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
        ++j;
      }
      Token t{Tok::Int, col, std::string(s.substr(i, j - i))};
      auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + j, t.value);
      if (ec != std::errc{}) {
        error("integer literal out of range");
      }
      out.push_back(t);
      i = j;
    } else if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && symbol_char(s[j])) {
        ++j;
      }
      const std::string word(s.substr(i, j - i));
      if (word == "mod") {
        out.push_back({Tok::Mod, col, word});
      } else if (word.size() > 2 && word.starts_with("n_")) {
        out.push_back({Tok::Var, col, word.substr(2)});
      } else {
        error("unknown identifier '" + word + "' (counts are written n_<symbol>)");
      }
      i = j;
    } else {
      error(std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::End, s.size() + 1, ""});
  return out;
}

class Parser {
public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  PredicateExpr parse() {
    PredicateExpr expr = disjunction();
    if (peek().kind != Tok::End) {
      fail("unexpected '" + peek().text + "'");
    }
    return expr;
  }

private:
  const Token &peek() const { return tokens_[pos_]; }
  const Token &take() { return tokens_[pos_++]; }
  [[noreturn]] void fail(const std::string &msg) const { throw ParseError(msg, 0, peek().column); }
  void expect(Tok kind, const char *what) {
    if (peek().kind != kind) {
      fail(std::string("expected ") + what);
    }
    ++pos_;
  }

  PredicateExpr disjunction() {
    PredicateExpr lhs = conjunction();
    while (peek().kind == Tok::Or) {
      ++pos_;
      lhs = PredicateExpr(PredicateExpr::Or{lhs, conjunction()});
    }
    return lhs;
  }

  PredicateExpr conjunction() {
    PredicateExpr lhs = unary();
    while (peek().kind == Tok::And) {
      ++pos_;
      lhs = PredicateExpr(PredicateExpr::And{lhs, unary()});
    }
    return lhs;
  }

  PredicateExpr unary() {
    if (peek().kind == Tok::Not) {
      ++pos_;
      return PredicateExpr(PredicateExpr::Not{unary()});
    }
    if (peek().kind == Tok::LParen) {
      ++pos_;
      PredicateExpr inner = disjunction();
      expect(Tok::RParen, "')'");
      return inner;
    }
    return atom();
  }

  PredicateExpr atom() {
    LinearForm lhs = linear();
    if (peek().kind == Tok::Mod) {
      ++pos_;
      const std::int64_t modulus = integer("modulus");
      if (modulus < 2) {
        --pos_;
        fail("modulus must be at least 2");
      }
      if (peek().kind != Tok::Cmp || peek().cmp != Comparison::Equal) {
        fail("expected '=' after modulus");
      }
      ++pos_;
      const std::int64_t residue = integer("residue");
      return PredicateExpr(PredicateExpr::Congruence{lhs, modulus, ((residue % modulus) + modulus) % modulus});
    }
    if (peek().kind != Tok::Cmp) {
      fail("expected a comparison or 'mod'");
    }
    const Comparison cmp = take().cmp;
    LinearForm rhs = linear();
    for (const auto &[sym, coef] : rhs.coefficients) {
      lhs.coefficients[sym] -= coef;
    }
    lhs.constant -= rhs.constant;
    std::erase_if(lhs.coefficients, [](const auto &kv) { return kv.second == 0; });
    return PredicateExpr(PredicateExpr::Threshold{lhs, cmp});
  }

  std::int64_t integer(const char *what) {
    bool negative = false;
    if (peek().kind == Tok::Minus) {
      negative = true;
      ++pos_;
    }
    if (peek().kind != Tok::Int) {
      fail(std::string("expected integer ") + what);
    }
    const std::int64_t v = take().value;
    return negative ? -v : v;
  }

  LinearForm linear() {
    LinearForm form;
    bool first = true;
    for (;;) {
      std::int64_t sign = 1;
      if (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
        sign = take().kind == Tok::Minus ? -1 : 1;
      } else if (!first) {
        break;
      }
      first = false;
      if (peek().kind == Tok::Int) {
        const std::int64_t v = take().value;
        if (peek().kind == Tok::Star) {
          ++pos_;
          if (peek().kind != Tok::Var) {
            fail("expected n_<symbol> after '*'");
          }
          form.coefficients[take().text] += sign * v;
        } else {
          form.constant += sign * v;
        }
      } else if (peek().kind == Tok::Var) {
        form.coefficients[take().text] += sign;
      } else {
        fail("expected a count n_<symbol> or an integer");
      }
    }
    std::erase_if(form.coefficients, [](const auto &kv) { return kv.second == 0; });
    return form;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::int64_t evaluate(const LinearForm &form, const InputCounts &counts) {
  std::int64_t total = form.constant;
  for (const auto &[sym, coef] : form.coefficients) {
    auto it = counts.find(sym);
    if (it == counts.end()) {
      throw std::out_of_range("predicate symbol '" + sym + "' is not bound");
    }
    total += coef * static_cast<std::int64_t>(it->second);
  }
  return total;
}

std::string form_text(const LinearForm &form) {
  std::string out;
  auto term = [&](std::int64_t coef, const std::string &body) {
    if (out.empty()) {
      out += coef < 0 ? "-" : "";
    } else {
      out += coef < 0 ? " - " : " + ";
    }
    const std::int64_t mag = coef < 0 ? -coef : coef;
    if (body.empty()) {
      out += std::to_string(mag);
    } else {
      out += (mag == 1 ? "" : std::to_string(mag) + "*") + body;
    }
  };
  for (const auto &[sym, coef] : form.coefficients) {
    term(coef, "n_" + sym);
  }
  if (form.constant != 0 || out.empty()) {
    term(form.constant, "");
  }
  return out;
}

std::string_view comparison_text(Comparison c) {
  switch (c) {
  case Comparison::Less:
    return "<";
  case Comparison::LessEqual:
    return "<=";
  case Comparison::Equal:
    return "=";
  case Comparison::GreaterEqual:
    return ">=";
  case Comparison::Greater:
    return ">";
  }
  return "?";
}

} // namespace

PredicateExpr parse_predicate(std::string_view text) { return Parser(tokenize(text)).parse(); }

std::set<std::string, std::less<>> symbols(const PredicateExpr &expr) {
  std::set<std::string, std::less<>> out;
  auto add = [&](const LinearForm &f) {
    for (const auto &kv : f.coefficients) {
      out.insert(kv.first);
    }
  };
  std::visit(overloaded{
                 [&](const PredicateExpr::Threshold &t) { add(t.form); },
                 [&](const PredicateExpr::Congruence &c) { add(c.form); },
                 [&](const PredicateExpr::Not &n) { out.merge(symbols(n.operand)); },
                 [&](const PredicateExpr::And &a) {
                   out.merge(symbols(a.lhs));
                   out.merge(symbols(a.rhs));
                 },
                 [&](const PredicateExpr::Or &o) {
                   out.merge(symbols(o.lhs));
                   out.merge(symbols(o.rhs));
                 },
             },
             expr.node());
  return out;
}

bool eval_predicate(const PredicateExpr &expr, const InputCounts &counts) {
  return std::visit(overloaded{
                        [&](const PredicateExpr::Threshold &t) {
                          const std::int64_t v = evaluate(t.form, counts);
                          switch (t.comparison) {
                          case Comparison::Less:
                            return v < 0;
                          case Comparison::LessEqual:
                            return v <= 0;
                          case Comparison::Equal:
                            return v == 0;
                          case Comparison::GreaterEqual:
                            return v >= 0;
                          case Comparison::Greater:
                            return v > 0;
                          }
                          return false;
                        },
                        [&](const PredicateExpr::Congruence &c) {
                          const std::int64_t v = evaluate(c.form, counts);
                          return ((v % c.modulus) + c.modulus) % c.modulus == c.residue;
                        },
                        [&](const PredicateExpr::Not &n) { return !eval_predicate(n.operand, counts); },
                        [&](const PredicateExpr::And &a) {
                          return eval_predicate(a.lhs, counts) && eval_predicate(a.rhs, counts);
                        },
                        [&](const PredicateExpr::Or &o) {
                          return eval_predicate(o.lhs, counts) || eval_predicate(o.rhs, counts);
                        },
                    },
                    expr.node());
}

std::string to_string(const PredicateExpr &expr) {
  return std::visit(overloaded{
                        [](const PredicateExpr::Threshold &t) {
                          return form_text(t.form) + " " + std::string(comparison_text(t.comparison)) + " 0";
                        },
                        [](const PredicateExpr::Congruence &c) {
                          return form_text(c.form) + " mod " + std::to_string(c.modulus) + " = " +
                                 std::to_string(c.residue);
                        },
                        [](const PredicateExpr::Not &n) { return "!(" + to_string(n.operand) + ")"; },
                        [](const PredicateExpr::And &a) {
                          return "(" + to_string(a.lhs) + " && " + to_string(a.rhs) + ")";
                        },
                        [](const PredicateExpr::Or &o) {
                          return "(" + to_string(o.lhs) + " || " + to_string(o.rhs) + ")";
                        },
                    },
                    expr.node());
}

} // namespace popgame
