#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <variant>

#include "popgame/protocol.hpp"

namespace popgame {

/// sum(coefficient * n_symbol) + constant
struct LinearForm {
  std::map<std::string, std::int64_t, std::less<>> coefficients;
  std::int64_t constant = 0;

  friend bool operator==(const LinearForm &, const LinearForm &) = default;
};

enum class Comparison { Less, LessEqual, Equal, GreaterEqual, Greater };

struct ThresholdAtom;
struct CongruenceAtom;
struct NotExpr;
struct AndExpr;
struct OrExpr;
struct PredicateNode;

/// Quantifier-free linear/congruence predicate over input-symbol counts.
/// Immutable; copies share the tree.
class PredicateExpr {
public:
  using Threshold = ThresholdAtom;
  using Congruence = CongruenceAtom;
  using Not = NotExpr;
  using And = AndExpr;
  using Or = OrExpr;

  template <class Alternative>
  explicit PredicateExpr(Alternative alternative);

  using Variant = std::variant<ThresholdAtom, CongruenceAtom, NotExpr, AndExpr, OrExpr>;

  const Variant &node() const;

private:
  std::shared_ptr<const PredicateNode> node_;
};

/// form <cmp> 0
struct ThresholdAtom {
  LinearForm form;
  Comparison comparison;
};

/// form = residue (mod modulus), 0 <= residue < modulus, modulus >= 2
struct CongruenceAtom {
  LinearForm form;
  std::int64_t modulus;
  std::int64_t residue;
};

struct NotExpr {
  PredicateExpr operand;
};

struct AndExpr {
  PredicateExpr lhs, rhs;
};

struct OrExpr {
  PredicateExpr lhs, rhs;
};

struct PredicateNode {
  PredicateExpr::Variant value;
};

template <class Alternative>
PredicateExpr::PredicateExpr(Alternative alternative)
    : node_(std::make_shared<const PredicateNode>(PredicateNode{std::move(alternative)})) {}

inline const PredicateExpr::Variant &PredicateExpr::node() const { return node_->value; }

/// pred := atom | pred "&&" pred | pred "||" pred | "!" pred | "(" pred ")"
/// atom := lin cmp lin | lin "mod" int "=" int
/// lin  := signed sum of  [int "*"] n_<symbol>  and integer constants
/// Precedence ! > && > ||. Throws ParseError carrying the 1-based column.
PredicateExpr parse_predicate(std::string_view text);

/// Every symbol mentioned by `expr`.
std::set<std::string, std::less<>> symbols(const PredicateExpr &expr);

/// Throws std::out_of_range naming the first symbol missing from `counts`.
bool eval_predicate(const PredicateExpr &expr, const InputCounts &counts);

/// Canonical text that parse_predicate reads back to an equivalent tree.
std::string to_string(const PredicateExpr &expr);

} // namespace popgame
