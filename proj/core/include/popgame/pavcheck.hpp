#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "popgame/games.hpp"
#include "popgame/protocol.hpp"

namespace popgame {

/// How closely a derived protocol must match the one under test.
enum class MatchMode {
  Exact,   ///< derived successor sets equal the protocol's
  Subset,  ///< derived successor sets contain the protocol's
};

/// Exact for deterministic protocols, Subset otherwise.
MatchMode default_mode(const Protocol &protocol);

/// lo <= hi, or lo < hi when strict.
struct OrderEdge {
  std::size_t lo = 0;
  std::size_t hi = 0;
  bool strict = false;

  friend auto operator<=>(const OrderEdge &, const OrderEdge &) = default;
};

/// Order constraints over the payoff entries M[i][j] (variable i*K+j) and the
/// threshold (variable K*K).
class ConstraintSystem {
public:
  explicit ConstraintSystem(std::size_t strategy_count);

  std::size_t strategy_count() const { return strategy_count_; }
  std::size_t variable_count() const { return strategy_count_ * strategy_count_ + 1; }
  std::size_t entry(StateId row, StateId column) const { return row * strategy_count_ + column; }
  std::size_t threshold() const { return strategy_count_ * strategy_count_; }

  /// Duplicate edges are ignored. Throws StructuralError for unknown variables.
  void add_le(std::size_t lo, std::size_t hi);
  void add_lt(std::size_t lo, std::size_t hi);

  const std::vector<OrderEdge> &edges() const { return edges_; }
  bool contains(const OrderEdge &edge) const;

  /// "M[L1][N]" or "threshold", using the given strategy names.
  std::string variable_name(std::size_t variable, const std::vector<std::string> &names) const;

private:
  void add(OrderEdge edge);

  std::size_t strategy_count_;
  std::vector<OrderEdge> edges_;
};

/// Integer payoff matrix and threshold satisfying a constraint system.
struct Witness {
  std::size_t strategy_count = 0;
  std::vector<std::int64_t> matrix;  // row-major
  std::int64_t threshold = 0;

  std::int64_t at(StateId row, StateId column) const { return matrix[row * strategy_count + column]; }
  Game to_game(std::string name, std::vector<std::string> strategies) const;
  /// Substitutes the witness into every edge of `system`.
  bool satisfies(const ConstraintSystem &system) const;
};

/// Closed walk v0 -> v1 -> ... -> v0 of recorded edges; strict[i] tells whether
/// the edge cycle[i] -> cycle[i+1] is strict. cycle.front() == cycle.back().
struct UnsatCertificate {
  std::vector<std::size_t> cycle;
  std::vector<bool> strict;

  /// Every step is an edge of `system` and at least one step is strict.
  bool is_valid_for(const ConstraintSystem &system) const;
  /// "M[q1][q0] < M[q2][q0] <= ..." in the direction of the edges.
  std::string describe(const ConstraintSystem &system, const std::vector<std::string> &names) const;
};

using SolveResult = std::variant<Witness, UnsatCertificate>;

/// Constraints under which derive_protocol(game, AllTies) reproduces the
/// protocol's per-agent successor sets under `mode`. Requires a symmetric
/// protocol; throws std::invalid_argument otherwise.
ConstraintSystem build_constraints(const Protocol &protocol, MatchMode mode);

/// Decides the system by strict-cycle detection. On success the values are
/// the smallest ranks (from 0) of the condensation where strict edges raise
/// the rank by one.
SolveResult solve_order_constraints(const ConstraintSystem &system);

struct NotPavlovian {
  enum class Reason {
    NotSymmetric,           ///< `violation` holds a tuple without its mirror
    NonProductSuccessors,   ///< exact mode: joint set of `pair` is not a product
    Unsatisfiable,          ///< `certificate` holds a strict cycle
  };

  Reason reason = Reason::Unsatisfiable;
  std::optional<Rule> violation;
  std::optional<StatePair> pair;
  std::optional<UnsatCertificate> certificate;
  std::optional<ConstraintSystem> system;

  std::string describe(const Protocol &protocol) const;
};

using PavlovianResult = std::variant<Witness, NotPavlovian>;

/// Searches for a game reproducing `protocol` (mode defaults to
/// default_mode). Every returned witness is re-derived and compared before it
/// is returned; a mismatch throws std::logic_error.
PavlovianResult check_pavlovian(const Protocol &protocol, std::optional<MatchMode> mode = std::nullopt);

/// True iff derive_protocol(game, AllTies) reproduces `protocol` under `mode`.
bool reproduces(const Game &game, const Protocol &protocol, MatchMode mode);

} // namespace popgame
