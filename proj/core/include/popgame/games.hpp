#pragma once

#include <string>
#include <vector>

#include "popgame/protocol.hpp"
#include "popgame/rational.hpp"

namespace popgame {

/// Symmetric two-player game: payoff(x, y) is the score of a player using
/// x against an opponent using y. The threshold separates wins from losses
/// under the win-stay/lose-shift rule.
class Game {
public:
  Game() = default;

  /// `payoffs` is row-major, side = strategies.size().
  /// Throws StructuralError if the matrix is not square or names repeat.
  Game(std::string name, std::vector<std::string> strategies, std::vector<Rational> payoffs,
       Rational threshold);

  const std::string &name() const { return name_; }
  std::size_t size() const { return strategies_.size(); }
  const std::vector<std::string> &strategies() const { return strategies_; }
  const Rational &payoff(StateId x, StateId y) const { return payoffs_[x * size() + y]; }
  const std::vector<Rational> &payoffs() const { return payoffs_; }
  const Rational &threshold() const { return threshold_; }

  Game with_threshold(Rational threshold) const;

  friend bool operator==(const Game &, const Game &) = default;

private:
  std::string name_;
  std::vector<std::string> strategies_;
  std::vector<Rational> payoffs_;
  Rational threshold_{0};
};

/// Prisoner's dilemma scores: temptation, reward, punishment, sucker.
struct PrisonerParams {
  Rational temptation{5};
  Rational reward{3};
  Rational punishment{1};
  Rational sucker{0};

  /// T > R > P > S and 2R > T + S.
  bool valid() const;
};

/// Strategies C, D with rows C: (R, S), D: (T, P).
/// Throws std::invalid_argument if `params` violates the dilemma inequalities.
Game prisoners_dilemma(const PrisonerParams &params, Rational threshold);

/// How a set of equally good best responses is turned into successors.
enum class TieBreak {
  AllTies,      ///< keep every maximizer (nondeterministic protocol)
  LowestIndex,  ///< keep the first maximizer in declaration order
};

/// argmax over x of payoff(x, y).
std::vector<StateId> best_response(const Game &game, StateId y);

/// argmax over x != excluded of payoff(x, y); empty only for 1-strategy games.
std::vector<StateId> best_response_excluding(const Game &game, StateId y, StateId excluded);

bool is_nash(const Game &game, StateId x, StateId y);

/// payoff(q1, q2) >= threshold.
bool is_win(const Game &game, StateId q1, StateId q2);

/// Next strategies of a player using `self` after meeting `opponent`: stay on
/// a win, otherwise move to a best response among the other strategies. A
/// losing player with no alternative (single-strategy game) stays.
std::vector<StateId> pavlov_moves(const Game &game, StateId self, StateId opponent, TieBreak mode);

/// Protocol whose states are the strategies and whose joint successors are
/// the cross product of both players' pavlov_moves. Carries no inputs or
/// outputs.
Protocol derive_protocol(const Game &game, TieBreak mode);

} // namespace popgame
