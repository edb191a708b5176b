#include "popgame/games.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>

#include "popgame/errors.hpp"

namespace popgame {

Game::Game(std::string name, std::vector<std::string> strategies, std::vector<Rational> payoffs,
           Rational threshold)
    : name_(std::move(name)), strategies_(std::move(strategies)), payoffs_(std::move(payoffs)),
      threshold_(threshold) {
  if (strategies_.empty()) {
    throw StructuralError("game needs at least one strategy");
  }
  if (payoffs_.size() != strategies_.size() * strategies_.size()) {
    throw StructuralError("payoff matrix must be " + std::to_string(strategies_.size()) + "x" +
                          std::to_string(strategies_.size()));
  }
  std::set<std::string_view> seen;
  for (const auto &s : strategies_) {
    if (s.empty() || !seen.insert(s).second) {
      throw StructuralError("strategy names must be non-empty and distinct");
    }
  }
}

Game Game::with_threshold(Rational threshold) const {
  Game copy = *this;
  copy.threshold_ = threshold;
  return copy;
}

bool PrisonerParams::valid() const {
  return temptation > reward && reward > punishment && punishment > sucker &&
         2 * reward > temptation + sucker;
}

Game prisoners_dilemma(const PrisonerParams &params, Rational threshold) {
  if (!params.valid()) {
    throw std::invalid_argument("prisoner's dilemma needs T > R > P > S and 2R > T + S");
  }
  return Game("pd", {"C", "D"},
              {params.reward, params.sucker, params.temptation, params.punishment}, threshold);
}

namespace {

std::vector<StateId> argmax_column(const Game &game, StateId y, std::optional<StateId> excluded) {
  std::vector<StateId> best;
  const Rational *top = nullptr;
  for (StateId x = 0; x < game.size(); ++x) {
    if (excluded && x == *excluded) {
      continue;
    }
    const Rational &value = game.payoff(x, y);
    if (top == nullptr || value > *top) {
      top = &value;
      best.assign(1, x);
    } else if (value == *top) {
      best.push_back(x);
    }
  }
  return best;
}

void check_strategy(const Game &game, StateId s) {
  if (s >= game.size()) {
    throw StructuralError("strategy index " + std::to_string(s) + " out of range");
  }
}

} // namespace

std::vector<StateId> best_response(const Game &game, StateId y) {
  check_strategy(game, y);
  return argmax_column(game, y, std::nullopt);
}

std::vector<StateId> best_response_excluding(const Game &game, StateId y, StateId excluded) {
  check_strategy(game, y);
  check_strategy(game, excluded);
  return argmax_column(game, y, excluded);
}

bool is_nash(const Game &game, StateId x, StateId y) {
  auto bx = best_response(game, y);
  auto by = best_response(game, x);
  return std::find(bx.begin(), bx.end(), x) != bx.end() && std::find(by.begin(), by.end(), y) != by.end();
}

bool is_win(const Game &game, StateId q1, StateId q2) {
  check_strategy(game, q1);
  check_strategy(game, q2);
  return game.payoff(q1, q2) >= game.threshold();
}

std::vector<StateId> pavlov_moves(const Game &game, StateId self, StateId opponent, TieBreak mode) {
  if (is_win(game, self, opponent)) {
    return {self};
  }
  auto moves = best_response_excluding(game, opponent, self);
  if (moves.empty()) {
    return {self};
  }
  if (mode == TieBreak::LowestIndex) {
    moves.resize(1);
  }
  return moves;
}

Protocol derive_protocol(const Game &game, TieBreak mode) {
  std::vector<Rule> rules;
  const auto n = static_cast<StateId>(game.size());
  for (StateId a = 0; a < n; ++a) {
    for (StateId b = 0; b < n; ++b) {
      for (StateId a2 : pavlov_moves(game, a, b, mode)) {
        for (StateId b2 : pavlov_moves(game, b, a, mode)) {
          rules.push_back(Rule{{a, b}, {a2, b2}});
        }
      }
    }
  }
  return Protocol(game.name(), game.strategies(), rules);
}

} // namespace popgame
