#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "popgame/games.hpp"
#include "popgame/protocol.hpp"

namespace popgame {

struct NamedArtifact {
  std::string key;
  std::string description;
  std::variant<Protocol, Game> value;
  /// Predicate the protocol stably computes, in parse_predicate syntax.
  std::optional<std::string> predicate;
  /// Leader states for leader-election protocols.
  std::vector<std::string> leader_states;
};

/// Keys in a fixed order: protocols first, then games.
const std::vector<std::string> &builtin_keys();

/// Throws std::invalid_argument for unknown keys.
NamedArtifact builtin(std::string_view key);
Protocol builtin_protocol(std::string_view key);
Game builtin_game(std::string_view key);

/// Pavlov prisoner's-dilemma game; the default threshold 2 lies in (P, R].
Game builtin_pd(const PrisonerParams &params = {}, Rational threshold = Rational{2});

/// Symmetric simulation of a deterministic protocol: every state q gets a
/// twin q' with the same output, diagonal rules are split between q and q',
/// and off-diagonal rules fire only between an unprimed and a primed agent.
/// Inputs map to unprimed states. Throws std::invalid_argument for
/// nondeterministic input.
Protocol symmetrize(const Protocol &protocol);

} // namespace popgame
