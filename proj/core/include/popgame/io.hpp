#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "popgame/games.hpp"
#include "popgame/protocol.hpp"
#include "popgame/verify.hpp"

namespace popgame {

/// Line-oriented protocol text:
///
///   protocol <name>
///   states <tok>+
///   inputs <sym>=<state> ...        (optional)
///   outputs <state>=<0|1> ...       (optional)
///   rule <q1> <q2> -> <q1'> <q2'>   (repeatable; same pair accumulates)
///
/// '#' starts a comment. Throws ParseError with line and column.
Protocol parse_protocol(std::string_view text);

/// Canonical text: non-identity rules only, in state order.
std::string print_protocol(const Protocol &protocol);

/// game <name> / strategies <tok>+ / row <s>: <rational>+ / threshold <rational>
Game parse_game(std::string_view text);
std::string print_game(const Game &game);

/// "0:3,1:2" -> {0:3, 1:2}. Throws ParseError.
InputCounts parse_counts(std::string_view text);

/// "2..8" or "5". Throws ParseError.
SizeRange parse_size_range(std::string_view text);

/// Whole file as text; throws std::runtime_error when unreadable.
std::string read_file(const std::filesystem::path &path);

} // namespace popgame
