#include "popgame/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "popgame/errors.hpp"

namespace popgame {

namespace {

struct Word {
  std::string text;
  std::size_t column;  // 1-based
};

// Whitespace-separated words of one line, comment stripped.
std::vector<Word> split_line(const std::string &line) {
  std::vector<Word> words;
  std::size_t i = 0;
  while (i < line.size() && line[i] != '#') {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < line.size() && line[j] != '#' && !std::isspace(static_cast<unsigned char>(line[j]))) {
      ++j;
    }
    words.push_back({line.substr(i, j - i), i + 1});
    i = j;
  }
  return words;
}

template <class Visit>
void for_each_line(std::string_view text, Visit &&visit) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto words = split_line(line);
    if (!words.empty()) {
      visit(line_no, words);
    }
  }
}

std::pair<std::string, std::string> split_assignment(const Word &w, std::size_t line) {
  const auto eq = w.text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == w.text.size()) {
    throw ParseError("expected <name>=<value>, got '" + w.text + "'", line, w.column);
  }
  return {w.text.substr(0, eq), w.text.substr(eq + 1)};
}

} // namespace

Protocol parse_protocol(std::string_view text) {
  std::optional<std::string> name;
  std::optional<std::vector<std::string>> states;
  std::vector<std::pair<std::string, StateId>> inputs;
  std::optional<std::vector<std::uint8_t>> outputs;
  std::size_t outputs_line = 0;
  std::vector<Rule> rules;

  auto state_of = [&](const Word &w, std::size_t line) -> StateId {
    if (!states) {
      throw ParseError("'states' must come before any reference to a state", line, w.column);
    }
    auto it = std::find(states->begin(), states->end(), w.text);
    if (it == states->end()) {
      throw ParseError("unknown state '" + w.text + "'", line, w.column);
    }
    return static_cast<StateId>(it - states->begin());
  };

  for_each_line(text, [&](std::size_t line, const std::vector<Word> &w) {
    const std::string &key = w[0].text;
    if (key == "protocol") {
      if (w.size() != 2) {
        throw ParseError("expected 'protocol <name>'", line, w[0].column);
      }
      if (name) {
        throw ParseError("duplicate 'protocol' line", line, w[0].column);
      }
      name = w[1].text;
    } else if (key == "states") {
      if (states) {
        throw ParseError("duplicate 'states' line", line, w[0].column);
      }
      if (w.size() < 2) {
        throw ParseError("'states' needs at least one state", line, w[0].column);
      }
      states.emplace();
      for (std::size_t i = 1; i < w.size(); ++i) {
        if (std::find(states->begin(), states->end(), w[i].text) != states->end()) {
          throw ParseError("duplicate state '" + w[i].text + "'", line, w[i].column);
        }
        states->push_back(w[i].text);
      }
    } else if (key == "inputs") {
      for (std::size_t i = 1; i < w.size(); ++i) {
        auto [symbol, state] = split_assignment(w[i], line);
        for (const auto &existing : inputs) {
          if (existing.first == symbol) {
            throw ParseError("duplicate input symbol '" + symbol + "'", line, w[i].column);
          }
        }
        inputs.emplace_back(symbol, state_of(Word{state, w[i].column}, line));
      }
    } else if (key == "outputs") {
      if (!states) {
        throw ParseError("'states' must come before 'outputs'", line, w[0].column);
      }
      if (!outputs) {
        outputs.emplace(states->size(), 2);
      }
      outputs_line = line;
      for (std::size_t i = 1; i < w.size(); ++i) {
        auto [state, value] = split_assignment(w[i], line);
        const StateId s = state_of(Word{state, w[i].column}, line);
        if (value != "0" && value != "1") {
          throw ParseError("output of '" + state + "' must be 0 or 1", line, w[i].column);
        }
        if ((*outputs)[s] != 2) {
          throw ParseError("output of '" + state + "' given twice", line, w[i].column);
        }
        (*outputs)[s] = value == "1" ? 1 : 0;
      }
    } else if (key == "rule") {
      if (w.size() != 6 || w[3].text != "->") {
        throw ParseError("expected 'rule <q1> <q2> -> <q1'> <q2'>'", line, w[0].column);
      }
      rules.push_back(Rule{{state_of(w[1], line), state_of(w[2], line)},
                           {state_of(w[4], line), state_of(w[5], line)}});
    } else {
      throw ParseError("unknown keyword '" + key + "'", line, w[0].column);
    }
  });

  if (!name) {
    throw ParseError("missing 'protocol <name>' line", 0, 0);
  }
  if (!states) {
    throw ParseError("missing 'states' line", 0, 0);
  }
  Protocol protocol(*name, *states, rules);
  if (!inputs.empty()) {
    protocol = protocol.with_inputs(std::move(inputs));
  }
  if (outputs) {
    for (std::size_t s = 0; s < outputs->size(); ++s) {
      if ((*outputs)[s] == 2) {
        throw ParseError("no output given for state '" + (*states)[s] + "'", outputs_line, 0);
      }
    }
    protocol = protocol.with_outputs(std::move(*outputs));
  }
  return protocol;
}

std::string print_protocol(const Protocol &protocol) {
  std::ostringstream out;
  out << "protocol " << protocol.name() << "\n";
  out << "states";
  for (const auto &s : protocol.states()) {
    out << ' ' << s;
  }
  out << "\n";
  if (protocol.has_inputs()) {
    out << "inputs";
    for (std::size_t i = 0; i < protocol.input_alphabet().size(); ++i) {
      out << ' ' << protocol.input_alphabet()[i] << '=' << protocol.state_name(protocol.input_map()[i]);
    }
    out << "\n";
  }
  if (protocol.has_outputs()) {
    out << "outputs";
    for (StateId s = 0; s < protocol.state_count(); ++s) {
      out << ' ' << protocol.state_name(s) << '=' << int{protocol.output(s)};
    }
    out << "\n";
  }
  for (const Rule &r : protocol.transitions().non_identity_rules()) {
    out << "rule " << protocol.state_name(r.from.first) << ' ' << protocol.state_name(r.from.second)
        << " -> " << protocol.state_name(r.to.first) << ' ' << protocol.state_name(r.to.second) << "\n";
  }
  return out.str();
}

Game parse_game(std::string_view text) {
  std::optional<std::string> name;
  std::optional<std::vector<std::string>> strategies;
  std::vector<std::optional<std::vector<Rational>>> rows;
  std::optional<Rational> threshold;

  auto rational_at = [](const Word &w, std::size_t line) {
    try {
      return parse_rational(w.text);
    } catch (const std::invalid_argument &e) {
      throw ParseError(e.what(), line, w.column);
    }
  };

  for_each_line(text, [&](std::size_t line, const std::vector<Word> &w) {
    const std::string &key = w[0].text;
    if (key == "game") {
      if (w.size() != 2 || name) {
        throw ParseError("expected a single 'game <name>' line", line, w[0].column);
      }
      name = w[1].text;
    } else if (key == "strategies") {
      if (w.size() < 2 || strategies) {
        throw ParseError("expected a single non-empty 'strategies' line", line, w[0].column);
      }
      strategies.emplace();
      for (std::size_t i = 1; i < w.size(); ++i) {
        if (std::find(strategies->begin(), strategies->end(), w[i].text) != strategies->end()) {
          throw ParseError("duplicate strategy '" + w[i].text + "'", line, w[i].column);
        }
        strategies->push_back(w[i].text);
      }
      rows.assign(strategies->size(), std::nullopt);
    } else if (key == "row") {
      if (!strategies) {
        throw ParseError("'strategies' must come before 'row'", line, w[0].column);
      }
      // Accept both "row s: 1 2" and "row s : 1 2".
      std::size_t first_value = 2;
      std::string label = w.size() > 1 ? w[1].text : "";
      if (!label.empty() && label.back() == ':') {
        label.pop_back();
      } else if (w.size() > 2 && w[2].text == ":") {
        first_value = 3;
      } else {
        throw ParseError("expected 'row <strategy>: <payoffs>'", line, w[0].column);
      }
      auto it = std::find(strategies->begin(), strategies->end(), label);
      if (it == strategies->end()) {
        throw ParseError("unknown strategy '" + label + "'", line, w[1].column);
      }
      auto &row = rows[it - strategies->begin()];
      if (row) {
        throw ParseError("duplicate row for '" + label + "'", line, w[1].column);
      }
      if (w.size() - first_value != strategies->size()) {
        throw ParseError("row '" + label + "' needs " + std::to_string(strategies->size()) + " payoffs", line,
                         w[0].column);
      }
      row.emplace();
      for (std::size_t i = first_value; i < w.size(); ++i) {
        row->push_back(rational_at(w[i], line));
      }
    } else if (key == "threshold") {
      if (w.size() != 2 || threshold) {
        throw ParseError("expected a single 'threshold <rational>' line", line, w[0].column);
      }
      threshold = rational_at(w[1], line);
    } else {
      throw ParseError("unknown keyword '" + key + "'", line, w[0].column);
    }
  });

  if (!name || !strategies || !threshold) {
    throw ParseError("game file needs 'game', 'strategies' and 'threshold' lines", 0, 0);
  }
  std::vector<Rational> payoffs;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i]) {
      throw ParseError("missing row for strategy '" + (*strategies)[i] + "'", 0, 0);
    }
    payoffs.insert(payoffs.end(), rows[i]->begin(), rows[i]->end());
  }
  return Game(*name, *strategies, std::move(payoffs), *threshold);
}

std::string print_game(const Game &game) {
  std::ostringstream out;
  out << "game " << game.name() << "\n";
  out << "strategies";
  for (const auto &s : game.strategies()) {
    out << ' ' << s;
  }
  out << "\n";
  for (StateId x = 0; x < game.size(); ++x) {
    out << "row " << game.strategies()[x] << ":";
    for (StateId y = 0; y < game.size(); ++y) {
      out << ' ' << to_string(game.payoff(x, y));
    }
    out << "\n";
  }
  out << "threshold " << to_string(game.threshold()) << "\n";
  return out.str();
}

InputCounts parse_counts(std::string_view text) {
  InputCounts counts;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) {
      end = text.size();
    }
    std::string_view item = text.substr(start, end - start);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) {
      item.remove_prefix(1);
    }
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) {
      item.remove_suffix(1);
    }
    if (!item.empty()) {
      const auto colon = item.rfind(':');
      if (colon == std::string_view::npos || colon == 0) {
        throw ParseError("expected <symbol>:<count>, got '" + std::string(item) + "'", 0, start + 1);
      }
      std::uint32_t count = 0;
      const auto digits = item.substr(colon + 1);
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), count);
      if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size()) {
        throw ParseError("bad count in '" + std::string(item) + "'", 0, start + colon + 2);
      }
      if (!counts.emplace(std::string(item.substr(0, colon)), count).second) {
        throw ParseError("symbol listed twice in '" + std::string(text) + "'", 0, start + 1);
      }
    }
    start = end + 1;
  }
  return counts;
}

SizeRange parse_size_range(std::string_view text) {
  auto number = [&](std::string_view s, std::size_t column) {
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
      throw ParseError("bad population size '" + std::string(s) + "'", 0, column);
    }
    return v;
  };
  SizeRange range;
  if (auto dots = text.find(".."); dots != std::string_view::npos) {
    range.min = number(text.substr(0, dots), 1);
    range.max = number(text.substr(dots + 2), dots + 3);
  } else {
    range.min = range.max = number(text, 1);
  }
  if (range.min < 2 || range.max < range.min) {
    throw ParseError("population sizes must satisfy 2 <= a <= b", 0, 1);
  }
  return range;
}

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

} // namespace popgame
