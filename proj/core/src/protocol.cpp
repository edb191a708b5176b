#include "popgame/protocol.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include <boost/container_hash/hash.hpp>

#include "popgame/errors.hpp"

namespace popgame {

TransitionTable::TransitionTable(std::size_t state_count)
    : state_count_(state_count), cells_(state_count * state_count) {
  for (StateId a = 0; a < state_count; ++a) {
    for (StateId b = 0; b < state_count; ++b) {
      cells_[index(a, b)] = {StatePair{a, b}};
    }
  }
}

bool TransitionTable::is_identity(StateId a, StateId b) const {
  const auto &cell = cells_[index(a, b)];
  return cell.size() == 1 && cell.front() == StatePair{a, b};
}

std::vector<Rule> TransitionTable::rules() const {
  std::vector<Rule> out;
  for (StateId a = 0; a < state_count_; ++a) {
    for (StateId b = 0; b < state_count_; ++b) {
      for (const StatePair &to : cells_[index(a, b)]) {
        out.push_back(Rule{{a, b}, to});
      }
    }
  }
  return out;
}

std::vector<Rule> TransitionTable::non_identity_rules() const {
  std::vector<Rule> out;
  for (StateId a = 0; a < state_count_; ++a) {
    for (StateId b = 0; b < state_count_; ++b) {
      if (is_identity(a, b)) {
        continue;
      }
      for (const StatePair &to : cells_[index(a, b)]) {
        out.push_back(Rule{{a, b}, to});
      }
    }
  }
  return out;
}

TransitionTable complete(std::span<const Rule> rules, std::size_t state_count) {
  TransitionTable table;
  table.state_count_ = state_count;
  table.cells_.assign(state_count * state_count, {});
  for (const Rule &rule : rules) {
    for (StateId s : {rule.from.first, rule.from.second, rule.to.first, rule.to.second}) {
      if (s >= state_count) {
        throw StructuralError("rule references state index " + std::to_string(s) + " but only " +
                              std::to_string(state_count) + " states exist");
      }
    }
    table.cells_[table.index(rule.from.first, rule.from.second)].push_back(rule.to);
  }
  for (StateId a = 0; a < state_count; ++a) {
    for (StateId b = 0; b < state_count; ++b) {
      auto &cell = table.cells_[table.index(a, b)];
      if (cell.empty()) {
        cell.push_back(StatePair{a, b});
      }
      std::sort(cell.begin(), cell.end());
      cell.erase(std::unique(cell.begin(), cell.end()), cell.end());
    }
  }
  return table;
}

std::string_view to_string(Output output) {
  switch (output) {
  case Output::Zero:
    return "0";
  case Output::One:
    return "1";
  case Output::Undefined:
    break;
  }
  return "undefined";
}

namespace {

void check_state_names(const std::vector<std::string> &states) {
  if (states.empty()) {
    throw StructuralError("protocol needs at least one state");
  }
  std::set<std::string_view> seen;
  for (const auto &name : states) {
    if (name.empty()) {
      throw StructuralError("empty state name");
    }
    if (!seen.insert(name).second) {
      throw StructuralError("duplicate state name '" + name + "'");
    }
  }
}

} // namespace

Protocol::Protocol(std::string name, std::vector<std::string> states, std::span<const Rule> rules)
    : name_(std::move(name)), states_(std::move(states)) {
  check_state_names(states_);
  table_ = complete(rules, states_.size());
}

Protocol::Protocol(std::string name, std::vector<std::string> states, TransitionTable table)
    : name_(std::move(name)), states_(std::move(states)), table_(std::move(table)) {
  check_state_names(states_);
  if (table_.state_count() != states_.size()) {
    throw StructuralError("transition table covers " + std::to_string(table_.state_count()) +
                          " states, protocol declares " + std::to_string(states_.size()));
  }
}

Protocol Protocol::with_inputs(std::vector<std::pair<std::string, StateId>> inputs) const {
  Protocol copy = *this;
  copy.input_alphabet_.clear();
  copy.input_map_.clear();
  std::set<std::string_view> seen;
  for (auto &[symbol, state] : inputs) {
    if (symbol.empty()) {
      throw StructuralError("empty input symbol");
    }
    if (state >= states_.size()) {
      throw StructuralError("input '" + symbol + "' maps to unknown state index " + std::to_string(state));
    }
    if (!seen.insert(symbol).second) {
      throw StructuralError("duplicate input symbol '" + symbol + "'");
    }
  }
  for (auto &[symbol, state] : inputs) {
    copy.input_alphabet_.push_back(std::move(symbol));
    copy.input_map_.push_back(state);
  }
  return copy;
}

Protocol Protocol::with_outputs(std::vector<std::uint8_t> outputs) const {
  if (!outputs.empty() && outputs.size() != states_.size()) {
    throw StructuralError("output map must cover all " + std::to_string(states_.size()) + " states");
  }
  for (auto value : outputs) {
    if (value > 1) {
      throw StructuralError("outputs must be 0 or 1");
    }
  }
  Protocol copy = *this;
  copy.output_map_ = std::move(outputs);
  return copy;
}

Protocol Protocol::with_name(std::string name) const {
  Protocol copy = *this;
  copy.name_ = std::move(name);
  return copy;
}

std::optional<StateId> Protocol::find_state(std::string_view name) const {
  auto it = std::find(states_.begin(), states_.end(), name);
  if (it == states_.end()) {
    return std::nullopt;
  }
  return static_cast<StateId>(it - states_.begin());
}

StateId Protocol::state_id(std::string_view name) const {
  if (auto id = find_state(name)) {
    return *id;
  }
  throw StructuralError("unknown state '" + std::string(name) + "'");
}

std::optional<StateId> Protocol::input_state(std::string_view symbol) const {
  auto it = std::find(input_alphabet_.begin(), input_alphabet_.end(), symbol);
  if (it == input_alphabet_.end()) {
    return std::nullopt;
  }
  return input_map_[it - input_alphabet_.begin()];
}

bool is_deterministic(const Protocol &protocol) {
  const auto n = static_cast<StateId>(protocol.state_count());
  for (StateId a = 0; a < n; ++a) {
    for (StateId b = 0; b < n; ++b) {
      if (protocol.successors(a, b).size() != 1) {
        return false;
      }
    }
  }
  return true;
}

std::optional<Rule> find_asymmetry(const Protocol &protocol) {
  for (const Rule &rule : protocol.transitions().rules()) {
    const StatePair mirror_to{rule.to.second, rule.to.first};
    auto cell = protocol.successors(rule.from.second, rule.from.first);
    if (!std::binary_search(cell.begin(), cell.end(), mirror_to)) {
      return rule;
    }
  }
  return std::nullopt;
}

bool is_symmetric(const Protocol &protocol) { return !find_asymmetry(protocol).has_value(); }

Configuration::Configuration(std::vector<std::uint32_t> counts) : counts_(std::move(counts)) {}

Configuration Configuration::uniform(std::size_t state_count, StateId state, std::uint32_t agents) {
  if (state >= state_count) {
    throw StructuralError("state index out of range");
  }
  std::vector<std::uint32_t> counts(state_count, 0);
  counts[state] = agents;
  return Configuration(std::move(counts));
}

std::uint64_t Configuration::population() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

Configuration Configuration::apply(const Rule &rule) const {
  Configuration next = *this;
  --next.counts_[rule.from.first];
  --next.counts_[rule.from.second];
  ++next.counts_[rule.to.first];
  ++next.counts_[rule.to.second];
  return next;
}

std::size_t ConfigurationHash::operator()(const Configuration &config) const {
  auto counts = config.counts();
  return boost::hash_range(counts.begin(), counts.end());
}

Configuration initial_config(const Protocol &protocol, const InputCounts &inputs) {
  if (!protocol.has_inputs()) {
    throw StructuralError("protocol '" + protocol.name() + "' has no input map");
  }
  std::vector<std::uint32_t> counts(protocol.state_count(), 0);
  std::uint64_t total = 0;
  for (const auto &[symbol, count] : inputs) {
    auto state = protocol.input_state(symbol);
    if (!state) {
      throw StructuralError("unknown input symbol '" + symbol + "'");
    }
    counts[*state] += count;
    total += count;
  }
  if (total < 2) {
    throw StructuralError("population must have at least two agents");
  }
  return Configuration(std::move(counts));
}

std::vector<StatePair> applicable_pairs(const Configuration &config) {
  std::vector<StatePair> pairs;
  const auto n = static_cast<StateId>(config.state_count());
  for (StateId a = 0; a < n; ++a) {
    if (config[a] == 0) {
      continue;
    }
    for (StateId b = 0; b < n; ++b) {
      if (config[b] == 0 || (a == b && config[a] < 2)) {
        continue;
      }
      pairs.push_back({a, b});
    }
  }
  return pairs;
}

std::vector<Configuration> successors(const Protocol &protocol, const Configuration &config) {
  std::vector<Configuration> out;
  for (const StatePair &from : applicable_pairs(config)) {
    for (const StatePair &to : protocol.successors(from.first, from.second)) {
      out.push_back(config.apply(Rule{from, to}));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Output output_of_config(const Protocol &protocol, const Configuration &config) {
  if (!protocol.has_outputs()) {
    return Output::Undefined;
  }
  bool zero = false;
  bool one = false;
  for (StateId s = 0; s < config.state_count(); ++s) {
    if (config[s] > 0) {
      (protocol.output(s) ? one : zero) = true;
    }
  }
  if (zero == one) {
    return Output::Undefined;
  }
  return one ? Output::One : Output::Zero;
}

std::string format_config(const Protocol &protocol, const Configuration &config) {
  std::string out = "{";
  bool first = true;
  for (StateId s = 0; s < config.state_count(); ++s) {
    if (config[s] == 0) {
      continue;
    }
    if (!first) {
      out += ", ";
    }
    first = false;
    out += protocol.state_name(s) + ":" + std::to_string(config[s]);
  }
  return out + "}";
}

} // namespace popgame
