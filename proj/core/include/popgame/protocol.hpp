#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace popgame {

/// Index into a protocol's state table (declaration order).
using StateId = std::uint32_t;

struct StatePair {
  StateId first = 0;
  StateId second = 0;

  friend auto operator<=>(const StatePair &, const StatePair &) = default;
};

/// One element (q1, q2, q1', q2') of the joint transition relation.
struct Rule {
  StatePair from;
  StatePair to;

  bool is_identity() const { return from == to; }
  friend auto operator<=>(const Rule &, const Rule &) = default;
};

/// Total transition relation over ordered state pairs. Every pair has a
/// non-empty, sorted, duplicate-free successor set.
class TransitionTable {
public:
  TransitionTable() = default;

  /// Identity relation over `state_count` states.
  explicit TransitionTable(std::size_t state_count);

  std::size_t state_count() const { return state_count_; }

  std::span<const StatePair> successors(StateId a, StateId b) const {
    return cells_[index(a, b)];
  }

  /// True iff the successor set of (a, b) is exactly {(a, b)}.
  bool is_identity(StateId a, StateId b) const;

  /// Every tuple of the relation, identities included, in canonical order.
  std::vector<Rule> rules() const;

  /// Tuples of pairs whose successor set is not exactly the identity. Pairs
  /// with a mixed set keep their identity member so the relation can be
  /// rebuilt with complete().
  std::vector<Rule> non_identity_rules() const;

  friend bool operator==(const TransitionTable &, const TransitionTable &) = default;

private:
  friend TransitionTable complete(std::span<const Rule> rules, std::size_t state_count);

  std::size_t index(StateId a, StateId b) const { return std::size_t{a} * state_count_ + b; }

  std::size_t state_count_ = 0;
  std::vector<std::vector<StatePair>> cells_;
};

/// Builds the total relation: listed pairs keep exactly their listed
/// successors, unlisted pairs map to themselves.
/// Throws StructuralError on an out-of-range state index.
TransitionTable complete(std::span<const Rule> rules, std::size_t state_count);

/// Individual output value of a configuration.
enum class Output { Zero, One, Undefined };

std::string_view to_string(Output output);

/// A population protocol (Q, Sigma, iota, omega, delta). Immutable once
/// built; the with_* members return modified copies.
class Protocol {
public:
  Protocol() = default;

  /// Throws StructuralError on empty/duplicate state names or rules that
  /// reference unknown states.
  Protocol(std::string name, std::vector<std::string> states, std::span<const Rule> rules);
  Protocol(std::string name, std::vector<std::string> states, TransitionTable table);

  /// Attaches iota as (symbol, state) pairs in alphabet order.
  Protocol with_inputs(std::vector<std::pair<std::string, StateId>> inputs) const;
  /// Attaches omega; one 0/1 value per state.
  Protocol with_outputs(std::vector<std::uint8_t> outputs) const;
  Protocol with_name(std::string name) const;

  const std::string &name() const { return name_; }
  std::size_t state_count() const { return states_.size(); }
  const std::vector<std::string> &states() const { return states_; }
  const std::string &state_name(StateId s) const { return states_.at(s); }
  std::optional<StateId> find_state(std::string_view name) const;
  /// Throws StructuralError for unknown names.
  StateId state_id(std::string_view name) const;

  const TransitionTable &transitions() const { return table_; }
  std::span<const StatePair> successors(StateId a, StateId b) const {
    return table_.successors(a, b);
  }

  bool has_inputs() const { return !input_alphabet_.empty(); }
  const std::vector<std::string> &input_alphabet() const { return input_alphabet_; }
  const std::vector<StateId> &input_map() const { return input_map_; }
  std::optional<StateId> input_state(std::string_view symbol) const;

  bool has_outputs() const { return !output_map_.empty(); }
  const std::vector<std::uint8_t> &output_map() const { return output_map_; }
  std::uint8_t output(StateId s) const { return output_map_.at(s); }

  friend bool operator==(const Protocol &, const Protocol &) = default;

private:
  std::string name_;
  std::vector<std::string> states_;
  std::vector<std::string> input_alphabet_;
  std::vector<StateId> input_map_;
  std::vector<std::uint8_t> output_map_;
  TransitionTable table_;
};

bool is_deterministic(const Protocol &protocol);

/// First tuple (q1, q2, q1', q2') whose mirror (q2, q1, q2', q1') is missing.
std::optional<Rule> find_asymmetry(const Protocol &protocol);
bool is_symmetric(const Protocol &protocol);

/// Multiset of agent states as a count vector indexed by StateId.
class Configuration {
public:
  Configuration() = default;
  explicit Configuration(std::vector<std::uint32_t> counts);

  /// Every agent in `state`.
  static Configuration uniform(std::size_t state_count, StateId state, std::uint32_t agents);

  std::size_t state_count() const { return counts_.size(); }
  std::span<const std::uint32_t> counts() const { return counts_; }
  std::uint32_t operator[](StateId s) const { return counts_[s]; }
  std::uint64_t population() const;

  /// Replaces one agent pair `from` by `to`. Caller guarantees the pair is
  /// present.
  Configuration apply(const Rule &rule) const;

  friend auto operator<=>(const Configuration &, const Configuration &) = default;

private:
  std::vector<std::uint32_t> counts_;
};

struct ConfigurationHash {
  std::size_t operator()(const Configuration &config) const;
};

/// Input multiset: symbol -> agent count.
using InputCounts = std::map<std::string, std::uint32_t, std::less<>>;

/// Applies iota to every input agent. Throws StructuralError for unknown
/// symbols, missing iota, or a population below two.
Configuration initial_config(const Protocol &protocol, const InputCounts &inputs);

/// Ordered state pairs (q1, q2) that two distinct agents of `config` can form.
std::vector<StatePair> applicable_pairs(const Configuration &config);

/// All configurations reachable by one interaction, sorted and unique.
std::vector<Configuration> successors(const Protocol &protocol, const Configuration &config);

/// Output of the whole configuration; Undefined when outputs are mixed or
/// the protocol carries no omega.
Output output_of_config(const Protocol &protocol, const Configuration &config);

/// "{N:1, Y:2}" listing non-zero counts in state order.
std::string format_config(const Protocol &protocol, const Configuration &config);

} // namespace popgame
