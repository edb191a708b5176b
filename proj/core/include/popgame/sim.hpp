#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "popgame/protocol.hpp"

namespace popgame {

/// Undirected interaction graph without self-loops.
class InteractionGraph {
public:
  /// Throws StructuralError for N < 2, self-loops or out-of-range vertices.
  InteractionGraph(std::size_t vertex_count, std::vector<std::pair<std::size_t, std::size_t>> edges);

  static InteractionGraph complete(std::size_t vertex_count);
  static InteractionGraph ring(std::size_t vertex_count);

  /// Text form: `vertices <N>` followed by `edge <u> <v>` lines; '#' comments.
  static InteractionGraph parse(std::string_view text);

  std::size_t vertex_count() const { return vertex_count_; }
  const std::vector<std::pair<std::size_t, std::size_t>> &edges() const { return edges_; }
  bool has_isolated_vertex() const;

private:
  std::size_t vertex_count_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
};

/// State of each vertex of an interaction graph.
using VertexConfiguration = std::vector<StateId>;

Configuration to_configuration(std::size_t state_count, const VertexConfiguration &vertices);

/// All vertex configurations reachable by one interaction along an edge
/// (either orientation), sorted and unique.
std::vector<VertexConfiguration> successors(const Protocol &protocol, const InteractionGraph &graph,
                                            const VertexConfiguration &vertices);

/// 64-bit generator with a portable bounded draw, so traces only depend on
/// the seed.
class Rng {
public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  /// Uniform in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound);

private:
  std::uint64_t state_[4];
};

/// splitmix64 finalizer; derives per-trial seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// When a run counts as stabilized.
class StopRule {
public:
  enum class Kind { Silent, OutputWindow, Target };

  static StopRule silent();
  /// Output defined and constant for the last `window` interactions.
  static StopRule output_window(std::size_t window);
  static StopRule target(std::function<bool(const Configuration &)> predicate, std::string description);
  /// Every agent in `state`.
  static StopRule all_in(const Protocol &protocol, std::string_view state);

  Kind kind() const { return kind_; }
  std::size_t window() const { return window_; }
  const std::string &description() const { return description_; }
  bool target_reached(const Configuration &config) const { return target_(config); }

private:
  Kind kind_ = Kind::Silent;
  std::size_t window_ = 0;
  std::function<bool(const Configuration &)> target_;
  std::string description_;
};

struct RunResult {
  std::uint64_t steps = 0;
  bool stabilized = false;
  std::variant<Configuration, VertexConfiguration> final_config;
  Output output = Output::Undefined;
};

/// Complete-graph run over count vectors. Each step draws an ordered pair of
/// distinct agents uniformly and one of its successors uniformly; identity
/// interactions count as steps. Throws StructuralError for populations < 2.
RunResult run(const Protocol &protocol, const Configuration &init, std::uint64_t seed,
              std::uint64_t max_steps, const StopRule &stop);

/// Graph run: uniform edge, then uniform orientation.
RunResult run(const Protocol &protocol, const VertexConfiguration &init, const InteractionGraph &graph,
              std::uint64_t seed, std::uint64_t max_steps, const StopRule &stop);

/// No applicable pair changes any state.
bool stop_silent(const Protocol &protocol, const Configuration &config);
bool stop_silent(const Protocol &protocol, const InteractionGraph &graph, const VertexConfiguration &vertices);

/// `trace` holds the configuration output after each interaction, oldest
/// first. True iff its last `window` entries are defined and equal.
bool stop_output_window(std::span<const Output> trace, std::size_t window);

struct TrialRecord {
  std::size_t trial = 0;
  std::uint64_t steps = 0;
  bool stabilized = false;
  Output final_output = Output::Undefined;
};

struct StatsReport {
  std::size_t trials = 0;
  std::size_t successes = 0;
  /// Over stabilized trials only; zero when none stabilized.
  double mean_steps = 0;
  double median_steps = 0;
  std::uint64_t p95_steps = 0;
  std::uint64_t seed = 0;
  std::vector<TrialRecord> records;
};

struct MonteCarloOptions {
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::uint64_t max_steps = 1'000'000;
  StopRule stop = StopRule::silent();
  /// nullopt runs on the complete graph using count vectors.
  std::optional<InteractionGraph> graph;
  /// 0 picks std::thread::hardware_concurrency().
  std::size_t threads = 0;
};

/// Independent runs from `init`; trial i uses seed mix_seed(seed, i). In graph
/// mode the initial states are placed on vertices by a seeded shuffle.
/// Throws std::invalid_argument for zero trials.
StatsReport monte_carlo(const Protocol &protocol, const Configuration &init, const MonteCarloOptions &options);

} // namespace popgame
