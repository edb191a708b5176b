#include "popgame/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "popgame/errors.hpp"

namespace popgame {

InteractionGraph::InteractionGraph(std::size_t vertex_count,
                                   std::vector<std::pair<std::size_t, std::size_t>> edges)
    : vertex_count_(vertex_count), edges_(std::move(edges)) {
  if (vertex_count_ < 2) {
    throw StructuralError("interaction graph needs at least two vertices");
  }
  for (auto &[u, v] : edges_) {
    if (u >= vertex_count_ || v >= vertex_count_) {
      throw StructuralError("edge " + std::to_string(u) + "-" + std::to_string(v) + " out of range");
    }
    if (u == v) {
      throw StructuralError("self-loop on vertex " + std::to_string(u));
    }
    if (u > v) {
      std::swap(u, v);
    }
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
}

InteractionGraph InteractionGraph::complete(std::size_t vertex_count) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t u = 0; u < vertex_count; ++u) {
    for (std::size_t v = u + 1; v < vertex_count; ++v) {
      edges.emplace_back(u, v);
    }
  }
  return InteractionGraph(vertex_count, std::move(edges));
}

InteractionGraph InteractionGraph::ring(std::size_t vertex_count) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t u = 0; u < vertex_count; ++u) {
    edges.emplace_back(u, (u + 1) % vertex_count);
  }
  return InteractionGraph(vertex_count, std::move(edges));
}

InteractionGraph InteractionGraph::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> vertices;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream words(line);
    std::string keyword;
    if (!(words >> keyword)) {
      continue;
    }
    if (keyword == "vertices") {
      std::size_t n = 0;
      if (!(words >> n) || vertices) {
        throw ParseError("expected a single 'vertices <N>' line", line_no, 0);
      }
      vertices = n;
    } else if (keyword == "edge") {
      std::size_t u = 0, v = 0;
      if (!(words >> u >> v)) {
        throw ParseError("expected 'edge <u> <v>'", line_no, 0);
      }
      edges.emplace_back(u, v);
    } else {
      throw ParseError("unknown keyword '" + keyword + "'", line_no, 1);
    }
    std::string extra;
    if (words >> extra) {
      throw ParseError("unexpected token '" + extra + "'", line_no, 0);
    }
  }
  if (!vertices) {
    throw ParseError("missing 'vertices <N>' line", 0, 0);
  }
  return InteractionGraph(*vertices, std::move(edges));
}

bool InteractionGraph::has_isolated_vertex() const {
  std::vector<bool> touched(vertex_count_, false);
  for (auto [u, v] : edges_) {
    touched[u] = touched[v] = true;
  }
  return std::find(touched.begin(), touched.end(), false) != touched.end();
}

Configuration to_configuration(std::size_t state_count, const VertexConfiguration &vertices) {
  std::vector<std::uint32_t> counts(state_count, 0);
  for (StateId s : vertices) {
    ++counts.at(s);
  }
  return Configuration(std::move(counts));
}

std::vector<VertexConfiguration> successors(const Protocol &protocol, const InteractionGraph &graph,
                                            const VertexConfiguration &vertices) {
  std::vector<VertexConfiguration> out;
  for (auto [u, v] : graph.edges()) {
    for (auto [a, b] : {std::pair{u, v}, std::pair{v, u}}) {
      for (const StatePair &to : protocol.successors(vertices[a], vertices[b])) {
        VertexConfiguration next = vertices;
        next[a] = to.first;
        next[b] = to.second;
        out.push_back(std::move(next));
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) {
  for (std::uint64_t i = 0; i < 4; ++i) {
    state_[i] = mix_seed(seed, i);
  }
}

// xoshiro256**
std::uint64_t Rng::next() {
  auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) {
      return r % bound;
    }
  }
}

StopRule StopRule::silent() {
  StopRule rule;
  rule.kind_ = Kind::Silent;
  rule.description_ = "silent";
  return rule;
}

StopRule StopRule::output_window(std::size_t window) {
  if (window == 0) {
    throw std::invalid_argument("output window must be at least 1");
  }
  StopRule rule;
  rule.kind_ = Kind::OutputWindow;
  rule.window_ = window;
  rule.description_ = "window:" + std::to_string(window);
  return rule;
}

StopRule StopRule::target(std::function<bool(const Configuration &)> predicate, std::string description) {
  StopRule rule;
  rule.kind_ = Kind::Target;
  rule.target_ = std::move(predicate);
  rule.description_ = std::move(description);
  return rule;
}

StopRule StopRule::all_in(const Protocol &protocol, std::string_view state) {
  const StateId id = protocol.state_id(state);
  return target(
      [id](const Configuration &c) { return c.population() > 0 && c[id] == c.population(); },
      "all:" + std::string(state));
}

bool stop_silent(const Protocol &protocol, const Configuration &config) {
  for (const StatePair &p : applicable_pairs(config)) {
    if (!protocol.transitions().is_identity(p.first, p.second)) {
      return false;
    }
  }
  return true;
}

bool stop_silent(const Protocol &protocol, const InteractionGraph &graph, const VertexConfiguration &vertices) {
  const auto &table = protocol.transitions();
  for (auto [u, v] : graph.edges()) {
    if (!table.is_identity(vertices[u], vertices[v]) || !table.is_identity(vertices[v], vertices[u])) {
      return false;
    }
  }
  return true;
}

bool stop_output_window(std::span<const Output> trace, std::size_t window) {
  if (window == 0 || trace.size() < window) {
    return false;
  }
  const Output last = trace.back();
  if (last == Output::Undefined) {
    return false;
  }
  return std::all_of(trace.end() - static_cast<std::ptrdiff_t>(window), trace.end(),
                     [last](Output o) { return o == last; });
}

namespace {

// Tracks whatever the stop rule needs while a run mutates its configuration.
class StopMonitor {
public:
  StopMonitor(const Protocol &protocol, const StopRule &rule) : protocol_(protocol), rule_(rule) {}

  // `changed` is false for identity interactions; the silent check is cached.
  template <class SilentCheck>
  bool fired(const Configuration &counts, bool after_step, bool changed, SilentCheck &&silent) {
    switch (rule_.kind()) {
    case StopRule::Kind::Silent:
      if (changed || !silent_known_) {
        silent_ = silent();
        silent_known_ = true;
      }
      return silent_;
    case StopRule::Kind::OutputWindow:
      if (after_step) {
        const Output o = output_of_config(protocol_, counts);
        if (o == Output::Undefined) {
          streak_ = 0;
        } else if (o == last_) {
          ++streak_;
        } else {
          streak_ = 1;
        }
        last_ = o;
      }
      return streak_ >= rule_.window();
    case StopRule::Kind::Target:
      return rule_.target_reached(counts);
    }
    return false;
  }

private:
  const Protocol &protocol_;
  const StopRule &rule_;
  bool silent_known_ = false;
  bool silent_ = false;
  Output last_ = Output::Undefined;
  std::size_t streak_ = 0;
};

std::vector<std::uint32_t> checked_counts(const Protocol &protocol, const Configuration &init) {
  if (init.state_count() != protocol.state_count()) {
    throw StructuralError("configuration does not match the protocol's state count");
  }
  if (init.population() < 2) {
    throw StructuralError("population must have at least two agents");
  }
  auto c = init.counts();
  return {c.begin(), c.end()};
}

StateId pick_state(const std::vector<std::uint32_t> &counts, std::uint64_t agent, std::optional<StateId> skip_one) {
  for (StateId s = 0; s < counts.size(); ++s) {
    std::uint64_t c = counts[s];
    if (skip_one && *skip_one == s) {
      --c;
    }
    if (agent < c) {
      return s;
    }
    agent -= c;
  }
  throw std::logic_error("agent index outside population");
}

} // namespace

RunResult run(const Protocol &protocol, const Configuration &init, std::uint64_t seed,
              std::uint64_t max_steps, const StopRule &stop) {
  std::vector<std::uint32_t> counts = checked_counts(protocol, init);
  const std::uint64_t n = init.population();
  Rng rng(seed);
  StopMonitor monitor(protocol, stop);
  Configuration current = init;

  RunResult result;
  bool changed = true;
  for (;;) {
    if (monitor.fired(current, result.steps > 0, changed,
                      [&] { return stop_silent(protocol, current); })) {
      result.stabilized = true;
      break;
    }
    if (result.steps >= max_steps) {
      break;
    }
    const StateId a = pick_state(counts, rng.below(n), std::nullopt);
    const StateId b = pick_state(counts, rng.below(n - 1), a);
    auto cell = protocol.successors(a, b);
    const StatePair to = cell[cell.size() == 1 ? 0 : rng.below(cell.size())];
    changed = to != StatePair{a, b};
    if (changed) {
      --counts[a];
      --counts[b];
      ++counts[to.first];
      ++counts[to.second];
      current = Configuration(counts);
    }
    ++result.steps;
  }
  result.output = output_of_config(protocol, current);
  result.final_config = std::move(current);
  return result;
}

RunResult run(const Protocol &protocol, const VertexConfiguration &init, const InteractionGraph &graph,
              std::uint64_t seed, std::uint64_t max_steps, const StopRule &stop) {
  if (init.size() != graph.vertex_count()) {
    throw StructuralError("vertex configuration length differs from the graph's vertex count");
  }
  if (graph.edges().empty()) {
    throw StructuralError("interaction graph has no edges");
  }
  for (StateId s : init) {
    if (s >= protocol.state_count()) {
      throw StructuralError("vertex state index out of range");
    }
  }
  VertexConfiguration vertices = init;
  Configuration current = to_configuration(protocol.state_count(), vertices);
  std::vector<std::uint32_t> counts(current.counts().begin(), current.counts().end());
  Rng rng(seed);
  StopMonitor monitor(protocol, stop);

  RunResult result;
  bool changed = true;
  for (;;) {
    if (monitor.fired(current, result.steps > 0, changed,
                      [&] { return stop_silent(protocol, graph, vertices); })) {
      result.stabilized = true;
      break;
    }
    if (result.steps >= max_steps) {
      break;
    }
    auto [u, v] = graph.edges()[rng.below(graph.edges().size())];
    if (rng.below(2) == 1) {
      std::swap(u, v);
    }
    const StateId a = vertices[u];
    const StateId b = vertices[v];
    auto cell = protocol.successors(a, b);
    const StatePair to = cell[cell.size() == 1 ? 0 : rng.below(cell.size())];
    changed = to != StatePair{a, b};
    if (changed) {
      vertices[u] = to.first;
      vertices[v] = to.second;
      --counts[a];
      --counts[b];
      ++counts[to.first];
      ++counts[to.second];
      current = Configuration(counts);
    }
    ++result.steps;
  }
  result.output = output_of_config(protocol, current);
  result.final_config = std::move(vertices);
  return result;
}

StatsReport monte_carlo(const Protocol &protocol, const Configuration &init, const MonteCarloOptions &options) {
  if (options.trials == 0) {
    throw std::invalid_argument("monte_carlo needs at least one trial");
  }
  checked_counts(protocol, init);
  if (options.graph && options.graph->vertex_count() != init.population()) {
    throw StructuralError("graph has " + std::to_string(options.graph->vertex_count()) +
                          " vertices but the population has " + std::to_string(init.population()) + " agents");
  }

  VertexConfiguration layout;
  for (StateId s = 0; s < init.state_count(); ++s) {
    layout.insert(layout.end(), init[s], s);
  }

  StatsReport report;
  report.trials = options.trials;
  report.seed = options.seed;
  report.records.resize(options.trials);

  auto one_trial = [&](std::size_t trial) {
    const std::uint64_t trial_seed = mix_seed(options.seed, trial);
    RunResult r;
    if (options.graph) {
      VertexConfiguration placed = layout;
      Rng shuffle(mix_seed(trial_seed, 0x5eed));
      for (std::size_t i = placed.size(); i > 1; --i) {
        std::swap(placed[i - 1], placed[shuffle.below(i)]);
      }
      r = run(protocol, placed, *options.graph, trial_seed, options.max_steps, options.stop);
    } else {
      r = run(protocol, init, trial_seed, options.max_steps, options.stop);
    }
    report.records[trial] = TrialRecord{trial, r.steps, r.stabilized, r.output};
  };

  std::size_t threads = options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, options.trials);
  if (threads == 1) {
    for (std::size_t t = 0; t < options.trials; ++t) {
      one_trial(t);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < threads; ++w) {
      workers.emplace_back([&] {
        for (std::size_t t = next++; t < options.trials; t = next++) {
          one_trial(t);
        }
      });
    }
  }

  std::vector<std::uint64_t> steps;
  for (const auto &rec : report.records) {
    if (rec.stabilized) {
      steps.push_back(rec.steps);
    }
  }
  report.successes = steps.size();
  if (!steps.empty()) {
    std::sort(steps.begin(), steps.end());
    const double total = std::accumulate(steps.begin(), steps.end(), 0.0);
    report.mean_steps = total / static_cast<double>(steps.size());
    const std::size_t m = steps.size();
    report.median_steps = m % 2 == 1 ? static_cast<double>(steps[m / 2])
                                     : (static_cast<double>(steps[m / 2 - 1]) + static_cast<double>(steps[m / 2])) / 2;
    const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(m)));
    report.p95_steps = steps[std::max<std::size_t>(rank, 1) - 1];
  }
  return report;
}

} // namespace popgame
