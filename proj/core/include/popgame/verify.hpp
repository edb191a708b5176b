#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "popgame/errors.hpp"
#include "popgame/pavcheck.hpp"
#include "popgame/predicate.hpp"
#include "popgame/protocol.hpp"
#include "popgame/sim.hpp"

namespace popgame {

inline constexpr std::size_t kDefaultNodeBudget = 2'000'000;

/// Reachable part of a one-interaction relation. Node 0.. are the roots;
/// parent[] is the breadth-first tree (roots point to themselves).
template <class Node>
struct ReachabilityGraph {
  std::vector<Node> nodes;
  std::vector<std::vector<std::size_t>> arcs;
  std::vector<std::size_t> parent;
  std::size_t root_count = 0;

  /// Root-to-node path along the breadth-first tree.
  std::vector<std::size_t> path_to(std::size_t node) const {
    std::vector<std::size_t> path{node};
    while (parent[path.back()] != path.back()) {
      path.push_back(parent[path.back()]);
    }
    return {path.rbegin(), path.rend()};
  }
};

using ConfigGraph = ReachabilityGraph<Configuration>;
using VertexConfigGraph = ReachabilityGraph<VertexConfiguration>;

namespace detail {

template <class Node, class Hash, class Successors>
ReachabilityGraph<Node> explore(std::span<const Node> roots, Successors &&next, std::size_t budget) {
  ReachabilityGraph<Node> graph;
  std::unordered_map<Node, std::size_t, Hash> index;
  auto intern = [&](const Node &node, std::size_t parent) -> std::size_t {
    auto [it, inserted] = index.try_emplace(node, graph.nodes.size());
    if (inserted) {
      if (graph.nodes.size() >= budget) {
        throw BudgetExceeded("reachable configuration budget exceeded", budget);
      }
      graph.nodes.push_back(node);
      graph.arcs.emplace_back();
      graph.parent.push_back(parent == SIZE_MAX ? it->second : parent);
    }
    return it->second;
  };
  for (const Node &root : roots) {
    intern(root, SIZE_MAX);
  }
  graph.root_count = graph.nodes.size();
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    std::vector<Node> succ = next(graph.nodes[i]);
    std::vector<std::size_t> out;
    out.reserve(succ.size());
    for (const Node &s : succ) {
      out.push_back(intern(s, i));
    }
    graph.arcs[i] = std::move(out);
  }
  return graph;
}

struct VertexConfigurationHash {
  std::size_t operator()(const VertexConfiguration &v) const;
};

} // namespace detail

/// Breadth-first closure under successors. Throws BudgetExceeded when more
/// than `budget` configurations are discovered.
ConfigGraph reachable(const Protocol &protocol, const Configuration &init,
                      std::size_t budget = kDefaultNodeBudget);
ConfigGraph reachable(const Protocol &protocol, std::span<const Configuration> roots,
                      std::size_t budget = kDefaultNodeBudget);
VertexConfigGraph reachable(const Protocol &protocol, const InteractionGraph &graph,
                            std::span<const VertexConfiguration> roots,
                            std::size_t budget = kDefaultNodeBudget);

/// Strongly connected components without outgoing arcs, each sorted, listed
/// by smallest member.
std::vector<std::vector<std::size_t>> bottom_sccs(const std::vector<std::vector<std::size_t>> &arcs);

template <class Node>
std::vector<std::vector<std::size_t>> bottom_sccs(const ReachabilityGraph<Node> &graph) {
  return bottom_sccs(graph.arcs);
}

struct SizeRange {
  std::uint32_t min = 2;
  std::uint32_t max = 8;
};

/// A bottom-SCC configuration violating the property, with a path to it.
struct Counterexample {
  Configuration config;
  std::vector<Configuration> path;
  Output output = Output::Undefined;
  std::size_t leaders = 0;
};

struct InputVerdict {
  /// Input symbols (predicate checks) or initial states (leader checks).
  InputCounts input;
  /// Predicate value on `input`; unused for leader checks.
  bool expected = false;
  bool pass = false;
  std::optional<Counterexample> counterexample;
  std::size_t reachable_count = 0;
  std::size_t bottom_scc_count = 0;
};

struct Verdict {
  SizeRange sizes;
  std::vector<InputVerdict> results;

  bool all_pass() const;
};

struct VerifyOptions {
  std::size_t node_budget = kDefaultNodeBudget;
  /// 0 picks std::thread::hardware_concurrency().
  std::size_t threads = 0;
};

/// Every multiset of `count` agents over `kinds` kinds, in lexicographic order
/// of count vectors (last kind varies fastest).
std::vector<std::vector<std::uint32_t>> compositions(std::size_t kinds, std::uint32_t count);

/// Checks, for every input multiset over the protocol's alphabet with size in
/// `sizes`, that every bottom-SCC configuration outputs the predicate value.
/// Requires iota and omega; throws StructuralError otherwise.
Verdict stably_computes(const Protocol &protocol, const PredicateExpr &predicate, SizeRange sizes,
                        const VerifyOptions &options = {});

/// Checks that every bottom-SCC configuration has exactly one agent in
/// `leaders`, for all initial multisets over `initial_states` with at least
/// one leader.
Verdict stable_leader(const Protocol &protocol, const std::vector<StateId> &leaders, SizeRange sizes,
                      const std::vector<StateId> &initial_states, const VerifyOptions &options = {});

struct SearchOptions {
  /// Upper bound on enumerated (transition table, iota, omega) candidates.
  std::uint64_t candidate_budget = 5'000'000;
  std::size_t node_budget = kDefaultNodeBudget;
  /// Input alphabet; symbols of the predicate are added if missing.
  std::vector<std::string> alphabet = {"0", "1"};
  std::optional<MatchMode> mode;
};

struct SearchFinding {
  Protocol protocol;
  Witness witness;
};

/// Number of (transition table, iota, omega) candidates for K states.
std::uint64_t search_space_size(std::size_t state_count, std::size_t alphabet_size);

/// Enumerates symmetric deterministic protocols over `state_count` states with
/// every iota and omega, keeps the Pavlovian ones that stably compute
/// `predicate` on `sizes`. Findings are also passed to `on_found` as they
/// appear. Throws BudgetExceeded once the candidate budget is used up.
std::vector<SearchFinding> search_pavlovian(std::size_t state_count, const PredicateExpr &predicate,
                                            SizeRange sizes, const SearchOptions &options = {},
                                            const std::function<void(const SearchFinding &)> &on_found = {});

} // namespace popgame
