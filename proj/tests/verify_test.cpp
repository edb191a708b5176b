#include <doctest.h>

#include <numeric>

#include "oracles.hpp"
#include "popgame/errors.hpp"
#include "popgame/stdlib.hpp"
#include "popgame/verify.hpp"

using namespace popgame;

namespace {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
  }
  return r;
}

} // namespace

TEST_CASE("compositions enumerate every multiset once") {
  for (std::size_t kinds = 1; kinds <= 4; ++kinds) {
    for (std::uint32_t n = 0; n <= 6; ++n) {
      const auto all = compositions(kinds, n);
      CHECK(all.size() == binomial(n + kinds - 1, kinds - 1));
      CHECK(std::is_sorted(all.begin(), all.end()));
      for (const auto &c : all) {
        CHECK(std::accumulate(c.begin(), c.end(), 0u) == n);
      }
    }
  }
}

TEST_CASE("bottom components of a small graph") {
  // 0 -> 1 <-> 2, 0 -> 3, 3 -> 3, 4 isolated.
  const std::vector<std::vector<std::size_t>> arcs = {{1, 3}, {2}, {1}, {3}, {}};
  const auto b = bottom_sccs(arcs);
  const std::vector<std::vector<std::size_t>> expected = {{1, 2}, {3}, {4}};
  CHECK(b == expected);
}

TEST_CASE("reachable sets match the agent-level closure") {
  for (const char *key : {"or", "and", "xor", "majority", "leader-pavlovian", "cycle3", "pavlov-pd"}) {
    CAPTURE(key);
    const Protocol p = builtin_protocol(key);
    for (std::uint32_t n = 2; n <= 5; ++n) {
      for (const auto &counts : compositions(p.state_count(), n)) {
        const ConfigGraph g = reachable(p, Configuration(counts));
        std::set<std::vector<std::uint32_t>> got;
        for (const auto &c : g.nodes) {
          got.insert({c.counts().begin(), c.counts().end()});
        }
        CHECK(got == oracle::agent_closure(p, counts));
      }
    }
  }
}

TEST_CASE("breadth-first paths start at the root and follow arcs") {
  const Protocol p = builtin_protocol("majority");
  const ConfigGraph g = reachable(p, initial_config(p, {{"0", 3}, {"1", 3}}));
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const auto path = g.path_to(i);
    CHECK(path.front() == 0);
    CHECK(path.back() == i);
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      const auto &out = g.arcs[path[k]];
      CHECK(std::find(out.begin(), out.end(), path[k + 1]) != out.end());
    }
  }
}

TEST_CASE("node budget is enforced") {
  const Protocol p = builtin_protocol("majority");
  CHECK_THROWS_AS(reachable(p, initial_config(p, {{"0", 4}, {"1", 4}}), 3), BudgetExceeded);
  VerifyOptions opts;
  opts.node_budget = 2;
  CHECK_THROWS_AS(stably_computes(p, parse_predicate("n_0 >= n_1"), {4, 6}, opts), BudgetExceeded);
}

TEST_CASE("or and and stably compute their predicates") {
  CHECK(stably_computes(builtin_protocol("or"), parse_predicate("n_1 >= 1"), {2, 8}).all_pass());
  CHECK(stably_computes(builtin_protocol("and"), parse_predicate("n_0 = 0"), {2, 8}).all_pass());
  // Wrong predicate fails with a counterexample whose path is a real run.
  const Protocol p = builtin_protocol("or");
  const Verdict v = stably_computes(p, parse_predicate("n_1 >= 2"), {2, 4});
  CHECK_FALSE(v.all_pass());
  for (const auto &r : v.results) {
    if (!r.pass) {
      REQUIRE(r.counterexample.has_value());
      const auto &path = r.counterexample->path;
      CHECK(path.front() == initial_config(p, r.input));
      CHECK(path.back() == r.counterexample->config);
      for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        const auto next = successors(p, path[k]);
        CHECK(std::find(next.begin(), next.end(), path[k + 1]) != next.end());
      }
    }
  }
}

TEST_CASE("stable computation needs inputs, outputs and known symbols") {
  CHECK_THROWS_AS(stably_computes(builtin_protocol("cycle3"), parse_predicate("n_1 >= 1"), {2, 3}), StructuralError);
  CHECK_THROWS_AS(stably_computes(builtin_protocol("or"), parse_predicate("n_x >= 1"), {2, 3}), StructuralError);
}

TEST_CASE("results cover every input multiset of the range") {
  const Verdict v = stably_computes(builtin_protocol("majority"), parse_predicate("n_0 >= n_1"), {2, 8});
  CHECK(v.all_pass());
  std::size_t expected = 0;
  for (std::uint32_t n = 2; n <= 8; ++n) {
    expected += n + 1;
  }
  CHECK(v.results.size() == expected);
  CHECK(v.sizes.min == 2);
  CHECK(v.sizes.max == 8);
}

TEST_CASE("leader election") {
  const Protocol p = builtin_protocol("leader-pavlovian");
  const std::vector<StateId> leaders = {p.state_id("L1"), p.state_id("L2")};
  const std::vector<StateId> initial = {0, 1, 2};
  CHECK(stable_leader(p, leaders, {3, 6}, initial).all_pass());
  const Verdict two = stable_leader(p, leaders, {2, 2}, initial);
  CHECK_FALSE(two.all_pass());
  // Multisets without any leader are skipped.
  for (const auto &r : two.results) {
    CHECK(r.input.at("N") < 2);
  }

  const Protocol classic = builtin_protocol("leader-classic");
  CHECK(stable_leader(classic, {classic.state_id("L")}, {2, 7}, {0, 1}).all_pass());
}

TEST_CASE("graph-mode reachability on a ring") {
  const Protocol pd = builtin_protocol("pavlov-pd");
  const auto ring = InteractionGraph::ring(5);
  std::vector<VertexConfiguration> roots;
  for (unsigned mask = 0; mask < 32; ++mask) {
    VertexConfiguration v(5);
    for (unsigned i = 0; i < 5; ++i) {
      v[i] = (mask >> i) & 1u;
    }
    roots.push_back(v);
  }
  const VertexConfigGraph g = reachable(pd, ring, roots);
  CHECK(g.nodes.size() == 32);
  const auto b = bottom_sccs(g);
  REQUIRE(b.size() == 1);
  REQUIRE(b[0].size() == 1);
  CHECK(g.nodes[b[0][0]] == VertexConfiguration(5, 0));
}
