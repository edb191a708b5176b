#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "popgame/errors.hpp"
#include "popgame/sim.hpp"
#include "popgame/stdlib.hpp"
#include "popgame/verify.hpp"

using namespace popgame;

namespace {

bool all_cooperate(const std::vector<std::uint32_t> &counts) { return counts[1] == 0; }

// Two-sample chi-square statistic over shared bins.
double chi_square(const std::vector<std::size_t> &a, const std::vector<std::size_t> &b) {
  double na = 0;
  double nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += static_cast<double>(a[i]);
    nb += static_cast<double>(b[i]);
  }
  const double ka = std::sqrt(nb / na);
  const double kb = std::sqrt(na / nb);
  double stat = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] + b[i] == 0) {
      continue;
    }
    const double d = ka * static_cast<double>(a[i]) - kb * static_cast<double>(b[i]);
    stat += d * d / static_cast<double>(a[i] + b[i]);
  }
  return stat;
}

std::vector<std::size_t> histogram(const StatsReport &r, std::size_t bins) {
  std::vector<std::size_t> h(bins, 0);
  for (const auto &t : r.records) {
    ++h[std::min<std::size_t>(t.steps, bins - 1)];
  }
  return h;
}

} // namespace

TEST_CASE("generator is deterministic and bounded") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next() == b.next());
  }
  Rng c(1);
  std::vector<int> seen(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto v = c.below(7);
    REQUIRE(v < 7);
    ++seen[v];
  }
  for (int s : seen) {
    CHECK(s > 800);
  }
  CHECK(mix_seed(1, 0) != mix_seed(1, 1));
  CHECK(mix_seed(1, 0) != mix_seed(2, 0));
}

TEST_CASE("interaction graphs") {
  const auto ring = InteractionGraph::ring(5);
  CHECK(ring.edges().size() == 5);
  CHECK(InteractionGraph::ring(2).edges().size() == 1);
  CHECK(InteractionGraph::complete(4).edges().size() == 6);
  CHECK_THROWS_AS(InteractionGraph(3, {{0, 0}}), StructuralError);
  CHECK_THROWS_AS(InteractionGraph(3, {{0, 3}}), StructuralError);
  CHECK_THROWS_AS(InteractionGraph(1, {}), StructuralError);
  const auto g = InteractionGraph::parse("# path\nvertices 3\nedge 0 1\nedge 2 1 # back\n");
  CHECK(g.vertex_count() == 3);
  CHECK(g.edges().size() == 2);
  CHECK_FALSE(g.has_isolated_vertex());
  CHECK(InteractionGraph(3, {{0, 1}}).has_isolated_vertex());
  CHECK_THROWS_AS(InteractionGraph::parse("edge 0 1\n"), ParseError);
}

TEST_CASE("stop rules") {
  const Protocol pd = builtin_protocol("pavlov-pd");
  CHECK(stop_silent(pd, Configuration({3, 0})));
  CHECK_FALSE(stop_silent(pd, Configuration({2, 1})));
  CHECK_FALSE(stop_silent(pd, Configuration({0, 3})));
  const auto ring = InteractionGraph::ring(4);
  CHECK(stop_silent(pd, ring, {0, 0, 0, 0}));
  CHECK_FALSE(stop_silent(pd, ring, {0, 1, 0, 0}));

  const std::vector<Output> trace = {Output::Undefined, Output::One, Output::One, Output::One};
  CHECK(stop_output_window(trace, 3));
  CHECK_FALSE(stop_output_window(trace, 4));
  CHECK_FALSE(stop_output_window(trace, 5));
}

TEST_CASE("runs are reproducible per seed") {
  const Protocol p = builtin_protocol("majority");
  const Configuration init = initial_config(p, {{"0", 4}, {"1", 3}});
  const RunResult a = run(p, init, 9, 100000, StopRule::silent());
  const RunResult b = run(p, init, 9, 100000, StopRule::silent());
  CHECK(a.steps == b.steps);
  CHECK(a.final_config == b.final_config);
  CHECK(a.stabilized);
  CHECK(a.output == Output::One);
  CHECK(stop_silent(p, std::get<Configuration>(a.final_config)));
}

TEST_CASE("step cap stops unstabilized runs") {
  const Protocol p = builtin_protocol("leader-pavlovian");
  const RunResult r = run(p, Configuration({2, 0, 0}), 1, 50, StopRule::silent());
  CHECK(r.steps == 50);
  CHECK_FALSE(r.stabilized);
}

TEST_CASE("target and window rules") {
  const Protocol pd = builtin_protocol("pavlov-pd");
  const RunResult r = run(pd, Configuration({0, 4}), 3, 100000, StopRule::all_in(pd, "C"));
  CHECK(r.stabilized);
  CHECK(std::get<Configuration>(r.final_config)[0] == 4);

  const Protocol orp = builtin_protocol("or");
  const RunResult w = run(orp, Configuration({3, 1}), 3, 100000, StopRule::output_window(5));
  CHECK(w.stabilized);
  CHECK(w.output == Output::One);
  CHECK(w.steps >= 5);
}

TEST_CASE("thread count does not change monte carlo output") {
  const Protocol p = builtin_protocol("majority");
  const Configuration init = initial_config(p, {{"0", 3}, {"1", 3}});
  MonteCarloOptions opts;
  opts.trials = 200;
  opts.seed = 77;
  opts.threads = 1;
  const StatsReport one = monte_carlo(p, init, opts);
  opts.threads = 8;
  const StatsReport many = monte_carlo(p, init, opts);
  REQUIRE(one.records.size() == many.records.size());
  for (std::size_t i = 0; i < one.records.size(); ++i) {
    CHECK(one.records[i].steps == many.records[i].steps);
    CHECK(one.records[i].final_output == many.records[i].final_output);
  }
  CHECK(one.mean_steps == many.mean_steps);
  opts.trials = 0;
  CHECK_THROWS_AS(monte_carlo(p, init, opts), std::invalid_argument);
}

TEST_CASE("statistics follow their definitions") {
  const Protocol p = builtin_protocol("pavlov-pd");
  MonteCarloOptions opts;
  opts.trials = 101;
  opts.seed = 4;
  const StatsReport r = monte_carlo(p, Configuration({0, 3}), opts);
  std::vector<std::uint64_t> steps;
  double sum = 0;
  for (const auto &t : r.records) {
    steps.push_back(t.steps);
    sum += static_cast<double>(t.steps);
  }
  std::sort(steps.begin(), steps.end());
  CHECK(r.successes == 101);
  CHECK(r.mean_steps == doctest::Approx(sum / 101));
  CHECK(r.median_steps == static_cast<double>(steps[50]));
  // Nearest rank: ceil(0.95 * 101) = 96th smallest.
  CHECK(r.p95_steps == steps[95]);
}

TEST_CASE("exact absorption time of the prisoner's dilemma") {
  const Protocol pd = builtin_protocol("pavlov-pd");
  const std::function<std::vector<std::pair<std::vector<std::uint32_t>, oracle::BigRational>>(
      const std::vector<std::uint32_t> &)>
      step = [&](const auto &c) { return oracle::multiset_step(pd, c); };
  const std::function<bool(const std::vector<std::uint32_t> &)> done = all_cooperate;
  const oracle::BigRational e = oracle::expected_absorption<std::vector<std::uint32_t>>({0, 3}, step, done);
  CHECK(e == oracle::BigRational(21, 2));

  // Same chain seen vertex by vertex on the complete graph.
  const auto k3 = InteractionGraph::complete(3);
  const std::function<std::vector<std::pair<std::vector<StateId>, oracle::BigRational>>(const std::vector<StateId> &)>
      vstep = [&](const auto &v) { return oracle::graph_step(pd, k3, v); };
  const std::function<bool(const std::vector<StateId> &)> vdone = [](const auto &v) {
    return std::all_of(v.begin(), v.end(), [](StateId s) { return s == 0; });
  };
  CHECK(oracle::expected_absorption<std::vector<StateId>>({1, 1, 1}, vstep, vdone) == oracle::BigRational(21, 2));
}

TEST_CASE("simulated means match exact absorption times") {
  struct Case {
    const char *key;
    std::vector<std::uint32_t> init;
  };
  for (const Case &c : {Case{"pavlov-pd", {0, 3}}, Case{"pavlov-pd", {1, 4}}, Case{"or", {4, 1}},
                        Case{"majority", {0, 0, 3, 2}}}) {
    CAPTURE(c.key);
    const Protocol p = builtin_protocol(c.key);
    const std::function<std::vector<std::pair<std::vector<std::uint32_t>, oracle::BigRational>>(
        const std::vector<std::uint32_t> &)>
        step = [&](const auto &x) { return oracle::multiset_step(p, x); };
    const std::function<bool(const std::vector<std::uint32_t> &)> done = [&](const auto &x) {
      return stop_silent(p, Configuration(x));
    };
    const double exact = oracle::expected_absorption<std::vector<std::uint32_t>>(c.init, step, done)
                             .convert_to<double>();
    MonteCarloOptions opts;
    opts.trials = 20000;
    opts.seed = 99;
    const StatsReport r = monte_carlo(p, Configuration(c.init), opts);
    CHECK(r.successes == opts.trials);
    CHECK(r.mean_steps == doctest::Approx(exact).epsilon(0.03));
  }
}

TEST_CASE("graph mode on the complete graph matches multiset mode") {
  for (std::size_t n : {3u, 4u}) {
    CAPTURE(n);
    const Protocol pd = builtin_protocol("pavlov-pd");
    const Configuration init({1, static_cast<std::uint32_t>(n - 1)});
    MonteCarloOptions opts;
    opts.trials = 4000;
    opts.seed = 1;
    const StatsReport multiset = monte_carlo(pd, init, opts);
    opts.seed = 2;
    opts.graph = InteractionGraph::complete(n);
    const StatsReport graph = monte_carlo(pd, init, opts);
    constexpr std::size_t bins = 25;
    // 24 degrees of freedom; 51.18 is the 0.999 quantile.
    CHECK(chi_square(histogram(multiset, bins), histogram(graph, bins)) < 51.18);
  }
}

TEST_CASE("graph successors move one edge at a time") {
  const Protocol pd = builtin_protocol("pavlov-pd");
  const auto ring = InteractionGraph::ring(4);
  const auto next = successors(pd, ring, VertexConfiguration{0, 1, 0, 0});
  // C D on edges (0,1) and (1,2) both become D D.
  const std::vector<VertexConfiguration> expected = {{0, 1, 0, 0}, {0, 1, 1, 0}, {1, 1, 0, 0}};
  CHECK(next == expected);
}

TEST_CASE("simulation agrees with exhaustive verification") {
  const Protocol p = builtin_protocol("majority");
  const PredicateExpr pred = parse_predicate("n_0 >= n_1");
  std::size_t agree = 0;
  std::size_t total = 0;
  for (std::uint32_t n0 = 0; n0 <= 5; ++n0) {
    for (std::uint32_t n1 = 0; n0 + n1 <= 5; ++n1) {
      if (n0 + n1 < 2) {
        continue;
      }
      const InputCounts input{{"0", n0}, {"1", n1}};
      const Verdict v = stably_computes(p, pred, {n0 + n1, n0 + n1});
      const auto it = std::find_if(v.results.begin(), v.results.end(),
                                   [&](const InputVerdict &r) { return r.input == input; });
      REQUIRE(it != v.results.end());
      MonteCarloOptions opts;
      opts.trials = 100;
      opts.seed = n0 * 10 + n1;
      const StatsReport r = monte_carlo(p, initial_config(p, input), opts);
      for (const auto &t : r.records) {
        const Output want = it->expected ? Output::One : Output::Zero;
        agree += (t.stabilized && t.final_output == want) == it->pass ? 1 : 0;
        ++total;
      }
    }
  }
  CHECK(total >= 1000);
  CHECK(static_cast<double>(agree) >= 0.99 * static_cast<double>(total));
}
