// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails or overruns its time limit.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "popgame/cli.hpp"
#include "popgame/io.hpp"
#include "popgame/pavcheck.hpp"
#include "popgame/stdlib.hpp"
#include "popgame/verify.hpp"

using namespace popgame;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records the first failure message.
struct Checker {
  Outcome outcome;

  void expect(bool condition, const std::string &message) {
    if (!condition && outcome.pass) {
      outcome.pass = false;
      outcome.detail = message;
    }
  }
};

TransitionTable listed(const Protocol &p, const std::vector<std::string> &lines) {
  return complete(oracle::rules_from_text(p, lines), p.state_count());
}

Outcome two_state_protocols() {
  Checker c;
  const std::vector<StatePair> pairs = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  std::size_t count = 0;
  for (StateId d0 = 0; d0 < 2; ++d0) {
    for (StateId d1 = 0; d1 < 2; ++d1) {
      for (const StatePair off : pairs) {
        const std::vector<Rule> rules = {
            {{0, 0}, {d0, d0}}, {{1, 1}, {d1, d1}}, {{0, 1}, off}, {{1, 0}, {off.second, off.first}}};
        const Protocol p("two-state", {"a", "b"}, rules);
        c.expect(is_symmetric(p) && is_deterministic(p), "enumeration produced an invalid protocol");
        const PavlovianResult r = check_pavlovian(p);
        const auto *w = std::get_if<Witness>(&r);
        c.expect(w != nullptr, "no witness for " + print_protocol(p));
        if (w != nullptr) {
          const Protocol back = derive_protocol(w->to_game("w", p.states()), TieBreak::LowestIndex);
          c.expect(back.transitions() == p.transitions(), "witness does not reproduce " + print_protocol(p));
        }
        ++count;
      }
    }
  }
  c.expect(count == 16, "expected 16 protocols");
  c.outcome.detail = c.outcome.pass ? "16/16 symmetric deterministic 2-state protocols reproduced" : c.outcome.detail;
  return c.outcome;
}

Outcome cycle_counterexample() {
  Checker c;
  const Protocol p = builtin_protocol("cycle3");
  const PavlovianResult r = check_pavlovian(p);
  const auto *np = std::get_if<NotPavlovian>(&r);
  c.expect(np != nullptr && np->reason == NotPavlovian::Reason::Unsatisfiable, "protocol was accepted");
  if (!c.outcome.pass) {
    return c.outcome;
  }
  const ConstraintSystem &sys = *np->system;
  const auto &cert = *np->certificate;
  c.expect(cert.is_valid_for(sys), "certificate is not a strict cycle of the system");
  std::set<std::pair<std::size_t, std::size_t>> steps;
  for (std::size_t i = 0; i + 1 < cert.cycle.size(); ++i) {
    c.expect(cert.cycle[i] % 3 == 0 && cert.cycle[i] != sys.threshold(), "cycle leaves column q0");
    c.expect(cert.strict[i], "cycle has a non-strict step");
    steps.insert({cert.cycle[i], cert.cycle[i + 1]});
  }
  // b1 > b2 > b0 > b1 with bi = M[qi][q0]; edges point from smaller to larger.
  const std::set<std::pair<std::size_t, std::size_t>> chain = {
      {sys.entry(2, 0), sys.entry(1, 0)}, {sys.entry(0, 0), sys.entry(2, 0)}, {sys.entry(1, 0), sys.entry(0, 0)}};
  c.expect(steps == chain, "cycle differs from b1 > b2 > b0 > b1");
  if (c.outcome.pass) {
    c.outcome.detail = cert.describe(sys, p.states());
  }
  return c.outcome;
}

Outcome matrix_fidelity() {
  Checker c;
  const Protocol leader = derive_protocol(builtin_game("leader-game"), TieBreak::AllTies);
  c.expect(leader.transitions() == listed(leader, {"L1 L2 -> L1 N", "L1 N -> N L2", "L2 N -> N L1", "N N -> N N",
                                                  "L2 L1 -> N L1", "N L1 -> L2 N", "N L2 -> L1 N",
                                                  "L1 L1 -> L2 L2", "L2 L2 -> L1 L1"}),
           "leader game rules differ");
  const Protocol majority = derive_protocol(builtin_game("majority-game"), TieBreak::AllTies);
  c.expect(majority.transitions() == listed(majority, {"NY -> YY", "YN -> YY", "N0 -> Y0", "0N -> 0Y", "Y1 -> N1",
                                                       "1Y -> 1N", "01 -> NY", "10 -> YN"}),
           "majority game rules differ");
  const Protocol pd = derive_protocol(builtin_pd(), TieBreak::AllTies);
  c.expect(pd.transitions() == listed(pd, {"CC -> CC", "CD -> DD", "DC -> DD", "DD -> CC"}),
           "prisoner's dilemma rules differ");
  if (c.outcome.pass) {
    c.outcome.detail = "leader 9, majority 8, prisoner's dilemma 4 rules match";
  }
  return c.outcome;
}

Outcome stable_computation() {
  Checker c;
  const std::pair<const char *, const char *> cases[] = {
      {"or", "n_1 >= 1"}, {"and", "n_0 = 0"}, {"majority", "n_0 >= n_1"}};
  std::size_t inputs = 0;
  for (const auto &[key, pred] : cases) {
    const Verdict v = stably_computes(builtin_protocol(key), parse_predicate(pred), {2, 8});
    c.expect(v.all_pass(), std::string(key) + " fails " + pred);
    inputs += v.results.size();
  }
  if (c.outcome.pass) {
    c.outcome.detail = std::to_string(inputs) + " input multisets, populations 2..8";
  }
  return c.outcome;
}

Outcome weak_xor() {
  Checker c;
  const Protocol p = builtin_protocol("xor");
  const Verdict v = stably_computes(p, parse_predicate("n_1 mod 2 = 1"), {2, 8});
  std::size_t odd = 0;
  for (const InputVerdict &r : v.results) {
    const std::uint32_t n1 = r.input.at("1");
    const std::string where = "input n_0=" + std::to_string(r.input.at("0")) + " n_1=" + std::to_string(n1);
    if (n1 % 2 == 1) {
      ++odd;
      c.expect(!r.pass && r.counterexample && r.counterexample->output == Output::Undefined,
               where + ": expected a mixed-output counterexample");
    }
    const ConfigGraph g = reachable(p, initial_config(p, r.input));
    for (const auto &scc : bottom_sccs(g)) {
      c.expect(scc.size() == 1, where + ": bottom SCC is not a single configuration");
      const Configuration &end = g.nodes[scc.front()];
      c.expect(stop_silent(p, end), where + ": bottom configuration is not silent");
      c.expect(end[p.state_id("1")] == n1 % 2, where + ": wrong number of agents left in state 1");
    }
  }
  if (c.outcome.pass) {
    c.outcome.detail = std::to_string(odd) + " odd inputs fail with mixed output; all bottom SCCs silent";
  }
  return c.outcome;
}

Outcome leader_election() {
  Checker c;
  const Protocol p = builtin_protocol("leader-pavlovian");
  const StateId l1 = p.state_id("L1");
  const StateId l2 = p.state_id("L2");
  const Verdict v = stable_leader(p, {l1, l2}, {3, 7}, {0, 1, 2});
  c.expect(v.all_pass(), "a multiset with 3..7 agents does not elect a unique leader");
  const ConfigGraph g = reachable(p, Configuration::uniform(3, l1, 2));
  const auto b = bottom_sccs(g);
  c.expect(b.size() == 1 && b[0].size() == 2, "n=2 {L1:2} does not end in a two-configuration bottom SCC");
  if (c.outcome.pass) {
    std::set<Configuration> found = {g.nodes[b[0][0]], g.nodes[b[0][1]]};
    const std::set<Configuration> expected = {Configuration::uniform(3, l1, 2), Configuration::uniform(3, l2, 2)};
    c.expect(found == expected, "n=2 bottom SCC is not {L1L1, L2L2}");
  }
  if (c.outcome.pass) {
    c.outcome.detail = std::to_string(v.results.size()) + " initial multisets pass; n=2 cycles in {L1L1, L2L2}";
  }
  return c.outcome;
}

Outcome symmetrization() {
  Checker c;
  const Protocol leader = symmetrize(builtin_protocol("leader-classic"));
  c.expect(is_symmetric(leader), "symmetrized leader election is not symmetric");
  const StateId l = leader.state_id("L");
  const StateId lp = leader.state_id("L'");
  const std::vector<StateId> all = {0, 1, 2, 3};
  const Verdict lv = stable_leader(leader, {l, lp}, {3, 6}, all);
  c.expect(lv.all_pass(), "symmetrized leader election fails");
  const Protocol orp = symmetrize(builtin_protocol("or"));
  c.expect(is_symmetric(orp), "symmetrized OR is not symmetric");
  const Verdict ov = stably_computes(orp, parse_predicate("n_1 >= 1"), {3, 6});
  c.expect(ov.all_pass(), "symmetrized OR fails n_1 >= 1");
  if (c.outcome.pass) {
    c.outcome.detail = "leader (" + std::to_string(lv.results.size()) + " multisets) and OR (" +
                       std::to_string(ov.results.size()) + " inputs) pass for 3..6";
  }
  return c.outcome;
}

Outcome self_stabilization() {
  Checker c;
  const Protocol pd = builtin_protocol("pavlov-pd");
  for (int kind = 0; kind < 2; ++kind) {
    for (std::size_t n = 2; n <= 8; ++n) {
      const InteractionGraph g = kind == 0 ? InteractionGraph::ring(n) : InteractionGraph::complete(n);
      std::vector<VertexConfiguration> roots;
      for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        VertexConfiguration v(n);
        for (std::size_t i = 0; i < n; ++i) {
          v[i] = static_cast<StateId>((mask >> i) & 1u);
        }
        roots.push_back(std::move(v));
      }
      const VertexConfigGraph rg = reachable(pd, g, roots);
      const auto b = bottom_sccs(rg);
      c.expect(b.size() == 1 && b[0].size() == 1 && rg.nodes[b[0][0]] == VertexConfiguration(n, 0),
               std::string(kind == 0 ? "ring" : "complete graph") + " N=" + std::to_string(n) +
                   ": bottom SCC is not {all-C}");
    }
  }
  const std::function<std::vector<std::pair<std::vector<std::uint32_t>, oracle::BigRational>>(
      const std::vector<std::uint32_t> &)>
      step = [&](const auto &x) { return oracle::multiset_step(pd, x); };
  const std::function<bool(const std::vector<std::uint32_t> &)> done = [](const auto &x) { return x[1] == 0; };
  const double exact =
      oracle::expected_absorption<std::vector<std::uint32_t>>({0, 3}, step, done).convert_to<double>();
  c.expect(exact == 10.5, "Markov oracle does not give 10.5");
  MonteCarloOptions opts;
  opts.trials = 10000;
  opts.seed = 20240601;
  const StatsReport r = monte_carlo(pd, Configuration({0, 3}), opts);
  c.expect(r.successes == opts.trials, "some trials did not reach all-C");
  c.expect(std::abs(r.mean_steps - exact) <= 0.05 * exact, "mean " + std::to_string(r.mean_steps) + " is off");
  if (c.outcome.pass) {
    std::ostringstream d;
    d << "unique bottom SCC all-C for rings and complete graphs N<=8; mean " << r.mean_steps << " vs exact "
      << exact;
    c.outcome.detail = d.str();
  }
  return c.outcome;
}

Outcome round_trip() {
  Checker c;
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + rng.below(4);
    std::vector<Rational> m(k * k);
    for (auto &x : m) {
      x = static_cast<std::int64_t>(rng.below(10));
    }
    std::vector<std::string> names;
    for (std::size_t i = 0; i < k; ++i) {
      names.push_back("s" + std::to_string(i));
    }
    // Thresholds strictly between integers as well as on them.
    const Rational delta(static_cast<std::int64_t>(rng.below(21)), 2);
    const Game g("random", names, m, delta);
    const Protocol p = derive_protocol(g, TieBreak::AllTies);
    c.expect(std::holds_alternative<Witness>(check_pavlovian(p, MatchMode::Subset)),
             "game " + std::to_string(trial) + " not recognized:\n" + print_game(g));
  }
  if (c.outcome.pass) {
    c.outcome.detail = "200/200 random games";
  }
  return c.outcome;
}

Outcome reproducibility() {
  Checker c;
  const auto dir = std::filesystem::temp_directory_path();
  const std::vector<std::vector<std::string>> invocations = {
      {"simulate", "builtin:majority", "--input", "0:4,1:3", "--trials", "300", "--seed", "11"},
      {"simulate", "builtin:pavlov-pd", "--init-states", "all-D", "--n", "6", "--graph", "ring", "--trials", "300",
       "--seed", "12"},
      {"simulate", "builtin:or", "--input", "0:5,1:1", "--trials", "300", "--seed", "13", "--stop", "window:20"},
  };
  std::size_t index = 0;
  for (const auto &base : invocations) {
    std::string csv[2];
    for (int rep = 0; rep < 2; ++rep) {
      const auto path = dir / ("popgame_acceptance_" + std::to_string(index) + "_" + std::to_string(rep) + ".csv");
      auto args = base;
      args.insert(args.end(), {"--csv", path.string(), "--threads", rep == 0 ? "1" : "0"});
      std::ostringstream out;
      std::ostringstream err;
      c.expect(cli::run(args, out, err) == 0, "simulate failed: " + err.str());
      csv[rep] = read_file(path);
      std::filesystem::remove(path);
    }
    c.expect(!csv[0].empty() && csv[0] == csv[1], "CSV differs between runs of invocation " + std::to_string(index));
    ++index;
  }
  if (c.outcome.pass) {
    c.outcome.detail = "3 invocations byte-identical across repeated runs";
  }
  return c.outcome;
}

} // namespace

int main() {
  struct Criterion {
    int id;
    const char *name;
    double limit_seconds;
    std::function<Outcome()> check;
  };
  const Criterion criteria[] = {
      {1, "two-state protocols are Pavlovian", 1, two_state_protocols},
      {2, "three-state counterexample", 1, cycle_counterexample},
      {3, "payoff matrix fidelity", 1, matrix_fidelity},
      {4, "stable computation of OR, AND, majority", 10, stable_computation},
      {5, "weak XOR", 10, weak_xor},
      {6, "leader election", 30, leader_election},
      {7, "symmetrization", 60, symmetrization},
      {8, "self-stabilization of Pavlov", 60, self_stabilization},
      {9, "random game round trip", 10, round_trip},
      {10, "simulation reproducibility", 60, reproducibility},
  };
  int failures = 0;
  for (const auto &cr : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.check();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.pass && seconds >= cr.limit_seconds) {
      o = {false, "took " + std::to_string(seconds) + "s"};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s  criterion %2d  %-42s %7.3fs (limit %gs)  %s\n", o.pass ? "PASS" : "FAIL", cr.id, cr.name, seconds,
                cr.limit_seconds, o.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
