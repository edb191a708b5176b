#include "popgame/stdlib.hpp"

#include <algorithm>
#include <stdexcept>

namespace popgame {

namespace {

struct RuleText {
  const char *a, *b, *a2, *b2;
};

Protocol make_protocol(std::string name, std::vector<std::string> states, std::initializer_list<RuleText> text) {
  auto index = [&](const char *s) {
    return static_cast<StateId>(std::find(states.begin(), states.end(), s) - states.begin());
  };
  std::vector<Rule> rules;
  for (const auto &r : text) {
    rules.push_back(Rule{{index(r.a), index(r.b)}, {index(r.a2), index(r.b2)}});
  }
  return Protocol(std::move(name), std::move(states), rules);
}

Protocol with_bit_io(const Protocol &p) {
  return p.with_inputs({{"0", p.state_id("0")}, {"1", p.state_id("1")}})
      .with_outputs({0, 1});
}

Game make_game(std::string name, std::vector<std::string> strategies, std::initializer_list<std::int64_t> rows,
               std::int64_t threshold) {
  std::vector<Rational> payoffs(rows.begin(), rows.end());
  return Game(std::move(name), std::move(strategies), std::move(payoffs), Rational(threshold));
}

} // namespace

const std::vector<std::string> &builtin_keys() {
  static const std::vector<std::string> keys = {
      "or", "and", "xor", "leader-classic", "leader-pavlovian", "majority", "pavlov-pd", "cycle3",
      "leader-game", "majority-game", "pd",
  };
  return keys;
}

Game builtin_pd(const PrisonerParams &params, Rational threshold) {
  return prisoners_dilemma(params, threshold);
}

NamedArtifact builtin(std::string_view key) {
  if (key == "or") {
    return {"or", "two-state OR of input bits: a 1 converts any 0 it meets",
            with_bit_io(make_protocol("or", {"0", "1"}, {{"0", "1", "1", "1"}, {"1", "0", "1", "1"}})),
            "n_1 >= 1", {}};
  }
  if (key == "and") {
    return {"and", "two-state AND of input bits: a 0 converts any 1 it meets",
            with_bit_io(make_protocol("and", {"0", "1"}, {{"0", "1", "0", "0"}, {"1", "0", "0", "0"}})),
            "n_0 = 0", {}};
  }
  if (key == "xor") {
    return {"xor",
            "weak XOR: pairs of 1s annihilate, leaving a single 1 for odd inputs; the answer "
            "is not broadcast, so the parity predicate is not stably computed",
            with_bit_io(make_protocol("xor", {"0", "1"}, {{"1", "1", "0", "0"}})), std::nullopt, {}};
  }
  if (key == "leader-classic") {
    return {"leader-classic", "asymmetric leader election: of two meeting leaders the responder resigns",
            make_protocol("leader-classic", {"L", "N"}, {{"L", "L", "L", "N"}}), std::nullopt, {"L"}};
  }
  if (key == "leader-pavlovian") {
    return {"leader-pavlovian",
            "symmetric leader election with toggling leader states L1/L2; correct for populations of 3 or more",
            make_protocol("leader-pavlovian", {"L1", "L2", "N"},
                          {{"L1", "L2", "L1", "N"},
                           {"L1", "N", "N", "L2"},
                           {"L2", "N", "N", "L1"},
                           {"N", "N", "N", "N"},
                           {"L2", "L1", "N", "L1"},
                           {"N", "L1", "L2", "N"},
                           {"N", "L2", "L1", "N"},
                           {"L1", "L1", "L2", "L2"},
                           {"L2", "L2", "L1", "L1"}}),
            std::nullopt, {"L1", "L2"}};
  }
  if (key == "majority") {
    Protocol p = make_protocol("majority", {"N", "Y", "0", "1"},
                               {{"N", "Y", "Y", "Y"},
                                {"Y", "N", "Y", "Y"},
                                {"N", "0", "Y", "0"},
                                {"0", "N", "0", "Y"},
                                {"Y", "1", "N", "1"},
                                {"1", "Y", "1", "N"},
                                {"0", "1", "N", "Y"},
                                {"1", "0", "Y", "N"}});
    p = p.with_inputs({{"0", p.state_id("0")}, {"1", p.state_id("1")}}).with_outputs({0, 1, 1, 0});
    return {"majority", "at least as many 0s as 1s; a 0 and a 1 cancel into Y and N, ties answer Y",
            std::move(p), "n_0 >= n_1", {}};
  }
  if (key == "pavlov-pd") {
    Protocol p = make_protocol("pavlov-pd", {"C", "D"},
                               {{"C", "D", "D", "D"}, {"D", "C", "D", "D"}, {"D", "D", "C", "C"}});
    p = p.with_inputs({{"C", 0}, {"D", 1}}).with_outputs({1, 0});
    return {"pavlov-pd", "win-stay/lose-shift prisoner's dilemma; all-C is the unique absorbing state",
            std::move(p), std::nullopt, {}};
  }
  if (key == "cycle3") {
    return {"cycle3",
            "symmetric deterministic 3-state protocol whose moves against q0 form a cycle; "
            "no payoff matrix realizes it exactly",
            make_protocol("cycle3", {"q0", "q1", "q2"},
                          {{"q0", "q0", "q1", "q1"},
                           {"q1", "q0", "q2", "q0"},
                           {"q0", "q1", "q0", "q2"},
                           {"q2", "q0", "q0", "q0"},
                           {"q0", "q2", "q0", "q0"}}),
            std::nullopt, {}};
  }
  if (key == "leader-game") {
    return {"leader-game", "payoffs realizing leader-pavlovian with threshold 4",
            make_game("leader-game", {"L1", "L2", "N"}, {1, 4, 1, 3, 1, 1, 2, 1, 4}, 4), std::nullopt, {}};
  }
  if (key == "majority-game") {
    return {"majority-game", "payoffs realizing majority with threshold 2",
            make_game("majority-game", {"N", "Y", "0", "1"}, {3, 1, 1, 3, 2, 3, 3, 1, 2, 2, 2, 1, 2, 2, 1, 2}, 2),
            std::nullopt, {}};
  }
  if (key == "pd") {
    return {"pd", "prisoner's dilemma (T,R,P,S) = (5,3,1,0), threshold 2; parameters are a conventional choice",
            builtin_pd(), std::nullopt, {}};
  }
  throw std::invalid_argument("unknown builtin '" + std::string(key) + "'");
}

Protocol builtin_protocol(std::string_view key) {
  auto artifact = builtin(key);
  if (auto *p = std::get_if<Protocol>(&artifact.value)) {
    return std::move(*p);
  }
  throw std::invalid_argument("builtin '" + std::string(key) + "' is a game, not a protocol");
}

Game builtin_game(std::string_view key) {
  auto artifact = builtin(key);
  if (auto *g = std::get_if<Game>(&artifact.value)) {
    return std::move(*g);
  }
  throw std::invalid_argument("builtin '" + std::string(key) + "' is a protocol, not a game");
}

Protocol symmetrize(const Protocol &protocol) {
  if (!is_deterministic(protocol)) {
    throw std::invalid_argument("symmetrize needs a deterministic protocol");
  }
  const auto k = static_cast<StateId>(protocol.state_count());
  std::vector<std::string> states = protocol.states();
  for (StateId q = 0; q < k; ++q) {
    std::string twin = protocol.state_name(q) + "'";
    while (std::find(states.begin(), states.end(), twin) != states.end()) {
      twin += "'";
    }
    states.push_back(std::move(twin));
  }
  auto primed = [k](StateId q) { return static_cast<StateId>(q + k); };
  auto only = [&](StateId a, StateId b) { return protocol.successors(a, b).front(); };

  std::vector<Rule> rules;
  for (StateId q = 0; q < k; ++q) {
    const auto [alpha, beta] = only(q, q);
    const StateId qp = primed(q);
    rules.push_back({{q, qp}, {alpha, beta}});
    rules.push_back({{qp, q}, {beta, alpha}});
    rules.push_back({{q, q}, {qp, qp}});
    rules.push_back({{qp, qp}, {q, q}});
    for (StateId gamma = 0; gamma < 2 * k; ++gamma) {
      if (gamma == q || gamma == qp) {
        continue;
      }
      rules.push_back({{q, gamma}, {qp, gamma}});
      rules.push_back({{qp, gamma}, {q, gamma}});
      rules.push_back({{gamma, q}, {gamma, qp}});
      rules.push_back({{gamma, qp}, {gamma, q}});
    }
  }
  for (StateId q = 0; q < k; ++q) {
    for (StateId r = 0; r < k; ++r) {
      if (q == r) {
        continue;
      }
      const auto [alpha, beta] = only(q, r);
      const auto [delta, epsilon] = only(r, q);
      rules.push_back({{q, primed(r)}, {alpha, beta}});
      rules.push_back({{primed(r), q}, {beta, alpha}});
      rules.push_back({{r, primed(q)}, {delta, epsilon}});
      rules.push_back({{primed(q), r}, {epsilon, delta}});
    }
  }

  Protocol out(protocol.name() + "-sym", std::move(states), rules);
  if (protocol.has_inputs()) {
    std::vector<std::pair<std::string, StateId>> inputs;
    for (std::size_t i = 0; i < protocol.input_alphabet().size(); ++i) {
      inputs.emplace_back(protocol.input_alphabet()[i], protocol.input_map()[i]);
    }
    out = out.with_inputs(std::move(inputs));
  }
  if (protocol.has_outputs()) {
    std::vector<std::uint8_t> outputs = protocol.output_map();
    outputs.insert(outputs.end(), protocol.output_map().begin(), protocol.output_map().end());
    out = out.with_outputs(std::move(outputs));
  }
  return out;
}

} // namespace popgame
