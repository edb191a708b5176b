#include "popgame/pavcheck.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <stdexcept>

#include "popgame/errors.hpp"
#include "scc.hpp"

namespace popgame {

MatchMode default_mode(const Protocol &protocol) {
  return is_deterministic(protocol) ? MatchMode::Exact : MatchMode::Subset;
}

ConstraintSystem::ConstraintSystem(std::size_t strategy_count) : strategy_count_(strategy_count) {}

void ConstraintSystem::add_le(std::size_t lo, std::size_t hi) { add(OrderEdge{lo, hi, false}); }

void ConstraintSystem::add_lt(std::size_t lo, std::size_t hi) { add(OrderEdge{lo, hi, true}); }

void ConstraintSystem::add(OrderEdge edge) {
  if (edge.lo >= variable_count() || edge.hi >= variable_count()) {
    throw StructuralError("constraint references an undeclared variable");
  }
  if (!edge.strict && edge.lo == edge.hi) {
    return;
  }
  auto it = std::lower_bound(edges_.begin(), edges_.end(), edge);
  if (it == edges_.end() || *it != edge) {
    edges_.insert(it, edge);
  }
}

bool ConstraintSystem::contains(const OrderEdge &edge) const {
  return std::binary_search(edges_.begin(), edges_.end(), edge);
}

std::string ConstraintSystem::variable_name(std::size_t variable,
                                            const std::vector<std::string> &names) const {
  if (variable == threshold()) {
    return "threshold";
  }
  const std::size_t row = variable / strategy_count_;
  const std::size_t col = variable % strategy_count_;
  auto name = [&](std::size_t i) { return i < names.size() ? names[i] : std::to_string(i); };
  return "M[" + name(row) + "][" + name(col) + "]";
}

Game Witness::to_game(std::string name, std::vector<std::string> strategies) const {
  std::vector<Rational> payoffs(matrix.begin(), matrix.end());
  return Game(std::move(name), std::move(strategies), std::move(payoffs), Rational(threshold));
}

bool Witness::satisfies(const ConstraintSystem &system) const {
  if (strategy_count != system.strategy_count()) {
    return false;
  }
  auto value = [&](std::size_t v) { return v == system.threshold() ? threshold : matrix[v]; };
  return std::all_of(system.edges().begin(), system.edges().end(), [&](const OrderEdge &e) {
    return e.strict ? value(e.lo) < value(e.hi) : value(e.lo) <= value(e.hi);
  });
}

bool UnsatCertificate::is_valid_for(const ConstraintSystem &system) const {
  if (cycle.size() < 2 || strict.size() + 1 != cycle.size() || cycle.front() != cycle.back()) {
    return false;
  }
  bool any_strict = false;
  for (std::size_t i = 0; i + 1 < cycle.size(); ++i) {
    if (!system.contains(OrderEdge{cycle[i], cycle[i + 1], strict[i]})) {
      return false;
    }
    any_strict = any_strict || strict[i];
  }
  return any_strict;
}

std::string UnsatCertificate::describe(const ConstraintSystem &system,
                                       const std::vector<std::string> &names) const {
  // Printed against the edge direction so it reads as a descending chain.
  std::string out;
  for (std::size_t i = cycle.size(); i-- > 0;) {
    out += system.variable_name(cycle[i], names);
    if (i > 0) {
      out += strict[i - 1] ? " > " : " >= ";
    }
  }
  return out;
}

namespace {

std::vector<StateId> first_components(std::span<const StatePair> cell) {
  std::vector<StateId> out;
  for (const auto &p : cell) {
    out.push_back(p.first);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<StateId> second_components(std::span<const StatePair> cell) {
  std::vector<StateId> out;
  for (const auto &p : cell) {
    out.push_back(p.second);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool contains(const std::vector<StateId> &sorted, StateId s) {
  return std::binary_search(sorted.begin(), sorted.end(), s);
}

} // namespace

ConstraintSystem build_constraints(const Protocol &protocol, MatchMode mode) {
  if (!is_symmetric(protocol)) {
    throw std::invalid_argument("protocol '" + protocol.name() + "' is not symmetric");
  }
  const auto k = static_cast<StateId>(protocol.state_count());
  ConstraintSystem system(k);
  const std::size_t delta = system.threshold();

  for (StateId self = 0; self < k; ++self) {
    for (StateId other = 0; other < k; ++other) {
      const auto moves = first_components(protocol.successors(self, other));
      const std::size_t payoff = system.entry(self, other);
      if (moves.size() == 1 && moves.front() == self) {
        system.add_le(delta, payoff);
        continue;
      }
      if (contains(moves, self)) {
        // Staying and moving on the same encounter: no threshold can do both.
        system.add_le(delta, payoff);
        system.add_lt(payoff, delta);
        continue;
      }
      system.add_lt(payoff, delta);
      for (StateId target : moves) {
        for (StateId z = 0; z < k; ++z) {
          if (z == self || z == target) {
            continue;
          }
          if (mode == MatchMode::Exact && !contains(moves, z)) {
            system.add_lt(system.entry(z, other), system.entry(target, other));
          } else {
            system.add_le(system.entry(z, other), system.entry(target, other));
          }
        }
      }
    }
  }
  return system;
}

SolveResult solve_order_constraints(const ConstraintSystem &system) {
  const std::size_t n = system.variable_count();
  std::vector<std::vector<std::size_t>> adjacency(n);
  for (const auto &e : system.edges()) {
    adjacency[e.lo].push_back(e.hi);
  }
  std::size_t component_count = 0;
  const auto component = detail::strongly_connected(adjacency, component_count);

  for (const auto &bad : system.edges()) {
    if (!bad.strict || component[bad.lo] != component[bad.hi]) {
      continue;
    }
    // Shortest walk hi -> lo inside the component closes the strict cycle.
    const std::size_t comp = component[bad.lo];
    std::vector<std::size_t> previous(n, SIZE_MAX);
    std::deque<std::size_t> queue{bad.hi};
    previous[bad.hi] = bad.hi;
    while (!queue.empty() && previous[bad.lo] == SIZE_MAX) {
      const std::size_t v = queue.front();
      queue.pop_front();
      for (std::size_t w : adjacency[v]) {
        if (component[w] == comp && previous[w] == SIZE_MAX) {
          previous[w] = v;
          queue.push_back(w);
        }
      }
    }
    std::vector<std::size_t> tail{bad.lo};
    while (tail.back() != bad.hi) {
      tail.push_back(previous[tail.back()]);
    }
    UnsatCertificate cert;
    cert.cycle.push_back(bad.lo);
    cert.cycle.insert(cert.cycle.end(), tail.rbegin(), tail.rend());
    cert.strict.push_back(true);
    for (std::size_t i = 1; i + 1 < cert.cycle.size(); ++i) {
      const std::size_t lo = cert.cycle[i];
      const std::size_t hi = cert.cycle[i + 1];
      cert.strict.push_back(system.contains(OrderEdge{lo, hi, true}));
    }
    return cert;
  }

  // Longest path over the condensation, visited in topological order.
  std::vector<std::int64_t> rank(component_count, 0);
  std::vector<std::vector<const OrderEdge *>> outgoing(component_count);
  for (const auto &e : system.edges()) {
    outgoing[component[e.lo]].push_back(&e);
  }
  for (std::size_t c = component_count; c-- > 0;) {
    for (const OrderEdge *e : outgoing[c]) {
      auto &target = rank[component[e->hi]];
      target = std::max(target, rank[c] + (e->strict ? 1 : 0));
    }
  }
  Witness witness;
  witness.strategy_count = system.strategy_count();
  witness.matrix.resize(n - 1);
  for (std::size_t v = 0; v + 1 < n; ++v) {
    witness.matrix[v] = rank[component[v]];
  }
  witness.threshold = rank[component[system.threshold()]];
  return witness;
}

bool reproduces(const Game &game, const Protocol &protocol, MatchMode mode) {
  if (game.size() != protocol.state_count()) {
    return false;
  }
  const Protocol derived = derive_protocol(game, TieBreak::AllTies);
  const auto k = static_cast<StateId>(protocol.state_count());
  for (StateId a = 0; a < k; ++a) {
    for (StateId b = 0; b < k; ++b) {
      auto want = protocol.successors(a, b);
      auto got = derived.successors(a, b);
      const bool ok = mode == MatchMode::Exact
                          ? std::equal(want.begin(), want.end(), got.begin(), got.end())
                          : std::includes(got.begin(), got.end(), want.begin(), want.end());
      if (!ok) {
        return false;
      }
    }
  }
  return true;
}

PavlovianResult check_pavlovian(const Protocol &protocol, std::optional<MatchMode> mode) {
  if (auto violation = find_asymmetry(protocol)) {
    NotPavlovian result;
    result.reason = NotPavlovian::Reason::NotSymmetric;
    result.violation = violation;
    return result;
  }
  const MatchMode m = mode.value_or(default_mode(protocol));
  const auto k = static_cast<StateId>(protocol.state_count());

  if (m == MatchMode::Exact) {
    for (StateId a = 0; a < k; ++a) {
      for (StateId b = 0; b < k; ++b) {
        auto cell = protocol.successors(a, b);
        if (cell.size() != first_components(cell).size() * second_components(cell).size()) {
          NotPavlovian result;
          result.reason = NotPavlovian::Reason::NonProductSuccessors;
          result.pair = StatePair{a, b};
          return result;
        }
      }
    }
  }

  ConstraintSystem system = build_constraints(protocol, m);
  SolveResult solved = solve_order_constraints(system);
  if (auto *cert = std::get_if<UnsatCertificate>(&solved)) {
    NotPavlovian result;
    result.reason = NotPavlovian::Reason::Unsatisfiable;
    result.certificate = std::move(*cert);
    result.system = std::move(system);
    return result;
  }
  auto &witness = std::get<Witness>(solved);
  if (!witness.satisfies(system) ||
      !reproduces(witness.to_game(protocol.name(), protocol.states()), protocol, m)) {
    throw std::logic_error("payoff witness for '" + protocol.name() + "' does not reproduce it");
  }
  return witness;
}

std::string NotPavlovian::describe(const Protocol &protocol) const {
  auto pair_text = [&](StatePair p) {
    return protocol.state_name(p.first) + " " + protocol.state_name(p.second);
  };
  switch (reason) {
  case Reason::NotSymmetric:
    return "not symmetric: rule " + pair_text(violation->from) + " -> " + pair_text(violation->to) +
           " has no mirrored rule " + pair_text({violation->from.second, violation->from.first}) +
           " -> " + pair_text({violation->to.second, violation->to.first});
  case Reason::NonProductSuccessors:
    return "successors of " + pair_text(*pair) +
           " are not a product of per-agent choices (exact mode)";
  case Reason::Unsatisfiable:
    break;
  }
  return "no payoff matrix exists: " + certificate->describe(*system, protocol.states());
}

} // namespace popgame
