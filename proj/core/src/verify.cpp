#include "popgame/verify.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include <boost/container_hash/hash.hpp>

#include "scc.hpp"

namespace popgame {

std::size_t detail::VertexConfigurationHash::operator()(const VertexConfiguration &v) const {
  return boost::hash_range(v.begin(), v.end());
}

ConfigGraph reachable(const Protocol &protocol, const Configuration &init, std::size_t budget) {
  return reachable(protocol, std::span<const Configuration>(&init, 1), budget);
}

ConfigGraph reachable(const Protocol &protocol, std::span<const Configuration> roots, std::size_t budget) {
  for (const auto &root : roots) {
    if (root.state_count() != protocol.state_count()) {
      throw StructuralError("configuration does not match the protocol's state count");
    }
  }
  return detail::explore<Configuration, ConfigurationHash>(
      roots, [&](const Configuration &c) { return successors(protocol, c); }, budget);
}

VertexConfigGraph reachable(const Protocol &protocol, const InteractionGraph &graph,
                            std::span<const VertexConfiguration> roots, std::size_t budget) {
  for (const auto &root : roots) {
    if (root.size() != graph.vertex_count()) {
      throw StructuralError("vertex configuration length differs from the graph's vertex count");
    }
  }
  return detail::explore<VertexConfiguration, detail::VertexConfigurationHash>(
      roots, [&](const VertexConfiguration &v) { return successors(protocol, graph, v); }, budget);
}

std::vector<std::vector<std::size_t>> bottom_sccs(const std::vector<std::vector<std::size_t>> &arcs) {
  std::size_t count = 0;
  const auto component = detail::strongly_connected(arcs, count);
  std::vector<bool> bottom(count, true);
  for (std::size_t v = 0; v < arcs.size(); ++v) {
    for (std::size_t w : arcs[v]) {
      if (component[w] != component[v]) {
        bottom[component[v]] = false;
      }
    }
  }
  std::vector<std::vector<std::size_t>> members(count);
  for (std::size_t v = 0; v < arcs.size(); ++v) {
    if (bottom[component[v]]) {
      members[component[v]].push_back(v);
    }
  }
  std::vector<std::vector<std::size_t>> out;
  for (auto &m : members) {
    if (!m.empty()) {
      out.push_back(std::move(m));
    }
  }
  std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) { return a.front() < b.front(); });
  return out;
}

bool Verdict::all_pass() const {
  return std::all_of(results.begin(), results.end(), [](const InputVerdict &r) { return r.pass; });
}

std::vector<std::vector<std::uint32_t>> compositions(std::size_t kinds, std::uint32_t count) {
  std::vector<std::vector<std::uint32_t>> out;
  if (kinds == 0) {
    if (count == 0) {
      out.emplace_back();
    }
    return out;
  }
  std::vector<std::uint32_t> current(kinds, 0);
  auto fill = [&](auto &self, std::size_t slot, std::uint32_t left) -> void {
    if (slot + 1 == kinds) {
      current[slot] = left;
      out.push_back(current);
      return;
    }
    for (std::uint32_t c = 0; c <= left; ++c) {
      current[slot] = c;
      self(self, slot + 1, left - c);
    }
  };
  fill(fill, 0, count);
  return out;
}

namespace {

struct Task {
  InputCounts input;
  Configuration init;
  bool expected = false;
};

// `violates` inspects one bottom-SCC configuration and fills the
// counterexample fields it cares about when the property fails there.
template <class Violates>
Verdict check_all(const Protocol &protocol, std::vector<Task> tasks, SizeRange sizes,
                  const VerifyOptions &options, Violates &&violates) {
  Verdict verdict;
  verdict.sizes = sizes;
  verdict.results.resize(tasks.size());

  auto work = [&](std::size_t i) {
    const Task &task = tasks[i];
    InputVerdict &out = verdict.results[i];
    out.input = task.input;
    out.expected = task.expected;
    const ConfigGraph graph = reachable(protocol, task.init, options.node_budget);
    const auto bottoms = bottom_sccs(graph);
    out.reachable_count = graph.nodes.size();
    out.bottom_scc_count = bottoms.size();
    out.pass = true;
    for (const auto &scc : bottoms) {
      for (std::size_t node : scc) {
        Counterexample cex;
        if (violates(graph.nodes[node], task, cex)) {
          cex.config = graph.nodes[node];
          for (std::size_t step : graph.path_to(node)) {
            cex.path.push_back(graph.nodes[step]);
          }
          out.pass = false;
          out.counterexample = std::move(cex);
          return;
        }
      }
    }
  };

  std::size_t threads = options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(tasks.size(), 1));
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        work(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
        next = tasks.size();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back(worker);
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
  return verdict;
}

void check_sizes(SizeRange sizes) {
  if (sizes.min < 2 || sizes.max < sizes.min) {
    throw std::invalid_argument("population sizes must satisfy 2 <= min <= max");
  }
}

} // namespace

Verdict stably_computes(const Protocol &protocol, const PredicateExpr &predicate, SizeRange sizes,
                        const VerifyOptions &options) {
  check_sizes(sizes);
  if (!protocol.has_inputs() || !protocol.has_outputs()) {
    throw StructuralError("protocol '" + protocol.name() + "' needs an input map and an output map");
  }
  const auto &alphabet = protocol.input_alphabet();
  for (const auto &sym : symbols(predicate)) {
    if (std::find(alphabet.begin(), alphabet.end(), sym) == alphabet.end()) {
      throw StructuralError("predicate symbol '" + sym + "' is not an input symbol of '" +
                            protocol.name() + "'");
    }
  }

  std::vector<Task> tasks;
  for (std::uint32_t n = sizes.min; n <= sizes.max; ++n) {
    for (const auto &counts : compositions(alphabet.size(), n)) {
      Task task;
      for (std::size_t i = 0; i < alphabet.size(); ++i) {
        task.input[alphabet[i]] = counts[i];
      }
      task.init = initial_config(protocol, task.input);
      task.expected = eval_predicate(predicate, task.input);
      tasks.push_back(std::move(task));
    }
  }
  return check_all(protocol, std::move(tasks), sizes, options,
                   [&](const Configuration &config, const Task &task, Counterexample &cex) {
                     cex.output = output_of_config(protocol, config);
                     return cex.output != (task.expected ? Output::One : Output::Zero);
                   });
}

Verdict stable_leader(const Protocol &protocol, const std::vector<StateId> &leaders, SizeRange sizes,
                      const std::vector<StateId> &initial_states, const VerifyOptions &options) {
  check_sizes(sizes);
  std::vector<bool> is_leader(protocol.state_count(), false);
  for (StateId s : leaders) {
    if (s >= protocol.state_count()) {
      throw StructuralError("leader state index out of range");
    }
    is_leader[s] = true;
  }
  for (StateId s : initial_states) {
    if (s >= protocol.state_count()) {
      throw StructuralError("initial state index out of range");
    }
  }
  auto leader_count = [&](const Configuration &c) {
    std::size_t total = 0;
    for (StateId s = 0; s < c.state_count(); ++s) {
      total += is_leader[s] ? c[s] : 0;
    }
    return total;
  };

  std::vector<Task> tasks;
  for (std::uint32_t n = sizes.min; n <= sizes.max; ++n) {
    for (const auto &counts : compositions(initial_states.size(), n)) {
      std::vector<std::uint32_t> full(protocol.state_count(), 0);
      Task task;
      for (std::size_t i = 0; i < initial_states.size(); ++i) {
        full[initial_states[i]] += counts[i];
        task.input[protocol.state_name(initial_states[i])] += counts[i];
      }
      task.init = Configuration(std::move(full));
      if (leader_count(task.init) == 0) {
        continue;
      }
      tasks.push_back(std::move(task));
    }
  }
  return check_all(protocol, std::move(tasks), sizes, options,
                   [&](const Configuration &config, const Task &, Counterexample &cex) {
                     cex.leaders = leader_count(config);
                     cex.output = output_of_config(protocol, config);
                     return cex.leaders != 1;
                   });
}

} // namespace popgame
