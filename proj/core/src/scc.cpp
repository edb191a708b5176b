#include "scc.hpp"

#include <algorithm>
#include <cstdint>
#include <utility>

namespace popgame::detail {

std::vector<std::size_t> strongly_connected(const std::vector<std::vector<std::size_t>> &adjacency,
                                            std::size_t &component_count) {
  const std::size_t n = adjacency.size();
  constexpr std::size_t unvisited = SIZE_MAX;
  std::vector<std::size_t> order(n, unvisited), low(n, 0), component(n, unvisited);
  std::vector<std::size_t> stack;
  std::vector<bool> on_stack(n, false);
  std::vector<std::pair<std::size_t, std::size_t>> frames;
  std::size_t counter = 0;
  component_count = 0;

  for (std::size_t root = 0; root < n; ++root) {
    if (order[root] != unvisited) {
      continue;
    }
    frames.emplace_back(root, 0);
    order[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto &[v, next] = frames.back();
      if (next < adjacency[v].size()) {
        const std::size_t w = adjacency[v][next++];
        if (order[w] == unvisited) {
          order[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], order[w]);
        }
        continue;
      }
      const std::size_t done = v;
      frames.pop_back();
      if (!frames.empty()) {
        low[frames.back().first] = std::min(low[frames.back().first], low[done]);
      }
      if (low[done] == order[done]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          component[w] = component_count;
        } while (w != done);
        ++component_count;
      }
    }
  }
  return component;
}

} // namespace popgame::detail
