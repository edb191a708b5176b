#pragma once

#include <cstddef>
#include <vector>

namespace popgame::detail {

/// Iterative Tarjan. Returns the component id of every vertex; ids come out
/// in reverse topological order (an arc between distinct components always
/// goes from a higher to a lower id).
std::vector<std::size_t> strongly_connected(const std::vector<std::vector<std::size_t>> &adjacency,
                                            std::size_t &component_count);

} // namespace popgame::detail
