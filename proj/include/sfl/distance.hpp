#pragma once

#include <cstdint>
#include <vector>

#include "sfl/grid.hpp"

namespace sfl {

/// Breadth-first-search distance from every cell to the goal under
/// 4-connectivity, avoiding holes. Holes and cells with no path to the goal
/// get kUnreachable. distance[goal] == 0.
///
/// `holes` is a row-major size*size mask; the goal must be in bounds and not
/// a hole.
std::vector<int> compute_distance_matrix(int size,
                                         const std::vector<std::uint8_t>& holes,
                                         Cell goal);

}  // namespace sfl
