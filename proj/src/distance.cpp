#include "sfl/distance.hpp"

#include <stdexcept>

namespace sfl {

std::vector<int> compute_distance_matrix(int size,
                                         const std::vector<std::uint8_t>& holes,
                                         Cell goal) {
  if (size <= 0) throw std::invalid_argument("distance: size must be positive");
  const std::size_t cells = static_cast<std::size_t>(size) * size;
  if (holes.size() != cells)
    throw std::invalid_argument("distance: hole mask size mismatch");
  if (goal.row < 0 || goal.row >= size || goal.col < 0 || goal.col >= size)
    throw std::invalid_argument("distance: goal out of bounds");
  if (holes[static_cast<std::size_t>(goal.row) * size + goal.col])
    throw std::invalid_argument("distance: goal on a hole");

  std::vector<int> dist(cells, kUnreachable);
  std::vector<Cell> queue;
  queue.reserve(cells);

  dist[static_cast<std::size_t>(goal.row) * size + goal.col] = 0;
  queue.push_back(goal);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Cell c = queue[head];
    const int d = dist[static_cast<std::size_t>(c.row) * size + c.col];
    for (Action a : kAllActions) {
      const Cell n = neighbor(c, a);
      if (n.row < 0 || n.row >= size || n.col < 0 || n.col >= size) continue;
      const std::size_t idx = static_cast<std::size_t>(n.row) * size + n.col;
      if (holes[idx] || dist[idx] != kUnreachable) continue;
      dist[idx] = d + 1;
      queue.push_back(n);
    }
  }
  return dist;
}

}  // namespace sfl
