#include "sfl/agents.hpp"

#include <stdexcept>

namespace sfl {

Action random_action(Rng& rng) {
  return static_cast<Action>(rng.uniform_int(0, kNumActions - 1));
}

Action best_direction(const std::array<int, 4>& dists) {
  int best = -1;
  for (int i = 0; i < kNumActions; ++i) {
    if (!is_reachable(dists[static_cast<std::size_t>(i)])) continue;
    if (best < 0 || dists[static_cast<std::size_t>(i)] <
                        dists[static_cast<std::size_t>(best)])
      best = i;
  }
  if (best < 0) throw std::logic_error("best_direction: no finite neighbor");
  return static_cast<Action>(best);
}

Action optimal_action(const EnvState& state) {
  const ExampleSpec& ex = state.example;
  if (!is_reachable(ex.distance_at(state.agent)))
    throw std::logic_error("optimal_action: agent cell cannot reach the goal");
  std::array<int, 4> dists{};
  for (int i = 0; i < kNumActions; ++i) {
    const Cell n = neighbor(state.agent, kAllActions[static_cast<std::size_t>(i)]);
    dists[static_cast<std::size_t>(i)] =
        ex.in_bounds(n) ? ex.distance_at(n) : kUnreachable;
  }
  return best_direction(dists);
}

std::optional<double> optimal_value(const ExampleSpec& example, Cell cell) {
  if (!example.in_bounds(cell))
    throw std::invalid_argument("optimal_value: cell out of bounds");
  if (cell == example.goal) return 0.0;  // terminal, nothing left to collect
  const int d = example.distance_at(cell);
  if (!is_reachable(d)) return std::nullopt;
  return kGoalBonus + kMoveCost * d;
}

}  // namespace sfl
