#pragma once

#include <array>
#include <optional>

#include "sfl/env.hpp"
#include "sfl/rng.hpp"

namespace sfl {

/// Uniform over the four actions.
Action random_action(Rng& rng);

/// Picks the direction with the smallest finite neighbor distance; ties break
/// by the canonical action order Left < Down < Right < Up. `dists` is indexed
/// by action code; kUnreachable marks holes and off-grid directions.
/// Throws std::logic_error if no direction is finite.
Action best_direction(const std::array<int, 4>& dists);

/// Greedy descent on the distance matrix: the optimal policy for this task.
/// Requires the agent's cell to have a finite distance.
Action optimal_action(const EnvState& state);

/// Expected undiscounted return of the optimal policy from `cell`:
/// 10 - 0.1 * distance, 0 at the goal itself (episode over, nothing left to
/// collect), nullopt on holes and unreachable cells.
std::optional<double> optimal_value(const ExampleSpec& example, Cell cell);

}  // namespace sfl
