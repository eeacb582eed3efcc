#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sfl/grid.hpp"
#include "sfl/rng.hpp"

namespace sfl {

struct GenParams {
  int size_min = 4;
  int size_max = 10;
  double hole_density = 0.2;
  int max_attempts = 1000;  // rejection bound for solvability
};

// One concrete environment instance. Every spec handed out by this module is
// solvable: distance[start] is finite, start != goal, and neither sits on a
// hole. The distance matrix is computed once here and stays constant for the
// lifetime of the spec.
struct ExampleSpec {
  int size = 0;
  std::vector<std::uint8_t> holes;  // row-major size*size mask
  Cell start{};
  Cell goal{};
  std::vector<int> distance;  // to goal; kUnreachable on holes/cut-off cells

  bool in_bounds(Cell c) const {
    return c.row >= 0 && c.row < size && c.col >= 0 && c.col < size;
  }
  bool hole_at(Cell c) const {
    return holes[static_cast<std::size_t>(c.row) * size + c.col] != 0;
  }
  int distance_at(Cell c) const {
    return distance[static_cast<std::size_t>(c.row) * size + c.col];
  }
  bool solvable() const { return is_reachable(distance_at(start)); }

  // layout = (size, holes, start, goal); the distance matrix is derived
  bool same_layout(const ExampleSpec& other) const {
    return size == other.size && holes == other.holes && start == other.start &&
           goal == other.goal;
  }
  friend bool operator==(const ExampleSpec&, const ExampleSpec&) = default;

  /// Builds a spec from explicit parts, computes the distance matrix, and
  /// validates every invariant (bounds, start != goal, no hole under either,
  /// solvability). Throws std::invalid_argument on violation.
  static ExampleSpec from_parts(int size, std::vector<std::uint8_t> holes,
                                Cell start, Cell goal);
};

/// Samples a solvable example: grid size uniform in [size_min, size_max],
/// start/goal uniform over distinct cells, holes per-cell with probability
/// hole_density excluding start/goal. Rejection-resamples the whole draw
/// until the start can reach the goal; throws ConfigError after
/// max_attempts failures (over-dense hole configuration).
ExampleSpec generate_example(Rng& rng, const GenParams& params);

/// Resamples one factor of `spec`, leaving the others untouched, and always
/// produces a value different from the current one:
///   start      — uniform over non-hole cells that can reach the goal,
///                excluding the goal and the current start
///   goal       — uniform over non-hole cells reachable from the start,
///                excluding the start and the current goal
///   holes      — fresh per-cell draw at params.hole_density (start/goal
///                excluded), rejected until solvable
///   grid_size  — new size uniform over [size_min, size_max] \ {size}; the
///                layout is anchored top-left: growing pads with frozen
///                cells and keeps holes/start/goal in place, shrinking crops
///                the hole mask and clamps start/goal into bounds, re-drawing
///                an endpoint only when the clamp lands it on a hole, on the
///                other endpoint, or cut off from the goal
/// Solvability is re-validated; throws ConfigError when the attempt bound is
/// exhausted.
ExampleSpec resample_variable(const ExampleSpec& spec, Variable which, Rng& rng,
                              const GenParams& params);

/// Self-describing text record, round-trip stable. Field order:
///   example v1 / size N / holes + N rows of 0|1 / start r c / goal r c / end
void write_example(std::ostream& out, const ExampleSpec& spec);
ExampleSpec read_example(std::istream& in);

void write_store(const std::string& path, const std::vector<ExampleSpec>& store);
std::vector<ExampleSpec> read_store(const std::string& path);

}  // namespace sfl
