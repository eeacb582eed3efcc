#include "sfl/example.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sfl/distance.hpp"
#include "sfl/errors.hpp"

namespace sfl {

namespace {

std::size_t cell_index(int size, Cell c) {
  return static_cast<std::size_t>(c.row) * size + c.col;
}

Cell cell_from_index(int size, int idx) { return {idx / size, idx % size}; }

void validate_gen_params(const GenParams& p) {
  if (p.size_min < 2 || p.size_min > p.size_max)
    throw ConfigError("generate_example: need 2 <= size_min <= size_max");
  if (p.hole_density < 0.0 || p.hole_density >= 1.0)
    throw ConfigError("generate_example: need 0 <= hole_density < 1");
  if (p.max_attempts < 1)
    throw ConfigError("generate_example: max_attempts must be >= 1");
}

std::vector<std::uint8_t> draw_holes(Rng& rng, int size, double density,
                                     Cell start, Cell goal) {
  std::vector<std::uint8_t> holes(static_cast<std::size_t>(size) * size, 0);
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      const Cell cell{r, c};
      if (cell == start || cell == goal) continue;
      if (rng.bernoulli(density)) holes[cell_index(size, cell)] = 1;
    }
  }
  return holes;
}

// cells from which the goal is reachable (equivalently, reachable from the
// start's side of the grid since moves are reversible)
std::vector<Cell> reachable_cells(const ExampleSpec& spec) {
  std::vector<Cell> cells;
  for (int r = 0; r < spec.size; ++r)
    for (int c = 0; c < spec.size; ++c)
      if (is_reachable(spec.distance_at({r, c}))) cells.push_back({r, c});
  return cells;
}

}  // namespace

ExampleSpec ExampleSpec::from_parts(int size, std::vector<std::uint8_t> holes,
                                    Cell start, Cell goal) {
  ExampleSpec spec;
  spec.size = size;
  spec.holes = std::move(holes);
  spec.start = start;
  spec.goal = goal;
  if (size < 2) throw std::invalid_argument("example: size must be >= 2");
  if (spec.holes.size() != static_cast<std::size_t>(size) * size)
    throw std::invalid_argument("example: hole mask size mismatch");
  if (!spec.in_bounds(start) || !spec.in_bounds(goal))
    throw std::invalid_argument("example: start/goal out of bounds");
  if (start == goal) throw std::invalid_argument("example: start == goal");
  if (spec.hole_at(start) || spec.hole_at(goal))
    throw std::invalid_argument("example: hole under start or goal");
  spec.distance = compute_distance_matrix(size, spec.holes, goal);
  if (!spec.solvable())
    throw std::invalid_argument("example: no path from start to goal");
  return spec;
}

ExampleSpec generate_example(Rng& rng, const GenParams& params) {
  validate_gen_params(params);
  for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
    const int size = rng.uniform_int(params.size_min, params.size_max);
    const int cells = size * size;
    const int start_idx = rng.uniform_int(0, cells - 1);
    int goal_idx = rng.uniform_int(0, cells - 2);
    if (goal_idx >= start_idx) ++goal_idx;  // distinct
    const Cell start = cell_from_index(size, start_idx);
    const Cell goal = cell_from_index(size, goal_idx);
    auto holes = draw_holes(rng, size, params.hole_density, start, goal);
    const auto dist = compute_distance_matrix(size, holes, goal);
    if (!is_reachable(dist[cell_index(size, start)])) continue;
    ExampleSpec spec;
    spec.size = size;
    spec.holes = std::move(holes);
    spec.start = start;
    spec.goal = goal;
    spec.distance = dist;
    return spec;
  }
  throw ConfigError("generate_example: no solvable grid within attempt bound (hole density too high?)");
}

namespace {

ExampleSpec resample_start(const ExampleSpec& spec, Rng& rng) {
  std::vector<Cell> candidates;
  for (Cell c : reachable_cells(spec))
    if (c != spec.goal && c != spec.start) candidates.push_back(c);
  if (candidates.empty())
    throw ConfigError("resample(start): no alternative start cell");
  ExampleSpec out = spec;
  out.start = rng.pick(candidates);
  return out;  // distance matrix unchanged: it only depends on goal/holes
}

ExampleSpec resample_goal(const ExampleSpec& spec, Rng& rng) {
  // candidates must be reachable from the start; since holes block movement
  // symmetrically, that is exactly the start's connected component, which
  // equals the set of cells with finite distance to the current goal
  std::vector<Cell> candidates;
  for (Cell c : reachable_cells(spec))
    if (c != spec.start && c != spec.goal) candidates.push_back(c);
  if (candidates.empty())
    throw ConfigError("resample(goal): no alternative goal cell");
  const Cell goal = rng.pick(candidates);
  return ExampleSpec::from_parts(spec.size, spec.holes, spec.start, goal);
}

ExampleSpec resample_holes(const ExampleSpec& spec, Rng& rng,
                           const GenParams& params) {
  for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
    auto holes =
        draw_holes(rng, spec.size, params.hole_density, spec.start, spec.goal);
    if (holes == spec.holes) continue;  // must actually shift
    const auto dist = compute_distance_matrix(spec.size, holes, spec.goal);
    if (!is_reachable(dist[cell_index(spec.size, spec.start)])) continue;
    ExampleSpec out = spec;
    out.holes = std::move(holes);
    out.distance = dist;
    return out;
  }
  throw ConfigError("resample(holes): no solvable mask within attempt bound");
}

// top-left anchored resize; see header comment for the rules
std::optional<ExampleSpec> resize_layout(const ExampleSpec& spec, int new_size,
                                         Rng& rng) {
  const int n = new_size;
  std::vector<std::uint8_t> holes(static_cast<std::size_t>(n) * n, 0);
  const int copy = std::min(n, spec.size);
  for (int r = 0; r < copy; ++r)
    for (int c = 0; c < copy; ++c)
      holes[static_cast<std::size_t>(r) * n + c] =
          spec.holes[static_cast<std::size_t>(r) * spec.size + c];

  auto clamp_cell = [n](Cell c) {
    return Cell{std::min(c.row, n - 1), std::min(c.col, n - 1)};
  };
  auto hole_at = [&](Cell c) {
    return holes[static_cast<std::size_t>(c.row) * n + c.col] != 0;
  };
  auto component_of = [&](Cell from) {
    std::vector<Cell> cells;
    const auto dist = compute_distance_matrix(n, holes, from);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        if (is_reachable(dist[static_cast<std::size_t>(r) * n + c]) &&
            !(Cell{r, c} == from))
          cells.push_back({r, c});
    return cells;
  };

  Cell start = clamp_cell(spec.start);
  Cell goal = clamp_cell(spec.goal);

  // fix up the start when the clamp broke it: re-draw among frozen cells
  // that have at least one frozen neighbor (so a goal can exist)
  std::vector<Cell> component;
  if (!hole_at(start)) component = component_of(start);
  if (hole_at(start) || component.empty()) {
    std::vector<Cell> viable;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        const Cell cell{r, c};
        if (hole_at(cell)) continue;
        for (Action a : kAllActions) {
          const Cell nb = neighbor(cell, a);
          if (nb.row >= 0 && nb.row < n && nb.col >= 0 && nb.col < n &&
              !hole_at(nb)) {
            viable.push_back(cell);
            break;
          }
        }
      }
    if (viable.empty()) return std::nullopt;  // crop left no usable pair
    start = rng.pick(viable);
    component = component_of(start);
  }

  // keep the clamped goal when it still works, otherwise re-draw it inside
  // the start's component
  const bool goal_ok = !(goal == start) && !hole_at(goal) &&
                       std::find(component.begin(), component.end(), goal) !=
                           component.end();
  if (!goal_ok) goal = rng.pick(component);

  ExampleSpec out;
  out.size = n;
  out.start = start;
  out.goal = goal;
  out.distance = compute_distance_matrix(n, holes, goal);
  out.holes = std::move(holes);
  return out;
}

ExampleSpec resample_grid_size(const ExampleSpec& spec, Rng& rng,
                               const GenParams& params) {
  if (params.size_min == params.size_max)
    throw ConfigError("resample(grid_size): size range is a single value");
  for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
    int n = rng.uniform_int(params.size_min, params.size_max - 1);
    if (n >= spec.size) ++n;  // uniform over the range minus the current size
    const auto out = resize_layout(spec, n, rng);
    if (out && out->solvable()) return *out;
  }
  throw ConfigError("resample(grid_size): no solvable resize within attempt bound");
}

}  // namespace

ExampleSpec resample_variable(const ExampleSpec& spec, Variable which, Rng& rng,
                              const GenParams& params) {
  switch (which) {
    case Variable::Start:
      return resample_start(spec, rng);
    case Variable::Goal:
      return resample_goal(spec, rng);
    case Variable::Holes:
      return resample_holes(spec, rng, params);
    case Variable::GridSize:
      return resample_grid_size(spec, rng, params);
  }
  throw std::invalid_argument("resample_variable: unknown variable");
}

void write_example(std::ostream& out, const ExampleSpec& spec) {
  out << "example v1\n";
  out << "size " << spec.size << "\n";
  out << "holes\n";
  for (int r = 0; r < spec.size; ++r) {
    for (int c = 0; c < spec.size; ++c)
      out << (spec.hole_at({r, c}) ? '1' : '0');
    out << "\n";
  }
  out << "start " << spec.start.row << " " << spec.start.col << "\n";
  out << "goal " << spec.goal.row << " " << spec.goal.col << "\n";
  out << "end\n";
}

ExampleSpec read_example(std::istream& in) {
  std::string line;
  auto next_line = [&]() -> std::string {
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return line;
    }
    throw IoError("example record: unexpected end of input");
  };
  if (next_line() != "example v1")
    throw IoError("example record: missing 'example v1' header");
  std::istringstream size_line(next_line());
  std::string tag;
  int size = 0;
  if (!(size_line >> tag >> size) || tag != "size" || size < 2)
    throw IoError("example record: bad size line");
  if (next_line() != "holes") throw IoError("example record: missing holes");
  std::vector<std::uint8_t> holes(static_cast<std::size_t>(size) * size, 0);
  for (int r = 0; r < size; ++r) {
    const std::string row = next_line();
    if (static_cast<int>(row.size()) != size)
      throw IoError("example record: hole row length mismatch");
    for (int c = 0; c < size; ++c) {
      if (row[c] != '0' && row[c] != '1')
        throw IoError("example record: hole rows must be 0/1");
      holes[static_cast<std::size_t>(r) * size + c] = row[c] == '1' ? 1 : 0;
    }
  }
  auto read_cell = [&](const std::string& want) {
    std::istringstream cell_line(next_line());
    Cell cell;
    std::string t;
    if (!(cell_line >> t >> cell.row >> cell.col) || t != want)
      throw IoError("example record: bad '" + want + "' line");
    return cell;
  };
  const Cell start = read_cell("start");
  const Cell goal = read_cell("goal");
  if (next_line() != "end") throw IoError("example record: missing 'end'");
  try {
    return ExampleSpec::from_parts(size, std::move(holes), start, goal);
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string("example record: ") + e.what());
  }
}

void write_store(const std::string& path, const std::vector<ExampleSpec>& store) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open store for writing: " + path);
  for (const auto& spec : store) write_example(out, spec);
  if (!out) throw IoError("write failed: " + path);
}

std::vector<ExampleSpec> read_store(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open store: " + path);
  std::vector<ExampleSpec> store;
  while (true) {
    // peek for another record
    std::streampos pos = in.tellg();
    std::string line;
    bool more = false;
    while (std::getline(in, line)) {
      if (!line.empty() && line != "\r") {
        more = true;
        break;
      }
    }
    if (!more) break;
    in.seekg(pos);
    store.push_back(read_example(in));
  }
  return store;
}

}  // namespace sfl
