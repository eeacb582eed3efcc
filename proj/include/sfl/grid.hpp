#pragma once

#include <array>
#include <limits>
#include <string>

namespace sfl {

struct Cell {
  int row = 0;
  int col = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

// Canonical action order and integer codes; the order doubles as the
// deterministic tie-break everywhere a best direction is picked.
enum class Action : int { Left = 0, Down = 1, Right = 2, Up = 3 };

inline constexpr int kNumActions = 4;
inline constexpr std::array<Action, 4> kAllActions{Action::Left, Action::Down,
                                                   Action::Right, Action::Up};

inline Cell neighbor(Cell c, Action a) {
  switch (a) {
    case Action::Left:
      return {c.row, c.col - 1};
    case Action::Down:
      return {c.row + 1, c.col};
    case Action::Right:
      return {c.row, c.col + 1};
    case Action::Up:
      return {c.row - 1, c.col};
  }
  return c;
}

inline std::string to_string(Action a) {
  switch (a) {
    case Action::Left:
      return "left";
    case Action::Down:
      return "down";
    case Action::Right:
      return "right";
    case Action::Up:
      return "up";
  }
  return "?";
}

// Distance-to-goal marker for holes and cells cut off from the goal.
inline constexpr int kUnreachable = std::numeric_limits<int>::max();

inline constexpr bool is_reachable(int distance) {
  return distance != kUnreachable;
}

// The four shiftable environment factors.
enum class Variable : int { Start = 0, Goal = 1, Holes = 2, GridSize = 3 };

inline constexpr std::array<Variable, 4> kAllVariables{
    Variable::Start, Variable::Goal, Variable::Holes, Variable::GridSize};

inline std::string to_string(Variable v) {
  switch (v) {
    case Variable::Start:
      return "start";
    case Variable::Goal:
      return "goal";
    case Variable::Holes:
      return "holes";
    case Variable::GridSize:
      return "grid_size";
  }
  return "?";
}

}  // namespace sfl
