#pragma once

#include <limits>
#include <vector>

#include "sfl/agents.hpp"
#include "sfl/env.hpp"
#include "sfl/example.hpp"

namespace sfl_test {

// 4x4 layout used across the suites: holes at (1,1) (1,3) (2,3) (3,0),
// start (0,0), goal (3,3). Shortest-path matrix:
//   6 5 4 5
//   5 . 3 .
//   4 3 2 .
//   . 2 1 0
inline sfl::ExampleSpec reference_spec() {
  const std::vector<std::uint8_t> holes = {0, 0, 0, 0,  //
                                           0, 1, 0, 1,  //
                                           0, 0, 0, 1,  //
                                           1, 0, 0, 0};
  return sfl::ExampleSpec::from_parts(4, holes, {0, 0}, {3, 3});
}

// independent shortest-path oracle: Bellman-Ford-style relaxation to a
// fixpoint, structurally different from the BFS under test
inline std::vector<int> oracle_distance(int size,
                                        const std::vector<std::uint8_t>& holes,
                                        sfl::Cell goal) {
  const int inf = std::numeric_limits<int>::max();
  std::vector<int> dist(static_cast<std::size_t>(size) * size, inf);
  dist[static_cast<std::size_t>(goal.row) * size + goal.col] = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int r = 0; r < size; ++r) {
      for (int c = 0; c < size; ++c) {
        const std::size_t idx = static_cast<std::size_t>(r) * size + c;
        if (holes[idx] || (r == goal.row && c == goal.col)) continue;
        int best = inf;
        const int drs[4] = {0, 1, 0, -1};
        const int dcs[4] = {-1, 0, 1, 0};
        for (int k = 0; k < 4; ++k) {
          const int nr = r + drs[k], nc = c + dcs[k];
          if (nr < 0 || nr >= size || nc < 0 || nc >= size) continue;
          best = std::min(best, dist[static_cast<std::size_t>(nr) * size + nc]);
        }
        if (best != inf && best + 1 < dist[idx]) {
          dist[idx] = best + 1;
          changed = true;
        }
      }
    }
  }
  return dist;
}

struct MiniEpisode {
  double total_reward = 0.0;
  int moves = 0;
  bool goal = false;
  bool hole = false;
  bool truncated = false;
  std::vector<sfl::Cell> path;
};

// plays one episode on a fixed example with an arbitrary policy
template <typename Policy>
MiniEpisode play_episode(const sfl::ExampleSpec& ex, Policy&& pick,
                         int timeout = 100) {
  MiniEpisode out;
  sfl::EnvState state = sfl::initial_state(ex);
  out.path.push_back(state.agent);
  while (true) {
    const sfl::Action a = pick(state);
    const sfl::StepResult r = sfl::step(state, a, timeout);
    out.total_reward += r.reward;
    ++out.moves;
    out.path.push_back(r.next.agent);
    if (r.terminated) {
      out.goal = r.next.agent == ex.goal;
      out.hole = !out.goal;
      return out;
    }
    if (r.truncated) {
      out.truncated = true;
      return out;
    }
    state = r.next;
  }
}

// counts how many of (start, goal, holes, grid size) differ
inline int count_layout_diffs(const sfl::ExampleSpec& a,
                              const sfl::ExampleSpec& b) {
  int diffs = 0;
  if (a.size != b.size) ++diffs;
  if (!(a.start == b.start)) ++diffs;
  if (!(a.goal == b.goal)) ++diffs;
  if (a.size == b.size && a.holes != b.holes) ++diffs;
  return diffs;
}

}  // namespace sfl_test
