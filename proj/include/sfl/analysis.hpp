#pragma once

#include <span>
#include <string>
#include <vector>

#include "sfl/grid.hpp"

namespace sfl {

struct EpisodeRecord {
  double optimal_return = 0.0;  // V*(start) of the episode's example
  int optimal_moves = 0;        // distance[start]
  double total_reward = 0.0;
  int moves = 0;
  int reversals = 0;  // moves whose resulting cell equals the cell two steps back
  enum class Outcome { Goal, Hole, Truncated } outcome = Outcome::Truncated;
};

/// Immediate back-and-forth fraction of a movement path p_0..p_T: the share
/// of moves t >= 1 with p_{t+1} == p_{t-1}, over all T moves. Staying in
/// place (wall bumps) counts once the agent has been there two steps.
int count_reversals(std::span<const Cell> path);
double repetitive_fraction(std::span<const Cell> path);

struct EpochStats {
  int epoch = 0;
  double total_reward = 0.0;
  int episodes = 0;
  int goals = 0;
  int holes = 0;
  int truncations = 0;
  double repetitive_fraction = 0.0;  // epoch-level: total reversals / total moves
  long moves = 0;
  long optimal_moves = 0;
  double regret_raw = 0.0;      // sum over episodes of V*(start) - return
  double regret_clamped = 0.0;  // per-episode clamp at 0
  int steps = 0;                // equals moves in this environment
};

/// Reduces one epoch's episodes: totals, outcome counts, behavioral ratios,
/// and the episodic regret surrogate sum(V*(start) - achieved return).
EpochStats epoch_stats(int epoch, std::span<const EpisodeRecord> episodes);

/// moves / optimal_moves; throws ConfigError when no optimal moves were
/// accumulated.
double moves_ratio(const EpochStats& stats);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;  // sample stddev / sqrt(n)
};
MeanSe mean_se(std::span<const double> values);

struct AggregateCurve {
  std::vector<double> mean;
  std::vector<double> se;
};

/// Pointwise mean and standard error across seeds. All curves must share one
/// length.
AggregateCurve aggregate(const std::vector<std::vector<double>>& per_seed);

struct RegretReport {
  std::string label;
  std::vector<double> per_seed_totals;
};
struct RankingEntry {
  std::string label;
  double mean = 0.0;
  double se = 0.0;
};

/// Ranks reports by mean regret ascending; ties keep input order.
std::vector<RankingEntry> regret_ranking(const std::vector<RegretReport>& reports);

}  // namespace sfl
