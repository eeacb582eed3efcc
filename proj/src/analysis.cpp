#include "sfl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sfl/errors.hpp"

namespace sfl {

int count_reversals(std::span<const Cell> path) {
  int reversals = 0;
  for (std::size_t t = 2; t < path.size(); ++t)
    if (path[t] == path[t - 2]) ++reversals;
  return reversals;
}

double repetitive_fraction(std::span<const Cell> path) {
  if (path.size() < 2)
    throw std::invalid_argument("repetitive_fraction: episode has no moves");
  const auto moves = path.size() - 1;
  return static_cast<double>(count_reversals(path)) / static_cast<double>(moves);
}

EpochStats epoch_stats(int epoch, std::span<const EpisodeRecord> episodes) {
  EpochStats s;
  s.epoch = epoch;
  long reversals = 0;
  for (const EpisodeRecord& e : episodes) {
    ++s.episodes;
    s.total_reward += e.total_reward;
    switch (e.outcome) {
      case EpisodeRecord::Outcome::Goal:
        ++s.goals;
        break;
      case EpisodeRecord::Outcome::Hole:
        ++s.holes;
        break;
      case EpisodeRecord::Outcome::Truncated:
        ++s.truncations;
        break;
    }
    s.moves += e.moves;
    s.optimal_moves += e.optimal_moves;
    reversals += e.reversals;
    const double gap = e.optimal_return - e.total_reward;
    s.regret_raw += gap;
    s.regret_clamped += std::max(0.0, gap);
  }
  s.steps = static_cast<int>(s.moves);
  s.repetitive_fraction =
      s.moves > 0 ? static_cast<double>(reversals) / static_cast<double>(s.moves)
                  : 0.0;
  return s;
}

double moves_ratio(const EpochStats& stats) {
  if (stats.optimal_moves <= 0)
    throw ConfigError("moves_ratio: no optimal moves accumulated");
  return static_cast<double>(stats.moves) /
         static_cast<double>(stats.optimal_moves);
}

MeanSe mean_se(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean_se: empty input");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double stddev = std::sqrt(ss / (n - 1.0));
  return {mean, stddev / std::sqrt(n)};
}

AggregateCurve aggregate(const std::vector<std::vector<double>>& per_seed) {
  if (per_seed.empty()) throw std::invalid_argument("aggregate: no curves");
  const std::size_t len = per_seed.front().size();
  for (const auto& c : per_seed)
    if (c.size() != len)
      throw std::invalid_argument("aggregate: curve length mismatch");
  AggregateCurve out;
  out.mean.resize(len);
  out.se.resize(len);
  std::vector<double> column(per_seed.size());
  for (std::size_t t = 0; t < len; ++t) {
    for (std::size_t s = 0; s < per_seed.size(); ++s) column[s] = per_seed[s][t];
    const MeanSe ms = mean_se(column);
    out.mean[t] = ms.mean;
    out.se[t] = ms.se;
  }
  return out;
}

std::vector<RankingEntry> regret_ranking(const std::vector<RegretReport>& reports) {
  std::vector<RankingEntry> out;
  out.reserve(reports.size());
  for (const RegretReport& r : reports) {
    const MeanSe ms = mean_se(r.per_seed_totals);
    out.push_back({r.label, ms.mean, ms.se});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RankingEntry& a, const RankingEntry& b) {
                     return a.mean < b.mean;
                   });
  return out;
}

}  // namespace sfl
