#pragma once

#include <Eigen/Core>
#include <array>

#include "sfl/env.hpp"

namespace sfl {

// one-hot channel layout of the atomic observation
enum class Channel : int { Frozen = 0, Hole = 1, Goal = 2, Agent = 3, Padding = 4 };
inline constexpr int kNumChannels = 5;

/// Padded one-hot grid: kNumChannels x M x M with exactly one channel active
/// per cell. The padding channel marks cells outside the true N x N grid.
/// Flat layout is channel-major: index = c*M*M + row*M + col.
struct AtomicObservation {
  int max_size = 0;
  Eigen::VectorXd data;

  double at(Channel c, int row, int col) const {
    return data[static_cast<int>(c) * max_size * max_size + row * max_size + col];
  }
  int dim() const { return kNumChannels * max_size * max_size; }
};

/// Encodes a state into the padded one-hot grid. The agent channel wins on
/// the agent's cell (goal/hole underneath stay hidden; such states are
/// terminal and never feed the policy, but the encoder stays total).
/// Throws std::invalid_argument when the grid exceeds max_size.
AtomicObservation encode_atomic(const EnvState& state, int max_size);

/// Optimized factored features: the goal-distance of the neighbor cell in
/// each action direction (Left, Down, Right, Up). Out-of-bounds neighbors and
/// holes/unreachable cells carry the sentinel value 2*max_size^2, which
/// exceeds every true distance.
///
/// normalized() maps the features into [0, 1] for network input with the
/// monotone transform d -> d / (d + kDistanceSoftScale); the sentinel maps to
/// exactly 1. Dividing by the sentinel instead would squash all realistic
/// distances into a few percent of the range, which starves the policy
/// gradient of the neighbor-ranking signal it has to learn from.
inline constexpr double kDistanceSoftScale = 8.0;

struct FactoredFeatures {
  std::array<double, 4> neighbor_distance{};
  double sentinel = 0.0;

  Eigen::Vector4d normalized() const {
    Eigen::Vector4d out;
    for (int i = 0; i < 4; ++i) {
      const double d = neighbor_distance[i];
      out[i] = d >= sentinel ? 1.0 : d / (d + kDistanceSoftScale);
    }
    return out;
  }
};

FactoredFeatures encode_factored(const EnvState& state, int max_size);

}  // namespace sfl
