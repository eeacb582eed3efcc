#include "sfl/observe.hpp"

#include <stdexcept>

namespace sfl {

AtomicObservation encode_atomic(const EnvState& state, int max_size) {
  const ExampleSpec& ex = state.example;
  if (ex.size > max_size)
    throw std::invalid_argument("encode_atomic: grid larger than max_size");

  AtomicObservation obs;
  obs.max_size = max_size;
  obs.data = Eigen::VectorXd::Zero(kNumChannels * max_size * max_size);
  const int plane = max_size * max_size;
  auto set = [&](Channel ch, int r, int c) {
    obs.data[static_cast<int>(ch) * plane + r * max_size + c] = 1.0;
  };

  for (int r = 0; r < max_size; ++r) {
    for (int c = 0; c < max_size; ++c) {
      const Cell cell{r, c};
      if (!ex.in_bounds(cell)) {
        set(Channel::Padding, r, c);
      } else if (cell == state.agent) {
        set(Channel::Agent, r, c);
      } else if (cell == ex.goal) {
        set(Channel::Goal, r, c);
      } else if (ex.hole_at(cell)) {
        set(Channel::Hole, r, c);
      } else {
        set(Channel::Frozen, r, c);
      }
    }
  }
  return obs;
}

FactoredFeatures encode_factored(const EnvState& state, int max_size) {
  FactoredFeatures f;
  f.sentinel = 2.0 * max_size * max_size;
  for (int i = 0; i < 4; ++i) {
    const Cell n = neighbor(state.agent, kAllActions[static_cast<std::size_t>(i)]);
    if (!state.example.in_bounds(n)) {
      f.neighbor_distance[static_cast<std::size_t>(i)] = f.sentinel;
      continue;
    }
    const int d = state.example.distance_at(n);
    f.neighbor_distance[static_cast<std::size_t>(i)] =
        is_reachable(d) ? static_cast<double>(d) : f.sentinel;
  }
  return f;
}

}  // namespace sfl
