#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "sfl/agents.hpp"
#include "sfl/distance.hpp"
#include "sfl/errors.hpp"
#include "sfl/observe.hpp"

using namespace sfl;
using sfl_test::reference_spec;

TEST_SUITE("representation") {

TEST_CASE("reference grid distances match the shortest paths") {
  const ExampleSpec spec = reference_spec();
  const int inf = kUnreachable;
  const std::vector<int> expected = {6, 5,   4, 5,    //
                                     5, inf, 3, inf,  //
                                     4, 3,   2, inf,  //
                                     inf, 2, 1, 0};
  CHECK(spec.distance == expected);
}

TEST_CASE("empty grid distances are manhattan") {
  const auto dist =
      compute_distance_matrix(4, std::vector<std::uint8_t>(16, 0), {3, 3});
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      CHECK(dist[static_cast<std::size_t>(r) * 4 + c] == (3 - r) + (3 - c));
  CHECK(dist[0] == 6);
}

TEST_CASE("bfs equals the relaxation oracle on random grids") {
  Rng rng(101);
  GenParams params{8, 8, 0.25, 1000};
  for (int i = 0; i < 50; ++i) {
    const ExampleSpec spec = generate_example(rng, params);
    const auto oracle =
        sfl_test::oracle_distance(spec.size, spec.holes, spec.goal);
    CHECK(spec.distance == oracle);
  }
}

TEST_CASE("distance matrix rejects bad inputs") {
  std::vector<std::uint8_t> holes(16, 0);
  holes[5] = 1;
  CHECK_THROWS_AS(compute_distance_matrix(4, holes, {1, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(compute_distance_matrix(4, holes, {4, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(compute_distance_matrix(3, holes, {0, 0}),
                  std::invalid_argument);
}

TEST_CASE("every finite non-goal cell has a downhill neighbor") {
  Rng rng(103);
  GenParams params{4, 10, 0.2, 1000};
  for (int i = 0; i < 100; ++i) {
    const ExampleSpec spec = generate_example(rng, params);
    for (int r = 0; r < spec.size; ++r) {
      for (int c = 0; c < spec.size; ++c) {
        const Cell cell{r, c};
        const int d = spec.distance_at(cell);
        if (!is_reachable(d) || cell == spec.goal) continue;
        bool downhill = false;
        for (Action a : kAllActions) {
          const Cell n = neighbor(cell, a);
          if (!spec.in_bounds(n)) continue;
          const int nd = spec.distance_at(n);
          if (is_reachable(nd)) {
            CHECK(std::abs(nd - d) <= 1);
            downhill = downhill || nd == d - 1;
          }
        }
        CHECK(downhill);
      }
    }
  }
}

TEST_CASE("atomic encoding pads a small grid") {
  const ExampleSpec spec = reference_spec();
  const AtomicObservation obs = encode_atomic(initial_state(spec), 10);
  int padding = 0;
  for (int r = 0; r < 10; ++r)
    for (int c = 0; c < 10; ++c)
      if (obs.at(Channel::Padding, r, c) == 1.0) ++padding;
  CHECK(padding == 84);
  CHECK(obs.at(Channel::Agent, 0, 0) == 1.0);
  CHECK(obs.at(Channel::Goal, 3, 3) == 1.0);
  CHECK(obs.at(Channel::Hole, 1, 1) == 1.0);
  CHECK(obs.at(Channel::Frozen, 0, 1) == 1.0);
}

TEST_CASE("atomic encoding is one-hot per cell on random states") {
  Rng rng(107);
  GenParams params{4, 10, 0.2, 1000};
  for (int i = 0; i < 1000; ++i) {
    const ExampleSpec spec = generate_example(rng, params);
    // arbitrary reachable agent cell
    std::vector<Cell> cells;
    for (int r = 0; r < spec.size; ++r)
      for (int c = 0; c < spec.size; ++c)
        if (!spec.hole_at({r, c})) cells.push_back({r, c});
    const EnvState state{spec, rng.pick(cells), 0};
    const AtomicObservation obs = encode_atomic(state, 10);
    for (int r = 0; r < 10; ++r) {
      for (int c = 0; c < 10; ++c) {
        double sum = 0.0;
        for (int ch = 0; ch < kNumChannels; ++ch)
          sum += obs.at(static_cast<Channel>(ch), r, c);
        CHECK(sum == 1.0);
      }
    }
  }
}

TEST_CASE("agent channel wins when the agent sits on the goal") {
  const ExampleSpec spec = reference_spec();
  const EnvState state{spec, spec.goal, 6};
  const AtomicObservation obs = encode_atomic(state, 10);
  CHECK(obs.at(Channel::Agent, 3, 3) == 1.0);
  CHECK(obs.at(Channel::Goal, 3, 3) == 0.0);
}

TEST_CASE("atomic encoding rejects oversized grids") {
  const ExampleSpec spec = reference_spec();
  CHECK_THROWS_AS(encode_atomic(initial_state(spec), 3), std::invalid_argument);
}

TEST_CASE("atomic encoding separates distinct non-terminal states") {
  Rng rng(109);
  GenParams params{4, 7, 0.2, 1000};
  std::set<std::vector<double>> seen;
  int states = 0;
  for (int i = 0; i < 60; ++i) {
    const ExampleSpec spec = generate_example(rng, params);
    for (int r = 0; r < spec.size; ++r)
      for (int c = 0; c < spec.size; ++c) {
        const Cell cell{r, c};
        if (spec.hole_at(cell) || cell == spec.goal) continue;
        const AtomicObservation obs = encode_atomic({spec, cell, 0}, 10);
        seen.insert(
            std::vector<double>(obs.data.data(), obs.data.data() + obs.dim()));
        ++states;
      }
  }
  CHECK(static_cast<int>(seen.size()) == states);
}

TEST_CASE("factored features on the reference grid") {
  const ExampleSpec spec = reference_spec();
  const FactoredFeatures f = encode_factored(initial_state(spec), 10);
  CHECK(f.sentinel == 200.0);
  CHECK(f.neighbor_distance[0] == 200.0);  // left: off-grid
  CHECK(f.neighbor_distance[1] == 5.0);    // down
  CHECK(f.neighbor_distance[2] == 5.0);    // right
  CHECK(f.neighbor_distance[3] == 200.0);  // up: off-grid
  const Eigen::Vector4d n = f.normalized();
  CHECK(n[0] == 1.0);                               // sentinel pins the top
  CHECK(n[1] == doctest::Approx(5.0 / 13.0));       // d/(d+8)
  CHECK(n[1] < n[0]);                               // order preserved
}

TEST_CASE("factored features next to the goal contain a zero") {
  const ExampleSpec spec = reference_spec();
  const FactoredFeatures f = encode_factored({spec, {3, 2}, 0}, 10);
  CHECK(f.neighbor_distance[2] == 0.0);  // right neighbor is the goal
}

TEST_CASE("factored argmin agrees with the optimal action") {
  Rng rng(113);
  GenParams params{4, 10, 0.2, 1000};
  for (int i = 0; i < 1000; ++i) {
    const ExampleSpec spec = generate_example(rng, params);
    std::vector<Cell> cells;
    for (int r = 0; r < spec.size; ++r)
      for (int c = 0; c < spec.size; ++c)
        if (is_reachable(spec.distance_at({r, c})) && !(Cell{r, c} == spec.goal))
          cells.push_back({r, c});
    const EnvState state{spec, rng.pick(cells), 0};
    const FactoredFeatures f = encode_factored(state, 10);
    int argmin = 0;
    for (int a = 1; a < 4; ++a)
      if (f.neighbor_distance[static_cast<std::size_t>(a)] <
          f.neighbor_distance[static_cast<std::size_t>(argmin)])
        argmin = a;
    CHECK(static_cast<Action>(argmin) == optimal_action(state));
    for (int a = 0; a < 4; ++a) {
      CHECK(f.normalized()[a] >= 0.0);
      CHECK(f.normalized()[a] <= 1.0);
    }
  }
}

TEST_CASE("factored features depend only on distances and the agent cell") {
  const ExampleSpec spec = reference_spec();
  ExampleSpec other_start = spec;
  other_start.start = {2, 0};  // same holes/goal => same distance matrix
  const EnvState a{spec, {2, 1}, 3};
  const EnvState b{other_start, {2, 1}, 7};
  const FactoredFeatures fa = encode_factored(a, 10);
  const FactoredFeatures fb = encode_factored(b, 10);
  CHECK(fa.neighbor_distance == fb.neighbor_distance);
}

}  // TEST_SUITE
