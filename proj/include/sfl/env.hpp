#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sfl/example.hpp"
#include "sfl/grid.hpp"
#include "sfl/rng.hpp"

namespace sfl {

inline constexpr double kMoveCost = -0.1;
inline constexpr double kGoalBonus = 10.0;
inline constexpr double kHolePenalty = -10.0;
inline constexpr int kDefaultTimeout = 100;

struct EnvState {
  ExampleSpec example;
  Cell agent{};
  int steps_taken = 0;
};

struct StepResult {
  EnvState next;
  double reward = 0.0;
  bool terminated = false;  // hole or goal
  bool truncated = false;   // timeout
};

inline EnvState initial_state(const ExampleSpec& spec) {
  return {spec, spec.start, 0};
}

// terminal = episode already ended by entering a hole or the goal
inline bool is_terminal(const EnvState& s) {
  return s.agent == s.example.goal || s.example.hole_at(s.agent);
}

/// One deterministic move. Off-grid moves leave the agent in place and still
/// cost the move. Reward is -0.1 per move, +10 on reaching the goal, -10 on
/// reaching a hole; `truncated` is set when steps_taken hits `timeout`
/// without termination. Stepping a terminated or truncated state throws.
StepResult step(const EnvState& state, Action action,
                int timeout = kDefaultTimeout);

// Which factors get resampled between episodes.
struct ShiftMode {
  enum class Kind {
    NoShifting,
    RandomShifting,
    SinglePreset,
    SingleRandomVariable,
    StoredExamples,
  };
  Kind kind = Kind::NoShifting;
  Variable variable = Variable::Start;  // SinglePreset only
  int store_count = 0;                  // StoredExamples only

  static ShiftMode no_shifting() { return {Kind::NoShifting, {}, 0}; }
  static ShiftMode random_shifting() { return {Kind::RandomShifting, {}, 0}; }
  static ShiftMode single_preset(Variable v) {
    return {Kind::SinglePreset, v, 0};
  }
  static ShiftMode single_random_variable() {
    return {Kind::SingleRandomVariable, {}, 0};
  }
  static ShiftMode stored_examples(int count) {
    return {Kind::StoredExamples, {}, count};
  }

  friend bool operator==(const ShiftMode&, const ShiftMode&) = default;
};

std::string to_string(const ShiftMode& mode);

/// Functional reset. Returns the start state of the example selected by
/// `mode`; `current` is the base example (required for every mode except
/// RandomShifting) and `store` must be provided iff mode is StoredExamples.
/// For SingleRandomVariable the caller keeps `current` as the pre-shift spec
/// and reverts to it after the episode.
EnvState reset(const std::optional<ExampleSpec>& current, const ShiftMode& mode,
               Rng& rng, const std::vector<ExampleSpec>* store,
               const GenParams& params);

/// Stateful wrapper owning the base example, the shift mode, and the RNG.
/// reset() applies the mode's between-episode semantics; SingleRandomVariable
/// and SinglePreset shifts are episode-scoped (the base is kept and the shift
/// is derived from it fresh on every reset).
class ShiftingLake {
 public:
  ShiftingLake(const GenParams& params, int timeout, Rng rng)
      : params_(params), timeout_(timeout), rng_(std::move(rng)) {
    base_ = generate_example(rng_, params_);
    episode_ = base_;
  }
  ShiftingLake(ExampleSpec base, const GenParams& params, int timeout, Rng rng)
      : params_(params),
        timeout_(timeout),
        rng_(std::move(rng)),
        base_(std::move(base)),
        episode_(base_) {}

  void set_mode(ShiftMode mode, std::vector<ExampleSpec> store = {});
  void set_rng(Rng rng) { rng_ = std::move(rng); }

  /// Starts a new episode and returns its initial state.
  EnvState reset();

  StepResult step(const EnvState& state, Action action) const {
    return sfl::step(state, action, timeout_);
  }

  const ExampleSpec& base() const { return base_; }
  const ExampleSpec& episode_example() const { return episode_; }
  const ShiftMode& mode() const { return mode_; }
  const std::vector<ExampleSpec>& store() const { return store_; }
  int timeout() const { return timeout_; }

 private:
  GenParams params_;
  int timeout_ = kDefaultTimeout;
  Rng rng_;
  ExampleSpec base_;
  ExampleSpec episode_;  // example in play this episode
  ShiftMode mode_ = ShiftMode::no_shifting();
  std::vector<ExampleSpec> store_;
};

}  // namespace sfl
