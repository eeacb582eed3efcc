#include "sfl/env.hpp"

#include <stdexcept>

#include "sfl/errors.hpp"

namespace sfl {

StepResult step(const EnvState& state, Action action, int timeout) {
  if (is_terminal(state))
    throw std::logic_error("step: episode already terminated");
  if (state.steps_taken >= timeout)
    throw std::logic_error("step: episode already truncated");

  Cell next = neighbor(state.agent, action);
  if (!state.example.in_bounds(next)) next = state.agent;  // stay in place

  StepResult result;
  result.reward = kMoveCost;
  result.terminated = false;
  if (next == state.example.goal) {
    result.reward += kGoalBonus;
    result.terminated = true;
  } else if (state.example.hole_at(next)) {
    result.reward += kHolePenalty;
    result.terminated = true;
  }
  result.next = EnvState{state.example, next, state.steps_taken + 1};
  result.truncated = !result.terminated && result.next.steps_taken >= timeout;
  return result;
}

std::string to_string(const ShiftMode& mode) {
  switch (mode.kind) {
    case ShiftMode::Kind::NoShifting:
      return "no_shifting";
    case ShiftMode::Kind::RandomShifting:
      return "random_shifting";
    case ShiftMode::Kind::SinglePreset:
      return "single_preset(" + to_string(mode.variable) + ")";
    case ShiftMode::Kind::SingleRandomVariable:
      return "single_random_variable";
    case ShiftMode::Kind::StoredExamples:
      return "stored_examples(" + std::to_string(mode.store_count) + ")";
  }
  return "?";
}

EnvState reset(const std::optional<ExampleSpec>& current, const ShiftMode& mode,
               Rng& rng, const std::vector<ExampleSpec>* store,
               const GenParams& params) {
  const bool wants_store = mode.kind == ShiftMode::Kind::StoredExamples;
  if (wants_store != (store != nullptr && !store->empty()))
    throw ConfigError("reset: store must be provided iff mode is StoredExamples");

  switch (mode.kind) {
    case ShiftMode::Kind::NoShifting:
      if (!current) throw ConfigError("reset: NoShifting needs a current example");
      return initial_state(*current);
    case ShiftMode::Kind::RandomShifting:
      return initial_state(generate_example(rng, params));
    case ShiftMode::Kind::SinglePreset:
      if (!current) throw ConfigError("reset: SinglePreset needs a current example");
      return initial_state(resample_variable(*current, mode.variable, rng, params));
    case ShiftMode::Kind::SingleRandomVariable: {
      if (!current)
        throw ConfigError("reset: SingleRandomVariable needs a current example");
      const Variable v = kAllVariables[static_cast<std::size_t>(rng.uniform_int(0, 3))];
      return initial_state(resample_variable(*current, v, rng, params));
    }
    case ShiftMode::Kind::StoredExamples:
      return initial_state(rng.pick(*store));
  }
  throw std::logic_error("reset: unknown shift mode");
}

void ShiftingLake::set_mode(ShiftMode mode, std::vector<ExampleSpec> store) {
  if (mode.kind == ShiftMode::Kind::StoredExamples) {
    if (store.empty())
      throw ConfigError("set_mode: StoredExamples needs a nonempty store");
    if (mode.store_count != static_cast<int>(store.size()))
      throw ConfigError("set_mode: store size does not match mode.store_count");
  } else if (!store.empty()) {
    throw ConfigError("set_mode: store given for a non-store mode");
  }
  mode_ = mode;
  store_ = std::move(store);
}

EnvState ShiftingLake::reset() {
  switch (mode_.kind) {
    case ShiftMode::Kind::NoShifting:
      episode_ = base_;
      break;
    case ShiftMode::Kind::RandomShifting:
      base_ = generate_example(rng_, params_);
      episode_ = base_;
      break;
    case ShiftMode::Kind::SinglePreset:
      episode_ = resample_variable(base_, mode_.variable, rng_, params_);
      break;
    case ShiftMode::Kind::SingleRandomVariable: {
      const Variable v =
          kAllVariables[static_cast<std::size_t>(rng_.uniform_int(0, 3))];
      episode_ = resample_variable(base_, v, rng_, params_);
      break;
    }
    case ShiftMode::Kind::StoredExamples:
      episode_ = rng_.pick(store_);
      break;
  }
  return initial_state(episode_);
}

}  // namespace sfl
