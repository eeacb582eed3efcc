#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sfl/env.hpp"

namespace sfl {

struct Phase {
  ShiftMode mode;
  int epochs = 1;
  // test phases draw environment randomness from a stream that is
  // independent of training, so different schedules see the same test
  // example sequence
  bool is_test = false;
};

struct CurriculumParams {
  std::vector<int> phase_epochs;  // empty = per-curriculum defaults (200/100)
  int store_count = 15;           // D
  Variable preset_variable = Variable::Holes;  // E
};

struct CurriculumSchedule {
  std::string name;
  std::vector<Phase> phases;
  std::vector<ExampleSpec> stored;          // D / sweep store (phase 1)
  std::optional<Variable> preset_variable;  // E

  int total_epochs() const;
  int phase_index(int epoch) const;  // throws std::out_of_range
  const Phase& phase_at(int epoch) const { return phases[static_cast<std::size_t>(phase_index(epoch))]; }
  // first epoch of each phase after the first
  std::vector<int> transition_epochs() const;
};

/// Builds one of the five curricula (plus the sweep variant of D):
///   A:     NoShifting -> RandomShifting
///   B:     NoShifting -> SingleRandomVariable
///   C:     RandomShifting
///   D:     StoredExamples(k) -> RandomShifting   (store drawn here)
///   E:     SinglePreset(v)  -> RandomShifting
///   sweep: StoredExamples(k) -> RandomShifting test phase (is_test set)
/// Unknown names throw ConfigError.
CurriculumSchedule build_schedule(const std::string& name,
                                  const CurriculumParams& params, Rng& store_rng,
                                  const GenParams& gen);

/// One sweep schedule per count: StoredExamples(k) for train_epochs, then a
/// test_epochs RandomShifting test phase. Each count draws its store from a
/// fresh stream seeded with store_seed, so stores are nested (count k is a
/// prefix of count k' > k); test phases run on an independent stream, so
/// counts are compared on identical test environments.
std::vector<CurriculumSchedule> stored_example_sweep(
    const std::vector<int>& counts, std::uint64_t store_seed,
    const GenParams& gen, int train_epochs, int test_epochs = 50);

}  // namespace sfl
