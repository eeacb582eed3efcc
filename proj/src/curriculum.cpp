#include "sfl/curriculum.hpp"

#include <algorithm>
#include <stdexcept>

#include "sfl/errors.hpp"

namespace sfl {

int CurriculumSchedule::total_epochs() const {
  int total = 0;
  for (const Phase& p : phases) total += p.epochs;
  return total;
}

int CurriculumSchedule::phase_index(int epoch) const {
  int begin = 0;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    begin += phases[i].epochs;
    if (epoch < begin) return static_cast<int>(i);
  }
  throw std::out_of_range("phase_index: epoch beyond schedule");
}

std::vector<int> CurriculumSchedule::transition_epochs() const {
  std::vector<int> out;
  int begin = 0;
  for (std::size_t i = 0; i + 1 < phases.size(); ++i) {
    begin += phases[i].epochs;
    out.push_back(begin);
  }
  return out;
}

namespace {

std::vector<int> phase_lengths(const CurriculumParams& params, std::size_t n,
                               bool test_phase = false) {
  if (params.phase_epochs.empty()) {
    // defaults: 200-epoch first phase, 100-epoch second, 50-epoch test phase
    if (n == 1) return {300};
    return test_phase ? std::vector<int>{200, 50} : std::vector<int>{200, 100};
  }
  if (params.phase_epochs.size() != n)
    throw ConfigError("curriculum: expected " + std::to_string(n) +
                      " phase lengths");
  for (int e : params.phase_epochs)
    if (e < 1) throw ConfigError("curriculum: phase epochs must be >= 1");
  return params.phase_epochs;
}

std::vector<ExampleSpec> draw_store(int count, Rng& rng, const GenParams& gen) {
  if (count < 1) throw ConfigError("curriculum: store count must be >= 1");
  std::vector<ExampleSpec> store;
  store.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) store.push_back(generate_example(rng, gen));
  return store;
}

}  // namespace

CurriculumSchedule build_schedule(const std::string& name,
                                  const CurriculumParams& params, Rng& store_rng,
                                  const GenParams& gen) {
  CurriculumSchedule s;
  s.name = name;
  if (name == "A") {
    const auto len = phase_lengths(params, 2);
    s.phases = {{ShiftMode::no_shifting(), len[0]},
                {ShiftMode::random_shifting(), len[1]}};
  } else if (name == "B") {
    const auto len = phase_lengths(params, 2);
    s.phases = {{ShiftMode::no_shifting(), len[0]},
                {ShiftMode::single_random_variable(), len[1]}};
  } else if (name == "C") {
    const auto len = phase_lengths(params, 1);
    s.phases = {{ShiftMode::random_shifting(), len[0]}};
  } else if (name == "D") {
    const auto len = phase_lengths(params, 2);
    s.stored = draw_store(params.store_count, store_rng, gen);
    s.phases = {{ShiftMode::stored_examples(params.store_count), len[0]},
                {ShiftMode::random_shifting(), len[1]}};
  } else if (name == "E") {
    const auto len = phase_lengths(params, 2);
    s.preset_variable = params.preset_variable;
    s.phases = {{ShiftMode::single_preset(params.preset_variable), len[0]},
                {ShiftMode::random_shifting(), len[1]}};
  } else if (name == "sweep") {
    const auto len = phase_lengths(params, 2, /*test_phase=*/true);
    s.name = "sweep-" + std::to_string(params.store_count);
    s.stored = draw_store(params.store_count, store_rng, gen);
    s.phases = {{ShiftMode::stored_examples(params.store_count), len[0]},
                {ShiftMode::random_shifting(), len[1], /*is_test=*/true}};
  } else {
    throw ConfigError("unknown curriculum: " + name);
  }
  return s;
}

std::vector<CurriculumSchedule> stored_example_sweep(
    const std::vector<int>& counts, std::uint64_t store_seed,
    const GenParams& gen, int train_epochs, int test_epochs) {
  if (counts.empty()) throw ConfigError("sweep: counts must be nonempty");
  std::vector<CurriculumSchedule> out;
  out.reserve(counts.size());
  for (int k : counts) {
    CurriculumParams params;
    params.store_count = k;
    params.phase_epochs = {train_epochs, test_epochs};
    Rng rng(store_seed);  // same start state per count: stores nest
    out.push_back(build_schedule("sweep", params, rng, gen));
  }
  return out;
}

}  // namespace sfl
