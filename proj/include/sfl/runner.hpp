#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfl/analysis.hpp"
#include "sfl/curriculum.hpp"
#include "sfl/env.hpp"
#include "sfl/ppo.hpp"

namespace sfl {

enum class AgentKind { Random, Optimal, Ppo, PpoF };
std::string to_string(AgentKind kind);
AgentKind agent_from_string(const std::string& name);

struct NetParams {
  std::vector<int> hidden = {64, 64};         // PPO-F trunk
  std::vector<int> conv_channels = {16, 32};  // PPO trunk
  int kernel = 3;
  int dense_width = 128;
};

struct RunConfig {
  AgentKind agent = AgentKind::PpoF;
  std::string curriculum = "C";
  CurriculumParams cparams;
  std::uint64_t master_seed = 42;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  GenParams env;
  int timeout = 100;
  int steps_per_epoch = 900;
  PPOConfig ppo;
  NetParams net;
  std::string out_dir = "out/run";
  int jobs = 0;              // 0 = one worker per hardware thread
  bool paper_preset = true;  // enforces gamma == 1

  void validate() const;  // throws ConfigError
};

// JSON round-trip for config files and artifact echoes. Unknown keys are
// rejected so typos cannot silently fall back to defaults.
std::string config_to_json(const RunConfig& config);
RunConfig config_from_json(const std::string& json_text);
RunConfig load_config_file(const std::string& path);

// FNV-1a over the canonical JSON echo, rendered as 16 hex digits.
std::string config_hash(const RunConfig& config);

// one output row = one epoch of one seed
struct EpochRow {
  EpochStats stats;
  int phase = 0;
  std::string mode;
  UpdateStats losses;  // zeros for non-learning agents
};

struct SeedRun {
  std::uint64_t seed = 0;
  std::vector<EpochRow> rows;
  std::vector<ExampleSpec> store;  // D/sweep phase-1 store
  // learning agents: parameter snapshots at phase ends and after the final
  // epoch, written out as checkpoints by run()
  std::uint64_t net_spec_hash = 0;
  struct Snapshot {
    long epoch = 0;
    std::vector<double> params;
  };
  std::vector<Snapshot> checkpoints;

  std::vector<double> curve(const std::string& metric) const;
};

struct RunResult {
  RunConfig config;
  std::string hash;
  std::vector<int> transition_epochs;
  std::vector<SeedRun> seeds;

  std::string out_dir;
  std::vector<std::string> seed_csv_paths;
  std::string aggregate_path;
  std::string config_echo_path;
  std::string schedule_path;

  // cross-seed mean/se of a per-epoch metric
  AggregateCurve aggregate_curve(const std::string& metric) const;
};

/// Executes the configured agent x curriculum over all seeds (in parallel
/// worker threads; per-seed outputs depend only on (master_seed, seed)) and
/// writes the artifact set under config.out_dir: per-seed epoch CSVs, an
/// aggregate JSON, a config echo, the schedule expansion log, checkpoints
/// (learning agents), and the example store (D/sweep).
RunResult run(const RunConfig& config);

/// Runs one seed in-process without touching the filesystem. Used by run()
/// workers and directly by tests.
SeedRun run_seed(const RunConfig& config, std::uint64_t seed);

struct SweepResult {
  std::vector<RunResult> runs;  // one per count, curriculum "sweep"
  // comparison table: count, mean test-phase return per epoch, se
  struct Row {
    int count = 0;
    double mean = 0.0;
    double se = 0.0;
  };
  std::vector<Row> table;
  std::string table_path;
};

/// Stored-example sweep: one run per count (base config must use curriculum
/// "sweep"), plus a table of mean test-phase return per count.
SweepResult run_sweep(const RunConfig& base, const std::vector<int>& counts);

// -- artifact readers / emitters --

struct LoadedRun {
  std::string curriculum;
  std::string agent;
  std::string hash;
  std::vector<SeedRun> seeds;
};

LoadedRun load_run_dir(const std::string& dir);

/// Long-format CSV (curriculum, agent, seed, epoch, metric, value) plus an
/// aggregate CSV with mean and standard error per epoch. Returns the two
/// file paths {long, aggregate}.
std::vector<std::string> emit_plot_data(const std::vector<std::string>& run_dirs,
                                        const std::string& out_dir);

struct AnalyzeEntry {
  std::string label;
  double regret_mean = 0.0, regret_se = 0.0;
  double return_mean = 0.0, return_se = 0.0;
  double goal_rate_mean = 0.0;
};

/// Regret/return summary over the last `window` epochs of each run, ranked
/// by mean regret ascending; writes a JSON report when out_path is nonempty.
std::vector<AnalyzeEntry> analyze_runs(const std::vector<std::string>& run_dirs,
                                       int window, const std::string& out_path);

}  // namespace sfl
