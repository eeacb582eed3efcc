// Command-line front end: run / sweep / analyze / plot-data subcommands over
// JSON run configs. Exit codes: 0 success, 2 config error, 3 numeric failure,
// 4 I/O error.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sfl/errors.hpp"
#include "sfl/runner.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string agent;
  std::string curriculum;
  std::string seeds;
  std::uint64_t master_seed = 0;
  bool master_seed_set = false;
  int jobs = -1;
  int verbosity = 0;
};

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    seeds.push_back(std::stoull(item));
  }
  if (seeds.empty()) throw sfl::ConfigError("empty seed list");
  return seeds;
}

sfl::RunConfig assemble_config(const CommonFlags& flags) {
  sfl::RunConfig config;
  if (!flags.config_path.empty())
    config = sfl::load_config_file(flags.config_path);
  if (!flags.agent.empty()) config.agent = sfl::agent_from_string(flags.agent);
  if (!flags.curriculum.empty()) config.curriculum = flags.curriculum;
  if (!flags.seeds.empty()) config.seeds = parse_seed_list(flags.seeds);
  if (flags.master_seed_set) config.master_seed = flags.master_seed;
  if (flags.jobs >= 0) config.jobs = flags.jobs;
  if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
  // environment override applies to the output directory only
  if (const char* env_dir = std::getenv("SFL_OUTPUT_DIR"); env_dir && *env_dir)
    config.out_dir = env_dir;
  return config;
}

void print_run_summary(const sfl::RunResult& result, int verbosity) {
  std::cout << "run " << result.config.curriculum << "/"
            << to_string(result.config.agent) << " seeds="
            << result.seeds.size() << " epochs="
            << (result.seeds.empty() ? 0 : result.seeds.front().rows.size())
            << " hash=" << result.hash << "\n";
  std::cout << "artifacts: " << result.out_dir << "\n";
  if (verbosity > 0) {
    const auto reward = result.aggregate_curve("total_reward");
    const auto goal = result.aggregate_curve("goal_rate");
    const std::size_t n = reward.mean.size();
    const std::size_t from = n > 10 ? n - 10 : 0;
    std::cout << "last epochs (mean reward / goal rate):\n";
    for (std::size_t e = from; e < n; ++e)
      std::cout << "  epoch " << e << ": " << reward.mean[e] << " / "
                << goal.mean[e] << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shifting Frozen Lake curriculum-robustness lab"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::vector<int> counts = {1, 5, 13, 15, 30};
  std::vector<std::string> run_dirs;
  int window = 50;
  std::string report_path;

  auto add_common = [&flags](CLI::App* cmd, bool with_agent) {
    cmd->add_option("--config", flags.config_path, "JSON run config file");
    cmd->add_option("--out", flags.out_dir, "output directory");
    if (with_agent) {
      cmd->add_option("--agent", flags.agent, "random|optimal|ppo|ppo_f");
      cmd->add_option("--curriculum", flags.curriculum, "A|B|C|D|E|sweep");
    }
    cmd->add_option("--seeds", flags.seeds, "comma-separated seed list");
    cmd->add_option("--master-seed", flags.master_seed, "master seed")
        ->each([&flags](const std::string&) { flags.master_seed_set = true; });
    cmd->add_option("--jobs", flags.jobs, "parallel seed workers (0 = all cores)");
    cmd->add_flag("-v,--verbose", flags.verbosity, "more output");
  };

  CLI::App* cmd_run = app.add_subcommand("run", "run one agent x curriculum");
  add_common(cmd_run, true);

  CLI::App* cmd_sweep =
      app.add_subcommand("sweep", "stored-example sweep (curriculum 'sweep')");
  add_common(cmd_sweep, false);
  cmd_sweep->add_option("--counts", counts, "stored-example counts")
      ->delimiter(',');

  CLI::App* cmd_analyze =
      app.add_subcommand("analyze", "regret/return summary over run dirs");
  cmd_analyze->add_option("--runs", run_dirs, "run directories")->required();
  cmd_analyze->add_option("--window", window, "trailing epoch window");
  cmd_analyze->add_option("--out", report_path, "JSON report path");

  CLI::App* cmd_plot =
      app.add_subcommand("plot-data", "emit long-format + aggregate CSVs");
  cmd_plot->add_option("--runs", run_dirs, "run directories")->required();
  cmd_plot->add_option("--out", flags.out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      const sfl::RunConfig config = assemble_config(flags);
      print_run_summary(sfl::run(config), flags.verbosity);
    } else if (cmd_sweep->parsed()) {
      sfl::RunConfig config = assemble_config(flags);
      config.curriculum = "sweep";
      if (config.cparams.phase_epochs.size() != 2) {
        if (!config.cparams.phase_epochs.empty())
          std::cerr << "sweep needs two phase lengths; using defaults\n";
        config.cparams.phase_epochs.clear();
      }
      const sfl::SweepResult sweep = sfl::run_sweep(config, counts);
      std::cout << "count mean_test_return se\n";
      for (const auto& row : sweep.table)
        std::cout << row.count << " " << row.mean << " " << row.se << "\n";
      std::cout << "table: " << sweep.table_path << "\n";
    } else if (cmd_analyze->parsed()) {
      const auto entries = sfl::analyze_runs(run_dirs, window, report_path);
      std::cout << "rank label regret_mean regret_se return_mean goal_rate\n";
      int rank = 1;
      for (const auto& e : entries)
        std::cout << rank++ << " " << e.label << " " << e.regret_mean << " "
                  << e.regret_se << " " << e.return_mean << " "
                  << e.goal_rate_mean << "\n";
    } else if (cmd_plot->parsed()) {
      if (const char* env_dir = std::getenv("SFL_OUTPUT_DIR"); env_dir && *env_dir)
        flags.out_dir = env_dir;
      const auto paths = sfl::emit_plot_data(run_dirs, flags.out_dir);
      for (const auto& p : paths) std::cout << p << "\n";
    }
  } catch (const sfl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const sfl::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const sfl::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
