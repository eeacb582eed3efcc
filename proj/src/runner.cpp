#include "sfl/runner.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "sfl/agents.hpp"
#include "sfl/errors.hpp"
#include "sfl/nn.hpp"
#include "sfl/observe.hpp"

namespace sfl {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::Random:
      return "random";
    case AgentKind::Optimal:
      return "optimal";
    case AgentKind::Ppo:
      return "ppo";
    case AgentKind::PpoF:
      return "ppo_f";
  }
  return "?";
}

AgentKind agent_from_string(const std::string& name) {
  if (name == "random") return AgentKind::Random;
  if (name == "optimal") return AgentKind::Optimal;
  if (name == "ppo") return AgentKind::Ppo;
  if (name == "ppo_f") return AgentKind::PpoF;
  throw ConfigError("unknown agent: " + name);
}

namespace {

Variable variable_from_string(const std::string& name) {
  for (Variable v : kAllVariables)
    if (to_string(v) == name) return v;
  throw ConfigError("unknown variable: " + name);
}

bool is_learning(AgentKind kind) {
  return kind == AgentKind::Ppo || kind == AgentKind::PpoF;
}

constexpr const char* kCurricula[] = {"A", "B", "C", "D", "E", "sweep"};

// fixed-format floating point: %.17g round-trips doubles exactly
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void RunConfig::validate() const {
  bool known = false;
  for (const char* c : kCurricula) known = known || curriculum == c;
  if (!known) throw ConfigError("unknown curriculum: " + curriculum);
  if (seeds.empty()) throw ConfigError("config: seeds must be nonempty");
  std::vector<std::uint64_t> sorted = seeds;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ConfigError("config: seeds must be distinct");
  if (timeout < 1) throw ConfigError("config: timeout must be positive");
  if (steps_per_epoch < 1)
    throw ConfigError("config: steps_per_epoch must be positive");
  if (env.size_min < 2 || env.size_min > env.size_max)
    throw ConfigError("config: need 2 <= size_min <= size_max");
  if (env.hole_density < 0.0 || env.hole_density >= 1.0)
    throw ConfigError("config: need 0 <= hole_density < 1");
  if (env.max_attempts < 1)
    throw ConfigError("config: max_attempts must be positive");
  ppo.validate();
  if (paper_preset && ppo.gamma != 1.0)
    throw ConfigError("config: paper presets require gamma == 1");
  if (net.hidden.empty() || net.conv_channels.empty())
    throw ConfigError("config: network layer lists must be nonempty");
  for (int h : net.hidden)
    if (h < 1) throw ConfigError("config: hidden widths must be >= 1");
  for (int c : net.conv_channels)
    if (c < 1) throw ConfigError("config: conv channels must be >= 1");
  if (net.kernel < 1 || net.dense_width < 1)
    throw ConfigError("config: bad kernel/dense_width");
  const int shrink =
      static_cast<int>(net.conv_channels.size()) * (net.kernel - 1);
  if (env.size_max - shrink < 1)
    throw ConfigError("config: conv stack shrinks the grid below 1x1");
  if (jobs < 0) throw ConfigError("config: jobs must be >= 0");
  if (cparams.store_count < 1)
    throw ConfigError("config: store_count must be >= 1");
  for (int e : cparams.phase_epochs)
    if (e < 1) throw ConfigError("config: phase epochs must be >= 1");
}

namespace {

json config_json_object(const RunConfig& c) {
  json j;
  j["agent"] = to_string(c.agent);
  j["curriculum"] = c.curriculum;
  j["phase_epochs"] = c.cparams.phase_epochs;
  j["store_count"] = c.cparams.store_count;
  j["preset_variable"] = to_string(c.cparams.preset_variable);
  j["master_seed"] = c.master_seed;
  j["seeds"] = c.seeds;
  j["env"] = {{"size_min", c.env.size_min},
              {"size_max", c.env.size_max},
              {"hole_density", c.env.hole_density},
              {"max_attempts", c.env.max_attempts},
              {"timeout", c.timeout},
              {"steps_per_epoch", c.steps_per_epoch}};
  j["ppo"] = {{"clip_epsilon", c.ppo.clip_epsilon},
              {"learning_rate", c.ppo.learning_rate},
              {"gae_lambda", c.ppo.gae_lambda},
              {"update_epochs", c.ppo.update_epochs},
              {"minibatch_size", c.ppo.minibatch_size},
              {"value_coef", c.ppo.value_coef},
              {"entropy_coef", c.ppo.entropy_coef},
              {"gamma", c.ppo.gamma}};
  j["net"] = {{"hidden", c.net.hidden},
              {"conv_channels", c.net.conv_channels},
              {"kernel", c.net.kernel},
              {"dense_width", c.net.dense_width}};
  j["out_dir"] = c.out_dir;
  j["jobs"] = c.jobs;
  j["paper_preset"] = c.paper_preset;
  return j;
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> keys,
                         const std::string& where) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : keys) ok = ok || item.key() == k;
    if (!ok) throw ConfigError("config: unknown key '" + item.key() + "' in " + where);
  }
}

template <typename T>
void get_if_present(const json& j, const char* key, T& out) {
  if (j.contains(key)) {
    try {
      out = j.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(std::string("config: bad value for '") + key + "'");
    }
  }
}

}  // namespace

std::string config_to_json(const RunConfig& config) {
  return config_json_object(config).dump(2) + "\n";
}

RunConfig config_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  reject_unknown_keys(j,
                      {"agent", "curriculum", "phase_epochs", "store_count",
                       "preset_variable", "master_seed", "seeds", "env", "ppo",
                       "net", "out_dir", "jobs", "paper_preset"},
                      "top level");

  RunConfig c;
  std::string agent = to_string(c.agent);
  std::string preset_variable = to_string(c.cparams.preset_variable);
  get_if_present(j, "agent", agent);
  c.agent = agent_from_string(agent);
  get_if_present(j, "curriculum", c.curriculum);
  get_if_present(j, "phase_epochs", c.cparams.phase_epochs);
  get_if_present(j, "store_count", c.cparams.store_count);
  get_if_present(j, "preset_variable", preset_variable);
  c.cparams.preset_variable = variable_from_string(preset_variable);
  get_if_present(j, "master_seed", c.master_seed);
  get_if_present(j, "seeds", c.seeds);
  if (j.contains("env")) {
    const json& e = j.at("env");
    reject_unknown_keys(e,
                        {"size_min", "size_max", "hole_density", "max_attempts",
                         "timeout", "steps_per_epoch"},
                        "env");
    get_if_present(e, "size_min", c.env.size_min);
    get_if_present(e, "size_max", c.env.size_max);
    get_if_present(e, "hole_density", c.env.hole_density);
    get_if_present(e, "max_attempts", c.env.max_attempts);
    get_if_present(e, "timeout", c.timeout);
    get_if_present(e, "steps_per_epoch", c.steps_per_epoch);
  }
  if (j.contains("ppo")) {
    const json& p = j.at("ppo");
    reject_unknown_keys(p,
                        {"clip_epsilon", "learning_rate", "gae_lambda",
                         "update_epochs", "minibatch_size", "value_coef",
                         "entropy_coef", "gamma"},
                        "ppo");
    get_if_present(p, "clip_epsilon", c.ppo.clip_epsilon);
    get_if_present(p, "learning_rate", c.ppo.learning_rate);
    get_if_present(p, "gae_lambda", c.ppo.gae_lambda);
    get_if_present(p, "update_epochs", c.ppo.update_epochs);
    get_if_present(p, "minibatch_size", c.ppo.minibatch_size);
    get_if_present(p, "value_coef", c.ppo.value_coef);
    get_if_present(p, "entropy_coef", c.ppo.entropy_coef);
    get_if_present(p, "gamma", c.ppo.gamma);
  }
  if (j.contains("net")) {
    const json& n = j.at("net");
    reject_unknown_keys(n, {"hidden", "conv_channels", "kernel", "dense_width"},
                        "net");
    get_if_present(n, "hidden", c.net.hidden);
    get_if_present(n, "conv_channels", c.net.conv_channels);
    get_if_present(n, "kernel", c.net.kernel);
    get_if_present(n, "dense_width", c.net.dense_width);
  }
  get_if_present(j, "out_dir", c.out_dir);
  get_if_present(j, "jobs", c.jobs);
  get_if_present(j, "paper_preset", c.paper_preset);
  return c;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return config_from_json(buffer.str());
}

std::string config_hash(const RunConfig& config) {
  // out_dir and jobs are execution details, not experiment identity
  json j = config_json_object(config);
  j.erase("out_dir");
  j.erase("jobs");
  const std::uint64_t h = fnv1a64(j.dump());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

namespace {

double row_metric(const EpochRow& row, const std::string& metric) {
  const EpochStats& s = row.stats;
  if (metric == "total_reward") return s.total_reward;
  if (metric == "goal_rate")
    return s.episodes > 0 ? static_cast<double>(s.goals) / s.episodes : 0.0;
  if (metric == "regret_raw") return s.regret_raw;
  if (metric == "regret_clamped") return s.regret_clamped;
  if (metric == "repetitive_fraction") return s.repetitive_fraction;
  if (metric == "moves_ratio")
    return s.optimal_moves > 0 ? moves_ratio(s) : 0.0;
  if (metric == "episodes") return s.episodes;
  if (metric == "goals") return s.goals;
  if (metric == "holes") return s.holes;
  if (metric == "truncations") return s.truncations;
  if (metric == "steps") return s.steps;
  if (metric == "policy_loss") return row.losses.policy_loss;
  if (metric == "value_loss") return row.losses.value_loss;
  if (metric == "entropy") return row.losses.entropy;
  if (metric == "approx_kl") return row.losses.approx_kl;
  throw ConfigError("unknown metric: " + metric);
}

const std::vector<std::string> kPlotMetrics = {
    "total_reward",        "goal_rate",   "regret_raw",
    "regret_clamped",      "repetitive_fraction", "moves_ratio"};

struct EpochRollout {
  std::vector<EpisodeRecord> episodes;
  Trajectory traj;  // learning agents only
  int steps = 0;
  double reward_sum = 0.0;  // independent step-level accumulator
};

EpochRollout rollout_epoch(ShiftingLake& lake, AgentKind agent, ActorCritic* net,
                           int steps_per_epoch, int atomic_max_size,
                           Rng& action_rng) {
  EpochRollout out;
  const bool learning = is_learning(agent);
  if (learning)
    out.traj.reserve(net->observation_dim(), steps_per_epoch + lake.timeout());

  auto encode = [&](const EnvState& s) -> Eigen::VectorXd {
    if (agent == AgentKind::PpoF)
      return encode_factored(s, atomic_max_size).normalized();
    return encode_atomic(s, atomic_max_size).data;
  };

  EnvState state = lake.reset();
  std::vector<Cell> path{state.agent};
  double episode_reward = 0.0;
  Cell episode_goal = state.example.goal;
  int episode_optimal_moves = state.example.distance_at(state.example.start);
  double episode_vstar = optimal_value(state.example, state.example.start).value();

  while (true) {
    Action action{};
    StepRecord rec;
    Eigen::VectorXd obs;
    if (learning) {
      obs = encode(state);
      const auto [logits, value] = net->forward1(obs);
      const ActionSample pick = sample_action(logits, action_rng);
      action = static_cast<Action>(pick.action);
      rec.action = pick.action;
      rec.log_prob = pick.log_prob;
      rec.value = value;
    } else if (agent == AgentKind::Random) {
      action = random_action(action_rng);
    } else {
      action = optimal_action(state);
    }

    const StepResult r = lake.step(state, action);
    ++out.steps;
    out.reward_sum += r.reward;
    episode_reward += r.reward;
    path.push_back(r.next.agent);

    if (learning) {
      rec.reward = r.reward;
      rec.terminated = r.terminated;
      rec.truncated = r.truncated;
      if (r.truncated) rec.bootstrap_value = net->forward1(encode(r.next)).second;
      out.traj.add(obs, rec);
    }

    if (r.terminated || r.truncated) {
      EpisodeRecord ep;
      ep.optimal_return = episode_vstar;
      ep.optimal_moves = episode_optimal_moves;
      ep.total_reward = episode_reward;
      ep.moves = static_cast<int>(path.size()) - 1;
      ep.reversals = count_reversals(path);
      ep.outcome = r.terminated ? (r.next.agent == episode_goal
                                       ? EpisodeRecord::Outcome::Goal
                                       : EpisodeRecord::Outcome::Hole)
                                : EpisodeRecord::Outcome::Truncated;
      out.episodes.push_back(ep);
      if (out.steps >= steps_per_epoch) break;
      state = lake.reset();
      path.assign(1, state.agent);
      episode_reward = 0.0;
      episode_goal = state.example.goal;
      episode_optimal_moves = state.example.distance_at(state.example.start);
      episode_vstar = optimal_value(state.example, state.example.start).value();
    } else {
      state = r.next;
    }
  }
  return out;
}

}  // namespace

std::vector<double> SeedRun::curve(const std::string& metric) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const EpochRow& r : rows) out.push_back(row_metric(r, metric));
  return out;
}

AggregateCurve RunResult::aggregate_curve(const std::string& metric) const {
  std::vector<std::vector<double>> curves;
  curves.reserve(seeds.size());
  for (const SeedRun& s : seeds) curves.push_back(s.curve(metric));
  return aggregate(curves);
}

SeedRun run_seed(const RunConfig& config, std::uint64_t seed) {
  config.validate();

  Rng store_rng(derive_seed(config.master_seed, "store", {seed}));
  const CurriculumSchedule schedule =
      build_schedule(config.curriculum, config.cparams, store_rng, config.env);

  auto phase_env_rng = [&](int phase) {
    const Phase& p = schedule.phases[static_cast<std::size_t>(phase)];
    if (p.is_test) return Rng(derive_seed(config.master_seed, "test-env", {seed}));
    return Rng(derive_seed(config.master_seed, "env",
                           {seed, static_cast<std::uint64_t>(phase)}));
  };

  Rng init_rng(derive_seed(config.master_seed, "init", {seed}));
  Rng action_rng(derive_seed(config.master_seed, "action", {seed}));
  Rng update_rng(derive_seed(config.master_seed, "update", {seed}));

  ShiftingLake lake(config.env, config.timeout, phase_env_rng(0));

  std::unique_ptr<ActorCritic> net;
  std::unique_ptr<AdamOptimizer> adam;
  if (is_learning(config.agent)) {
    const NetworkSpec spec =
        config.agent == AgentKind::PpoF
            ? NetworkSpec::dense(4, config.net.hidden)
            : NetworkSpec::conv(kNumChannels, config.env.size_max,
                                config.net.conv_channels, config.net.kernel,
                                config.net.dense_width);
    net = ActorCritic::make(spec, init_rng);
    adam = std::make_unique<AdamOptimizer>(net->param_count(),
                                           config.ppo.learning_rate);
  }

  SeedRun out;
  out.seed = seed;
  out.store = schedule.stored;
  if (net) out.net_spec_hash = fnv1a64(net->spec().describe());

  auto snapshot = [&](long epoch) {
    if (!net) return;
    out.checkpoints.push_back(
        {epoch, {net->params().begin(), net->params().end()}});
  };

  int current_phase = -1;
  const int total = schedule.total_epochs();
  for (int epoch = 0; epoch < total; ++epoch) {
    const int phase = schedule.phase_index(epoch);
    if (phase != current_phase) {
      if (current_phase >= 0) snapshot(epoch);
      current_phase = phase;
      lake.set_rng(phase_env_rng(phase));
      const Phase& p = schedule.phases[static_cast<std::size_t>(phase)];
      lake.set_mode(p.mode,
                    p.mode.kind == ShiftMode::Kind::StoredExamples
                        ? schedule.stored
                        : std::vector<ExampleSpec>{});
    }

    EpochRollout rollout =
        rollout_epoch(lake, config.agent, net.get(), config.steps_per_epoch,
                      config.env.size_max, action_rng);

    EpochRow row;
    row.stats = epoch_stats(epoch, rollout.episodes);
    row.phase = phase;
    row.mode = to_string(lake.mode());
    // cross-module accounting: step-level sums must match episode totals
    if (std::abs(rollout.reward_sum - row.stats.total_reward) > 1e-9)
      throw NumericError("epoch accounting mismatch at epoch " +
                         std::to_string(epoch));
    if (net) {
      try {
        row.losses = ppo_update(*net, *adam, rollout.traj, config.ppo, update_rng);
      } catch (const NumericError& e) {
        throw NumericError("seed " + std::to_string(seed) + " epoch " +
                           std::to_string(epoch) + ": " + e.what());
      }
    }
    out.rows.push_back(std::move(row));
  }
  snapshot(total);
  return out;
}

namespace {

void write_epoch_csv(const std::string& path, const RunConfig& config,
                     const std::string& hash, const SeedRun& seed_run) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "# sfl-epochs-v1 config_hash=" << hash << "\n";
  out << "curriculum,agent,seed,epoch,phase,mode,episodes,goals,holes,"
         "truncations,steps,total_reward,repetitive_fraction,moves,"
         "optimal_moves,moves_ratio,regret_raw,regret_clamped,policy_loss,"
         "value_loss,entropy,approx_kl\n";
  for (const EpochRow& row : seed_run.rows) {
    const EpochStats& s = row.stats;
    out << config.curriculum << ',' << to_string(config.agent) << ','
        << seed_run.seed << ',' << s.epoch << ',' << row.phase << ','
        << row.mode << ',' << s.episodes << ',' << s.goals << ',' << s.holes
        << ',' << s.truncations << ',' << s.steps << ','
        << fmt(s.total_reward) << ',' << fmt(s.repetitive_fraction) << ','
        << s.moves << ',' << s.optimal_moves << ','
        << fmt(s.optimal_moves > 0 ? moves_ratio(s) : 0.0) << ','
        << fmt(s.regret_raw) << ',' << fmt(s.regret_clamped) << ','
        << fmt(row.losses.policy_loss) << ',' << fmt(row.losses.value_loss)
        << ',' << fmt(row.losses.entropy) << ',' << fmt(row.losses.approx_kl)
        << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_schedule_log(const std::string& path, const RunConfig& config,
                        const std::string& hash) {
  // the schedule shape is seed-independent; expand it once with seed 0 tags
  Rng store_rng(derive_seed(config.master_seed, "store", {config.seeds[0]}));
  const CurriculumSchedule schedule =
      build_schedule(config.curriculum, config.cparams, store_rng, config.env);
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "# sfl-schedule-v1 config_hash=" << hash << "\n";
  out << "curriculum " << schedule.name << "\n";
  int begin = 0;
  for (std::size_t i = 0; i < schedule.phases.size(); ++i) {
    const Phase& p = schedule.phases[i];
    out << "phase " << i << " mode=" << to_string(p.mode)
        << " epochs=" << p.epochs << " first_epoch=" << begin
        << (p.is_test ? " test" : "") << "\n";
    begin += p.epochs;
  }
  out << "transitions";
  for (int t : schedule.transition_epochs()) out << " " << t;
  out << "\n";
  if (!out) throw IoError("write failed: " + path);
}

void write_aggregate_json(const std::string& path, const RunResult& result) {
  json j;
  j["config_hash"] = result.hash;
  j["curriculum"] = result.config.curriculum;
  j["agent"] = to_string(result.config.agent);
  j["seeds"] = result.config.seeds;
  j["epochs"] = result.seeds.front().rows.size();
  j["transition_epochs"] = result.transition_epochs;
  json metrics;
  for (const std::string& m : kPlotMetrics) {
    const AggregateCurve curve = result.aggregate_curve(m);
    metrics[m] = {{"mean", curve.mean}, {"se", curve.se}};
  }
  j["metrics"] = metrics;
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace

RunResult run(const RunConfig& config) {
  config.validate();

  RunResult result;
  result.config = config;
  result.hash = config_hash(config);
  result.out_dir = config.out_dir;
  result.seeds.resize(config.seeds.size());
  {
    Rng store_rng(derive_seed(config.master_seed, "store", {config.seeds[0]}));
    result.transition_epochs =
        build_schedule(config.curriculum, config.cparams, store_rng, config.env)
            .transition_epochs();
  }

  // run seeds in parallel; each depends only on (config, its own seed)
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  int jobs = config.jobs > 0 ? config.jobs : std::max(1, hw);
  jobs = std::min<int>(jobs, static_cast<int>(config.seeds.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= config.seeds.size()) return;
      try {
        result.seeds[i] = run_seed(config, config.seeds[i]);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  // single-threaded finalizer writes all artifacts
  try {
    fs::create_directories(config.out_dir);
    result.config_echo_path = (fs::path(config.out_dir) / "config.json").string();
    {
      std::ofstream out(result.config_echo_path);
      if (!out) throw IoError("cannot open for writing: " + result.config_echo_path);
      json j = config_json_object(config);
      j["config_hash"] = result.hash;
      out << j.dump(2) << "\n";
    }
    result.schedule_path = (fs::path(config.out_dir) / "schedule.txt").string();
    write_schedule_log(result.schedule_path, config, result.hash);

    for (const SeedRun& seed_run : result.seeds) {
      const fs::path seed_dir =
          fs::path(config.out_dir) / ("seed_" + std::to_string(seed_run.seed));
      fs::create_directories(seed_dir);
      const std::string csv = (seed_dir / "epochs.csv").string();
      write_epoch_csv(csv, config, result.hash, seed_run);
      result.seed_csv_paths.push_back(csv);
      if (!seed_run.store.empty())
        write_store((seed_dir / "store.txt").string(), seed_run.store);
      for (const SeedRun::Snapshot& snap : seed_run.checkpoints) {
        const std::string name =
            "checkpoint_epoch" + std::to_string(snap.epoch) + ".bin";
        save_checkpoint_raw((seed_dir / name).string(), seed_run.net_spec_hash,
                            seed_run.seed, snap.epoch, snap.params);
      }
    }
    result.aggregate_path = (fs::path(config.out_dir) / "aggregate.json").string();
    write_aggregate_json(result.aggregate_path, result);
  } catch (const fs::filesystem_error& e) {
    throw IoError(std::string("artifact write failed: ") + e.what());
  }
  return result;
}

SweepResult run_sweep(const RunConfig& base, const std::vector<int>& counts) {
  if (base.curriculum != "sweep")
    throw ConfigError("run_sweep: base config must use curriculum 'sweep'");
  if (counts.empty()) throw ConfigError("run_sweep: counts must be nonempty");

  SweepResult sweep;
  for (int count : counts) {
    RunConfig config = base;
    config.cparams.store_count = count;
    config.out_dir =
        (fs::path(base.out_dir) / ("count_" + std::to_string(count))).string();
    sweep.runs.push_back(run(config));
  }

  // mean test-phase return per count (test phase = last phase)
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const RunResult& r = sweep.runs[i];
    const int first_test_epoch =
        r.transition_epochs.empty() ? 0 : r.transition_epochs.back();
    std::vector<double> per_seed;
    for (const SeedRun& s : r.seeds) {
      double sum = 0.0;
      int n = 0;
      for (const EpochRow& row : s.rows)
        if (row.stats.epoch >= first_test_epoch) {
          sum += row.stats.total_reward;
          ++n;
        }
      per_seed.push_back(sum / n);
    }
    const MeanSe ms = mean_se(per_seed);
    sweep.table.push_back({counts[i], ms.mean, ms.se});
  }

  fs::create_directories(base.out_dir);
  sweep.table_path = (fs::path(base.out_dir) / "sweep_table.csv").string();
  std::ofstream out(sweep.table_path);
  if (!out) throw IoError("cannot open for writing: " + sweep.table_path);
  out << "# sfl-sweep-v1\n";
  out << "count,mean_test_return,se\n";
  for (const SweepResult::Row& row : sweep.table)
    out << row.count << ',' << fmt(row.mean) << ',' << fmt(row.se) << "\n";
  return sweep;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  return fields;
}

SeedRun parse_epoch_csv(const std::string& path, std::string* curriculum,
                        std::string* agent) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  SeedRun seed_run;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;  // column header
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 22) throw IoError("bad row in " + path);
    if (curriculum) *curriculum = f[0];
    if (agent) *agent = f[1];
    seed_run.seed = std::stoull(f[2]);
    EpochRow row;
    row.stats.epoch = std::stoi(f[3]);
    row.phase = std::stoi(f[4]);
    row.mode = f[5];
    row.stats.episodes = std::stoi(f[6]);
    row.stats.goals = std::stoi(f[7]);
    row.stats.holes = std::stoi(f[8]);
    row.stats.truncations = std::stoi(f[9]);
    row.stats.steps = std::stoi(f[10]);
    row.stats.total_reward = std::stod(f[11]);
    row.stats.repetitive_fraction = std::stod(f[12]);
    row.stats.moves = std::stol(f[13]);
    row.stats.optimal_moves = std::stol(f[14]);
    // f[15] moves_ratio is derived; skip
    row.stats.regret_raw = std::stod(f[16]);
    row.stats.regret_clamped = std::stod(f[17]);
    row.losses.policy_loss = std::stod(f[18]);
    row.losses.value_loss = std::stod(f[19]);
    row.losses.entropy = std::stod(f[20]);
    row.losses.approx_kl = std::stod(f[21]);
    seed_run.rows.push_back(std::move(row));
  }
  return seed_run;
}

}  // namespace

LoadedRun load_run_dir(const std::string& dir) {
  LoadedRun run;
  const fs::path base(dir);
  {
    std::ifstream in(base / "config.json");
    if (!in) throw IoError("cannot open: " + (base / "config.json").string());
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw IoError(std::string("bad config echo: ") + e.what());
    }
    run.curriculum = j.at("curriculum").get<std::string>();
    run.agent = j.at("agent").get<std::string>();
    run.hash = j.value("config_hash", "");
  }
  std::vector<fs::path> seed_dirs;
  for (const auto& entry : fs::directory_iterator(base))
    if (entry.is_directory() &&
        entry.path().filename().string().rfind("seed_", 0) == 0)
      seed_dirs.push_back(entry.path());
  std::sort(seed_dirs.begin(), seed_dirs.end());
  for (const auto& seed_dir : seed_dirs)
    run.seeds.push_back(
        parse_epoch_csv((seed_dir / "epochs.csv").string(), nullptr, nullptr));
  if (run.seeds.empty()) throw IoError("no seed CSVs under " + dir);
  const std::size_t len = run.seeds.front().rows.size();
  for (const SeedRun& s : run.seeds)
    if (s.rows.size() != len)
      throw IoError("seed epoch axes differ under " + dir);
  return run;
}

std::vector<std::string> emit_plot_data(const std::vector<std::string>& run_dirs,
                                        const std::string& out_dir) {
  if (run_dirs.empty()) throw ConfigError("plot-data: no run directories given");
  std::vector<LoadedRun> runs;
  runs.reserve(run_dirs.size());
  for (const std::string& d : run_dirs) runs.push_back(load_run_dir(d));

  fs::create_directories(out_dir);
  const std::string long_path = (fs::path(out_dir) / "long.csv").string();
  const std::string agg_path = (fs::path(out_dir) / "aggregate.csv").string();

  std::ofstream longf(long_path);
  if (!longf) throw IoError("cannot open for writing: " + long_path);
  longf << "# sfl-plot-long-v1\n";
  longf << "curriculum,agent,seed,epoch,metric,value\n";
  for (const LoadedRun& run : runs)
    for (const SeedRun& seed_run : run.seeds)
      for (const EpochRow& row : seed_run.rows)
        for (const std::string& m : kPlotMetrics)
          longf << run.curriculum << ',' << run.agent << ',' << seed_run.seed
                << ',' << row.stats.epoch << ',' << m << ','
                << fmt(row_metric(row, m)) << "\n";
  if (!longf) throw IoError("write failed: " + long_path);

  std::ofstream aggf(agg_path);
  if (!aggf) throw IoError("cannot open for writing: " + agg_path);
  aggf << "# sfl-plot-agg-v1\n";
  aggf << "curriculum,agent,epoch,metric,mean,se\n";
  for (const LoadedRun& run : runs) {
    for (const std::string& m : kPlotMetrics) {
      std::vector<std::vector<double>> curves;
      for (const SeedRun& seed_run : run.seeds)
        curves.push_back(seed_run.curve(m));
      const AggregateCurve curve = aggregate(curves);
      for (std::size_t e = 0; e < curve.mean.size(); ++e)
        aggf << run.curriculum << ',' << run.agent << ',' << e << ',' << m
             << ',' << fmt(curve.mean[e]) << ',' << fmt(curve.se[e]) << "\n";
    }
  }
  if (!aggf) throw IoError("write failed: " + agg_path);
  return {long_path, agg_path};
}

std::vector<AnalyzeEntry> analyze_runs(const std::vector<std::string>& run_dirs,
                                       int window, const std::string& out_path) {
  if (run_dirs.empty()) throw ConfigError("analyze: no run directories given");
  if (window < 1) throw ConfigError("analyze: window must be >= 1");

  std::vector<AnalyzeEntry> entries;
  for (const std::string& dir : run_dirs) {
    const LoadedRun run = load_run_dir(dir);
    const int epochs = static_cast<int>(run.seeds.front().rows.size());
    if (window > epochs)
      throw ConfigError("analyze: window exceeds run length of " + dir);
    AnalyzeEntry entry;
    entry.label = run.curriculum + "/" + run.agent;
    std::vector<double> regrets, returns, goal_rates;
    for (const SeedRun& seed_run : run.seeds) {
      double regret = 0.0, ret = 0.0, goals = 0.0, episodes = 0.0;
      for (std::size_t i = seed_run.rows.size() - window; i < seed_run.rows.size(); ++i) {
        regret += seed_run.rows[i].stats.regret_raw;
        ret += seed_run.rows[i].stats.total_reward;
        goals += seed_run.rows[i].stats.goals;
        episodes += seed_run.rows[i].stats.episodes;
      }
      regrets.push_back(regret);
      returns.push_back(ret / window);
      goal_rates.push_back(episodes > 0 ? goals / episodes : 0.0);
    }
    const MeanSe regret_ms = mean_se(regrets);
    const MeanSe return_ms = mean_se(returns);
    entry.regret_mean = regret_ms.mean;
    entry.regret_se = regret_ms.se;
    entry.return_mean = return_ms.mean;
    entry.return_se = return_ms.se;
    entry.goal_rate_mean = mean_se(goal_rates).mean;
    entries.push_back(entry);
  }

  std::stable_sort(entries.begin(), entries.end(),
                   [](const AnalyzeEntry& a, const AnalyzeEntry& b) {
                     return a.regret_mean < b.regret_mean;
                   });

  if (!out_path.empty()) {
    json j;
    j["window"] = window;
    json items = json::array();
    for (const AnalyzeEntry& e : entries)
      items.push_back({{"label", e.label},
                       {"regret_mean", e.regret_mean},
                       {"regret_se", e.regret_se},
                       {"return_mean", e.return_mean},
                       {"return_se", e.return_se},
                       {"goal_rate_mean", e.goal_rate_mean}});
    j["ranking"] = items;
    std::ofstream out(out_path);
    if (!out) throw IoError("cannot open for writing: " + out_path);
    out << j.dump(2) << "\n";
  }
  return entries;
}

}  // namespace sfl
