#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "sfl/nn.hpp"
#include "sfl/rng.hpp"

namespace sfl {

struct PPOConfig {
  double clip_epsilon = 0.2;
  double learning_rate = 3e-4;
  double gae_lambda = 0.95;
  int update_epochs = 4;
  int minibatch_size = 128;
  double value_coef = 0.5;
  double entropy_coef = 0.01;
  double gamma = 1.0;  // undiscounted task; paper presets require exactly 1

  void validate() const;  // throws ConfigError
};

struct StepRecord {
  int action = 0;
  double log_prob = 0.0;
  double reward = 0.0;
  double value = 0.0;
  bool terminated = false;
  bool truncated = false;
  double bootstrap_value = 0.0;  // V(next state); meaningful when truncated
};

/// One epoch of on-policy experience. Observation columns align with
/// `steps`; the last step is always terminated or truncated (episodes never
/// straddle epochs).
struct Trajectory {
  Eigen::MatrixXd observations;  // obs_dim x capacity; first length() used
  std::vector<StepRecord> steps;

  void reserve(int obs_dim, int capacity) {
    observations.resize(obs_dim, capacity);
    steps.clear();
    steps.reserve(static_cast<std::size_t>(capacity));
  }
  void add(const Eigen::VectorXd& obs, const StepRecord& rec) {
    const int t = length();
    if (t == observations.cols())
      observations.conservativeResize(Eigen::NoChange, observations.cols() + 128);
    observations.col(t) = obs;
    steps.push_back(rec);
  }
  int length() const { return static_cast<int>(steps.size()); }
};

/// Generalized advantage estimation. Episode boundaries reset the recursion:
/// terminated steps bootstrap from 0, truncated steps from the recorded
/// bootstrap value. returns[t] = advantages[t] + value[t].
void compute_gae(const Trajectory& traj, double gamma, double lambda,
                 std::vector<double>& advantages, std::vector<double>& returns);

// Clipped-surrogate PPO loss over one minibatch, plus its gradient with
// respect to the logits and values. Losses are means over the batch;
// approx_kl is the (ratio - 1) - log(ratio) estimator.
struct PpoLossStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double total = 0.0;
};

PpoLossStats ppo_loss(const Eigen::MatrixXd& logits, const Eigen::VectorXd& values,
                      std::span<const int> actions,
                      std::span<const double> old_log_probs,
                      std::span<const double> advantages,
                      std::span<const double> returns, const PPOConfig& config,
                      Eigen::MatrixXd* dlogits, Eigen::VectorXd* dvalues);

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
};

/// One PPO update on a full epoch batch: update_epochs shuffled passes of
/// minibatch Adam steps on clipped surrogate + value loss + entropy bonus.
/// Advantages are normalized per minibatch. Throws NumericError on
/// non-finite losses.
UpdateStats ppo_update(ActorCritic& net, AdamOptimizer& adam,
                       const Trajectory& traj, const PPOConfig& config,
                       Rng& rng);

/// Compares the reverse-mode gradient of the PPO loss against central finite
/// differences for every parameter of a freshly built network; returns the
/// maximum relative error. Keep the spec small: cost is two loss evaluations
/// per parameter.
double gradient_check(const NetworkSpec& spec, Rng& rng);

}  // namespace sfl
