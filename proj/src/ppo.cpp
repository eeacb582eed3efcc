#include "sfl/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sfl/errors.hpp"

namespace sfl {

void PPOConfig::validate() const {
  if (!(clip_epsilon > 0.0 && clip_epsilon < 1.0))
    throw ConfigError("ppo: need 0 < clip_epsilon < 1");
  if (learning_rate <= 0.0) throw ConfigError("ppo: learning_rate must be > 0");
  if (gae_lambda < 0.0 || gae_lambda > 1.0)
    throw ConfigError("ppo: need 0 <= gae_lambda <= 1");
  if (update_epochs < 1) throw ConfigError("ppo: update_epochs must be >= 1");
  if (minibatch_size < 1) throw ConfigError("ppo: minibatch_size must be >= 1");
  if (value_coef < 0.0 || entropy_coef < 0.0)
    throw ConfigError("ppo: loss coefficients must be >= 0");
  if (gamma <= 0.0 || gamma > 1.0) throw ConfigError("ppo: need 0 < gamma <= 1");
}

void compute_gae(const Trajectory& traj, double gamma, double lambda,
                 std::vector<double>& advantages, std::vector<double>& returns) {
  const int n = traj.length();
  advantages.assign(static_cast<std::size_t>(n), 0.0);
  returns.assign(static_cast<std::size_t>(n), 0.0);
  if (n == 0) return;
  const StepRecord& last = traj.steps.back();
  if (!last.terminated && !last.truncated)
    throw std::logic_error("compute_gae: trajectory must end on an episode boundary");

  double carry = 0.0;
  for (int t = n - 1; t >= 0; --t) {
    const StepRecord& s = traj.steps[static_cast<std::size_t>(t)];
    double next_value;
    if (s.terminated) {
      next_value = 0.0;
    } else if (s.truncated) {
      next_value = s.bootstrap_value;
    } else {
      next_value = traj.steps[static_cast<std::size_t>(t) + 1].value;
    }
    const double delta = s.reward + gamma * next_value - s.value;
    carry = (s.terminated || s.truncated) ? delta : delta + gamma * lambda * carry;
    advantages[static_cast<std::size_t>(t)] = carry;
    returns[static_cast<std::size_t>(t)] = carry + s.value;
  }
}

PpoLossStats ppo_loss(const Eigen::MatrixXd& logits, const Eigen::VectorXd& values,
                      std::span<const int> actions,
                      std::span<const double> old_log_probs,
                      std::span<const double> advantages,
                      std::span<const double> returns, const PPOConfig& config,
                      Eigen::MatrixXd* dlogits, Eigen::VectorXd* dvalues) {
  const int m = static_cast<int>(logits.cols());
  if (values.size() != m || static_cast<int>(actions.size()) != m ||
      static_cast<int>(old_log_probs.size()) != m ||
      static_cast<int>(advantages.size()) != m ||
      static_cast<int>(returns.size()) != m)
    throw std::invalid_argument("ppo_loss: batch size mismatch");

  if (dlogits) dlogits->setZero(4, m);
  if (dvalues) dvalues->setZero(m);

  PpoLossStats stats;
  const double lo = 1.0 - config.clip_epsilon;
  const double hi = 1.0 + config.clip_epsilon;
  const double inv_m = 1.0 / m;

  for (int i = 0; i < m; ++i) {
    const Eigen::Vector4d logp = log_softmax4(logits.col(i));
    const Eigen::Vector4d p = logp.array().exp();
    const int a = actions[static_cast<std::size_t>(i)];
    const double adv = advantages[static_cast<std::size_t>(i)];

    const double log_ratio = logp[a] - old_log_probs[static_cast<std::size_t>(i)];
    const double ratio = std::exp(log_ratio);
    const double clipped = std::clamp(ratio, lo, hi);
    const double unclipped_term = -adv * ratio;
    const double clipped_term = -adv * clipped;
    stats.policy_loss += inv_m * std::max(unclipped_term, clipped_term);
    stats.approx_kl += inv_m * ((ratio - 1.0) - log_ratio);

    const double entropy = -(p.array() * logp.array()).sum();
    stats.entropy += inv_m * entropy;

    const double v = values[i];
    const double verr = v - returns[static_cast<std::size_t>(i)];
    stats.value_loss += inv_m * 0.5 * verr * verr;

    if (dlogits) {
      // surrogate gradient flows only through the active unclipped branch
      const double dlogp =
          unclipped_term >= clipped_term ? -adv * ratio : 0.0;
      Eigen::Vector4d dl = -dlogp * p;
      dl[a] += dlogp;
      // entropy bonus: d(-c*H)/dlogits = c * p .* (logp + H)
      dl += config.entropy_coef * (p.array() * (logp.array() + entropy)).matrix();
      dlogits->col(i) = inv_m * dl;
    }
    if (dvalues) (*dvalues)[i] = inv_m * config.value_coef * verr;
  }

  stats.total = stats.policy_loss + config.value_coef * stats.value_loss -
                config.entropy_coef * stats.entropy;
  return stats;
}

namespace {

void fisher_yates(std::vector<int>& idx, Rng& rng) {
  for (int i = static_cast<int>(idx.size()) - 1; i > 0; --i) {
    const int j = rng.uniform_int(0, i);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
}

}  // namespace

UpdateStats ppo_update(ActorCritic& net, AdamOptimizer& adam,
                       const Trajectory& traj, const PPOConfig& config,
                       Rng& rng) {
  config.validate();
  const int n = traj.length();
  if (n == 0) throw std::invalid_argument("ppo_update: empty trajectory");

  std::vector<double> advantages, returns;
  compute_gae(traj, config.gamma, config.gae_lambda, advantages, returns);

  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;

  UpdateStats out;
  int batches = 0;
  Eigen::MatrixXd obs_mb, logits, dlogits;
  Eigen::VectorXd values, dvalues;
  std::vector<int> actions;
  std::vector<double> old_logp, adv_mb, ret_mb;

  for (int pass = 0; pass < config.update_epochs; ++pass) {
    fisher_yates(idx, rng);
    for (int start = 0; start < n; start += config.minibatch_size) {
      const int m = std::min(config.minibatch_size, n - start);
      obs_mb.resize(traj.observations.rows(), m);
      actions.resize(static_cast<std::size_t>(m));
      old_logp.resize(static_cast<std::size_t>(m));
      adv_mb.resize(static_cast<std::size_t>(m));
      ret_mb.resize(static_cast<std::size_t>(m));
      for (int j = 0; j < m; ++j) {
        const int t = idx[static_cast<std::size_t>(start + j)];
        obs_mb.col(j) = traj.observations.col(t);
        const StepRecord& s = traj.steps[static_cast<std::size_t>(t)];
        actions[static_cast<std::size_t>(j)] = s.action;
        old_logp[static_cast<std::size_t>(j)] = s.log_prob;
        adv_mb[static_cast<std::size_t>(j)] = advantages[static_cast<std::size_t>(t)];
        ret_mb[static_cast<std::size_t>(j)] = returns[static_cast<std::size_t>(t)];
      }
      // per-minibatch advantage normalization
      double mean = 0.0;
      for (double a : adv_mb) mean += a;
      mean /= m;
      double var = 0.0;
      for (double a : adv_mb) var += (a - mean) * (a - mean);
      const double stddev = std::sqrt(var / m);
      for (double& a : adv_mb) a = (a - mean) / (stddev + 1e-8);

      net.forward(obs_mb, logits, values);
      const PpoLossStats stats =
          ppo_loss(logits, values, actions, old_logp, adv_mb, ret_mb, config,
                   &dlogits, &dvalues);
      if (!std::isfinite(stats.total)) {
        std::ostringstream msg;
        msg << "ppo_update: non-finite loss (policy=" << stats.policy_loss
            << " value=" << stats.value_loss << " entropy=" << stats.entropy
            << ")";
        throw NumericError(msg.str());
      }
      net.zero_grads();
      net.backward(dlogits, dvalues);
      adam.step(net.params(), net.grads());

      out.policy_loss += stats.policy_loss;
      out.value_loss += stats.value_loss;
      out.entropy += stats.entropy;
      out.approx_kl += stats.approx_kl;
      ++batches;
    }
  }
  out.policy_loss /= batches;
  out.value_loss /= batches;
  out.entropy /= batches;
  out.approx_kl /= batches;
  return out;
}

double gradient_check(const NetworkSpec& spec, Rng& rng) {
  auto net = ActorCritic::make(spec, rng);
  // nudge every parameter off its init (heads start at zero) so the check
  // runs at a generic point
  for (double& p : net->params()) p += 0.1 * rng.normal();

  const int batch = 4;
  Eigen::MatrixXd obs(net->observation_dim(), batch);
  for (int j = 0; j < batch; ++j)
    for (int i = 0; i < obs.rows(); ++i) obs(i, j) = rng.normal();

  std::vector<int> actions(batch);
  std::vector<double> old_logp(batch), advantages(batch), returns(batch);
  Eigen::MatrixXd logits;
  Eigen::VectorXd values;
  net->forward(obs, logits, values);
  for (int j = 0; j < batch; ++j) {
    actions[static_cast<std::size_t>(j)] = rng.uniform_int(0, 3);
    // keep ratios strictly inside the clip band so the objective is smooth
    // at the evaluation point
    old_logp[static_cast<std::size_t>(j)] =
        log_softmax4(logits.col(j))[actions[static_cast<std::size_t>(j)]] +
        0.16 * (rng.uniform_real() - 0.5);
    advantages[static_cast<std::size_t>(j)] = rng.normal();
    returns[static_cast<std::size_t>(j)] = rng.normal();
  }

  PPOConfig config;
  auto loss_at = [&]() {
    net->forward(obs, logits, values);
    return ppo_loss(logits, values, actions, old_logp, advantages, returns,
                    config, nullptr, nullptr)
        .total;
  };

  Eigen::MatrixXd dlogits;
  Eigen::VectorXd dvalues;
  net->forward(obs, logits, values);
  ppo_loss(logits, values, actions, old_logp, advantages, returns, config,
           &dlogits, &dvalues);
  net->zero_grads();
  net->backward(dlogits, dvalues);
  std::vector<double> analytic(net->grads().begin(), net->grads().end());

  double max_rel = 0.0;
  auto params = net->params();
  for (int k = 0; k < net->param_count(); ++k) {
    const double saved = params[static_cast<std::size_t>(k)];
    const double h = 1e-5 * std::max(1.0, std::abs(saved));
    params[static_cast<std::size_t>(k)] = saved + h;
    const double f_plus = loss_at();
    params[static_cast<std::size_t>(k)] = saved - h;
    const double f_minus = loss_at();
    params[static_cast<std::size_t>(k)] = saved;
    const double numeric = (f_plus - f_minus) / (2.0 * h);
    const double a = analytic[static_cast<std::size_t>(k)];
    const double rel =
        std::abs(a - numeric) / std::max(1e-5, std::abs(a) + std::abs(numeric));
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

}  // namespace sfl
