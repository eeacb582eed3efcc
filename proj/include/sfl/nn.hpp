#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sfl/rng.hpp"

namespace sfl {

// Topology of an actor-critic network. Both families end in a 4-logit policy
// head and a scalar value head on a shared trunk.
struct NetworkSpec {
  enum class Family { Dense, ConvDense };
  Family family = Family::Dense;

  // dense family: input_dim -> hidden[0] -> ... -> heads (tanh trunk)
  int input_dim = 4;
  std::vector<int> hidden = {64, 64};

  // conv family: in_channels x grid x grid images through valid 3x3 stages,
  // then one dense layer, then heads (tanh trunk)
  int in_channels = 5;
  int grid = 10;
  std::vector<int> conv_channels = {16, 32};
  int kernel = 3;
  int dense_width = 128;

  int observation_dim() const {
    return family == Family::Dense ? input_dim : in_channels * grid * grid;
  }
  std::string describe() const;

  static NetworkSpec dense(int input_dim, std::vector<int> hidden);
  static NetworkSpec conv(int in_channels, int grid,
                          std::vector<int> conv_channels, int kernel,
                          int dense_width);
};

/// Actor-critic network with hand-written reverse-mode differentiation.
/// Parameters and their gradients live in flat arrays so optimizers,
/// checkpoints, and finite-difference checks can treat the network as a
/// plain vector function. forward() caches activations; backward() must
/// follow a forward() with the same batch and accumulates into grads().
class ActorCritic {
 public:
  virtual ~ActorCritic() = default;

  virtual const NetworkSpec& spec() const = 0;
  int observation_dim() const { return spec().observation_dim(); }

  virtual int param_count() const = 0;
  virtual std::span<double> params() = 0;
  virtual std::span<const double> params() const = 0;
  virtual std::span<double> grads() = 0;
  virtual void zero_grads() = 0;

  // obs: observation_dim x B; fills logits (4 x B) and values (B)
  virtual void forward(const Eigen::MatrixXd& obs, Eigen::MatrixXd& logits,
                       Eigen::VectorXd& values) = 0;
  // dlogits: 4 x B, dvalues: B
  virtual void backward(const Eigen::MatrixXd& dlogits,
                        const Eigen::VectorXd& dvalues) = 0;

  std::pair<Eigen::Vector4d, double> forward1(const Eigen::VectorXd& obs);

  /// Builds a network with orthogonal-initialized trunk (gain sqrt(2)) and
  /// zero-initialized heads, so the initial policy is uniform and the initial
  /// value estimate is 0.
  static std::unique_ptr<ActorCritic> make(const NetworkSpec& spec, Rng& rng);
};

/// Orthogonal init scaled by `gain` (rows of W orthonormal when possible).
void orthogonal_init(Eigen::Ref<Eigen::MatrixXd> w, double gain, Rng& rng);

class AdamOptimizer {
 public:
  AdamOptimizer(int param_count, double learning_rate, double beta1 = 0.9,
                double beta2 = 0.999, double epsilon = 1e-8);
  void step(std::span<double> params, std::span<const double> grads);
  double learning_rate() const { return lr_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::vector<double> m_, v_;
  long t_ = 0;
};

// -- checkpoint io --
// Flat little-endian binary: magic "SFLCKPT1", u64 topology hash, u64 seed,
// i64 epoch, i64 param count, raw doubles.
struct CheckpointHeader {
  std::uint64_t spec_hash = 0;
  std::uint64_t seed = 0;
  long epoch = 0;
};

void save_checkpoint(const ActorCritic& net, const std::string& path,
                     std::uint64_t seed, long epoch);
void save_checkpoint_raw(const std::string& path, std::uint64_t spec_hash,
                         std::uint64_t seed, long epoch,
                         std::span<const double> params);
/// Loads parameters; throws IoError when the file's topology hash does not
/// match `net`.
CheckpointHeader load_checkpoint(ActorCritic& net, const std::string& path);

// -- categorical policy head helpers --
Eigen::Vector4d log_softmax4(const Eigen::Vector4d& logits);

struct ActionSample {
  int action = 0;
  double log_prob = 0.0;
};
ActionSample sample_action(const Eigen::Vector4d& logits, Rng& rng);

}  // namespace sfl
