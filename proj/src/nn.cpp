#include "sfl/nn.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sfl/errors.hpp"

namespace sfl {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

using MatMap = Eigen::Map<MatrixXd>;
using VecMap = Eigen::Map<VectorXd>;

struct Slot {
  int w_off = 0, b_off = 0;
  int out = 0, in = 0;  // W is out x in, b is out
};

int slot_size(const Slot& s) { return s.out * s.in + s.out; }

MatMap weight(std::vector<double>& buf, const Slot& s) {
  return MatMap(buf.data() + s.w_off, s.out, s.in);
}
VecMap bias(std::vector<double>& buf, const Slot& s) {
  return VecMap(buf.data() + s.b_off, s.out);
}

// image batches are stored as C x (G*G*B): column b*G*G + r*G + c
void im2col(const MatrixXd& img, int channels, int g, int k, int batch,
            MatrixXd& col) {
  const int go = g - k + 1;
  const int patch = go * go;
  col.resize(channels * k * k, patch * batch);
  for (int b = 0; b < batch; ++b) {
    for (int c = 0; c < channels; ++c) {
      for (int dr = 0; dr < k; ++dr) {
        for (int dc = 0; dc < k; ++dc) {
          const int row = (c * k + dr) * k + dc;
          for (int i = 0; i < go; ++i) {
            const int src = b * g * g + (i + dr) * g + dc;
            const int dst = b * patch + i * go;
            for (int j = 0; j < go; ++j)
              col(row, dst + j) = img(c, src + j);
          }
        }
      }
    }
  }
}

void col2im_add(const MatrixXd& dcol, int channels, int g, int k, int batch,
                MatrixXd& dimg) {
  const int go = g - k + 1;
  const int patch = go * go;
  for (int b = 0; b < batch; ++b) {
    for (int c = 0; c < channels; ++c) {
      for (int dr = 0; dr < k; ++dr) {
        for (int dc = 0; dc < k; ++dc) {
          const int row = (c * k + dr) * k + dc;
          for (int i = 0; i < go; ++i) {
            const int dst = b * g * g + (i + dr) * g + dc;
            const int src = b * patch + i * go;
            for (int j = 0; j < go; ++j)
              dimg(c, dst + j) += dcol(row, src + j);
          }
        }
      }
    }
  }
}

class DenseActorCritic final : public ActorCritic {
 public:
  DenseActorCritic(NetworkSpec spec, Rng& rng) : spec_(std::move(spec)) {
    int offset = 0;
    int in = spec_.input_dim;
    for (int width : spec_.hidden) {
      trunk_.push_back(add_slot(offset, width, in));
      in = width;
    }
    policy_ = add_slot(offset, 4, in);
    value_ = add_slot(offset, 1, in);
    params_.assign(static_cast<std::size_t>(offset), 0.0);
    grads_.assign(static_cast<std::size_t>(offset), 0.0);
    for (const Slot& s : trunk_)
      orthogonal_init(weight(params_, s), std::sqrt(2.0), rng);
    // heads stay zero: uniform initial policy, zero initial value
  }

  const NetworkSpec& spec() const override { return spec_; }
  int param_count() const override { return static_cast<int>(params_.size()); }
  std::span<double> params() override { return params_; }
  std::span<const double> params() const override { return params_; }
  std::span<double> grads() override { return grads_; }
  void zero_grads() override { std::fill(grads_.begin(), grads_.end(), 0.0); }

  void forward(const MatrixXd& obs, MatrixXd& logits, VectorXd& values) override {
    if (obs.rows() != spec_.input_dim)
      throw std::invalid_argument("forward: observation dim mismatch");
    input_ = obs;
    acts_.resize(trunk_.size());
    const MatrixXd* prev = &input_;
    for (std::size_t l = 0; l < trunk_.size(); ++l) {
      acts_[l] = ((weight(params_, trunk_[l]) * (*prev)).colwise() +
                  bias(params_, trunk_[l]))
                     .array()
                     .tanh();
      prev = &acts_[l];
    }
    logits = (weight(params_, policy_) * (*prev)).colwise() + bias(params_, policy_);
    values = ((weight(params_, value_) * (*prev)).colwise() +
              bias(params_, value_))
                 .transpose();
  }

  void backward(const MatrixXd& dlogits, const VectorXd& dvalues) override {
    const MatrixXd& top = acts_.empty() ? input_ : acts_.back();
    const Eigen::RowVectorXd dvals = dvalues.transpose();

    weight(grads_, policy_) += dlogits * top.transpose();
    bias(grads_, policy_) += dlogits.rowwise().sum();
    weight(grads_, value_) += dvals * top.transpose();
    bias(grads_, value_) += VectorXd::Constant(1, dvals.sum());

    MatrixXd dact = weight(params_, policy_).transpose() * dlogits +
                    weight(params_, value_).transpose() * dvals;
    for (int l = static_cast<int>(trunk_.size()) - 1; l >= 0; --l) {
      const MatrixXd dz =
          dact.array() * (1.0 - acts_[static_cast<std::size_t>(l)].array().square());
      const MatrixXd& below =
          l == 0 ? input_ : acts_[static_cast<std::size_t>(l) - 1];
      weight(grads_, trunk_[static_cast<std::size_t>(l)]) += dz * below.transpose();
      bias(grads_, trunk_[static_cast<std::size_t>(l)]) += dz.rowwise().sum();
      if (l > 0)
        dact = weight(params_, trunk_[static_cast<std::size_t>(l)]).transpose() * dz;
    }
  }

 private:
  Slot add_slot(int& offset, int out, int in) {
    Slot s;
    s.out = out;
    s.in = in;
    s.w_off = offset;
    s.b_off = offset + out * in;
    offset += slot_size(s);
    return s;
  }

  NetworkSpec spec_;
  std::vector<Slot> trunk_;
  Slot policy_, value_;
  std::vector<double> params_, grads_;

  // forward cache
  MatrixXd input_;
  std::vector<MatrixXd> acts_;
};

class ConvActorCritic final : public ActorCritic {
 public:
  ConvActorCritic(NetworkSpec spec, Rng& rng) : spec_(std::move(spec)) {
    int offset = 0;
    int channels = spec_.in_channels;
    int g = spec_.grid;
    const int k = spec_.kernel;
    for (int out_c : spec_.conv_channels) {
      if (g < k)
        throw ConfigError("conv network: grid shrank below kernel size");
      Stage st;
      st.in_c = channels;
      st.out_c = out_c;
      st.in_g = g;
      st.out_g = g - k + 1;
      st.slot = add_slot(offset, out_c, channels * k * k);
      stages_.push_back(st);
      channels = out_c;
      g = st.out_g;
    }
    flat_dim_ = channels * g * g;
    dense_ = add_slot(offset, spec_.dense_width, flat_dim_);
    policy_ = add_slot(offset, 4, spec_.dense_width);
    value_ = add_slot(offset, 1, spec_.dense_width);
    params_.assign(static_cast<std::size_t>(offset), 0.0);
    grads_.assign(static_cast<std::size_t>(offset), 0.0);
    for (const Stage& st : stages_)
      orthogonal_init(weight(params_, st.slot), std::sqrt(2.0), rng);
    orthogonal_init(weight(params_, dense_), std::sqrt(2.0), rng);
  }

  const NetworkSpec& spec() const override { return spec_; }
  int param_count() const override { return static_cast<int>(params_.size()); }
  std::span<double> params() override { return params_; }
  std::span<const double> params() const override { return params_; }
  std::span<double> grads() override { return grads_; }
  void zero_grads() override { std::fill(grads_.begin(), grads_.end(), 0.0); }

  void forward(const MatrixXd& obs, MatrixXd& logits, VectorXd& values) override {
    if (obs.rows() != spec_.observation_dim())
      throw std::invalid_argument("forward: observation dim mismatch");
    batch_ = static_cast<int>(obs.cols());
    const int g0 = spec_.grid;

    // reshape columns into the C x (G*G*B) image layout
    images_.resize(stages_.size() + 1);
    images_[0].resize(spec_.in_channels, g0 * g0 * batch_);
    for (int b = 0; b < batch_; ++b)
      for (int c = 0; c < spec_.in_channels; ++c)
        images_[0].row(c).segment(b * g0 * g0, g0 * g0) =
            obs.col(b).segment(c * g0 * g0, g0 * g0).transpose();

    cols_.resize(stages_.size());
    for (std::size_t s = 0; s < stages_.size(); ++s) {
      const Stage& st = stages_[s];
      im2col(images_[s], st.in_c, st.in_g, spec_.kernel, batch_, cols_[s]);
      images_[s + 1] = ((weight(params_, st.slot) * cols_[s]).colwise() +
                        bias(params_, st.slot))
                           .array()
                           .tanh();
    }

    // flatten per sample: F(c*P+p, b) = top(c, b*P+p)
    const MatrixXd& top = images_.back();
    const int patch = stages_.back().out_g * stages_.back().out_g;
    flat_.resize(flat_dim_, batch_);
    for (int b = 0; b < batch_; ++b)
      for (int c = 0; c < stages_.back().out_c; ++c)
        flat_.col(b).segment(c * patch, patch) =
            top.row(c).segment(b * patch, patch).transpose();

    hidden_ = ((weight(params_, dense_) * flat_).colwise() + bias(params_, dense_))
                  .array()
                  .tanh();
    logits = (weight(params_, policy_) * hidden_).colwise() + bias(params_, policy_);
    values = ((weight(params_, value_) * hidden_).colwise() +
              bias(params_, value_))
                 .transpose();
  }

  void backward(const MatrixXd& dlogits, const VectorXd& dvalues) override {
    const Eigen::RowVectorXd dvals = dvalues.transpose();

    weight(grads_, policy_) += dlogits * hidden_.transpose();
    bias(grads_, policy_) += dlogits.rowwise().sum();
    weight(grads_, value_) += dvals * hidden_.transpose();
    bias(grads_, value_) += VectorXd::Constant(1, dvals.sum());

    MatrixXd dhidden = weight(params_, policy_).transpose() * dlogits +
                       weight(params_, value_).transpose() * dvals;
    const MatrixXd dzd = dhidden.array() * (1.0 - hidden_.array().square());
    weight(grads_, dense_) += dzd * flat_.transpose();
    bias(grads_, dense_) += dzd.rowwise().sum();
    const MatrixXd dflat = weight(params_, dense_).transpose() * dzd;

    // unflatten back into the image layout
    const int patch = stages_.back().out_g * stages_.back().out_g;
    MatrixXd dimg(stages_.back().out_c, patch * batch_);
    for (int b = 0; b < batch_; ++b)
      for (int c = 0; c < stages_.back().out_c; ++c)
        dimg.row(c).segment(b * patch, patch) =
            dflat.col(b).segment(c * patch, patch).transpose();

    for (int s = static_cast<int>(stages_.size()) - 1; s >= 0; --s) {
      const Stage& st = stages_[static_cast<std::size_t>(s)];
      const MatrixXd dz =
          dimg.array() *
          (1.0 - images_[static_cast<std::size_t>(s) + 1].array().square());
      weight(grads_, st.slot) += dz * cols_[static_cast<std::size_t>(s)].transpose();
      bias(grads_, st.slot) += dz.rowwise().sum();
      if (s > 0) {
        const MatrixXd dcol = weight(params_, st.slot).transpose() * dz;
        dimg.setZero(st.in_c, st.in_g * st.in_g * batch_);
        col2im_add(dcol, st.in_c, st.in_g, spec_.kernel, batch_, dimg);
      }
    }
  }

 private:
  struct Stage {
    Slot slot;
    int in_c = 0, out_c = 0, in_g = 0, out_g = 0;
  };

  Slot add_slot(int& offset, int out, int in) {
    Slot s;
    s.out = out;
    s.in = in;
    s.w_off = offset;
    s.b_off = offset + out * in;
    offset += slot_size(s);
    return s;
  }

  NetworkSpec spec_;
  std::vector<Stage> stages_;
  Slot dense_, policy_, value_;
  int flat_dim_ = 0;
  std::vector<double> params_, grads_;

  // forward cache
  int batch_ = 0;
  std::vector<MatrixXd> images_;  // images_[0] = input, images_[s+1] = stage s output
  std::vector<MatrixXd> cols_;
  MatrixXd flat_, hidden_;
};

}  // namespace

std::string NetworkSpec::describe() const {
  std::ostringstream out;
  if (family == Family::Dense) {
    out << "dense:" << input_dim;
    for (int h : hidden) out << "-" << h;
  } else {
    out << "conv:" << in_channels << "x" << grid << "x" << grid;
    for (int c : conv_channels) out << "-c" << c << "k" << kernel;
    out << "-d" << dense_width;
  }
  out << "-heads4+1";
  return out.str();
}

NetworkSpec NetworkSpec::dense(int input_dim, std::vector<int> hidden) {
  NetworkSpec s;
  s.family = Family::Dense;
  s.input_dim = input_dim;
  s.hidden = std::move(hidden);
  return s;
}

NetworkSpec NetworkSpec::conv(int in_channels, int grid,
                              std::vector<int> conv_channels, int kernel,
                              int dense_width) {
  NetworkSpec s;
  s.family = Family::ConvDense;
  s.in_channels = in_channels;
  s.grid = grid;
  s.conv_channels = std::move(conv_channels);
  s.kernel = kernel;
  s.dense_width = dense_width;
  return s;
}

std::pair<Eigen::Vector4d, double> ActorCritic::forward1(const Eigen::VectorXd& obs) {
  Eigen::MatrixXd logits;
  Eigen::VectorXd values;
  forward(obs, logits, values);
  return {logits.col(0), values[0]};
}

std::unique_ptr<ActorCritic> ActorCritic::make(const NetworkSpec& spec, Rng& rng) {
  if (spec.family == NetworkSpec::Family::Dense)
    return std::make_unique<DenseActorCritic>(spec, rng);
  return std::make_unique<ConvActorCritic>(spec, rng);
}

void orthogonal_init(Eigen::Ref<Eigen::MatrixXd> w, double gain, Rng& rng) {
  const auto rows = w.rows();
  const auto cols = w.cols();
  const bool wide = rows < cols;
  Eigen::MatrixXd a(wide ? cols : rows, wide ? rows : cols);
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() *
                      Eigen::MatrixXd::Identity(a.rows(), a.cols());
  const Eigen::MatrixXd r = qr.matrixQR().topRows(a.cols());
  for (Eigen::Index j = 0; j < q.cols(); ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  w = gain * (wide ? q.transpose() : q);
}

AdamOptimizer::AdamOptimizer(int param_count, double learning_rate, double beta1,
                             double beta2, double epsilon)
    : lr_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      eps_(epsilon),
      m_(static_cast<std::size_t>(param_count), 0.0),
      v_(static_cast<std::size_t>(param_count), 0.0) {}

void AdamOptimizer::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size())
    throw std::invalid_argument("adam: size mismatch");
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < m_.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i] * grads[i];
    const double mhat = m_[i] / bc1;
    const double vhat = v_[i] / bc2;
    params[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
  }
}

namespace {
constexpr char kCheckpointMagic[8] = {'S', 'F', 'L', 'C', 'K', 'P', 'T', '1'};
}

void save_checkpoint_raw(const std::string& path, std::uint64_t spec_hash,
                         std::uint64_t seed, long epoch,
                         std::span<const double> params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open checkpoint for writing: " + path);
  const std::int64_t epoch64 = epoch;
  const std::int64_t count = static_cast<std::int64_t>(params.size());
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  out.write(reinterpret_cast<const char*>(&spec_hash), sizeof(spec_hash));
  out.write(reinterpret_cast<const char*>(&seed), sizeof(seed));
  out.write(reinterpret_cast<const char*>(&epoch64), sizeof(epoch64));
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  out.write(reinterpret_cast<const char*>(params.data()),
            static_cast<std::streamsize>(params.size() * sizeof(double)));
  if (!out) throw IoError("checkpoint write failed: " + path);
}

void save_checkpoint(const ActorCritic& net, const std::string& path,
                     std::uint64_t seed, long epoch) {
  save_checkpoint_raw(path, fnv1a64(net.spec().describe()), seed, epoch,
                      net.params());
}

CheckpointHeader load_checkpoint(ActorCritic& net, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  char magic[8];
  CheckpointHeader header;
  std::int64_t epoch64 = 0, count = 0;
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
    throw IoError("not a checkpoint file: " + path);
  in.read(reinterpret_cast<char*>(&header.spec_hash), sizeof(header.spec_hash));
  in.read(reinterpret_cast<char*>(&header.seed), sizeof(header.seed));
  in.read(reinterpret_cast<char*>(&epoch64), sizeof(epoch64));
  in.read(reinterpret_cast<char*>(&count), sizeof(count));
  if (!in) throw IoError("truncated checkpoint header: " + path);
  if (header.spec_hash != fnv1a64(net.spec().describe()))
    throw IoError("checkpoint topology mismatch: " + path);
  if (count != net.param_count())
    throw IoError("checkpoint parameter count mismatch: " + path);
  auto p = net.params();
  in.read(reinterpret_cast<char*>(p.data()),
          static_cast<std::streamsize>(p.size() * sizeof(double)));
  if (!in) throw IoError("truncated checkpoint payload: " + path);
  header.epoch = static_cast<long>(epoch64);
  return header;
}

Eigen::Vector4d log_softmax4(const Eigen::Vector4d& logits) {
  const double m = logits.maxCoeff();
  const double lse = m + std::log((logits.array() - m).exp().sum());
  return logits.array() - lse;
}

ActionSample sample_action(const Eigen::Vector4d& logits, Rng& rng) {
  const Eigen::Vector4d logp = log_softmax4(logits);
  const Eigen::Vector4d p = logp.array().exp();
  const double u = rng.uniform_real();
  double cum = 0.0;
  int action = 3;
  for (int i = 0; i < 4; ++i) {
    cum += p[i];
    if (u < cum) {
      action = i;
      break;
    }
  }
  return {action, logp[action]};
}

}  // namespace sfl
