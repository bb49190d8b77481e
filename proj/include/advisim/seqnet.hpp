/*
 * Copyright 2026 The advisim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ADVISIM_SEQNET_HPP
#define ADVISIM_SEQNET_HPP

#include <Eigen/Core>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "advisim/common.hpp"
#include "advisim/lstm.hpp"
#include "advisim/trace.hpp"
#include "advisim/window.hpp"

namespace advisim {

struct LstmEdConfig {
  int n_e = 64;          // encoder hidden units
  int n_d = 64;          // decoder hidden units
  int n_in = 6;          // input features per step
  int n_out = 2;         // predicted features per step
  double dropout_p = 0.2;
  int n_h = 300;         // history steps
  int n_p = 50;          // prediction steps

  void validate() const {
    if (n_e < 1 || n_d < 1) throw ConfigError("hidden sizes must be >= 1");
    if (n_e != n_d)
      throw ConfigError(
          "encoder and decoder must have equal hidden sizes: the encoder's "
          "final state initializes the decoder");
    if (n_in != kNumChannels) throw ConfigError("n_in is fixed at 6");
    if (n_out != 2) throw ConfigError("n_out is fixed at 2");
    if (!(dropout_p >= 0.0 && dropout_p < 1.0))
      throw ConfigError("dropout_p must lie in [0, 1)");
    if (n_h < 1 || n_p < 1) throw ConfigError("window lengths must be >= 1");
  }
};

/// Encoder-decoder network with a linear prediction head and a linear
/// bridge lifting a fed-back 2-dim prediction to a decoder input.
struct LstmEdModel {
  LstmLayerWeights encoder;
  LstmLayerWeights decoder;
  Eigen::MatrixXd head_w;    // n_out x n_d
  Eigen::MatrixXd head_b;    // n_out x 1
  Eigen::MatrixXd bridge_w;  // n_in x n_out
  Eigen::MatrixXd bridge_b;  // n_in x 1
  LstmEdConfig config;
};

/// Gradient (and optimizer-moment) container matching LstmEdModel's
/// weight layout.
struct ModelGrads {
  LstmLayerWeights encoder;
  LstmLayerWeights decoder;
  Eigen::MatrixXd head_w, head_b, bridge_w, bridge_b;

  static ModelGrads zeros(const LstmEdConfig& cfg) {
    ModelGrads g;
    g.encoder = LstmLayerWeights::zeros(cfg.n_e, cfg.n_in);
    g.decoder = LstmLayerWeights::zeros(cfg.n_d, cfg.n_in);
    g.head_w.setZero(cfg.n_out, cfg.n_d);
    g.head_b.setZero(cfg.n_out, 1);
    g.bridge_w.setZero(cfg.n_in, cfg.n_out);
    g.bridge_b.setZero(cfg.n_in, 1);
    return g;
  }

  void set_zero() {
    for (auto* layer : {&encoder, &decoder}) {
      for (auto* m : {&layer->Wi, &layer->Wf, &layer->Wg, &layer->Wo,
                      &layer->Ui, &layer->Uf, &layer->Ug, &layer->Uo,
                      &layer->bi, &layer->bf, &layer->bg, &layer->bo})
        m->setZero();
    }
    head_w.setZero();
    head_b.setZero();
    bridge_w.setZero();
    bridge_b.setZero();
  }
};

inline constexpr int kNumModelTensors = 28;

/// All weight tensors of a model-shaped object in one fixed order, for
/// optimizer updates, norms and serialization.
template <typename ModelLike>
auto tensor_ptrs(ModelLike& m) {
  using Mat = std::conditional_t<std::is_const_v<ModelLike>,
                                 const Eigen::MatrixXd, Eigen::MatrixXd>;
  return std::array<Mat*, kNumModelTensors>{
      &m.encoder.Wi, &m.encoder.Wf, &m.encoder.Wg, &m.encoder.Wo,
      &m.encoder.Ui, &m.encoder.Uf, &m.encoder.Ug, &m.encoder.Uo,
      &m.encoder.bi, &m.encoder.bf, &m.encoder.bg, &m.encoder.bo,
      &m.decoder.Wi, &m.decoder.Wf, &m.decoder.Wg, &m.decoder.Wo,
      &m.decoder.Ui, &m.decoder.Uf, &m.decoder.Ug, &m.decoder.Uo,
      &m.decoder.bi, &m.decoder.bf, &m.decoder.bg, &m.decoder.bo,
      &m.head_w,     &m.head_b,     &m.bridge_w,   &m.bridge_b};
}

inline const std::array<const char*, kNumModelTensors>& tensor_names() {
  static const std::array<const char*, kNumModelTensors> names = {
      "encoder.Wi", "encoder.Wf", "encoder.Wg", "encoder.Wo",
      "encoder.Ui", "encoder.Uf", "encoder.Ug", "encoder.Uo",
      "encoder.bi", "encoder.bf", "encoder.bg", "encoder.bo",
      "decoder.Wi", "decoder.Wf", "decoder.Wg", "decoder.Wo",
      "decoder.Ui", "decoder.Uf", "decoder.Ug", "decoder.Uo",
      "decoder.bi", "decoder.bf", "decoder.bg", "decoder.bo",
      "head_w",     "head_b",     "bridge_w",   "bridge_b"};
  return names;
}

/// Uniform +-1/sqrt(hidden) initialization with forget biases at +1.
inline LstmEdModel init_model(const LstmEdConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  LstmEdModel m;
  m.config = cfg;
  m.encoder = LstmLayerWeights::zeros(cfg.n_e, cfg.n_in);
  m.decoder = LstmLayerWeights::zeros(cfg.n_d, cfg.n_in);
  m.head_w.setZero(cfg.n_out, cfg.n_d);
  m.head_b.setZero(cfg.n_out, 1);
  m.bridge_w.setZero(cfg.n_in, cfg.n_out);
  m.bridge_b.setZero(cfg.n_in, 1);

  Rng rng(derive_seed(seed, 0x11));
  const auto tensors = tensor_ptrs(m);
  for (int k = 0; k < kNumModelTensors; ++k) {
    const double scale =
        1.0 / std::sqrt(static_cast<double>(k < 12 ? cfg.n_e : cfg.n_d));
    double* data = tensors[static_cast<std::size_t>(k)]->data();
    const auto n = tensors[static_cast<std::size_t>(k)]->size();
    for (Eigen::Index i = 0; i < n; ++i)
      data[i] = rng.uniform(-scale, scale);
  }
  m.encoder.bf.setConstant(1.0);
  m.decoder.bf.setConstant(1.0);
  return m;
}

enum class DropoutMode { Train, Eval };

/// Inverted dropout: units survive with probability 1-p and are scaled by
/// 1/(1-p) so the expectation is preserved; Eval mode is the identity.
inline Eigen::VectorXd dropout_mask(int n, double p, Rng& rng) {
  Eigen::VectorXd mask(n);
  const double keep_scale = 1.0 / (1.0 - p);
  for (int i = 0; i < n; ++i)
    mask(i) = rng.bernoulli(p) ? 0.0 : keep_scale;
  return mask;
}

inline Eigen::VectorXd apply_dropout(const Eigen::VectorXd& h, double p,
                                     DropoutMode mode, Rng* rng = nullptr) {
  if (!(p >= 0.0 && p < 1.0)) throw ConfigError("dropout_p must be in [0, 1)");
  if (mode == DropoutMode::Eval || p == 0.0) return h;
  if (rng == nullptr)
    throw std::invalid_argument("Train-mode dropout needs a generator");
  return h.cwiseProduct(dropout_mask(static_cast<int>(h.size()), p, *rng));
}

/// Runs the encoder over the n_h history columns from a zero state.
inline HiddenState encode(const LstmEdModel& m, const Eigen::MatrixXd& X,
                          std::vector<LstmCellCache>* caches = nullptr) {
  if (X.rows() != m.config.n_in || X.cols() != m.config.n_h)
    throw std::domain_error("encode: history must be n_in x n_h");
  if (caches) caches->resize(static_cast<std::size_t>(m.config.n_h));
  HiddenState s = HiddenState::zeros(m.config.n_e);
  for (int t = 0; t < m.config.n_h; ++t)
    s = lstm_cell_forward(m.encoder, X.col(t), s,
                          caches ? &(*caches)[static_cast<std::size_t>(t)]
                                 : nullptr);
  return s;
}

/// Unrolls the decoder n_p steps from `init`, feeding each prediction back
/// through the bridge as the next step's input; step 0 consumes the last
/// observed output pair.
inline Eigen::MatrixXd decode_iterative(const LstmEdModel& m,
                                        const HiddenState& init,
                                        const Eigen::Vector2d& last_y,
                                        int n_p) {
  if (n_p < 1) throw std::invalid_argument("n_p must be >= 1");
  if (init.h.size() != m.config.n_d)
    throw std::domain_error("decoder state size mismatch");
  Eigen::MatrixXd out(m.config.n_out, n_p);
  Eigen::VectorXd y_prev = last_y;
  HiddenState s = init;
  for (int k = 0; k < n_p; ++k) {
    const Eigen::VectorXd x = m.bridge_w * y_prev + m.bridge_b.col(0);
    s = lstm_cell_forward(m.decoder, x, s);
    out.col(k) = m.head_w * s.h + m.head_b.col(0);
    y_prev = out.col(k);
  }
  return out;
}

namespace seqnet_detail {

/// Scratch space for one sample's forward/backward pass, reusable across
/// samples to avoid reallocation.
struct SampleWork {
  std::vector<LstmCellCache> enc_caches;
  std::vector<LstmCellCache> dec_caches;
  std::vector<Eigen::Vector2d> dec_src;  // pair fed to the bridge per step
  std::vector<std::uint8_t> fed_back;    // src was the model's own output
  Eigen::MatrixXd y_hat;                 // n_out x n_p
  Eigen::VectorXd h_enc_dropped;
};

/// Forward pass with explicit dropout mask and teacher-forcing plan;
/// returns the mean squared error over all predicted entries.
inline double forward_pass(const LstmEdModel& m, const Eigen::MatrixXd& X,
                           const Eigen::MatrixXd& Y,
                           const Eigen::VectorXd& enc_mask,
                           const std::vector<std::uint8_t>& teacher,
                           SampleWork& work) {
  const int n_p = m.config.n_p;
  if (Y.rows() != m.config.n_out || Y.cols() != n_p)
    throw std::domain_error("target must be n_out x n_p");
  if (enc_mask.size() != m.config.n_e)
    throw std::domain_error("dropout mask size mismatch");

  HiddenState enc = encode(m, X, &work.enc_caches);
  work.h_enc_dropped = enc.h.cwiseProduct(enc_mask);

  HiddenState s;
  s.h = work.h_enc_dropped;
  s.c = enc.c;

  work.dec_caches.resize(static_cast<std::size_t>(n_p));
  work.dec_src.resize(static_cast<std::size_t>(n_p));
  work.fed_back.assign(static_cast<std::size_t>(n_p), 0);
  work.y_hat.resize(m.config.n_out, n_p);

  Eigen::Vector2d last_y(X(static_cast<int>(Channel::V), m.config.n_h - 1),
                         X(static_cast<int>(Channel::Err), m.config.n_h - 1));
  for (int k = 0; k < n_p; ++k) {
    Eigen::Vector2d src;
    if (k == 0) {
      src = last_y;
    } else if (k < static_cast<int>(teacher.size()) &&
               teacher[static_cast<std::size_t>(k)]) {
      src = Y.col(k - 1);
    } else {
      src = work.y_hat.col(k - 1);
      work.fed_back[static_cast<std::size_t>(k)] = 1;
    }
    work.dec_src[static_cast<std::size_t>(k)] = src;
    const Eigen::VectorXd x = m.bridge_w * src + m.bridge_b.col(0);
    s = lstm_cell_forward(m.decoder, x, s,
                          &work.dec_caches[static_cast<std::size_t>(k)]);
    work.y_hat.col(k) = m.head_w * s.h + m.head_b.col(0);
  }
  return (work.y_hat - Y).squaredNorm() /
         (2.0 * static_cast<double>(n_p));
}

/// Backpropagation through time over decoder (including the prediction
/// feedback path), dropout mask and encoder; accumulates into grads.
inline void backward_pass(const LstmEdModel& m, const Eigen::MatrixXd& Y,
                          const Eigen::VectorXd& enc_mask, SampleWork& work,
                          ModelGrads& grads) {
  const int n_p = m.config.n_p;
  const double inv_np = 1.0 / static_cast<double>(n_p);

  Eigen::VectorXd dh = Eigen::VectorXd::Zero(m.config.n_d);
  Eigen::VectorXd dc = Eigen::VectorXd::Zero(m.config.n_d);
  Eigen::Vector2d dy_carry = Eigen::Vector2d::Zero();
  Eigen::VectorXd dx(m.config.n_in);

  for (int k = n_p - 1; k >= 0; --k) {
    const auto& cache = work.dec_caches[static_cast<std::size_t>(k)];
    const Eigen::Vector2d dy =
        (work.y_hat.col(k) - Y.col(k)) * inv_np + dy_carry;
    const Eigen::VectorXd h_k = cache.o.cwiseProduct(cache.tanh_c);
    grads.head_w.noalias() += dy * h_k.transpose();
    grads.head_b.col(0) += dy;
    dh.noalias() += m.head_w.transpose() * dy;

    lstm_cell_backward(m.decoder, cache, dh, dc, dx, grads.decoder);

    grads.bridge_w.noalias() +=
        dx * work.dec_src[static_cast<std::size_t>(k)].transpose();
    grads.bridge_b.col(0) += dx;
    if (work.fed_back[static_cast<std::size_t>(k)])
      dy_carry = m.bridge_w.transpose() * dx;
    else
      dy_carry.setZero();
  }

  // decoder init state came from (mask . h_enc, c_enc)
  dh = dh.cwiseProduct(enc_mask);
  for (int t = m.config.n_h - 1; t >= 0; --t)
    lstm_cell_backward(m.encoder, work.enc_caches[static_cast<std::size_t>(t)],
                       dh, dc, dx, grads.encoder);
}

inline double grad_global_norm(ModelGrads& g) {
  double sq = 0.0;
  for (auto* t : tensor_ptrs(g)) sq += t->squaredNorm();
  return std::sqrt(sq);
}

}  // namespace seqnet_detail

struct TrainConfig {
  int epochs = 10;
  int batch_size = 16;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double grad_clip_norm = 5.0;
  double teacher_forcing_ratio = 0.5;  // decays linearly to 0 over epochs
  std::uint64_t seed = 0;
  /// Windows visited per epoch; 0 means the whole dataset. Lets large
  /// fleets train in bounded time without changing the data pipeline.
  std::size_t windows_per_epoch = 0;

  void validate() const {
    if (epochs < 0) throw ConfigError("epochs must be non-negative");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
      throw ConfigError("adam betas must lie in [0, 1)");
    if (!(adam_eps > 0.0)) throw ConfigError("adam_eps must be > 0");
    if (grad_clip_norm < 0.0)
      throw ConfigError("grad_clip_norm must be non-negative");
    if (!(teacher_forcing_ratio >= 0.0 && teacher_forcing_ratio <= 1.0))
      throw ConfigError("teacher_forcing_ratio must lie in [0, 1]");
  }
};

/// Minimizes prediction MSE by backpropagation through time with Adam,
/// gradient-norm clipping and scheduled teacher forcing. Deterministic
/// under tcfg.seed. Returns the model and per-epoch mean training loss.
inline std::pair<LstmEdModel, std::vector<double>> train(
    const WindowedDataset& data, const LstmEdConfig& mcfg,
    const TrainConfig& tcfg) {
  using seqnet_detail::SampleWork;
  mcfg.validate();
  tcfg.validate();
  if (data.empty()) throw ConfigError("training dataset is empty");
  if (mcfg.n_h != data.config().n_h || mcfg.n_p != data.config().n_p)
    throw ConfigError("model window lengths disagree with the dataset");

  LstmEdModel model = init_model(mcfg, derive_seed(tcfg.seed, 0));
  std::vector<double> history;
  if (tcfg.epochs == 0) return {std::move(model), std::move(history)};

  Rng rng(derive_seed(tcfg.seed, 1));
  ModelGrads grads = ModelGrads::zeros(mcfg);
  ModelGrads adam_m = ModelGrads::zeros(mcfg);
  ModelGrads adam_v = ModelGrads::zeros(mcfg);
  long adam_t = 0;
  SampleWork work;

  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const std::size_t per_epoch =
      tcfg.windows_per_epoch == 0
          ? data.size()
          : std::min(tcfg.windows_per_epoch, data.size());

  std::vector<std::uint8_t> teacher(
      static_cast<std::size_t>(mcfg.n_p), 0);

  for (int epoch = 0; epoch < tcfg.epochs; ++epoch) {
    const double tf_ratio =
        tcfg.epochs <= 1
            ? tcfg.teacher_forcing_ratio
            : tcfg.teacher_forcing_ratio *
                  (1.0 - static_cast<double>(epoch) /
                             static_cast<double>(tcfg.epochs - 1));

    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t j = rng.uniform_index(i);
      std::swap(order[i - 1], order[j]);
    }

    double epoch_loss = 0.0;
    std::size_t processed = 0;
    while (processed < per_epoch) {
      const std::size_t batch = std::min(
          static_cast<std::size_t>(tcfg.batch_size), per_epoch - processed);
      grads.set_zero();
      double batch_loss = 0.0;
      for (std::size_t b = 0; b < batch; ++b) {
        const WindowSample sample = data.sample(order[processed + b]);
        Eigen::VectorXd mask =
            mcfg.dropout_p > 0.0
                ? dropout_mask(mcfg.n_e, mcfg.dropout_p, rng)
                : Eigen::VectorXd::Ones(mcfg.n_e);
        for (int k = 1; k < mcfg.n_p; ++k)
          teacher[static_cast<std::size_t>(k)] =
              rng.bernoulli(tf_ratio) ? 1 : 0;
        batch_loss += seqnet_detail::forward_pass(model, sample.x, sample.y,
                                                  mask, teacher, work);
        seqnet_detail::backward_pass(model, sample.y, mask, work, grads);
      }
      epoch_loss += batch_loss;

      const double inv_batch = 1.0 / static_cast<double>(batch);
      for (auto* g : tensor_ptrs(grads)) (*g) *= inv_batch;
      if (tcfg.grad_clip_norm > 0.0) {
        const double norm = seqnet_detail::grad_global_norm(grads);
        if (norm > tcfg.grad_clip_norm)
          for (auto* g : tensor_ptrs(grads))
            (*g) *= tcfg.grad_clip_norm / norm;
      }

      ++adam_t;
      const double bc1 = 1.0 - std::pow(tcfg.beta1, adam_t);
      const double bc2 = 1.0 - std::pow(tcfg.beta2, adam_t);
      const auto ws = tensor_ptrs(model);
      const auto gs = tensor_ptrs(grads);
      const auto ms = tensor_ptrs(adam_m);
      const auto vs = tensor_ptrs(adam_v);
      for (int k = 0; k < kNumModelTensors; ++k) {
        auto& w = *ws[static_cast<std::size_t>(k)];
        auto& g = *gs[static_cast<std::size_t>(k)];
        auto& mm = *ms[static_cast<std::size_t>(k)];
        auto& vv = *vs[static_cast<std::size_t>(k)];
        mm = tcfg.beta1 * mm + (1.0 - tcfg.beta1) * g;
        vv = tcfg.beta2 * vv + (1.0 - tcfg.beta2) * g.cwiseProduct(g);
        w.array() -= tcfg.learning_rate * (mm.array() / bc1) /
                     ((vv.array() / bc2).sqrt() + tcfg.adam_eps);
      }
      processed += batch;
    }

    const double mean_loss = epoch_loss / static_cast<double>(per_epoch);
    if (!std::isfinite(mean_loss))
      throw std::runtime_error("training diverged: non-finite loss in epoch " +
                               std::to_string(epoch));
    history.push_back(mean_loss);
  }
  return {std::move(model), std::move(history)};
}

/// Max relative disagreement between analytic BPTT gradients and central
/// finite differences over every weight. Runs the deterministic Eval-style
/// forward (no dropout, no teacher forcing) unless a fixed dropout mask is
/// supplied, which exercises the mask's backward path too.
inline double grad_check(const LstmEdModel& model, const Eigen::MatrixXd& X,
                         const Eigen::MatrixXd& Y, double eps = 1e-5,
                         const Eigen::VectorXd* fixed_mask = nullptr) {
  using seqnet_detail::SampleWork;
  const Eigen::VectorXd mask =
      fixed_mask ? *fixed_mask : Eigen::VectorXd::Ones(model.config.n_e);
  const std::vector<std::uint8_t> no_teacher(
      static_cast<std::size_t>(model.config.n_p), 0);

  SampleWork work;
  ModelGrads grads = ModelGrads::zeros(model.config);
  seqnet_detail::forward_pass(model, X, Y, mask, no_teacher, work);
  seqnet_detail::backward_pass(model, Y, mask, work, grads);

  LstmEdModel probe = model;
  const auto ws = tensor_ptrs(probe);
  const auto gs = tensor_ptrs(grads);
  double worst = 0.0;
  for (int k = 0; k < kNumModelTensors; ++k) {
    auto& w = *ws[static_cast<std::size_t>(k)];
    const auto& g = *gs[static_cast<std::size_t>(k)];
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      const double saved = w.data()[i];
      w.data()[i] = saved + eps;
      const double up =
          seqnet_detail::forward_pass(probe, X, Y, mask, no_teacher, work);
      w.data()[i] = saved - eps;
      const double down =
          seqnet_detail::forward_pass(probe, X, Y, mask, no_teacher, work);
      w.data()[i] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double analytic = g.data()[i];
      const double rel = std::abs(analytic - numeric) /
                         std::max(std::abs(analytic) + std::abs(numeric),
                                  1e-12);
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

/// Inference on one raw history window: normalize, encode, decode without
/// dropout, then map the two predicted channels back to physical units.
inline std::pair<std::vector<double>, std::vector<double>> predict(
    const LstmEdModel& model, const NormStats& norm,
    const Eigen::MatrixXd& history_raw) {
  if (history_raw.rows() != model.config.n_in ||
      history_raw.cols() != model.config.n_h)
    throw std::invalid_argument(
        "history must provide n_h samples of all six channels");
  Eigen::MatrixXd x(history_raw.rows(), history_raw.cols());
  for (int c = 0; c < kNumChannels; ++c)
    for (Eigen::Index t = 0; t < history_raw.cols(); ++t)
      x(c, t) = norm.normalize(history_raw(c, t), static_cast<Channel>(c));

  const HiddenState enc = encode(model, x);
  const Eigen::Vector2d last_y(
      x(static_cast<int>(Channel::V), model.config.n_h - 1),
      x(static_cast<int>(Channel::Err), model.config.n_h - 1));
  const Eigen::MatrixXd y =
      decode_iterative(model, enc, last_y, model.config.n_p);

  std::vector<double> v_hat(static_cast<std::size_t>(model.config.n_p));
  std::vector<double> err_hat(static_cast<std::size_t>(model.config.n_p));
  for (int k = 0; k < model.config.n_p; ++k) {
    v_hat[static_cast<std::size_t>(k)] = norm.denormalize(y(0, k), Channel::V);
    err_hat[static_cast<std::size_t>(k)] =
        norm.denormalize(y(1, k), Channel::Err);
  }
  return {std::move(v_hat), std::move(err_hat)};
}

}  // namespace advisim

#endif  // ADVISIM_SEQNET_HPP
