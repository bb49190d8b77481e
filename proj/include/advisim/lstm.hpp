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

#ifndef ADVISIM_LSTM_HPP
#define ADVISIM_LSTM_HPP

#include <Eigen/Core>
#include <stdexcept>

#include "advisim/common.hpp"

namespace advisim {

/// One LSTM layer: per-gate input weights (hidden x input), recurrent
/// weights (hidden x hidden) and biases (hidden x 1). Also reused as the
/// matching gradient container.
struct LstmLayerWeights {
  Eigen::MatrixXd Wi, Wf, Wg, Wo;
  Eigen::MatrixXd Ui, Uf, Ug, Uo;
  Eigen::MatrixXd bi, bf, bg, bo;

  static LstmLayerWeights zeros(int hidden, int input) {
    LstmLayerWeights w;
    for (auto* m : {&w.Wi, &w.Wf, &w.Wg, &w.Wo})
      m->setZero(hidden, input);
    for (auto* m : {&w.Ui, &w.Uf, &w.Ug, &w.Uo})
      m->setZero(hidden, hidden);
    for (auto* m : {&w.bi, &w.bf, &w.bg, &w.bo})
      m->setZero(hidden, 1);
    return w;
  }

  int hidden() const { return static_cast<int>(Wi.rows()); }
  int input() const { return static_cast<int>(Wi.cols()); }
};

struct HiddenState {
  Eigen::VectorXd h;
  Eigen::VectorXd c;

  static HiddenState zeros(int hidden) {
    HiddenState s;
    s.h = Eigen::VectorXd::Zero(hidden);
    s.c = Eigen::VectorXd::Zero(hidden);
    return s;
  }
};

/// Everything the backward pass needs from one forward cell evaluation.
struct LstmCellCache {
  Eigen::VectorXd x, h_prev, c_prev;
  Eigen::VectorXd i, f, g, o;
  Eigen::VectorXd c, tanh_c;
};

namespace lstm_detail {

inline Eigen::ArrayXd sigmoid(const Eigen::ArrayXd& z) {
  return 1.0 / (1.0 + (-z).exp());
}

}  // namespace lstm_detail

/// Standard LSTM update:
///   i = sigma(Wi x + Ui h + bi)      f = sigma(Wf x + Uf h + bf)
///   g = tanh (Wg x + Ug h + bg)      o = sigma(Wo x + Uo h + bo)
///   c' = f.c + i.g                   h' = o.tanh(c')
inline HiddenState lstm_cell_forward(const LstmLayerWeights& w,
                                     const Eigen::VectorXd& x,
                                     const HiddenState& prev,
                                     LstmCellCache* cache = nullptr) {
  if (x.size() != w.input() || prev.h.size() != w.hidden() ||
      prev.c.size() != w.hidden())
    throw std::domain_error("lstm cell shape mismatch");

  using lstm_detail::sigmoid;
  const Eigen::ArrayXd zi =
      (w.Wi * x + w.Ui * prev.h + w.bi.col(0)).array();
  const Eigen::ArrayXd zf =
      (w.Wf * x + w.Uf * prev.h + w.bf.col(0)).array();
  const Eigen::ArrayXd zg =
      (w.Wg * x + w.Ug * prev.h + w.bg.col(0)).array();
  const Eigen::ArrayXd zo =
      (w.Wo * x + w.Uo * prev.h + w.bo.col(0)).array();

  const Eigen::ArrayXd i = sigmoid(zi);
  const Eigen::ArrayXd f = sigmoid(zf);
  const Eigen::ArrayXd g = zg.tanh();
  const Eigen::ArrayXd o = sigmoid(zo);

  HiddenState next;
  next.c = (f * prev.c.array() + i * g).matrix();
  const Eigen::ArrayXd tanh_c = next.c.array().tanh();
  next.h = (o * tanh_c).matrix();

  if (cache) {
    cache->x = x;
    cache->h_prev = prev.h;
    cache->c_prev = prev.c;
    cache->i = i.matrix();
    cache->f = f.matrix();
    cache->g = g.matrix();
    cache->o = o.matrix();
    cache->c = next.c;
    cache->tanh_c = tanh_c.matrix();
  }
  return next;
}

/// Reverse-mode step. dh/dc are the incoming gradients w.r.t. this cell's
/// outputs; gradients w.r.t. the previous state replace them, the input
/// gradient is written to dx, and weight gradients accumulate into grads.
inline void lstm_cell_backward(const LstmLayerWeights& w,
                               const LstmCellCache& cache, Eigen::VectorXd& dh,
                               Eigen::VectorXd& dc, Eigen::VectorXd& dx,
                               LstmLayerWeights& grads) {
  const Eigen::ArrayXd i = cache.i.array();
  const Eigen::ArrayXd f = cache.f.array();
  const Eigen::ArrayXd g = cache.g.array();
  const Eigen::ArrayXd o = cache.o.array();
  const Eigen::ArrayXd tanh_c = cache.tanh_c.array();

  const Eigen::ArrayXd do_ = dh.array() * tanh_c;
  const Eigen::ArrayXd dc_total =
      dc.array() + dh.array() * o * (1.0 - tanh_c.square());

  const Eigen::ArrayXd di = dc_total * g;
  const Eigen::ArrayXd df = dc_total * cache.c_prev.array();
  const Eigen::ArrayXd dg = dc_total * i;

  const Eigen::VectorXd dzi = (di * i * (1.0 - i)).matrix();
  const Eigen::VectorXd dzf = (df * f * (1.0 - f)).matrix();
  const Eigen::VectorXd dzg = (dg * (1.0 - g.square())).matrix();
  const Eigen::VectorXd dzo = (do_ * o * (1.0 - o)).matrix();

  grads.Wi.noalias() += dzi * cache.x.transpose();
  grads.Wf.noalias() += dzf * cache.x.transpose();
  grads.Wg.noalias() += dzg * cache.x.transpose();
  grads.Wo.noalias() += dzo * cache.x.transpose();
  grads.Ui.noalias() += dzi * cache.h_prev.transpose();
  grads.Uf.noalias() += dzf * cache.h_prev.transpose();
  grads.Ug.noalias() += dzg * cache.h_prev.transpose();
  grads.Uo.noalias() += dzo * cache.h_prev.transpose();
  grads.bi.col(0) += dzi;
  grads.bf.col(0) += dzf;
  grads.bg.col(0) += dzg;
  grads.bo.col(0) += dzo;

  dx.noalias() = w.Wi.transpose() * dzi;
  dx.noalias() += w.Wf.transpose() * dzf;
  dx.noalias() += w.Wg.transpose() * dzg;
  dx.noalias() += w.Wo.transpose() * dzo;

  dh.noalias() = w.Ui.transpose() * dzi;
  dh.noalias() += w.Uf.transpose() * dzf;
  dh.noalias() += w.Ug.transpose() * dzg;
  dh.noalias() += w.Uo.transpose() * dzo;

  dc = (dc_total * f).matrix();
}

}  // namespace advisim

#endif  // ADVISIM_LSTM_HPP
