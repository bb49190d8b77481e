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

#include "advisim/seqnet.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "advisim/common.hpp"
#include "advisim/lstm.hpp"
#include "advisim/trace.hpp"
#include "advisim/window.hpp"

namespace advisim {
namespace {

LstmEdConfig small_config() {
  LstmEdConfig cfg;
  cfg.n_e = 4;
  cfg.n_d = 4;
  cfg.dropout_p = 0.2;
  cfg.n_h = 5;
  cfg.n_p = 3;
  return cfg;
}

Eigen::MatrixXd random_matrix(int rows, int cols, Rng& rng, double lo = 0.1,
                              double hi = 0.9) {
  Eigen::MatrixXd m(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) m(r, c) = rng.uniform(lo, hi);
  return m;
}

LstmEdModel zero_model(const LstmEdConfig& cfg) {
  LstmEdModel m;
  m.config = cfg;
  m.encoder = LstmLayerWeights::zeros(cfg.n_e, cfg.n_in);
  m.decoder = LstmLayerWeights::zeros(cfg.n_d, cfg.n_in);
  m.head_w.setZero(cfg.n_out, cfg.n_d);
  m.head_b.setZero(cfg.n_out, 1);
  m.bridge_w.setZero(cfg.n_in, cfg.n_out);
  m.bridge_b.setZero(cfg.n_in, 1);
  return m;
}

/// Synthetic drive with every channel varying so normalization stats are
/// well defined.
DriveTrace make_trace(const std::string& id, int n, double offset = 0.0) {
  DriveTrace tr;
  tr.driver_id = id;
  tr.dt = 0.1;
  for (int i = 0; i < n; ++i) {
    FeatureVector f;
    f.v = 2.0 + 0.3 * i + offset;
    f.acc = -1.0 + 0.2 * i;
    f.d_tl = 500.0 - 10.0 * i;
    f.v_ref = 10.0 + 0.5 * i + offset;
    f.tau_sp = (i % 2 == 0) ? 0.0 : 1.0;
    f.err = f.v_ref - f.v;
    tr.push(0.1 * i, 1.5 * i, f);
  }
  return tr;
}

WindowedDataset make_dataset(const WindowConfig& cfg,
                             const std::vector<DriveTrace>& traces) {
  std::vector<const DriveTrace*> ptrs;
  for (const auto& t : traces) ptrs.push_back(&t);
  WindowedDataset data(cfg, window_detail::stats_from_traces(ptrs));
  for (const auto& t : traces) data.add_trace(t);
  return data;
}

TEST(LstmCell, ZeroWeightsGiveZeroState) {
  const auto w = LstmLayerWeights::zeros(3, 2);
  const HiddenState out =
      lstm_cell_forward(w, Eigen::Vector2d(0.7, -1.2), HiddenState::zeros(3));
  EXPECT_EQ(out.h, Eigen::VectorXd::Zero(3));
  EXPECT_EQ(out.c, Eigen::VectorXd::Zero(3));
}

TEST(LstmCell, SaturatedForgetGatePreservesCell) {
  auto w = LstmLayerWeights::zeros(2, 1);
  w.bf.setConstant(100.0);
  HiddenState prev;
  prev.h = Eigen::VectorXd::Zero(2);
  prev.c.resize(2);
  prev.c << 0.8, -0.45;
  const HiddenState out =
      lstm_cell_forward(w, Eigen::VectorXd::Constant(1, 0.3), prev);
  EXPECT_NEAR(out.c(0), 0.8, 1e-6);
  EXPECT_NEAR(out.c(1), -0.45, 1e-6);
}

TEST(LstmCell, SingleUnitHandValues) {
  auto w = LstmLayerWeights::zeros(1, 1);
  w.Wi << 0.5;
  w.Ui << 0.25;
  w.bi << 0.1;
  w.Wf << -0.3;
  w.Uf << 0.2;
  w.bf << 0.4;
  w.Wg << 0.8;
  w.Ug << -0.5;
  w.bg << 0.0;
  w.Wo << 0.6;
  w.Uo << 0.1;
  w.bo << -0.2;
  HiddenState prev;
  prev.h = Eigen::VectorXd::Constant(1, 0.5);
  prev.c = Eigen::VectorXd::Constant(1, -0.3);

  LstmCellCache cache;
  const HiddenState out =
      lstm_cell_forward(w, Eigen::VectorXd::Constant(1, 1.0), prev, &cache);
  EXPECT_NEAR(cache.i(0), 0.6737070994545215, 1e-12);
  EXPECT_NEAR(cache.f(0), 0.549833997312478, 1e-12);
  EXPECT_NEAR(cache.g(0), 0.5005202111902353, 1e-12);
  EXPECT_NEAR(cache.o(0), 0.610639233949222, 1e-12);
  EXPECT_NEAR(out.c(0), 0.1722538205055945, 1e-12);
  EXPECT_NEAR(out.h(0), 0.10415681424658244, 1e-12);
}

TEST(LstmCell, ShapeMismatchThrows) {
  const auto w = LstmLayerWeights::zeros(3, 2);
  EXPECT_THROW(lstm_cell_forward(w, Eigen::Vector3d(1, 2, 3),
                                 HiddenState::zeros(3)),
               std::domain_error);
  EXPECT_THROW(lstm_cell_forward(w, Eigen::Vector2d(1, 2),
                                 HiddenState::zeros(4)),
               std::domain_error);
}

TEST(GradCheck, AnalyticMatchesNumericOnRandomModels) {
  const LstmEdConfig cfg = small_config();
  for (std::uint64_t seed : {11u, 12u, 13u, 14u}) {
    const LstmEdModel model = init_model(cfg, seed);
    Rng rng(derive_seed(seed, 99));
    const Eigen::MatrixXd x = random_matrix(cfg.n_in, cfg.n_h, rng);
    const Eigen::MatrixXd y = random_matrix(cfg.n_out, cfg.n_p, rng);
    EXPECT_LT(grad_check(model, x, y), 1e-5) << "seed " << seed;
  }
}

TEST(GradCheck, DropoutMaskPathMatchesNumeric) {
  const LstmEdConfig cfg = small_config();
  const LstmEdModel model = init_model(cfg, 21);
  Rng rng(derive_seed(21, 99));
  const Eigen::MatrixXd x = random_matrix(cfg.n_in, cfg.n_h, rng);
  const Eigen::MatrixXd y = random_matrix(cfg.n_out, cfg.n_p, rng);
  Eigen::VectorXd mask(cfg.n_e);
  mask << 0.0, 1.25, 1.25, 0.0;
  EXPECT_LT(grad_check(model, x, y, 1e-5, &mask), 1e-5);
}

TEST(GradCheck, TeacherForcedStepsMatchNumeric) {
  const LstmEdConfig cfg = small_config();
  LstmEdModel model = init_model(cfg, 31);
  Rng rng(derive_seed(31, 99));
  const Eigen::MatrixXd x = random_matrix(cfg.n_in, cfg.n_h, rng);
  const Eigen::MatrixXd y = random_matrix(cfg.n_out, cfg.n_p, rng);
  const Eigen::VectorXd mask = Eigen::VectorXd::Ones(cfg.n_e);
  const std::vector<std::uint8_t> teacher = {0, 1, 0};

  seqnet_detail::SampleWork work;
  ModelGrads grads = ModelGrads::zeros(cfg);
  seqnet_detail::forward_pass(model, x, y, mask, teacher, work);
  seqnet_detail::backward_pass(model, y, mask, work, grads);

  const double eps = 1e-5;
  const auto ws = tensor_ptrs(model);
  const auto gs = tensor_ptrs(grads);
  double worst = 0.0;
  for (int k = 0; k < kNumModelTensors; ++k) {
    auto& w = *ws[static_cast<std::size_t>(k)];
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      const double saved = w.data()[i];
      w.data()[i] = saved + eps;
      const double up =
          seqnet_detail::forward_pass(model, x, y, mask, teacher, work);
      w.data()[i] = saved - eps;
      const double down =
          seqnet_detail::forward_pass(model, x, y, mask, teacher, work);
      w.data()[i] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double analytic = gs[static_cast<std::size_t>(k)]->data()[i];
      worst = std::max(worst, std::abs(analytic - numeric) /
                                  std::max(std::abs(analytic) +
                                               std::abs(numeric),
                                           1e-12));
    }
  }
  EXPECT_LT(worst, 1e-5);
}

TEST(Encode, MatchesManualUnroll) {
  LstmEdConfig cfg = small_config();
  cfg.n_h = 3;
  const LstmEdModel model = init_model(cfg, 41);
  Rng rng(derive_seed(41, 99));
  const Eigen::MatrixXd x = random_matrix(cfg.n_in, cfg.n_h, rng);

  HiddenState manual = HiddenState::zeros(cfg.n_e);
  for (int t = 0; t < cfg.n_h; ++t)
    manual = lstm_cell_forward(model.encoder, x.col(t), manual);

  const HiddenState enc = encode(model, x);
  EXPECT_EQ(enc.h, manual.h);
  EXPECT_EQ(enc.c, manual.c);
}

TEST(Encode, SingleStepEqualsCell) {
  LstmEdConfig cfg = small_config();
  cfg.n_h = 1;
  const LstmEdModel model = init_model(cfg, 42);
  Rng rng(derive_seed(42, 99));
  const Eigen::MatrixXd x = random_matrix(cfg.n_in, 1, rng);
  const HiddenState direct =
      lstm_cell_forward(model.encoder, x.col(0), HiddenState::zeros(cfg.n_e));
  const HiddenState enc = encode(model, x);
  EXPECT_EQ(enc.h, direct.h);
  EXPECT_EQ(enc.c, direct.c);
}

TEST(Encode, RejectsWrongShape) {
  const LstmEdConfig cfg = small_config();
  const LstmEdModel model = init_model(cfg, 43);
  EXPECT_THROW(encode(model, Eigen::MatrixXd::Zero(cfg.n_in, cfg.n_h + 1)),
               std::domain_error);
  EXPECT_THROW(encode(model, Eigen::MatrixXd::Zero(cfg.n_in - 1, cfg.n_h)),
               std::domain_error);
}

TEST(Encode, DependsOnInputOrder) {
  const LstmEdConfig cfg = small_config();
  const LstmEdModel model = init_model(cfg, 44);
  Rng rng(derive_seed(44, 99));
  Eigen::MatrixXd x = random_matrix(cfg.n_in, cfg.n_h, rng);
  const HiddenState a = encode(model, x);
  x.col(0).swap(x.col(cfg.n_h - 1));
  const HiddenState b = encode(model, x);
  EXPECT_GT((a.h - b.h).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Encode, HiddenStateStaysBounded) {
  LstmEdConfig cfg = small_config();
  cfg.n_h = 300;
  const LstmEdModel model = init_model(cfg, 45);
  Rng rng(derive_seed(45, 99));
  const Eigen::MatrixXd x = random_matrix(cfg.n_in, cfg.n_h, rng, -3.0, 3.0);
  const HiddenState enc = encode(model, x);
  ASSERT_TRUE(enc.h.allFinite());
  ASSERT_TRUE(enc.c.allFinite());
  EXPECT_LT(enc.h.cwiseAbs().maxCoeff(), 1.0);
}

TEST(Dropout, EvalIsIdentity) {
  Eigen::VectorXd h(3);
  h << 0.5, -1.0, 2.0;
  EXPECT_EQ(apply_dropout(h, 0.9, DropoutMode::Eval), h);
}

TEST(Dropout, ZeroProbabilityIsIdentity) {
  Eigen::VectorXd h(3);
  h << 0.5, -1.0, 2.0;
  EXPECT_EQ(apply_dropout(h, 0.0, DropoutMode::Train), h);
}

TEST(Dropout, MaskDropsExpectedFraction) {
  Rng rng(77);
  const int n = 100000;
  const Eigen::VectorXd mask = dropout_mask(n, 0.2, rng);
  const auto dropped = (mask.array() == 0.0).count();
  EXPECT_NEAR(static_cast<double>(dropped) / n, 0.2, 0.01);
}

TEST(Dropout, SurvivorsAreScaledToPreserveExpectation) {
  Rng rng(78);
  const Eigen::VectorXd h = Eigen::VectorXd::Ones(100000);
  const Eigen::VectorXd out = apply_dropout(h, 0.2, DropoutMode::Train, &rng);
  for (int i = 0; i < 10; ++i)
    EXPECT_TRUE(out(i) == 0.0 || out(i) == 1.25) << out(i);
  EXPECT_NEAR(out.mean(), 1.0, 0.01);
}

TEST(Dropout, RejectsBadArguments) {
  const Eigen::VectorXd h = Eigen::VectorXd::Ones(4);
  EXPECT_THROW(apply_dropout(h, 0.5, DropoutMode::Train, nullptr),
               std::invalid_argument);
  EXPECT_THROW(apply_dropout(h, 1.0, DropoutMode::Eval), ConfigError);
  EXPECT_THROW(apply_dropout(h, -0.1, DropoutMode::Eval), ConfigError);
}

TEST(Decode, ZeroModelOutputsHeadBias) {
  LstmEdModel model = zero_model(small_config());
  model.head_b << 0.3, -0.1;
  const Eigen::MatrixXd out =
      decode_iterative(model, HiddenState::zeros(model.config.n_d),
                       Eigen::Vector2d(0.4, 0.6), 4);
  ASSERT_EQ(out.cols(), 4);
  for (int k = 0; k < 4; ++k) {
    EXPECT_DOUBLE_EQ(out(0, k), 0.3);
    EXPECT_DOUBLE_EQ(out(1, k), -0.1);
  }
}

TEST(Decode, SingleStepMatchesManual) {
  const LstmEdConfig cfg = small_config();
  const LstmEdModel model = init_model(cfg, 51);
  Rng rng(derive_seed(51, 99));
  HiddenState init;
  init.h = random_matrix(cfg.n_d, 1, rng, -0.5, 0.5);
  init.c = random_matrix(cfg.n_d, 1, rng, -0.5, 0.5);
  const Eigen::Vector2d last_y(0.7, 0.2);

  const Eigen::VectorXd x = model.bridge_w * last_y + model.bridge_b.col(0);
  const HiddenState s = lstm_cell_forward(model.decoder, x, init);
  const Eigen::VectorXd expected = model.head_w * s.h + model.head_b.col(0);

  const Eigen::MatrixXd out = decode_iterative(model, init, last_y, 1);
  EXPECT_EQ(out.col(0), expected);
}

TEST(Decode, FeedsPredictionsBack) {
  const LstmEdConfig cfg = small_config();
  const LstmEdModel model = init_model(cfg, 52);
  const HiddenState init = HiddenState::zeros(cfg.n_d);
  const Eigen::MatrixXd a =
      decode_iterative(model, init, Eigen::Vector2d(0.1, 0.1), 3);
  const Eigen::MatrixXd b =
      decode_iterative(model, init, Eigen::Vector2d(0.9, 0.9), 3);
  for (int k = 0; k < 3; ++k)
    EXPECT_GT((a.col(k) - b.col(k)).cwiseAbs().maxCoeff(), 1e-12)
        << "step " << k;
}

TEST(Decode, RejectsBadArguments) {
  const LstmEdConfig cfg = small_config();
  const LstmEdModel model = init_model(cfg, 53);
  EXPECT_THROW(decode_iterative(model, HiddenState::zeros(cfg.n_d),
                                Eigen::Vector2d(0, 0), 0),
               std::invalid_argument);
  EXPECT_THROW(decode_iterative(model, HiddenState::zeros(cfg.n_d + 1),
                                Eigen::Vector2d(0, 0), 2),
               std::domain_error);
}

TEST(InitModel, ShapesBoundsAndForgetBias) {
  LstmEdConfig cfg;
  cfg.n_e = 16;
  cfg.n_d = 16;
  const LstmEdModel m = init_model(cfg, 7);

  EXPECT_EQ(m.encoder.Wi.rows(), 16);
  EXPECT_EQ(m.encoder.Wi.cols(), 6);
  EXPECT_EQ(m.encoder.Ui.rows(), 16);
  EXPECT_EQ(m.encoder.Ui.cols(), 16);
  EXPECT_EQ(m.head_w.rows(), 2);
  EXPECT_EQ(m.head_w.cols(), 16);
  EXPECT_EQ(m.bridge_w.rows(), 6);
  EXPECT_EQ(m.bridge_w.cols(), 2);

  const double bound = 1.0 / std::sqrt(16.0);
  EXPECT_LE(m.encoder.Wi.cwiseAbs().maxCoeff(), bound);
  EXPECT_LE(m.decoder.Uo.cwiseAbs().maxCoeff(), bound);
  EXPECT_GT(m.encoder.Wi.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(m.encoder.bf, Eigen::MatrixXd::Ones(16, 1));
  EXPECT_EQ(m.decoder.bf, Eigen::MatrixXd::Ones(16, 1));
}

TEST(InitModel, DeterministicUnderSeed) {
  const LstmEdConfig cfg = small_config();
  LstmEdModel a = init_model(cfg, 9);
  LstmEdModel b = init_model(cfg, 9);
  LstmEdModel c = init_model(cfg, 10);
  EXPECT_EQ(a.encoder.Wg, b.encoder.Wg);
  EXPECT_EQ(a.head_w, b.head_w);
  EXPECT_NE(a.encoder.Wg, c.encoder.Wg);
}

TEST(Config, ValidationRejectsBadValues) {
  LstmEdConfig cfg = small_config();
  cfg.n_d = cfg.n_e + 1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.dropout_p = 1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.n_in = 5;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.n_out = 3;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.n_p = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);

  TrainConfig tcfg;
  tcfg.learning_rate = 0.0;
  EXPECT_THROW(tcfg.validate(), ConfigError);
  tcfg = TrainConfig{};
  tcfg.teacher_forcing_ratio = 1.5;
  EXPECT_THROW(tcfg.validate(), ConfigError);
  tcfg = TrainConfig{};
  tcfg.batch_size = 0;
  EXPECT_THROW(tcfg.validate(), ConfigError);
}

TEST(Train, OverfitsSingleWindow) {
  const WindowConfig wcfg = WindowConfig::make(0.8, 0.3, 0.1);
  const auto data =
      make_dataset(wcfg, {make_trace("d0", static_cast<int>(wcfg.span()))});
  ASSERT_EQ(data.size(), 1u);

  LstmEdConfig mcfg;
  mcfg.n_e = 8;
  mcfg.n_d = 8;
  mcfg.dropout_p = 0.0;
  mcfg.n_h = wcfg.n_h;
  mcfg.n_p = wcfg.n_p;

  TrainConfig tcfg;
  tcfg.epochs = 500;
  tcfg.batch_size = 1;
  tcfg.learning_rate = 1e-2;
  tcfg.seed = 3;

  const auto [model, history] = train(data, mcfg, tcfg);
  ASSERT_EQ(history.size(), 500u);
  EXPECT_LT(history.back(), 1e-4);
  EXPECT_LT(history.back(), history.front());
}

TEST(Train, ZeroEpochsReturnsInitialModel) {
  const WindowConfig wcfg = WindowConfig::make(0.8, 0.3, 0.1);
  const auto data = make_dataset(wcfg, {make_trace("d0", 20)});

  LstmEdConfig mcfg;
  mcfg.n_e = 4;
  mcfg.n_d = 4;
  mcfg.n_h = wcfg.n_h;
  mcfg.n_p = wcfg.n_p;

  TrainConfig tcfg;
  tcfg.epochs = 0;
  tcfg.seed = 77;

  auto [model, history] = train(data, mcfg, tcfg);
  EXPECT_TRUE(history.empty());

  LstmEdModel expected = init_model(mcfg, derive_seed(tcfg.seed, 0));
  const auto got = tensor_ptrs(model);
  const auto want = tensor_ptrs(expected);
  for (int k = 0; k < kNumModelTensors; ++k)
    EXPECT_EQ(*got[static_cast<std::size_t>(k)],
              *want[static_cast<std::size_t>(k)])
        << tensor_names()[static_cast<std::size_t>(k)];
}

TEST(Train, DeterministicUnderSeed) {
  const WindowConfig wcfg = WindowConfig::make(0.8, 0.3, 0.1);
  const auto data = make_dataset(
      wcfg, {make_trace("d0", 25), make_trace("d1", 25, 3.0)});

  LstmEdConfig mcfg;
  mcfg.n_e = 4;
  mcfg.n_d = 4;
  mcfg.n_h = wcfg.n_h;
  mcfg.n_p = wcfg.n_p;

  TrainConfig tcfg;
  tcfg.epochs = 3;
  tcfg.seed = 5;

  auto [m1, h1] = train(data, mcfg, tcfg);
  auto [m2, h2] = train(data, mcfg, tcfg);
  EXPECT_EQ(h1, h2);
  EXPECT_EQ(m1.encoder.Wi, m2.encoder.Wi);
  EXPECT_EQ(m1.head_w, m2.head_w);

  tcfg.seed = 6;
  auto [m3, h3] = train(data, mcfg, tcfg);
  EXPECT_NE(m1.encoder.Wi, m3.encoder.Wi);
}

TEST(Train, LossTrendsDownward) {
  const WindowConfig wcfg = WindowConfig::make(0.8, 0.3, 0.1);
  const auto data = make_dataset(
      wcfg, {make_trace("d0", 40), make_trace("d1", 40, 2.0)});

  LstmEdConfig mcfg;
  mcfg.n_e = 8;
  mcfg.n_d = 8;
  mcfg.dropout_p = 0.0;
  mcfg.n_h = wcfg.n_h;
  mcfg.n_p = wcfg.n_p;

  TrainConfig tcfg;
  tcfg.epochs = 15;
  tcfg.learning_rate = 3e-3;
  tcfg.seed = 11;

  const auto [model, history] = train(data, mcfg, tcfg);
  ASSERT_EQ(history.size(), 15u);
  EXPECT_LT(history.back(), history.front());
}

TEST(Train, DivergenceRaisesError) {
  const WindowConfig wcfg = WindowConfig::make(0.8, 0.3, 0.1);
  const auto data = make_dataset(wcfg, {make_trace("d0", 15)});

  LstmEdConfig mcfg;
  mcfg.n_e = 4;
  mcfg.n_d = 4;
  mcfg.dropout_p = 0.0;
  mcfg.n_h = wcfg.n_h;
  mcfg.n_p = wcfg.n_p;

  TrainConfig tcfg;
  tcfg.epochs = 4;
  tcfg.learning_rate = 1e160;
  tcfg.grad_clip_norm = 0.0;
  tcfg.seed = 1;

  EXPECT_THROW(train(data, mcfg, tcfg), std::runtime_error);
}

TEST(Train, RejectsMismatchedShapesAndEmptyData) {
  const WindowConfig wcfg = WindowConfig::make(0.8, 0.3, 0.1);
  const auto data = make_dataset(wcfg, {make_trace("d0", 15)});

  LstmEdConfig mcfg;
  mcfg.n_e = 4;
  mcfg.n_d = 4;
  mcfg.n_h = wcfg.n_h + 1;
  mcfg.n_p = wcfg.n_p;
  EXPECT_THROW(train(data, mcfg, TrainConfig{}), ConfigError);

  mcfg.n_h = wcfg.n_h;
  const WindowedDataset empty(wcfg, NormStats{});
  EXPECT_THROW(train(empty, mcfg, TrainConfig{}), ConfigError);
}

TEST(Train, FullCapMatchesUncappedRun) {
  const WindowConfig wcfg = WindowConfig::make(0.8, 0.3, 0.1);
  const auto data = make_dataset(wcfg, {make_trace("d0", 20)});

  LstmEdConfig mcfg;
  mcfg.n_e = 4;
  mcfg.n_d = 4;
  mcfg.n_h = wcfg.n_h;
  mcfg.n_p = wcfg.n_p;

  TrainConfig tcfg;
  tcfg.epochs = 2;
  tcfg.seed = 13;
  auto [m1, h1] = train(data, mcfg, tcfg);

  tcfg.windows_per_epoch = data.size();
  auto [m2, h2] = train(data, mcfg, tcfg);
  EXPECT_EQ(h1, h2);
  EXPECT_EQ(m1.decoder.Ug, m2.decoder.Ug);

  tcfg.windows_per_epoch = 3;
  auto [m3, h3] = train(data, mcfg, tcfg);
  ASSERT_EQ(h3.size(), 2u);
  EXPECT_TRUE(std::isfinite(h3.back()));
}

TEST(Predict, ShapeAndDeterminism) {
  LstmEdConfig cfg = small_config();
  cfg.n_h = 12;
  cfg.n_p = 4;
  const LstmEdModel model = init_model(cfg, 61);
  Rng rng(derive_seed(61, 99));
  const Eigen::MatrixXd history =
      random_matrix(cfg.n_in, cfg.n_h, rng, 0.0, 20.0);

  std::array<double, kNumChannels> lo = {0, -5, 0, 0, 0, -8};
  std::array<double, kNumChannels> hi = {25, 5, 1000, 30, 1, 8};
  const NormStats norm(lo, hi);

  const auto [v1, e1] = predict(model, norm, history);
  const auto [v2, e2] = predict(model, norm, history);
  ASSERT_EQ(v1.size(), 4u);
  ASSERT_EQ(e1.size(), 4u);
  EXPECT_EQ(v1, v2);
  EXPECT_EQ(e1, e2);
  for (double v : v1) EXPECT_TRUE(std::isfinite(v));
}

TEST(Predict, MapsNormalizedOutputsBackToPhysicalUnits) {
  LstmEdConfig cfg = small_config();
  cfg.dropout_p = 0.0;
  LstmEdModel model = zero_model(cfg);
  model.head_b << 0.25, 0.5;

  std::array<double, kNumChannels> lo = {0, -5, 0, 0, 0, -8};
  std::array<double, kNumChannels> hi = {20, 5, 1000, 30, 1, 8};
  const NormStats norm(lo, hi);

  const Eigen::MatrixXd history = Eigen::MatrixXd::Constant(6, cfg.n_h, 0.5);
  const auto [v_hat, err_hat] = predict(model, norm, history);
  for (int k = 0; k < cfg.n_p; ++k) {
    EXPECT_DOUBLE_EQ(v_hat[static_cast<std::size_t>(k)], 5.0);
    EXPECT_DOUBLE_EQ(err_hat[static_cast<std::size_t>(k)], 0.0);
  }
}

TEST(Predict, RejectsWrongHistoryShape) {
  const LstmEdConfig cfg = small_config();
  const LstmEdModel model = init_model(cfg, 62);
  const NormStats norm;
  EXPECT_THROW(predict(model, norm, Eigen::MatrixXd::Zero(6, cfg.n_h - 1)),
               std::invalid_argument);
  EXPECT_THROW(predict(model, norm, Eigen::MatrixXd::Zero(5, cfg.n_h)),
               std::invalid_argument);
}

}  // namespace
}  // namespace advisim
