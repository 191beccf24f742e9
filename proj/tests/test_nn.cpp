// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <filesystem>
#include <random>

#include "bitwave/core/error.hpp"
#include "bitwave/nn/cost.hpp"
#include "bitwave/nn/model_io.hpp"
#include "bitwave/nn/train.hpp"
#include "doctest.h"

using namespace bitwave;
using namespace bitwave::nn;

namespace {

template <typename Scalar>
RowMatrix<Scalar> random_matrix(Index rows, Index cols, std::uint64_t seed, double sigma = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, sigma);
  RowMatrix<Scalar> m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<Scalar>(dist(rng));
  return m;
}

ModelSpec small_spec(int w, int n, OutputActivation out = OutputActivation::sigmoid) {
  ModelSpec spec;
  spec.layer_dims = {12, 16, 8, 3};
  spec.output_activation = out;
  spec.weight_bits = w;
  spec.neuron_bits = n;
  return spec;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

TEST_CASE("ModelSpec validation") {
  CHECK_NOTHROW(small_spec(1, 2).validate());
  ModelSpec no_hidden;
  no_hidden.layer_dims = {3, 1};
  CHECK_THROWS_AS(no_hidden.validate(), std::invalid_argument);
  CHECK_THROWS_AS(small_spec(3, 2).validate(), std::invalid_argument);
  CHECK_THROWS_AS(small_spec(1, 16).validate(), std::invalid_argument);
  const ModelSpec vad = ModelSpec::vad(129);
  CHECK(vad.layer_dims == std::vector<int>{903, 512, 512, 512, 1});
}

TEST_CASE("full precision quantized mode equals full mode bitwise") {
  auto model = init_model<float>(small_spec(32, 32), 3);
  prepare_inference(model);
  const auto x = random_matrix<float>(10, 12, 4);
  const auto a = forward(model, x, Mode::full).output;
  const auto b = forward(model, x, Mode::quantized).output;
  CHECK(a == b);
  for (Index i = 0; i < a.size(); ++i) {
    CHECK(a.data()[i] > 0.0f);
    CHECK(a.data()[i] < 1.0f);
  }
}

TEST_CASE("two-bit product through the popcount path") {
  ModelSpec spec;
  spec.layer_dims = {1, 1, 1};
  spec.weight_bits = 2;
  spec.neuron_bits = 2;
  BasicModel<double> model = init_model<double>(spec, 1);
  model.weights[0](0, 0) = 1.5;  // quantizes to scales {1.5, 0}
  model.weights[1](0, 0) = 1.0;
  model.biases[0].setZero();
  model.biases[1].setZero();
  prepare_inference(model);
  model.activation_scales = {{1.0, 0.5}, {2.25, 0.0}};
  RowMatrix<double> x(1, 1);
  x << 1.5;
  const auto out = forward(model, x, Mode::quantized).output;
  CHECK(out(0, 0) == doctest::Approx(sigmoid(2.25)).epsilon(1e-12));
  CHECK(out(0, 0) == doctest::Approx(0.9047).epsilon(1e-4));
}

TEST_CASE("zero weights give sigmoid of the bias") {
  auto model = init_model<float>(small_spec(2, 2), 5);
  for (auto& w : model.weights) w.setZero();
  model.biases.back().setConstant(0.7f);
  prepare_inference(model);
  calibrate_activations(model, random_matrix<float>(20, 12, 6));
  const auto out = forward(model, random_matrix<float>(4, 12, 7), Mode::quantized).output;
  for (Index i = 0; i < out.size(); ++i) CHECK(out.data()[i] == doctest::Approx(sigmoid(0.7)).epsilon(1e-6));
}

TEST_CASE("forward errors") {
  auto model = init_model<float>(small_spec(1, 2), 5);
  prepare_inference(model);
  CHECK_THROWS_AS(forward(model, random_matrix<float>(2, 12, 1), Mode::quantized), std::invalid_argument);
  CHECK_THROWS_AS(forward(model, random_matrix<float>(2, 11, 1), Mode::full), std::invalid_argument);
  CHECK_THROWS_AS(calibrate_activations(model, RowMatrix<float>(0, 12)), std::invalid_argument);
}

TEST_CASE("quantized forward matches dense math on dequantized operands") {
  for (auto [w, n] : {std::pair{1, 1}, std::pair{1, 2}, std::pair{2, 4}, std::pair{8, 8}, std::pair{32, 2},
                      std::pair{2, 32}}) {
    auto model = init_model<float>(small_spec(w, n), 11);
    const auto calib = random_matrix<float>(64, 12, 12);
    calibrate_activations(model, calib);
    const auto x = random_matrix<float>(9, 12, 13);
    const auto got = forward(model, x, Mode::quantized).output;

    // Reference: every step spelled out in double precision.
    RowMatrix<double> a = x.cast<double>();
    for (std::size_t l = 0; l < model.spec.layer_count(); ++l) {
      if (model.spec.quantized_site(l)) {
        const auto q = quantize_with_scales<float>(a.cast<float>(), std::span<const float>(model.activation_scales[l]));
        a = dequantize(q).cast<double>();
      }
      RowMatrix<double> wd = model.weights[l].cast<double>();
      if (model.spec.quantized_weights()) wd = dequantize(quantize_matrix(model.weights[l], w)).cast<double>();
      RowMatrix<double> z = a * wd.transpose();
      z.rowwise() += model.biases[l].cast<double>().transpose();
      if (l + 1 < model.spec.layer_count())
        z = z.cwiseMax(0.0);
      else
        z = z.unaryExpr([](double v) { return sigmoid(v); });
      a = z;
    }
    CHECK_MESSAGE((got.cast<double>() - a).cwiseAbs().maxCoeff() < 1e-5, "W" << w << "/N" << n);
  }
}

TEST_CASE("calibration scales") {
  ModelSpec spec = small_spec(2, 1);
  auto model = init_model<float>(spec, 2);
  calibrate_activations(model, RowMatrix<float>(RowMatrix<float>::Constant(30, 12, 0.25f)));
  CHECK(model.activation_scales[0].size() == 1);
  CHECK(model.activation_scales[0][0] == doctest::Approx(0.25f));

  spec.neuron_bits = 4;
  auto m4 = init_model<float>(spec, 2);
  const auto calib = random_matrix<float>(50, 12, 3);
  calibrate_activations(m4, calib);
  const auto first = m4.activation_scales;
  calibrate_activations(m4, calib);
  CHECK(first == m4.activation_scales);
  CHECK(first[0] == residual_scales(calib, 4));
  CHECK(first[0] == quantize_residual(calib, 4).scales);
  CHECK(m4.calibrated());
}

TEST_CASE("gradient check against central differences") {
  ModelSpec spec;
  spec.layer_dims = {6, 7, 5, 2};
  for (auto out : {OutputActivation::sigmoid, OutputActivation::identity}) {
    spec.output_activation = out;
    auto model = init_model<double>(spec, 21);
    for (auto& b : model.biases) b = Vector<double>::Constant(b.size(), 0.05);
    const auto x = random_matrix<double>(5, 6, 22);
    const RowMatrix<double> y = random_matrix<double>(5, 2, 23, 0.3).cwiseAbs();
    const auto g = compute_gradients(model, x, y, Mode::full);
    const double eps = 1e-4;
    double diff_sq = 0.0, ref_sq = 0.0;
    for (std::size_t l = 0; l < spec.layer_count(); ++l) {
      for (Index i = 0; i < model.weights[l].size(); ++i) {
        double& p = model.weights[l].data()[i];
        const double saved = p;
        p = saved + eps;
        const double up = evaluate_loss(model, x, y, Mode::full);
        p = saved - eps;
        const double down = evaluate_loss(model, x, y, Mode::full);
        p = saved;
        const double numeric = (up - down) / (2 * eps);
        diff_sq += std::pow(numeric - g.weights[l].data()[i], 2);
        ref_sq += numeric * numeric;
      }
      for (Index i = 0; i < model.biases[l].size(); ++i) {
        double& p = model.biases[l][i];
        const double saved = p;
        p = saved + eps;
        const double up = evaluate_loss(model, x, y, Mode::full);
        p = saved - eps;
        const double down = evaluate_loss(model, x, y, Mode::full);
        p = saved;
        const double numeric = (up - down) / (2 * eps);
        diff_sq += std::pow(numeric - g.biases[l][i], 2);
        ref_sq += numeric * numeric;
      }
    }
    CHECK(std::sqrt(diff_sq / ref_sq) < 1e-4);
  }
}

TEST_CASE("XOR toy trains below 0.05 in full precision") {
  ModelSpec spec;
  spec.layer_dims = {2, 8, 1};
  spec.output_activation = OutputActivation::sigmoid;
  auto model = init_model<float>(spec, 7);
  RowMatrix<float> x(4 * 25, 2), y(4 * 25, 1);
  std::mt19937_64 rng(1);
  std::normal_distribution<float> jitter(0.0f, 0.05f);
  for (Index i = 0; i < x.rows(); ++i) {
    const int a = static_cast<int>(i % 2), b = static_cast<int>((i / 2) % 2);
    x(i, 0) = (a ? 1.0f : -1.0f) + jitter(rng);
    x(i, 1) = (b ? 1.0f : -1.0f) + jitter(rng);
    y(i, 0) = static_cast<float>(a ^ b);
  }
  TrainOptions opt;
  opt.learning_rate = 0.1;
  opt.batch = 8;
  opt.epochs = 500;
  opt.seed = 3;
  const auto log = train(model, x, y, x, y, opt);
  CHECK(log.train_loss.back() < 0.05);
  CHECK(log.train_loss.back() < log.train_loss.front());
}

TEST_CASE("training is deterministic and the 32/32 QAT path equals plain training") {
  const auto x = random_matrix<float>(64, 12, 30);
  const RowMatrix<float> y = (x.col(0).array() > 0).cast<float>().replicate(1, 3).matrix();
  const auto vx = random_matrix<float>(16, 12, 31);
  const RowMatrix<float> vy = (vx.col(0).array() > 0).cast<float>().replicate(1, 3).matrix();
  TrainOptions opt;
  opt.epochs = 5;
  opt.batch = 16;

  auto a = init_model<float>(small_spec(32, 32), 1);
  auto b = init_model<float>(small_spec(32, 32), 1);
  auto c = init_model<float>(small_spec(32, 32), 1);
  const auto la = train(a, x, y, vx, vy, opt);
  const auto lb = train(b, x, y, vx, vy, opt);
  opt.quantization_aware = false;
  const auto lc = train(c, x, y, vx, vy, opt);
  CHECK(la.train_loss == lb.train_loss);
  CHECK(la.train_loss == lc.train_loss);
  CHECK(la.valid_loss == lc.valid_loss);
  CHECK(a.weights == c.weights);

  opt.quantization_aware = true;
  auto q1 = init_model<float>(small_spec(1, 2), 1);
  auto q2 = init_model<float>(small_spec(1, 2), 1);
  CHECK(train(q1, x, y, vx, vy, opt).train_loss == train(q2, x, y, vx, vy, opt).train_loss);
  for (const auto& w : q1.weights) CHECK(w.cwiseAbs().maxCoeff() <= 1.0f);
}

TEST_CASE("straight-through step updates masters, not planes") {
  auto model = init_model<float>(small_spec(1, 2), 4);
  prepare_inference(model);
  const auto planes_before = model.quantized_weights;
  const auto masters_before = model.weights;
  const auto x = random_matrix<float>(32, 12, 5);
  const RowMatrix<float> y = RowMatrix<float>::Constant(32, 3, 1.0f);
  const auto g = compute_gradients(model, x, y, Mode::dynamic);
  for (std::size_t l = 0; l < model.weights.size(); ++l) model.weights[l] -= 0.5f * g.weights[l];
  CHECK(model.weights != masters_before);
  CHECK(model.quantized_weights == planes_before);
  prepare_inference(model);
  for (std::size_t l = 0; l < model.weights.size(); ++l)
    CHECK(model.quantized_weights[l] == quantize_matrix(model.weights[l], 1));
}

TEST_CASE("non-finite loss aborts training") {
  auto model = init_model<float>(small_spec(32, 32), 1);
  const auto x = random_matrix<float>(8, 12, 1);
  RowMatrix<float> y = RowMatrix<float>::Zero(8, 3);
  y(3, 1) = std::numeric_limits<float>::quiet_NaN();
  TrainOptions opt;
  opt.epochs = 1;
  CHECK_THROWS_AS(train(model, x, y, x, y, opt), NumericError);
  CHECK_THROWS_AS(train(model, RowMatrix<float>(0, 12), RowMatrix<float>(0, 3), x, y, opt), std::invalid_argument);
}

TEST_CASE("squared error is nonnegative and zero on exact predictions") {
  const auto p = random_matrix<float>(4, 3, 9);
  CHECK(squared_error(p, p) == 0.0);
  CHECK(squared_error(p, RowMatrix<float>(p.array() + 0.5f)) == doctest::Approx(0.25));
}

TEST_CASE("model cost accounting") {
  const ModelSpec vad = ModelSpec::vad(129);
  const auto full = model_cost(vad, 32, 32);
  CHECK(full.mops_per_frame == doctest::Approx(2.0 * (903 * 512 + 512 * 512 + 512 * 512 + 512) / 1e6));
  CHECK(full.mops_per_frame == doctest::Approx(1.974).epsilon(1e-3));
  CHECK(full.memory_bytes == (987136 + 1537) * 4);
  const auto binary = model_cost(vad, 1, 1);
  CHECK(binary.mops_per_frame == full.mops_per_frame);
  CHECK(binary.memory_bytes == 987136 / 8 + 1537 * 4);

  const ModelSpec big = ModelSpec::enhance(257, 7, {2048, 2048, 2048});
  const auto cost = model_cost(big, 32, 32);
  CHECK(cost.mops_per_frame >= 25.0);
  CHECK(cost.mops_per_frame <= 28.0);
  CHECK(cost.memory_bytes >= 50'000'000u);
  CHECK(cost.memory_bytes <= 56'000'000u);
}

TEST_CASE("model file round-trip") {
  auto model = init_model<float>(small_spec(2, 4), 8);
  model.input_norm = {std::vector<float>(12, 0.5f), std::vector<float>(12, 2.0f)};
  model.log.train_loss = {0.3, 0.2};
  model.log.valid_loss = {0.35, 0.1 + 0.2};
  calibrate_activations(model, random_matrix<float>(40, 12, 9));

  const std::string bytes = serialize_model(model);
  CHECK(bytes.substr(0, 4) == "BWNN");
  const Model back = deserialize_model(bytes);
  CHECK(serialize_model(back) == bytes);
  CHECK(back.weights == model.weights);
  CHECK(back.activation_scales == model.activation_scales);
  CHECK(back.quantized_weights == model.quantized_weights);
  const auto x = random_matrix<float>(6, 12, 10);
  CHECK(forward(back, x, Mode::quantized).output == forward(model, x, Mode::quantized).output);

  const auto path = std::filesystem::temp_directory_path() / "bitwave_test_model.bwnn";
  save_model(model, path);
  CHECK(serialize_model(load_model(path)) == bytes);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(deserialize_model(bytes.substr(0, bytes.size() - 7)), DataError);
  std::string flipped = bytes;
  flipped[flipped.size() / 2] ^= 0x10;
  CHECK_THROWS_WITH_AS(deserialize_model(flipped), doctest::Contains("checksum"), DataError);
  std::string version = bytes;
  version[4] = 9;
  CHECK_THROWS_WITH_AS(deserialize_model(version), doctest::Contains("version"), DataError);
  CHECK_THROWS_AS(deserialize_model("nope"), DataError);
}
