// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

// Mini-batch SGD with momentum on squared error, with quantization in the
// forward pass and straight-through gradients in the backward pass.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "bitwave/core/error.hpp"
#include "bitwave/nn/model.hpp"

namespace bitwave::nn {

struct TrainOptions {
  double learning_rate = 0.01;
  double momentum = 0.9;
  std::size_t batch = 256;
  int epochs = 20;
  std::uint64_t seed = 1;
  /// Quantized forward with straight-through backward. When false the
  /// network trains in full precision regardless of its bit widths.
  bool quantization_aware = true;
  /// Clip master weights to [-1, 1] after each step when weights are quantized.
  bool clip_weights = true;
  /// Called after every epoch with (epoch, train loss, validation loss).
  std::function<void(int, double, double)> on_epoch;
};

template <typename Scalar>
struct Gradients {
  double loss = 0.0;
  std::vector<RowMatrix<Scalar>> weights;
  std::vector<Vector<Scalar>> biases;
};

/// Mean over samples and outputs of (prediction - target)^2.
template <typename Scalar>
double squared_error(const RowMatrix<Scalar>& prediction, const RowMatrix<Scalar>& target) {
  if (prediction.rows() != target.rows() || prediction.cols() != target.cols())
    throw std::invalid_argument("squared_error: shape mismatch");
  if (prediction.size() == 0) throw std::invalid_argument("squared_error: empty batch");
  return (prediction - target).template cast<double>().squaredNorm() / static_cast<double>(prediction.size());
}

/// Loss and gradient of squared_error with respect to the master weights.
/// `mode` is Mode::full or Mode::dynamic; in dynamic mode the quantizers are
/// treated as identity in the backward pass.
template <typename Scalar>
Gradients<Scalar> compute_gradients(const BasicModel<Scalar>& model, const RowMatrix<Scalar>& x,
                                    const RowMatrix<Scalar>& target, Mode mode) {
  if (mode == Mode::quantized) throw std::invalid_argument("compute_gradients: use full or dynamic mode");
  const ModelSpec& spec = model.spec;
  detail::check_input(spec, x);
  if (x.rows() == 0) throw std::invalid_argument("empty batch");
  if (target.rows() != x.rows() || target.cols() != spec.output_dim())
    throw std::invalid_argument("target shape does not match batch and model output");

  const std::size_t layers = spec.layer_count();
  const bool qat = mode == Mode::dynamic;
  std::vector<RowMatrix<Scalar>> inputs(layers);   // effective (quantized) layer inputs
  std::vector<RowMatrix<Scalar>> eff_w(layers);    // effective weights
  std::vector<RowMatrix<Scalar>> pre(layers);

  RowMatrix<Scalar> a = x;
  for (std::size_t l = 0; l < layers; ++l) {
    if (!a.allFinite()) throw NumericError("non-finite activations at the input of layer " + std::to_string(l + 1));
    if (qat && spec.quantized_site(l)) fake_quantize(a, spec.neuron_bits);
    eff_w[l] = model.weights[l];
    if (qat && spec.quantized_weights()) fake_quantize(eff_w[l], spec.weight_bits);
    RowMatrix<Scalar> z = gemm_dense(a, eff_w[l].transpose());
    z.rowwise() += model.biases[l].transpose();
    pre[l] = z;
    if (l + 1 == layers)
      detail::apply_output(z, spec.output_activation);
    else
      detail::apply_hidden(z);
    inputs[l] = std::move(a);
    a = std::move(z);
  }

  Gradients<Scalar> g;
  g.loss = squared_error(a, target);
  const Scalar norm = Scalar(2) / static_cast<Scalar>(a.size());
  RowMatrix<Scalar> delta = (a - target) * norm;
  if (spec.output_activation == OutputActivation::sigmoid)
    delta = (delta.array() * a.array() * (Scalar(1) - a.array())).matrix();

  g.weights.resize(layers);
  g.biases.resize(layers);
  for (std::size_t l = layers; l-- > 0;) {
    g.weights[l].noalias() = delta.transpose() * inputs[l];
    g.biases[l] = delta.colwise().sum().transpose();
    if (l == 0) break;
    RowMatrix<Scalar> back = delta * eff_w[l];
    delta = (back.array() * (pre[l - 1].array() > Scalar(0)).template cast<Scalar>()).matrix();
  }
  return g;
}

/// Loss on a whole set in the given mode.
template <typename Scalar>
double evaluate_loss(const BasicModel<Scalar>& model, const RowMatrix<Scalar>& x, const RowMatrix<Scalar>& y,
                     Mode mode) {
  return squared_error(forward(model, x, mode).output, y);
}

namespace detail {

template <typename Scalar>
RowMatrix<Scalar> gather_rows(const RowMatrix<Scalar>& m, std::span<const std::size_t> rows) {
  RowMatrix<Scalar> out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = m.row(static_cast<Index>(rows[i]));
  return out;
}

}  // namespace detail

/// Trains `model` in place and keeps the weights of the epoch with the lowest
/// validation loss. Deterministic for a fixed seed. Throws NumericError if
/// the loss becomes non-finite.
template <typename Scalar>
TrainingLog train(BasicModel<Scalar>& model, const RowMatrix<Scalar>& x, const RowMatrix<Scalar>& y,
                  const RowMatrix<Scalar>& valid_x, const RowMatrix<Scalar>& valid_y, const TrainOptions& options) {
  const ModelSpec& spec = model.spec;
  if (x.rows() == 0 || valid_x.rows() == 0) throw std::invalid_argument("training and validation sets must be non-empty");
  if (y.rows() != x.rows() || valid_y.rows() != valid_x.rows())
    throw std::invalid_argument("feature and target row counts differ");
  if (options.batch == 0) throw std::invalid_argument("empty batch");
  detail::check_input(spec, x);
  detail::check_input(spec, valid_x);

  const Mode mode = options.quantization_aware ? Mode::dynamic : Mode::full;
  const bool clip = options.clip_weights && options.quantization_aware && spec.quantized_weights();
  std::mt19937_64 rng(options.seed);

  std::vector<RowMatrix<Scalar>> vel_w;
  std::vector<Vector<Scalar>> vel_b;
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    vel_w.push_back(RowMatrix<Scalar>::Zero(model.weights[l].rows(), model.weights[l].cols()));
    vel_b.push_back(Vector<Scalar>::Zero(model.biases[l].size()));
  }

  TrainingLog log;
  log.seed = options.seed;
  double best = std::numeric_limits<double>::infinity();
  auto best_weights = model.weights;
  auto best_biases = model.biases;

  std::vector<std::size_t> order(static_cast<std::size_t>(x.rows()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto lr = static_cast<Scalar>(options.learning_rate);
  const auto mu = static_cast<Scalar>(options.momentum);

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < order.size(); start += options.batch) {
      const std::size_t count = std::min(options.batch, order.size() - start);
      const std::span<const std::size_t> rows(order.data() + start, count);
      const RowMatrix<Scalar> xb = detail::gather_rows(x, rows);
      const RowMatrix<Scalar> yb = detail::gather_rows(y, rows);
      const Gradients<Scalar> g = compute_gradients(model, xb, yb, mode);
      if (!std::isfinite(g.loss))
        throw NumericError("non-finite training loss at epoch " + std::to_string(epoch + 1) + ", batch starting at " +
                           std::to_string(start));
      loss_sum += g.loss * static_cast<double>(count);
      seen += count;
      for (std::size_t l = 0; l < spec.layer_count(); ++l) {
        vel_w[l] = mu * vel_w[l] - lr * g.weights[l];
        vel_b[l] = mu * vel_b[l] - lr * g.biases[l];
        model.weights[l] += vel_w[l];
        model.biases[l] += vel_b[l];
        if (!model.weights[l].allFinite() || !model.biases[l].allFinite())
          throw NumericError("non-finite parameters in layer " + std::to_string(l + 1) + " at epoch " +
                             std::to_string(epoch + 1));
        if (clip) model.weights[l] = model.weights[l].cwiseMax(Scalar(-1)).cwiseMin(Scalar(1));
      }
    }
    const double train_loss = loss_sum / static_cast<double>(seen);
    const double valid_loss = evaluate_loss(model, valid_x, valid_y, mode);
    if (!std::isfinite(valid_loss))
      throw NumericError("non-finite validation loss at epoch " + std::to_string(epoch + 1));
    log.train_loss.push_back(train_loss);
    log.valid_loss.push_back(valid_loss);
    log.epochs = epoch + 1;
    if (valid_loss < best) {
      best = valid_loss;
      log.best_epoch = epoch + 1;
      best_weights = model.weights;
      best_biases = model.biases;
    }
    if (options.on_epoch) options.on_epoch(epoch + 1, train_loss, valid_loss);
  }
  model.weights = std::move(best_weights);
  model.biases = std::move(best_biases);
  model.log = log;
  model.activation_scales.clear();
  prepare_inference(model);
  return log;
}

}  // namespace bitwave::nn
