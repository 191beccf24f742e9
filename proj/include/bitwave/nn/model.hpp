// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

// Multi-layer perceptron with per-model weight and neuron bit widths.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bitwave/core/error.hpp"
#include "bitwave/core/gemm.hpp"
#include "bitwave/core/normalization.hpp"
#include "bitwave/core/quant.hpp"
#include "bitwave/core/types.hpp"

namespace bitwave::nn {

/// Bit width meaning "not quantized".
inline constexpr int kFullPrecision = 32;

enum class Task { vad, enhance };
enum class OutputActivation { sigmoid, identity };

std::string to_string(Task task);
Task parse_task(const std::string& name);

inline bool valid_bit_width(int bits) { return bits == 1 || bits == 2 || bits == 4 || bits == 8 || bits == 32; }

struct ModelSpec {
  Task task = Task::vad;
  /// input, hidden..., output
  std::vector<int> layer_dims;
  OutputActivation output_activation = OutputActivation::sigmoid;
  int weight_bits = kFullPrecision;
  int neuron_bits = kFullPrecision;
  int context_frames = 7;
  /// Quantize the network input as well as hidden activations.
  bool quantize_input = true;

  std::size_t layer_count() const { return layer_dims.empty() ? 0 : layer_dims.size() - 1; }
  int input_dim() const { return layer_dims.front(); }
  int output_dim() const { return layer_dims.back(); }
  bool quantized_weights() const { return weight_bits < kFullPrecision; }
  /// Whether the input of layer `l` is quantized.
  bool quantized_site(std::size_t l) const {
    return neuron_bits < kFullPrecision && (l > 0 || quantize_input);
  }

  /// Throws std::invalid_argument unless there is at least one hidden layer,
  /// every dimension is >= 1 and both bit widths are in {1, 2, 4, 8, 32}.
  void validate() const;

  /// Voice activity detector: `bins` x `context` input, hidden ReLU layers, one sigmoid output.
  static ModelSpec vad(int bins, int context = 7, std::vector<int> hidden = {512, 512, 512});
  /// Spectral mapping: `bins` x `context` input, `bins` identity outputs.
  static ModelSpec enhance(int bins, int context = 7, std::vector<int> hidden = {512, 512, 512});
};

struct TrainingLog {
  int epochs = 0;
  int best_epoch = -1;
  std::uint64_t seed = 0;
  std::vector<double> train_loss;
  std::vector<double> valid_loss;
};

template <typename Scalar>
struct BasicModel {
  ModelSpec spec;
  /// Full-precision master weights, out x in.
  std::vector<RowMatrix<Scalar>> weights;
  std::vector<Vector<Scalar>> biases;
  /// Frozen scales for each quantized layer input; empty until calibrated.
  std::vector<std::vector<Scalar>> activation_scales;
  TrainingLog log;
  Normalization input_norm;
  /// Targets of regression models are learned in normalized units.
  Normalization target_norm;

  /// Quantized weights, filled by prepare_inference().
  std::vector<QuantizedTensor<Scalar>> quantized_weights;
  std::vector<PackedWeights<Scalar>> packed_weights;
  std::vector<RowMatrix<Scalar>> dequantized_weights;

  bool calibrated() const {
    if (spec.neuron_bits >= kFullPrecision) return true;
    if (activation_scales.size() != spec.layer_count()) return false;
    for (std::size_t l = 0; l < spec.layer_count(); ++l)
      if (spec.quantized_site(l) && activation_scales[l].size() != static_cast<std::size_t>(spec.neuron_bits))
        return false;
    return true;
  }
  bool prepared() const { return !spec.quantized_weights() || quantized_weights.size() == spec.layer_count(); }
};

using Model = BasicModel<float>;

/// He-uniform initialization for ReLU layers and Glorot-uniform for the output layer.
template <typename Scalar>
BasicModel<Scalar> init_model(const ModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  BasicModel<Scalar> model;
  model.spec = spec;
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    const int in = spec.layer_dims[l];
    const int out = spec.layer_dims[l + 1];
    const bool last = l + 1 == spec.layer_count();
    const double limit = last ? std::sqrt(6.0 / (in + out)) : std::sqrt(6.0 / in);
    std::uniform_real_distribution<double> dist(-limit, limit);
    RowMatrix<Scalar> w(out, in);
    for (Index i = 0; i < w.size(); ++i) w.data()[i] = static_cast<Scalar>(dist(rng));
    model.weights.push_back(std::move(w));
    model.biases.push_back(Vector<Scalar>::Zero(out));
  }
  return model;
}

/// Quantizes and packs the master weights for inference. Call again after
/// the master weights change.
template <typename Scalar>
void prepare_inference(BasicModel<Scalar>& model) {
  model.quantized_weights.clear();
  model.packed_weights.clear();
  model.dequantized_weights.clear();
  if (!model.spec.quantized_weights()) return;
  for (const auto& w : model.weights) {
    auto q = quantize_matrix(w, model.spec.weight_bits);
    model.packed_weights.emplace_back(q);
    model.dequantized_weights.push_back(dequantize(q));
    model.quantized_weights.push_back(std::move(q));
  }
}

enum class Mode {
  /// Master weights, no quantization.
  full,
  /// Frozen activation scales, pre-quantized weights, popcount kernel.
  quantized,
  /// Scales recomputed from each batch (training).
  dynamic,
};

template <typename Scalar>
struct ForwardResult {
  RowMatrix<Scalar> output;
  /// Input of each layer before any quantization.
  std::vector<RowMatrix<Scalar>> activations;
};

namespace detail {

template <typename Scalar>
void apply_hidden(RowMatrix<Scalar>& z) {
  z = z.cwiseMax(Scalar(0));
}

template <typename Scalar>
void apply_output(RowMatrix<Scalar>& z, OutputActivation act) {
  if (act == OutputActivation::sigmoid) z = (Scalar(1) + (-z.array()).exp()).inverse().matrix();
}

template <typename Scalar>
void check_input(const ModelSpec& spec, const RowMatrix<Scalar>& x) {
  if (x.cols() != spec.input_dim())
    throw std::invalid_argument("feature dimension " + std::to_string(x.cols()) + " does not match model input " +
                                std::to_string(spec.input_dim()));
}

}  // namespace detail

/// Runs the network on a batch of feature rows.
///
/// quantized mode: each quantized layer input is packed with its frozen
/// scales and multiplied with the pre-packed weight planes by the popcount
/// kernel; bias and activation stay in full precision. With W = N = 32 this
/// is the same computation as full mode.
template <typename Scalar>
ForwardResult<Scalar> forward(const BasicModel<Scalar>& model, const RowMatrix<Scalar>& features, Mode mode) {
  const ModelSpec& spec = model.spec;
  detail::check_input(spec, features);
  if (mode == Mode::quantized) {
    if (!model.calibrated()) throw std::invalid_argument("quantized forward requires calibrated activation scales");
    if (!model.prepared()) throw std::invalid_argument("quantized forward requires prepare_inference()");
  }

  ForwardResult<Scalar> result;
  RowMatrix<Scalar> a = features;
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    RowMatrix<Scalar> z;
    const bool q_in = spec.quantized_site(l);
    const bool q_w = spec.quantized_weights();
    if (q_in && mode != Mode::full && !a.allFinite())
      throw NumericError("non-finite activations at the input of layer " + std::to_string(l + 1));
    if (mode == Mode::full || (!q_in && !q_w)) {
      z = gemm_dense(a, model.weights[l].transpose());
    } else if (mode == Mode::quantized) {
      if (q_in && q_w) {
        z = gemm_packed(quantize_with_scales(a, std::span<const Scalar>(model.activation_scales[l])),
                        model.packed_weights[l]);
      } else if (q_in) {
        RowMatrix<Scalar> aq = a;
        fake_quantize_frozen(aq, std::span<const Scalar>(model.activation_scales[l]));
        z = gemm_dense(aq, model.weights[l].transpose());
      } else {
        z = gemm_dense(a, model.dequantized_weights[l].transpose());
      }
    } else {
      RowMatrix<Scalar> aq = a;
      if (q_in) fake_quantize(aq, spec.neuron_bits);
      RowMatrix<Scalar> wq = model.weights[l];
      if (q_w) fake_quantize(wq, spec.weight_bits);
      z = gemm_dense(aq, wq.transpose());
    }
    z.rowwise() += model.biases[l].transpose();
    const bool last = l + 1 == spec.layer_count();
    if (last)
      detail::apply_output(z, spec.output_activation);
    else
      detail::apply_hidden(z);
    result.activations.push_back(std::move(a));
    a = std::move(z);
  }
  result.output = std::move(a);
  return result;
}

/// Freezes activation scales from calibration features. Layers are visited
/// in order; the scales of layer l are the residual-mean scales of its
/// pooled inputs, computed after layers < l have been quantized with their
/// frozen scales and the weights with their inference bit width.
template <typename Scalar>
void calibrate_activations(BasicModel<Scalar>& model, const RowMatrix<Scalar>& features) {
  if (features.rows() == 0) throw std::invalid_argument("empty calibration set");
  const ModelSpec& spec = model.spec;
  detail::check_input(spec, features);
  if (!model.prepared()) prepare_inference(model);
  model.activation_scales.assign(spec.layer_count(), {});
  RowMatrix<Scalar> a = features;
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    if (spec.quantized_site(l)) {
      model.activation_scales[l] = residual_scales(a, spec.neuron_bits);
      fake_quantize_frozen(a, std::span<const Scalar>(model.activation_scales[l]));
    }
    const RowMatrix<Scalar>& w = spec.quantized_weights() ? model.dequantized_weights[l] : model.weights[l];
    RowMatrix<Scalar> z = gemm_dense(a, w.transpose());
    z.rowwise() += model.biases[l].transpose();
    if (l + 1 == spec.layer_count())
      detail::apply_output(z, spec.output_activation);
    else
      detail::apply_hidden(z);
    a = std::move(z);
  }
}

}  // namespace bitwave::nn
