// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

// Dataset-to-model training and scoring shared by the command-line tool,
// the design-space sweep and the acceptance checks.

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bitwave/dsp/dataset.hpp"
#include "bitwave/eval/dse.hpp"
#include "bitwave/nn/model.hpp"
#include "bitwave/nn/train.hpp"

namespace bitwave::eval {

/// Normalized train, validation and test frames of one task. Enhancement
/// targets are clipped log-power gains (see log_gain).
struct TaskSets {
  nn::Task task = nn::Task::vad;
  int context = dsp::kDefaultContext;
  int bins = 0;
  dsp::TaskData train, valid, test;
  /// Fitted on the training features.
  Normalization input_norm;
  /// Fitted on enhancement targets; empty for VAD.
  Normalization target_norm;
};

/// Loads the three splits, fits the normalizations on the training split and
/// applies them to every split.
TaskSets load_task_sets(const dsp::DatasetManifest& manifest, nn::Task task, const dsp::StftParams& params,
                        int context = dsp::kDefaultContext);

struct TrainSetup {
  std::vector<int> hidden{512, 512, 512};
  int weight_bits = nn::kFullPrecision;
  int neuron_bits = nn::kFullPrecision;
  bool quantize_input = true;
  nn::TrainOptions options;
  /// Frames drawn (evenly spaced) from the training split to freeze activation scales.
  Index calibration_frames = 4096;
  std::uint64_t init_seed = 1;
};

/// Defaults per task. Enhancement averages the loss over 129 outputs and
/// uses a larger step.
TrainSetup default_setup(nn::Task task);

/// Trains, calibrates and prepares a model for quantized inference.
nn::Model train_task_model(const TaskSets& sets, const TrainSetup& setup);

/// Frame error of thresholded quantized-mode outputs on `data`.
double vad_frame_error(const nn::Model& model, const dsp::TaskData& data);

/// Squared error of quantized-mode outputs on normalized targets.
double regression_loss(const nn::Model& model, const dsp::TaskData& data);

/// Task metric of a trained model on the test split: frame error for VAD,
/// mean SNR improvement in dB for enhancement.
double test_metric(const nn::Model& model, const TaskSets& sets, const dsp::DatasetManifest& manifest,
                   const dsp::StftParams& params);

struct ExploreOptions {
  /// Time the kernel of each cell at these dimensions.
  bool measure_speedup = false;
  Index bench_m = 512, bench_n = 903, bench_p = 512;
  int bench_repetitions = 10;
  SpeedupBasis basis = SpeedupBasis::ideal;
  /// Called after each cell with its bit widths and trained model.
  std::function<void(int, int, const nn::Model&)> on_cell;
};

/// Trains one model per grid cell with that cell's bit widths and assembles
/// the scored report. A cell whose training fails ends the sweep with a
/// partial report.
DseReport explore_grid(const dsp::DatasetManifest& manifest, const TaskSets& sets, const dsp::StftParams& params,
                       const std::vector<BitPair>& grid, const TrainSetup& base, const ExploreOptions& options = {});

}  // namespace bitwave::eval
