// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "bitwave/eval/pipeline.hpp"

#include <algorithm>

#include "bitwave/eval/bench.hpp"
#include "bitwave/eval/enhance.hpp"
#include "bitwave/eval/metrics.hpp"

namespace bitwave::eval {

TaskSets load_task_sets(const dsp::DatasetManifest& manifest, nn::Task task, const dsp::StftParams& params,
                        int context) {
  const auto kind = task == nn::Task::vad ? dsp::TargetKind::vad_labels : dsp::TargetKind::clean_log_power;
  TaskSets sets;
  sets.task = task;
  sets.context = context;
  sets.bins = params.bins();
  sets.train = dsp::load_task_data(manifest, dsp::Split::train, kind, params, context);
  sets.valid = dsp::load_task_data(manifest, dsp::Split::valid, kind, params, context);
  sets.test = dsp::load_task_data(manifest, dsp::Split::test, kind, params, context);
  if (task == nn::Task::enhance) {
    const Index centre = static_cast<Index>(context / 2) * sets.bins;
    for (dsp::TaskData* d : {&sets.train, &sets.valid, &sets.test})
      d->targets = log_gain(d->targets, RowMatrix<float>(d->features.middleCols(centre, sets.bins)));
  }
  sets.input_norm = fit_normalization(sets.train.features);
  for (dsp::TaskData* d : {&sets.train, &sets.valid, &sets.test}) apply_normalization(d->features, sets.input_norm);
  if (task == nn::Task::enhance) {
    sets.target_norm = fit_normalization(sets.train.targets);
    for (dsp::TaskData* d : {&sets.train, &sets.valid, &sets.test}) apply_normalization(d->targets, sets.target_norm);
  }
  return sets;
}

TrainSetup default_setup(nn::Task task) {
  TrainSetup setup;
  setup.options.epochs = 10;
  setup.options.learning_rate = task == nn::Task::vad ? 0.01 : 0.02;
  return setup;
}

nn::Model train_task_model(const TaskSets& sets, const TrainSetup& setup) {
  nn::ModelSpec spec = sets.task == nn::Task::vad ? nn::ModelSpec::vad(sets.bins, sets.context, setup.hidden)
                                                  : nn::ModelSpec::enhance(sets.bins, sets.context, setup.hidden);
  spec.weight_bits = setup.weight_bits;
  spec.neuron_bits = setup.neuron_bits;
  spec.quantize_input = setup.quantize_input;
  nn::Model model = nn::init_model<float>(spec, setup.init_seed);
  model.input_norm = sets.input_norm;
  model.target_norm = sets.target_norm;
  nn::train(model, sets.train.features, sets.train.targets, sets.valid.features, sets.valid.targets, setup.options);

  const Index rows = sets.train.features.rows();
  const Index count = std::clamp<Index>(setup.calibration_frames, 1, rows);
  RowMatrix<float> calibration(count, sets.train.features.cols());
  for (Index i = 0; i < count; ++i) calibration.row(i) = sets.train.features.row(i * rows / count);
  nn::calibrate_activations(model, calibration);
  return model;
}

double vad_frame_error(const nn::Model& model, const dsp::TaskData& data) {
  const RowMatrix<float> out = nn::forward(model, data.features, nn::Mode::quantized).output;
  return frame_error(threshold_decisions(out), threshold_decisions(data.targets));
}

double regression_loss(const nn::Model& model, const dsp::TaskData& data) {
  return nn::squared_error(nn::forward(model, data.features, nn::Mode::quantized).output, data.targets);
}

double test_metric(const nn::Model& model, const TaskSets& sets, const dsp::DatasetManifest& manifest,
                   const dsp::StftParams& params) {
  if (model.spec.task == nn::Task::vad) return vad_frame_error(model, sets.test);
  return enhancement_eval(manifest, dsp::Split::test, params, model_estimator(model)).improvement_db;
}

DseReport explore_grid(const dsp::DatasetManifest& manifest, const TaskSets& sets, const dsp::StftParams& params,
                       const std::vector<BitPair>& grid, const TrainSetup& base, const ExploreOptions& options) {
  const auto evaluate = [&](int w, int n) {
    TrainSetup setup = base;
    setup.weight_bits = w;
    setup.neuron_bits = n;
    const nn::Model model = train_task_model(sets, setup);
    CellOutcome outcome;
    outcome.task_metric = test_metric(model, sets, manifest, params);
    if (options.measure_speedup)
      outcome.measured_speedup =
          bench_gemm(options.bench_m, options.bench_n, options.bench_p, w, n, options.bench_repetitions).speedup;
    if (options.on_cell) options.on_cell(w, n, model);
    return outcome;
  };
  return dse_grid(grid, nn::to_string(sets.task), evaluate, options.basis);
}

}  // namespace bitwave::eval
