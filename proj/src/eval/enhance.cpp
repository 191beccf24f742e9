// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "bitwave/eval/enhance.hpp"

#include <cmath>
#include <stdexcept>

#include "bitwave/core/error.hpp"
#include "bitwave/dsp/features.hpp"
#include "bitwave/eval/metrics.hpp"

namespace bitwave::eval {

EnhanceReport enhancement_eval(const dsp::DatasetManifest& manifest, dsp::Split split, const dsp::StftParams& params,
                               const LogPowerEstimator& estimator) {
  const auto entries = manifest.split(split);
  if (entries.empty()) throw DataError("manifest has no " + dsp::to_string(split) + " entries");
  EnhanceReport report;
  for (const dsp::ManifestEntry* e : entries) {
    const dsp::AudioClip noisy = dsp::read_wav(manifest.resolve(e->noisy_path), params.sample_rate);
    const dsp::AudioClip reference = dsp::read_wav(manifest.resolve(e->reference_path), params.sample_rate);
    if (reference.size() != noisy.size())
      throw DataError("entry " + e->id + ": reference has " + std::to_string(reference.size()) +
                      " samples, mixture has " + std::to_string(noisy.size()));
    const dsp::Spectrogram spec = dsp::stft(noisy, params);
    const RowMatrix<double> log_power = estimator(spec, *e);
    if (log_power.rows() != spec.frames() || log_power.cols() != spec.bins())
      throw std::invalid_argument("estimator output shape does not match the spectrogram");
    const RowMatrix<double> magnitude = (log_power.array().exp() - dsp::kLogFloor).cwiseMax(0.0).sqrt().matrix();
    const dsp::AudioClip enhanced = dsp::istft(dsp::with_phase(magnitude, spec), params);

    // Skip the half frames at either end, which only one window covers.
    const Index lo = params.frame / 2;
    const Index count = enhanced.size() - params.frame;
    const Eigen::VectorXd ref = reference.samples.segment(lo, count);
    EnhanceFileResult r;
    r.id = e->id;
    r.input_snr_db = snr_db(ref, noisy.samples.segment(lo, count));
    r.output_snr_db = snr_db(ref, enhanced.samples.segment(lo, count));
    report.files.push_back(r);
    report.mean_input_snr_db += r.input_snr_db;
    report.mean_output_snr_db += r.output_snr_db;
  }
  const auto n = static_cast<double>(report.files.size());
  report.mean_input_snr_db /= n;
  report.mean_output_snr_db /= n;
  report.improvement_db = report.mean_output_snr_db - report.mean_input_snr_db;
  return report;
}

LogPowerEstimator identity_estimator() {
  return [](const dsp::Spectrogram& noisy, const dsp::ManifestEntry&) { return dsp::log_power(noisy); };
}

LogPowerEstimator oracle_estimator(const dsp::DatasetManifest& manifest, const dsp::StftParams& params) {
  return [&manifest, params](const dsp::Spectrogram&, const dsp::ManifestEntry& e) {
    return dsp::log_power(dsp::stft(dsp::read_wav(manifest.resolve(e.reference_path), params.sample_rate), params));
  };
}

LogPowerEstimator model_estimator(const nn::Model& model) {
  if (model.spec.task != nn::Task::enhance) throw std::invalid_argument("model is not an enhancement model");
  return [&model](const dsp::Spectrogram& noisy, const dsp::ManifestEntry&) {
    const dsp::FrameFeatures f = dsp::features(noisy, model.input_norm, model.spec.context_frames);
    RowMatrix<float> gain = nn::forward(model, f.values, nn::Mode::quantized).output;
    if (!model.target_norm.empty()) invert_normalization(gain, model.target_norm);
    const RowMatrix<double> g = gain.cast<double>().cwiseMax(kMinLogGain).cwiseMin(0.0);
    return RowMatrix<double>(dsp::log_power(noisy) + g);
  };
}

}  // namespace bitwave::eval
