// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

// Spectral-mapping enhancement scored by time-domain SNR.

#pragma once

#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "bitwave/dsp/dataset.hpp"
#include "bitwave/dsp/stft.hpp"
#include "bitwave/nn/model.hpp"

namespace bitwave::eval {

/// Enhancement models predict the log-power gain log|S|^2 - log|Y|^2 of the
/// reference S over the mixture Y, clipped to [log(10^(-20/10)), 0].
inline constexpr double kGainFloorDb = -20.0;
inline constexpr double kMinLogGain = kGainFloorDb / 10.0 * std::numbers::ln10;

/// Clipped log-power gain of `clean` over `noisy`, both log-power.
template <typename Scalar>
RowMatrix<Scalar> log_gain(const RowMatrix<Scalar>& clean, const RowMatrix<Scalar>& noisy) {
  return (clean - noisy).cwiseMax(static_cast<Scalar>(kMinLogGain)).cwiseMin(Scalar(0));
}

/// Predicts the clean log-power spectrogram (frames x bins) of one mixture.
using LogPowerEstimator = std::function<RowMatrix<double>(const dsp::Spectrogram& noisy, const dsp::ManifestEntry& entry)>;

struct EnhanceFileResult {
  std::string id;
  double input_snr_db = 0.0;
  double output_snr_db = 0.0;
};

struct EnhanceReport {
  std::vector<EnhanceFileResult> files;
  double mean_input_snr_db = 0.0;
  double mean_output_snr_db = 0.0;
  /// mean_output_snr_db - mean_input_snr_db.
  double improvement_db = 0.0;
};

/// For each entry of `split`: STFT of the mixture, estimated log-power
/// combined with the mixture phase, inverse STFT, SNR against the reference
/// over the reconstructed span. The input SNR uses the same span. Throws
/// DataError when a reference does not align with its mixture.
EnhanceReport enhancement_eval(const dsp::DatasetManifest& manifest, dsp::Split split, const dsp::StftParams& params,
                               const LogPowerEstimator& estimator);

/// Returns the mixture's own log-power.
LogPowerEstimator identity_estimator();

/// Returns the log-power of the entry's reference signal.
LogPowerEstimator oracle_estimator(const dsp::DatasetManifest& manifest, const dsp::StftParams& params);

/// Runs `model` in quantized mode on normalized features, maps its output
/// back through the model's target normalization and adds the clipped gain
/// to the mixture's log-power.
LogPowerEstimator model_estimator(const nn::Model& model);

}  // namespace bitwave::eval
