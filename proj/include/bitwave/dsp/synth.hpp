// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

// Signal generators, reverberation, noise mixing and reference labels.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bitwave/dsp/audio.hpp"
#include "bitwave/dsp/stft.hpp"

namespace bitwave::dsp {

struct MixResult {
  AudioClip noisy;
  /// Gain g applied to the noise before peak normalization.
  double noise_gain = 0.0;
  /// Factor applied to the whole mixture to keep |sample| <= 1.
  double peak_gain = 1.0;
  /// The clean component of `noisy` (clean * peak_gain).
  AudioClip clean;
  /// The noise component of `noisy` (g * noise * peak_gain).
  AudioClip noise;
};

/// Mixes clean speech with noise at `snr_db`, measured over the whole clip:
/// g = sqrt(P_clean / (P_noise 10^(snr_db / 10))). Noise shorter than the
/// clean clip is tiled. snr_db = +inf returns the clean clip. Throws
/// DataError for a silent clean or noise clip or mismatched rates.
MixResult mix_at_snr(const AudioClip& clean, const AudioClip& noise, double snr_db);

/// Unit impulse followed by white noise decaying 60 dB over rt60_ms. The
/// response is 1.2 * rt60 long.
Eigen::VectorXd synth_rir(double rt60_ms, std::uint64_t seed, int sample_rate = kDefaultSampleRate);

/// Full linear convolution via FFT; length clip + rir - 1.
AudioClip apply_rir(const AudioClip& clip, const Eigen::VectorXd& rir);

/// 1 where the frame energy is within `threshold_db` of the loudest frame,
/// on the stft frame grid. A silent clip is all zeros.
std::vector<int> vad_labels(const AudioClip& clean, const StftParams& params, double threshold_db = 40.0);

struct SpeechOptions {
  double seconds = 3.0;
  int sample_rate = kDefaultSampleRate;
  /// Peak amplitude before any mixing.
  double peak = 0.5;
};

/// Voiced syllables made of glottal pulse trains through formant resonators,
/// with occasional fricatives, grouped into words separated by silent pauses.
AudioClip synth_speech(const SpeechOptions& options, std::uint64_t seed);

enum class NoiseKind { white, pink, brown, babble, hum, modulated };

std::string to_string(NoiseKind kind);
NoiseKind parse_noise_kind(const std::string& name);
const std::vector<NoiseKind>& all_noise_kinds();

/// Stationary or slowly varying noise with RMS 0.1.
AudioClip synth_noise(NoiseKind kind, Index samples, std::uint64_t seed, int sample_rate = kDefaultSampleRate);

}  // namespace bitwave::dsp
