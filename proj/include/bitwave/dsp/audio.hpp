// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include <Eigen/Dense>

#include "bitwave/core/types.hpp"

namespace bitwave::dsp {

inline constexpr int kDefaultSampleRate = 16000;

/// Mono audio with samples nominally in [-1, 1].
struct AudioClip {
  Eigen::VectorXd samples;
  int sample_rate = kDefaultSampleRate;

  Index size() const { return samples.size(); }
  double seconds() const { return static_cast<double>(samples.size()) / sample_rate; }
};

/// Mean of squared samples; 0 for an empty signal.
inline double mean_power(const Eigen::VectorXd& x) {
  return x.size() == 0 ? 0.0 : x.squaredNorm() / static_cast<double>(x.size());
}

/// Reads a 16-bit PCM mono RIFF/WAVE file. Throws DataError on anything
/// else, or when the rate differs from `expected_rate` (pass 0 to accept any).
AudioClip read_wav(const std::filesystem::path& path, int expected_rate = kDefaultSampleRate);

/// Writes 16-bit PCM mono; samples are clipped to [-1, 1).
void write_wav(const std::filesystem::path& path, const AudioClip& clip);

}  // namespace bitwave::dsp
