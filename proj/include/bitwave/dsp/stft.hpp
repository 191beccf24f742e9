// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

// Short-time Fourier transform with a periodic Hann window.

#pragma once

#include <complex>

#include <Eigen/Dense>

#include "bitwave/core/types.hpp"
#include "bitwave/dsp/audio.hpp"

namespace bitwave::dsp {

struct StftParams {
  int sample_rate = kDefaultSampleRate;
  int frame = 256;
  int hop = 128;
  int fft_size = 256;

  int bins() const { return fft_size / 2 + 1; }

  /// Frame of `frame_ms` milliseconds, hop of (1 - overlap) frames, FFT size
  /// the next power of two.
  static StftParams from_ms(int sample_rate, double frame_ms = 16.0, double overlap = 0.5);

  /// Throws std::invalid_argument on non-positive sizes, hop > frame or fft_size < frame.
  void validate() const;

  friend bool operator==(const StftParams&, const StftParams&) = default;
};

using ComplexMatrix = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// frames x bins.
struct Spectrogram {
  ComplexMatrix values;
  StftParams params;

  Index frames() const { return values.rows(); }
  Index bins() const { return values.cols(); }
};

/// Periodic Hann window: 0.5 - 0.5 cos(2 pi n / length).
Eigen::VectorXd hann_window(int length);

/// floor((samples - frame) / hop) + 1, or 0 if the signal is shorter than a frame.
Index frame_count(Index samples, const StftParams& params);

/// Throws DataError if the clip is shorter than one frame or its rate differs from params.
Spectrogram stft(const AudioClip& clip, const StftParams& params);

/// Weighted overlap-add with a Hann synthesis window, normalized by the
/// summed squared window. Output length is (frames - 1) * hop + frame.
AudioClip istft(const Spectrogram& spec, const StftParams& params);

/// |X|.
RowMatrix<double> magnitude(const Spectrogram& spec);

/// Spectrogram with the given magnitude and the phase of `phase_source`.
Spectrogram with_phase(const RowMatrix<double>& magnitude, const Spectrogram& phase_source);

}  // namespace bitwave::dsp
