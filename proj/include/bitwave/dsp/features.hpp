// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

// Log-power frames stacked with their neighbours.

#pragma once

#include <algorithm>
#include <stdexcept>

#include "bitwave/core/normalization.hpp"
#include "bitwave/core/types.hpp"
#include "bitwave/dsp/stft.hpp"

namespace bitwave::dsp {

inline constexpr double kLogFloor = 1e-10;
inline constexpr int kDefaultContext = 7;

/// log(|X|^2 + 1e-10), frames x bins.
RowMatrix<double> log_power(const Spectrogram& spec);

/// Row t of the result is rows t - context/2 .. t + context/2 of `frames`
/// concatenated; rows outside the range repeat the first or last frame.
template <typename Scalar>
RowMatrix<Scalar> stack_context(const RowMatrix<Scalar>& frames, int context) {
  if (context < 1 || context % 2 == 0) throw std::invalid_argument("context must be a positive odd number");
  const Index n = frames.rows();
  const Index bins = frames.cols();
  const Index half = context / 2;
  RowMatrix<Scalar> out(n, bins * context);
  for (Index t = 0; t < n; ++t)
    for (Index k = 0; k < context; ++k) {
      const Index src = std::clamp<Index>(t + k - half, 0, n - 1);
      out.block(t, k * bins, 1, bins) = frames.row(src);
    }
  return out;
}

struct FrameFeatures {
  /// frames x (context * bins).
  RowMatrix<float> values;
  int context = kDefaultContext;
  int bins = 0;
  /// Statistics applied to `values`; empty when unnormalized.
  Normalization norm;

  Index frames() const { return values.rows(); }
  Index dim() const { return values.cols(); }
};

/// Stacked log-power features, unnormalized.
FrameFeatures features(const Spectrogram& spec, int context = kDefaultContext);

/// Stacked log-power features normalized with `norm`.
FrameFeatures features(const Spectrogram& spec, const Normalization& norm, int context = kDefaultContext);

}  // namespace bitwave::dsp
