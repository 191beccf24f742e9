// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "bitwave/dsp/features.hpp"

#include <cmath>

namespace bitwave::dsp {

RowMatrix<double> log_power(const Spectrogram& spec) {
  return (spec.values.cwiseAbs2().array() + kLogFloor).log().matrix();
}

FrameFeatures features(const Spectrogram& spec, int context) {
  if (spec.frames() == 0) throw std::invalid_argument("features: empty spectrogram");
  FrameFeatures f;
  f.context = context;
  f.bins = static_cast<int>(spec.bins());
  f.values = stack_context(RowMatrix<float>(log_power(spec).cast<float>()), context);
  return f;
}

FrameFeatures features(const Spectrogram& spec, const Normalization& norm, int context) {
  FrameFeatures f = features(spec, context);
  apply_normalization(f.values, norm);
  f.norm = norm;
  return f;
}

}  // namespace bitwave::dsp
