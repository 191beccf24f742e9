// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "bitwave/nn/model.hpp"

namespace bitwave::nn {

struct CostEstimate {
  /// Millions of operations per frame, counting a multiply and an accumulate
  /// per weight.
  double mops_per_frame = 0.0;
  /// Weights at `weight_bits` each plus 32-bit biases.
  std::uint64_t memory_bytes = 0;
};

/// Compute and memory of one inference frame with weights stored at
/// `weight_bits`. Neuron bits do not change the operation count under this
/// accounting; they are accepted for symmetry with the speedup model.
CostEstimate model_cost(const ModelSpec& spec, int weight_bits, int neuron_bits);

}  // namespace bitwave::nn
