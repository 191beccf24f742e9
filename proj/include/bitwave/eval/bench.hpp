// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

// Wall-clock comparison of the bit-plane kernel with the dense float GEMM.

#pragma once

#include <cstdint>

#include "bitwave/core/types.hpp"

namespace bitwave::eval {

struct BenchResult {
  /// Activations m x n, weights p x n.
  Index m = 0, n = 0, p = 0;
  int weight_bits = 32;
  int neuron_bits = 32;
  int repetitions = 0;
  /// Median seconds per product. The quantized time includes packing the activations.
  double quantized_seconds = 0.0;
  double dense_seconds = 0.0;
  /// dense_seconds / quantized_seconds.
  double speedup = 0.0;
  /// Interquartile range of the per-repetition times.
  double quantized_spread = 0.0;
  double dense_spread = 0.0;
  double ideal_speedup = 1.0;
};

/// Times both paths single-threaded after one warm-up run each. The
/// quantized path packs float activations with frozen scales and multiplies
/// them with pre-packed weights; a width of 32 on either side runs the dense
/// product instead. Throws std::invalid_argument for dims < 1 or repetitions < 10.
BenchResult bench_gemm(Index m, Index n, Index p, int weight_bits, int neuron_bits, int repetitions = 10,
                       std::uint64_t seed = 1);

}  // namespace bitwave::eval
