// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "bitwave/eval/bench.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <stdexcept>
#include <vector>

#include "bitwave/core/gemm.hpp"
#include "bitwave/core/parallel.hpp"
#include "bitwave/core/quant.hpp"
#include "bitwave/eval/metrics.hpp"

namespace bitwave::eval {

namespace {

RowMatrix<float> random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<float> dist;
  RowMatrix<float> m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

template <typename F>
std::vector<double> time_runs(int repetitions, F&& run) {
  using clock = std::chrono::steady_clock;
  run();
  std::vector<double> seconds;
  for (int r = 0; r < repetitions; ++r) {
    const auto start = clock::now();
    run();
    seconds.push_back(std::chrono::duration<double>(clock::now() - start).count());
  }
  std::sort(seconds.begin(), seconds.end());
  return seconds;
}

double median(const std::vector<double>& sorted) {
  const std::size_t n = sorted.size();
  return n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

double iqr(const std::vector<double>& sorted) {
  const std::size_t n = sorted.size();
  return sorted[(3 * n) / 4] - sorted[n / 4];
}

}  // namespace

BenchResult bench_gemm(Index m, Index n, Index p, int weight_bits, int neuron_bits, int repetitions,
                       std::uint64_t seed) {
  if (m < 1 || n < 1 || p < 1) throw std::invalid_argument("bench_gemm: dimensions must be >= 1");
  if (repetitions < 10) throw std::invalid_argument("bench_gemm: at least 10 repetitions required");
  if (weight_bits < 1 || neuron_bits < 1) throw std::invalid_argument("bench_gemm: bit widths must be >= 1");

  const ScopedWorkerLimit serial(1);
  std::mt19937_64 rng(seed);
  const RowMatrix<float> x = random_matrix(m, n, rng).cwiseAbs();
  const RowMatrix<float> w = random_matrix(p, n, rng);
  const RowMatrix<float> wt = w.transpose();

  BenchResult result;
  result.m = m;
  result.n = n;
  result.p = p;
  result.weight_bits = weight_bits;
  result.neuron_bits = neuron_bits;
  result.repetitions = repetitions;
  result.ideal_speedup = ideal_speedup(weight_bits, neuron_bits);

  RowMatrix<float> sink;
  const auto dense = time_runs(repetitions, [&] { sink = gemm_dense(x, wt); });

  std::vector<double> quantized;
  if (weight_bits >= 32 || neuron_bits >= 32) {
    quantized = time_runs(repetitions, [&] { sink = gemm_dense(x, wt); });
  } else {
    const std::vector<float> scales = residual_scales(x, neuron_bits);
    const PackedWeights<float> packed(quantize_matrix(w, weight_bits));
    quantized = time_runs(repetitions, [&] {
      sink = gemm_packed(quantize_with_scales(x, std::span<const float>(scales)), packed);
    });
  }
  result.dense_seconds = median(dense);
  result.quantized_seconds = median(quantized);
  result.dense_spread = iqr(dense);
  result.quantized_spread = iqr(quantized);
  result.speedup = result.dense_seconds / result.quantized_seconds;
  return result;
}

}  // namespace bitwave::eval
