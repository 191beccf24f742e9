// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "bitwave/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bitwave::eval {

double frame_error(std::span<const int> predicted, std::span<const int> labels) {
  if (predicted.size() != labels.size()) throw std::invalid_argument("frame_error: prediction and label counts differ");
  if (labels.empty()) throw std::invalid_argument("frame_error: no frames");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) wrong += (predicted[i] != 0) != (labels[i] != 0);
  return static_cast<double>(wrong) / static_cast<double>(labels.size());
}

std::vector<int> threshold_decisions(const RowMatrix<float>& scores, float threshold, Index column) {
  std::vector<int> out(static_cast<std::size_t>(scores.rows()));
  for (Index r = 0; r < scores.rows(); ++r) out[static_cast<std::size_t>(r)] = scores(r, column) >= threshold ? 1 : 0;
  return out;
}

double snr_db(const Eigen::VectorXd& clean, const Eigen::VectorXd& estimate) {
  if (clean.size() != estimate.size()) throw std::invalid_argument("snr_db: signal lengths differ");
  const double signal = clean.squaredNorm();
  if (signal == 0.0) throw std::invalid_argument("snr_db: reference signal is all zeros");
  const double residual = (estimate - clean).squaredNorm();
  if (residual == 0.0) return kPerfectSnr;
  return 10.0 * std::log10(signal / residual);
}

double ideal_speedup(int weight_bits, int neuron_bits) {
  if (weight_bits < 1 || neuron_bits < 1) throw std::invalid_argument("bit widths must be >= 1");
  return std::max(1.0, 128.0 / (3.0 * weight_bits * neuron_bits));
}

}  // namespace bitwave::eval
