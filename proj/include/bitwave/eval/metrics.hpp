// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bitwave/core/types.hpp"

namespace bitwave::eval {

/// Fraction of frames where `predicted` and `labels` disagree. Throws
/// std::invalid_argument on empty or unequal inputs.
double frame_error(std::span<const int> predicted, std::span<const int> labels);

/// 1 where column `column` of `scores` is at least `threshold`.
std::vector<int> threshold_decisions(const RowMatrix<float>& scores, float threshold = 0.5f, Index column = 0);

/// Returned by snr_db when the estimate equals the reference exactly.
inline constexpr double kPerfectSnr = std::numeric_limits<double>::infinity();

/// 10 log10(sum clean^2 / sum (estimate - clean)^2). Throws
/// std::invalid_argument on unequal lengths or an all-zero reference.
double snr_db(const Eigen::VectorXd& clean, const Eigen::VectorXd& estimate);

/// max(1, 128 / (3 W N)) for W, N >= 1.
double ideal_speedup(int weight_bits, int neuron_bits);

}  // namespace bitwave::eval
