// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bitwave/core/types.hpp"

namespace bitwave {

/// Per-dimension affine normalization (x - mean) / stddev.
struct Normalization {
  std::vector<float> mean;
  std::vector<float> stddev;

  bool empty() const { return mean.empty(); }
  std::size_t size() const { return mean.size(); }

  friend bool operator==(const Normalization&, const Normalization&) = default;
};

/// Column statistics of `rows`. Constant columns get stddev 1.
template <typename Scalar>
Normalization fit_normalization(const RowMatrix<Scalar>& rows) {
  if (rows.rows() == 0) throw std::invalid_argument("fit_normalization: no rows");
  Normalization norm;
  const Index n = rows.rows();
  norm.mean.resize(static_cast<std::size_t>(rows.cols()));
  norm.stddev.resize(static_cast<std::size_t>(rows.cols()));
  for (Index c = 0; c < rows.cols(); ++c) {
    double sum = 0.0;
    for (Index r = 0; r < n; ++r) sum += static_cast<double>(rows(r, c));
    const double mean = sum / static_cast<double>(n);
    double sq = 0.0;
    for (Index r = 0; r < n; ++r) {
      const double d = static_cast<double>(rows(r, c)) - mean;
      sq += d * d;
    }
    const double sd = std::sqrt(sq / static_cast<double>(n));
    norm.mean[static_cast<std::size_t>(c)] = static_cast<float>(mean);
    norm.stddev[static_cast<std::size_t>(c)] = sd > 1e-12 ? static_cast<float>(sd) : 1.0f;
  }
  return norm;
}

template <typename Scalar>
void apply_normalization(RowMatrix<Scalar>& rows, const Normalization& norm) {
  if (norm.size() != static_cast<std::size_t>(rows.cols()))
    throw std::invalid_argument("normalization dimension does not match data");
  for (Index c = 0; c < rows.cols(); ++c) {
    const auto mean = static_cast<Scalar>(norm.mean[static_cast<std::size_t>(c)]);
    const auto inv = Scalar(1) / static_cast<Scalar>(norm.stddev[static_cast<std::size_t>(c)]);
    rows.col(c) = (rows.col(c).array() - mean) * inv;
  }
}

template <typename Scalar>
void invert_normalization(RowMatrix<Scalar>& rows, const Normalization& norm) {
  if (norm.size() != static_cast<std::size_t>(rows.cols()))
    throw std::invalid_argument("normalization dimension does not match data");
  for (Index c = 0; c < rows.cols(); ++c)
    rows.col(c) = rows.col(c).array() * static_cast<Scalar>(norm.stddev[static_cast<std::size_t>(c)]) +
                  static_cast<Scalar>(norm.mean[static_cast<std::size_t>(c)]);
}

}  // namespace bitwave
