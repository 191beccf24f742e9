// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

namespace bitwave {

using Index = Eigen::Index;

/// Row-major dense matrix. Rows are samples (frames) or output neurons,
/// which keeps each row contiguous for bit packing.
template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using DenseMatrix = RowMatrix<float>;

}  // namespace bitwave
