// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

// Residual-mean multi-bit quantization.
//
// A tensor x is approximated by K sign planes s_k and K scales a_k:
//
//   r_1 = x
//   a_k = mean(|r_k|),  s_k = sign(r_k) with sign(0) = +1,  r_{k+1} = r_k - a_k * s_k
//
// and x ~ sum_k a_k * s_k. The scales are shared by the whole tensor, so a
// product of two quantized tensors factors into integer dot products of sign
// planes (see gemm.hpp).

#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bitwave/core/bitplane.hpp"
#include "bitwave/core/types.hpp"

namespace bitwave {

template <typename Scalar>
struct QuantizedVector {
  std::vector<BitPlane> planes;
  std::vector<Scalar> scales;

  std::size_t size() const { return planes.empty() ? 0 : planes.front().size(); }
  int bits() const { return static_cast<int>(scales.size()); }
};

template <typename Scalar>
struct QuantizedTensor {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Scalar> scales;
  std::vector<BitMatrix> planes;

  int bits() const { return static_cast<int>(scales.size()); }

  friend bool operator==(const QuantizedTensor&, const QuantizedTensor&) = default;
};

namespace detail {

template <typename Scalar>
void check_values(const Scalar* data, std::size_t n) {
  if (n == 0) throw std::invalid_argument("empty tensor");
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(data[i])) throw std::invalid_argument("non-finite value at index " + std::to_string(i));
}

inline void check_bits(int bits) {
  if (bits < 1) throw std::invalid_argument("bit width must be >= 1, got " + std::to_string(bits));
}

// Runs the recurrence in place over `residual`, calling sink(level, index,
// positive) for every emitted sign. Returns the K scales.
template <typename Scalar, typename Sink>
std::vector<Scalar> residual_recurrence(std::span<Scalar> residual, int bits, Sink&& sink) {
  std::vector<Scalar> scales(static_cast<std::size_t>(bits));
  const std::size_t n = residual.size();
  for (int k = 0; k < bits; ++k) {
    double sum = 0.0;
    for (Scalar r : residual) sum += std::abs(static_cast<double>(r));
    const Scalar alpha = static_cast<Scalar>(sum / static_cast<double>(n));
    scales[static_cast<std::size_t>(k)] = alpha;
    for (std::size_t i = 0; i < n; ++i) {
      const bool positive = residual[i] >= Scalar(0);
      sink(k, i, positive);
      residual[i] -= positive ? alpha : -alpha;
    }
  }
  return scales;
}

template <typename Derived>
std::vector<typename Derived::Scalar> flatten_row_major(const Eigen::DenseBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  std::vector<Scalar> out(static_cast<std::size_t>(m.size()));
  std::size_t i = 0;
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) out[i++] = m(r, c);
  return out;
}

}  // namespace detail

/// Quantizes a vector (or any dense expression, flattened row-major) into
/// `bits` sign planes. Throws std::invalid_argument on empty or non-finite input.
template <typename Derived>
QuantizedVector<typename Derived::Scalar> quantize_residual(const Eigen::DenseBase<Derived>& values, int bits) {
  using Scalar = typename Derived::Scalar;
  detail::check_bits(bits);
  std::vector<Scalar> residual = detail::flatten_row_major(values);
  detail::check_values(residual.data(), residual.size());

  QuantizedVector<Scalar> q;
  q.planes.assign(static_cast<std::size_t>(bits), BitPlane(residual.size()));
  q.scales = detail::residual_recurrence<Scalar>(
      residual, bits, [&](int k, std::size_t i, bool positive) { q.planes[k].set_positive(i, positive); });
  return q;
}

template <typename Scalar>
Vector<Scalar> dequantize(const QuantizedVector<Scalar>& q) {
  if (q.planes.size() != q.scales.size()) throw std::invalid_argument("dequantize: plane/scale count mismatch");
  Vector<Scalar> out = Vector<Scalar>::Zero(static_cast<Index>(q.size()));
  for (std::size_t k = 0; k < q.planes.size(); ++k) {
    if (q.planes[k].size() != q.size()) throw std::invalid_argument("dequantize: ragged planes");
    for (std::size_t i = 0; i < q.size(); ++i) out[static_cast<Index>(i)] += q.scales[k] * Scalar(q.planes[k].sign(i));
  }
  return out;
}

/// Whole-tensor quantization of a matrix; planes are packed row-major.
template <typename Derived>
QuantizedTensor<typename Derived::Scalar> quantize_matrix(const Eigen::DenseBase<Derived>& m, int bits) {
  using Scalar = typename Derived::Scalar;
  detail::check_bits(bits);
  if (m.rows() < 1 || m.cols() < 1) throw std::invalid_argument("empty tensor");
  std::vector<Scalar> residual = detail::flatten_row_major(m);
  detail::check_values(residual.data(), residual.size());

  QuantizedTensor<Scalar> q;
  q.rows = static_cast<std::size_t>(m.rows());
  q.cols = static_cast<std::size_t>(m.cols());
  q.planes.assign(static_cast<std::size_t>(bits), BitMatrix(q.rows, q.cols));
  const std::size_t cols = q.cols;
  q.scales = detail::residual_recurrence<Scalar>(residual, bits, [&](int k, std::size_t i, bool positive) {
    if (positive) q.planes[k].set_positive(i / cols, i % cols, true);
  });
  return q;
}

/// The scales alone, without materializing planes (calibration, training).
template <typename Derived>
std::vector<typename Derived::Scalar> residual_scales(const Eigen::DenseBase<Derived>& values, int bits) {
  using Scalar = typename Derived::Scalar;
  detail::check_bits(bits);
  std::vector<Scalar> residual = detail::flatten_row_major(values);
  detail::check_values(residual.data(), residual.size());
  return detail::residual_recurrence<Scalar>(residual, bits, [](int, std::size_t, bool) {});
}

/// Replaces `m` by its K-bit approximation sum_k a_k s_k with scales computed
/// from `m` itself. Returns the scales.
template <typename Scalar>
std::vector<Scalar> fake_quantize(RowMatrix<Scalar>& m, int bits) {
  detail::check_bits(bits);
  const std::size_t n = static_cast<std::size_t>(m.size());
  detail::check_values(m.data(), n);
  std::vector<Scalar> approx(n, Scalar(0));
  std::vector<Scalar> scales(static_cast<std::size_t>(bits));
  Scalar* r = m.data();
  for (int k = 0; k < bits; ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += std::abs(static_cast<double>(r[i]));
    const Scalar alpha = static_cast<Scalar>(sum / static_cast<double>(n));
    scales[static_cast<std::size_t>(k)] = alpha;
    for (std::size_t i = 0; i < n; ++i) {
      const Scalar step = r[i] >= Scalar(0) ? alpha : -alpha;
      r[i] -= step;
      approx[i] += step;
    }
  }
  std::copy(approx.begin(), approx.end(), r);
  return scales;
}

/// Replaces `m` by its approximation under frozen scales: the same recurrence
/// with a_k fixed instead of recomputed.
template <typename Scalar>
void fake_quantize_frozen(RowMatrix<Scalar>& m, std::span<const Scalar> scales) {
  Scalar* r = m.data();
  const std::size_t n = static_cast<std::size_t>(m.size());
  for (std::size_t i = 0; i < n; ++i) {
    Scalar residual = r[i];
    Scalar approx = 0;
    for (Scalar alpha : scales) {
      const Scalar step = residual >= Scalar(0) ? alpha : -alpha;
      residual -= step;
      approx += step;
    }
    r[i] = approx;
  }
}

/// Packs `m` into planes under frozen scales. Used for activations at
/// inference time, where scales come from calibration.
template <typename Scalar>
QuantizedTensor<Scalar> quantize_with_scales(const RowMatrix<Scalar>& m, std::span<const Scalar> scales) {
  if (scales.empty()) throw std::invalid_argument("quantize_with_scales: no scales");
  QuantizedTensor<Scalar> q;
  q.rows = static_cast<std::size_t>(m.rows());
  q.cols = static_cast<std::size_t>(m.cols());
  q.scales.assign(scales.begin(), scales.end());
  q.planes.assign(scales.size(), BitMatrix(q.rows, q.cols));
  for (std::size_t r = 0; r < q.rows; ++r) {
    for (std::size_t c = 0; c < q.cols; ++c) {
      Scalar residual = m(static_cast<Index>(r), static_cast<Index>(c));
      for (std::size_t k = 0; k < scales.size(); ++k) {
        const bool positive = residual >= Scalar(0);
        if (positive) q.planes[k].set_positive(r, c, true);
        residual -= positive ? scales[k] : -scales[k];
      }
    }
  }
  return q;
}

/// AVX-512 packing when compiled for it; same result as the template.
QuantizedTensor<float> quantize_with_scales(const RowMatrix<float>& m, std::span<const float> scales);

template <typename Scalar>
RowMatrix<Scalar> dequantize(const QuantizedTensor<Scalar>& q) {
  if (q.planes.size() != q.scales.size()) throw std::invalid_argument("dequantize: plane/scale count mismatch");
  RowMatrix<Scalar> out = RowMatrix<Scalar>::Zero(static_cast<Index>(q.rows), static_cast<Index>(q.cols));
  for (std::size_t k = 0; k < q.planes.size(); ++k)
    for (std::size_t r = 0; r < q.rows; ++r)
      for (std::size_t c = 0; c < q.cols; ++c)
        out(static_cast<Index>(r), static_cast<Index>(c)) += q.scales[k] * Scalar(q.planes[k].sign(r, c));
  return out;
}

/// ||x - dequantize(quantize_residual(x, bits))||_2
template <typename Derived>
double quantization_error(const Eigen::DenseBase<Derived>& values, int bits) {
  using Scalar = typename Derived::Scalar;
  const auto q = quantize_residual(values, bits);
  const Vector<Scalar> approx = dequantize(q);
  const std::vector<Scalar> flat = detail::flatten_row_major(values);
  double sq = 0.0;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    const double d = static_cast<double>(flat[i]) - static_cast<double>(approx[static_cast<Index>(i)]);
    sq += d * d;
  }
  return std::sqrt(sq);
}

// Binary layout (all little-endian):
//   u32 rows, u32 cols, u32 bits, bits x f64 scales,
//   bits planes of rows x ceil(cols/64) u64 words.
template <typename Scalar>
void write_quantized(std::ostream& out, const QuantizedTensor<Scalar>& q);
template <typename Scalar>
QuantizedTensor<Scalar> read_quantized(std::istream& in);

}  // namespace bitwave
