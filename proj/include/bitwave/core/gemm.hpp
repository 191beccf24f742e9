// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

// Dense and bit-plane matrix products.
//
// For X = sum_u a_u S_u (m x n, N planes) and W = sum_v b_v T_v (p x n,
// W planes) the product X W^T is
//
//   out(i, j) = sum_u sum_v a_u b_v (n - 2 popcount(S_u[i] ^ T_v[j]))
//
// which needs one XOR, one popcount and one add per 64 elements and plane pair.

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bitwave/core/bitplane.hpp"
#include "bitwave/core/parallel.hpp"
#include "bitwave/core/quant.hpp"
#include "bitwave/core/types.hpp"

namespace bitwave {

/// Plain matrix product a * b. Accepts any Eigen expression, including
/// transposes, so `gemm_dense(x, w.transpose())` is the layer product.
template <typename DerivedA, typename DerivedB>
RowMatrix<typename DerivedA::Scalar> gemm_dense(const Eigen::MatrixBase<DerivedA>& a,
                                                const Eigen::MatrixBase<DerivedB>& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("gemm_dense: inner dimensions differ (" + std::to_string(a.cols()) + " vs " +
                                std::to_string(b.rows()) + ")");
  RowMatrix<typename DerivedA::Scalar> out(a.rows(), b.cols());
  out.noalias() = a * b;
  return out;
}

namespace detail {

inline constexpr std::size_t kLanes = 8;      // weight rows per interleaved block
inline constexpr std::size_t kRowTile = 4;    // activation rows per micro tile
inline constexpr std::size_t kBlockTile = 2;  // weight blocks per micro tile
inline constexpr std::size_t kColTile = kLanes * kBlockTile;

/// Mismatch counts popcount(x_r ^ w_j) for kRowTile activation rows against
/// kBlockTile interleaved weight blocks starting at `blocks`. Writes a
/// kRowTile x kColTile row-major tile of counts.
void mismatch_tile(const Word* const* x_rows, const Word* blocks, std::size_t words, std::int64_t* counts);

}  // namespace detail

/// Sign planes of a weight matrix re-laid out for the popcount kernel: rows
/// are grouped into blocks of 8 and word k of the 8 rows is stored
/// contiguously. Built once per weight tensor, ahead of inference.
template <typename Scalar>
class PackedWeights {
 public:
  PackedWeights() = default;
  explicit PackedWeights(const QuantizedTensor<Scalar>& w)
      : rows_(w.rows), cols_(w.cols), words_(words_for(w.cols)), scales_(w.scales) {
    const std::size_t tiles = (rows_ + detail::kColTile - 1) / detail::kColTile;
    blocks_ = tiles * detail::kBlockTile;
    for (const BitMatrix& plane : w.planes) {
      if (plane.rows() != rows_ || plane.cols() != cols_) throw std::invalid_argument("PackedWeights: ragged planes");
      std::vector<Word> lanes(blocks_ * words_ * detail::kLanes, 0);
      for (std::size_t r = 0; r < rows_; ++r) {
        const std::size_t block = r / detail::kLanes;
        const std::size_t lane = r % detail::kLanes;
        const auto src = plane.row(r);
        for (std::size_t k = 0; k < words_; ++k) lanes[(block * words_ + k) * detail::kLanes + lane] = src[k];
      }
      planes_.push_back(std::move(lanes));
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t words() const { return words_; }
  std::size_t blocks() const { return blocks_; }
  int bits() const { return static_cast<int>(scales_.size()); }
  const std::vector<Scalar>& scales() const { return scales_; }
  const Word* block(int plane, std::size_t b) const {
    return planes_[static_cast<std::size_t>(plane)].data() + b * words_ * detail::kLanes;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t words_ = 0;
  std::size_t blocks_ = 0;
  std::vector<Scalar> scales_;
  std::vector<std::vector<Word>> planes_;
};

/// x (m x n, N planes) times w^T (w is p x n, W planes) -> m x p.
/// Plane pairs are the outer loop; each pair contributes a_u b_v (n - 2c)
/// where c is an exact 64-bit mismatch count.
template <typename Scalar>
RowMatrix<Scalar> gemm_packed(const QuantizedTensor<Scalar>& x, const PackedWeights<Scalar>& w) {
  if (x.cols != w.cols())
    throw std::invalid_argument("gemm_quantized: inner dimensions differ (" + std::to_string(x.cols) + " vs " +
                                std::to_string(w.cols()) + ")");
  const std::size_t m = x.rows;
  const std::size_t p = w.rows();
  const std::size_t words = w.words();
  const auto n = static_cast<std::int64_t>(x.cols);
  RowMatrix<Scalar> out = RowMatrix<Scalar>::Zero(static_cast<Index>(m), static_cast<Index>(p));
  const std::size_t row_tiles = (m + detail::kRowTile - 1) / detail::kRowTile;

  parallel_for(0, row_tiles, [&](std::size_t tile_begin, std::size_t tile_end) {
    std::int64_t counts[detail::kRowTile * detail::kColTile];
    for (int u = 0; u < x.bits(); ++u) {
      const BitMatrix& xs = x.planes[static_cast<std::size_t>(u)];
      for (int v = 0; v < w.bits(); ++v) {
        const double scale = static_cast<double>(x.scales[static_cast<std::size_t>(u)]) *
                             static_cast<double>(w.scales()[static_cast<std::size_t>(v)]);
        for (std::size_t t = tile_begin; t < tile_end; ++t) {
          const std::size_t i0 = t * detail::kRowTile;
          const std::size_t rows_here = std::min(detail::kRowTile, m - i0);
          const Word* x_rows[detail::kRowTile];
          for (std::size_t r = 0; r < detail::kRowTile; ++r)
            x_rows[r] = xs.row(i0 + std::min(r, rows_here - 1)).data();
          for (std::size_t b = 0; b < w.blocks(); b += detail::kBlockTile) {
            detail::mismatch_tile(x_rows, w.block(v, b), words, counts);
            const std::size_t j0 = b * detail::kLanes;
            const std::size_t cols_here = std::min(detail::kColTile, p - j0);
            for (std::size_t r = 0; r < rows_here; ++r) {
              Scalar* dst = out.data() + (i0 + r) * p + j0;
              const std::int64_t* c = counts + r * detail::kColTile;
              for (std::size_t j = 0; j < cols_here; ++j)
                dst[j] += static_cast<Scalar>(scale * static_cast<double>(n - 2 * c[j]));
            }
          }
        }
      }
    }
  });
  return out;
}

/// x (m x n) times wq^T (p x n) on sign planes. Equals
/// dequantize(x) * dequantize(wq)^T up to floating summation order.
template <typename Scalar>
RowMatrix<Scalar> gemm_quantized(const QuantizedTensor<Scalar>& x, const QuantizedTensor<Scalar>& wq) {
  if (x.cols != wq.cols)
    throw std::invalid_argument("gemm_quantized: inner dimensions differ (" + std::to_string(x.cols) + " vs " +
                                std::to_string(wq.cols) + ")");
  return gemm_packed(x, PackedWeights<Scalar>(wq));
}

}  // namespace bitwave
