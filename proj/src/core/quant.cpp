// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "bitwave/core/quant.hpp"

#include <istream>
#include <ostream>

#include "core/byteio.hpp"

#if defined(__AVX512F__)
#include <immintrin.h>
#endif

namespace bitwave {

QuantizedTensor<float> quantize_with_scales(const RowMatrix<float>& m, std::span<const float> scales) {
#if defined(__AVX512F__)
  constexpr std::size_t kMaxPlanes = 16;
  if (scales.empty() || scales.size() > kMaxPlanes) return quantize_with_scales<float>(m, scales);

  QuantizedTensor<float> q;
  q.rows = static_cast<std::size_t>(m.rows());
  q.cols = static_cast<std::size_t>(m.cols());
  q.scales.assign(scales.begin(), scales.end());
  q.planes.assign(scales.size(), BitMatrix(q.rows, q.cols));
  const std::size_t planes = scales.size();
  __m512 alpha[kMaxPlanes];
  for (std::size_t k = 0; k < planes; ++k) alpha[k] = _mm512_set1_ps(scales[k]);
  const __m512 zero = _mm512_setzero_ps();

  for (std::size_t r = 0; r < q.rows; ++r) {
    const float* row = m.data() + r * q.cols;
    const std::size_t words = words_for(q.cols);
    for (std::size_t w = 0; w < words; ++w) {
      Word bits[kMaxPlanes] = {};
      const std::size_t base = w * kWordBits;
      const std::size_t limit = std::min(kWordBits, q.cols - base);
      for (std::size_t e = 0; e < limit; e += 16) {
        const std::size_t count = std::min<std::size_t>(16, limit - e);
        const __mmask16 lanes = count == 16 ? __mmask16(0xFFFF) : static_cast<__mmask16>((1u << count) - 1);
        __m512 residual = _mm512_maskz_loadu_ps(lanes, row + base + e);
        for (std::size_t k = 0; k < planes; ++k) {
          const __mmask16 positive = _mm512_mask_cmp_ps_mask(lanes, residual, zero, _CMP_GE_OQ);
          residual = _mm512_mask_sub_ps(_mm512_add_ps(residual, alpha[k]), positive, residual, alpha[k]);
          bits[k] |= static_cast<Word>(positive) << e;
        }
      }
      for (std::size_t k = 0; k < planes; ++k) q.planes[k].row(r)[w] = bits[k];
    }
  }
  return q;
#else
  return quantize_with_scales<float>(m, scales);
#endif
}

template <typename Scalar>
void write_quantized(std::ostream& out, const QuantizedTensor<Scalar>& q) {
  io::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(q.rows));
  io::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(q.cols));
  io::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(q.bits()));
  for (Scalar s : q.scales) io::put_f64(out, static_cast<double>(s));
  for (const BitMatrix& plane : q.planes)
    for (Word w : plane.data()) io::put_le<std::uint64_t>(out, w);
}

template <typename Scalar>
QuantizedTensor<Scalar> read_quantized(std::istream& in) {
  QuantizedTensor<Scalar> q;
  q.rows = io::get_le<std::uint32_t>(in);
  q.cols = io::get_le<std::uint32_t>(in);
  const std::uint32_t bits = io::get_le<std::uint32_t>(in);
  if (q.rows == 0 || q.cols == 0 || bits == 0 || bits > 64) throw DataError("corrupt quantized tensor header");
  for (std::uint32_t k = 0; k < bits; ++k) q.scales.push_back(static_cast<Scalar>(io::get_f64(in)));
  for (std::uint32_t k = 0; k < bits; ++k) {
    BitMatrix plane(q.rows, q.cols);
    for (Word& w : plane.data()) w = io::get_le<std::uint64_t>(in);
    const std::size_t tail = q.cols % kWordBits;
    if (tail != 0) {
      const Word pad = ~((Word{1} << tail) - 1);
      for (std::size_t r = 0; r < q.rows; ++r)
        if (plane.row(r).back() & pad) throw DataError("quantized tensor has nonzero padding bits");
    }
    q.planes.push_back(std::move(plane));
  }
  return q;
}

template void write_quantized<float>(std::ostream&, const QuantizedTensor<float>&);
template void write_quantized<double>(std::ostream&, const QuantizedTensor<double>&);
template QuantizedTensor<float> read_quantized<float>(std::istream&);
template QuantizedTensor<double> read_quantized<double>(std::istream&);

}  // namespace bitwave
