// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "bitwave/core/gemm.hpp"

#include <bit>

#if defined(__AVX512F__) && defined(__AVX512VPOPCNTDQ__)
#include <immintrin.h>
#define BITWAVE_AVX512_POPCOUNT 1
#endif

namespace bitwave::detail {

static_assert(kRowTile == 4 && kBlockTile == 2 && kLanes == 8, "micro kernel is written for a 4 x (2 x 8) tile");

#if defined(BITWAVE_AVX512_POPCOUNT)

void mismatch_tile(const Word* const* x_rows, const Word* blocks, std::size_t words, std::int64_t* counts) {
  const Word* w0 = blocks;
  const Word* w1 = blocks + words * kLanes;
  __m512i a00 = _mm512_setzero_si512(), a01 = a00, a10 = a00, a11 = a00;
  __m512i a20 = a00, a21 = a00, a30 = a00, a31 = a00;
  for (std::size_t k = 0; k < words; ++k) {
    const __m512i v0 = _mm512_loadu_si512(w0 + k * kLanes);
    const __m512i v1 = _mm512_loadu_si512(w1 + k * kLanes);
    __m512i b = _mm512_set1_epi64(static_cast<long long>(x_rows[0][k]));
    a00 = _mm512_add_epi64(a00, _mm512_popcnt_epi64(_mm512_xor_si512(b, v0)));
    a01 = _mm512_add_epi64(a01, _mm512_popcnt_epi64(_mm512_xor_si512(b, v1)));
    b = _mm512_set1_epi64(static_cast<long long>(x_rows[1][k]));
    a10 = _mm512_add_epi64(a10, _mm512_popcnt_epi64(_mm512_xor_si512(b, v0)));
    a11 = _mm512_add_epi64(a11, _mm512_popcnt_epi64(_mm512_xor_si512(b, v1)));
    b = _mm512_set1_epi64(static_cast<long long>(x_rows[2][k]));
    a20 = _mm512_add_epi64(a20, _mm512_popcnt_epi64(_mm512_xor_si512(b, v0)));
    a21 = _mm512_add_epi64(a21, _mm512_popcnt_epi64(_mm512_xor_si512(b, v1)));
    b = _mm512_set1_epi64(static_cast<long long>(x_rows[3][k]));
    a30 = _mm512_add_epi64(a30, _mm512_popcnt_epi64(_mm512_xor_si512(b, v0)));
    a31 = _mm512_add_epi64(a31, _mm512_popcnt_epi64(_mm512_xor_si512(b, v1)));
  }
  _mm512_storeu_si512(counts + 0, a00);
  _mm512_storeu_si512(counts + 8, a01);
  _mm512_storeu_si512(counts + 16, a10);
  _mm512_storeu_si512(counts + 24, a11);
  _mm512_storeu_si512(counts + 32, a20);
  _mm512_storeu_si512(counts + 40, a21);
  _mm512_storeu_si512(counts + 48, a30);
  _mm512_storeu_si512(counts + 56, a31);
}

#else

void mismatch_tile(const Word* const* x_rows, const Word* blocks, std::size_t words, std::int64_t* counts) {
  for (std::size_t i = 0; i < kRowTile * kColTile; ++i) counts[i] = 0;
  for (std::size_t b = 0; b < kBlockTile; ++b) {
    const Word* block = blocks + b * words * kLanes;
    for (std::size_t k = 0; k < words; ++k) {
      const Word* lanes = block + k * kLanes;
      for (std::size_t r = 0; r < kRowTile; ++r) {
        const Word x = x_rows[r][k];
        std::int64_t* c = counts + r * kColTile + b * kLanes;
        for (std::size_t l = 0; l < kLanes; ++l) c[l] += std::popcount(x ^ lanes[l]);
      }
    }
  }
}

#endif

}  // namespace bitwave::detail
