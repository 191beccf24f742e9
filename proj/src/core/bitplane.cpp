// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "bitwave/core/bitplane.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace bitwave {

BitPlane pack_signs(std::span<const int> signs) {
  BitPlane plane(signs.size());
  for (std::size_t i = 0; i < signs.size(); ++i) {
    if (signs[i] != 1 && signs[i] != -1)
      throw std::invalid_argument("pack_signs: value " + std::to_string(signs[i]) + " at index " +
                                  std::to_string(i) + " is not +1 or -1");
    plane.set_positive(i, signs[i] == 1);
  }
  return plane;
}

std::vector<int> unpack_signs(const BitPlane& plane) {
  std::vector<int> signs(plane.size());
  for (std::size_t i = 0; i < plane.size(); ++i) signs[i] = plane.sign(i);
  return signs;
}

std::int64_t xnor_popcount_dot(std::span<const Word> a, std::span<const Word> b, std::size_t n) {
  const std::size_t words = words_for(n);
  if (a.size() < words || b.size() < words)
    throw std::invalid_argument("xnor_popcount_dot: row shorter than its logical length");
  if (words == 0) return 0;
  std::int64_t agree = 0;
  for (std::size_t k = 0; k + 1 < words; ++k) agree += std::popcount(static_cast<Word>(~(a[k] ^ b[k])));
  const std::size_t tail = n - (words - 1) * kWordBits;
  const Word mask = tail == kWordBits ? ~Word{0} : (Word{1} << tail) - 1;
  agree += std::popcount(static_cast<Word>(~(a[words - 1] ^ b[words - 1]) & mask));
  return 2 * agree - static_cast<std::int64_t>(n);
}

std::int64_t xnor_popcount_dot(const BitPlane& a, const BitPlane& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("xnor_popcount_dot: length mismatch (" + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  return xnor_popcount_dot(a.words(), b.words(), a.size());
}

}  // namespace bitwave
