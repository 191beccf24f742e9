// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bitwave {

using Word = std::uint64_t;
inline constexpr std::size_t kWordBits = 64;

constexpr std::size_t words_for(std::size_t n) { return (n + kWordBits - 1) / kWordBits; }

/// Packed vector of signs. Bit i set means element i is +1, clear means -1.
/// Bits at positions >= size() are always zero.
class BitPlane {
 public:
  BitPlane() = default;
  /// All elements start at -1.
  explicit BitPlane(std::size_t length) : words_(words_for(length), 0), length_(length) {}

  std::size_t size() const { return length_; }
  std::span<const Word> words() const { return words_; }

  int sign(std::size_t i) const { return (words_[i / kWordBits] >> (i % kWordBits)) & 1u ? 1 : -1; }
  void set_positive(std::size_t i, bool positive) {
    const Word bit = Word{1} << (i % kWordBits);
    if (positive)
      words_[i / kWordBits] |= bit;
    else
      words_[i / kWordBits] &= ~bit;
  }

  friend bool operator==(const BitPlane&, const BitPlane&) = default;

 private:
  std::vector<Word> words_;
  std::size_t length_ = 0;
};

/// Row-major packed sign matrix; every row starts on a word boundary and the
/// padding bits in each row's last word are zero.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), words_per_row_(words_for(cols)), data_(rows * words_per_row_, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t words_per_row() const { return words_per_row_; }

  std::span<const Word> row(std::size_t r) const {
    return {data_.data() + r * words_per_row_, words_per_row_};
  }
  std::span<Word> row(std::size_t r) { return {data_.data() + r * words_per_row_, words_per_row_}; }
  std::span<const Word> data() const { return data_; }
  std::span<Word> data() { return data_; }

  int sign(std::size_t r, std::size_t c) const {
    return (data_[r * words_per_row_ + c / kWordBits] >> (c % kWordBits)) & 1u ? 1 : -1;
  }
  void set_positive(std::size_t r, std::size_t c, bool positive) {
    Word& w = data_[r * words_per_row_ + c / kWordBits];
    const Word bit = Word{1} << (c % kWordBits);
    w = positive ? (w | bit) : (w & ~bit);
  }

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t words_per_row_ = 0;
  std::vector<Word> data_;
};

/// Packs a +1/-1 vector. Throws std::invalid_argument on any other value.
BitPlane pack_signs(std::span<const int> signs);
std::vector<int> unpack_signs(const BitPlane& plane);

/// Sum of a[i]*b[i] over n elements of two packed sign rows whose padding bits
/// are zero: n - 2 * popcount(a ^ b).
std::int64_t xnor_popcount_dot(std::span<const Word> a, std::span<const Word> b, std::size_t n);

/// Throws std::invalid_argument when the logical lengths differ.
std::int64_t xnor_popcount_dot(const BitPlane& a, const BitPlane& b);

}  // namespace bitwave
