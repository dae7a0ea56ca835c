#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace collabrec {

/// A dense rows x bits bit matrix, one contiguous word run per row.
class BitRows {
 public:
  using Word = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  BitRows() = default;
  BitRows(std::size_t rows, std::size_t bits)
      : rows_(rows), bits_(bits), words_((bits + kWordBits - 1) / kWordBits),
        data_(rows_ * words_, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t bits() const { return bits_; }
  std::size_t words() const { return words_; }

  void set(std::size_t r, std::size_t b) {
    data_[r * words_ + b / kWordBits] |= Word{1} << (b % kWordBits);
  }
  bool test(std::size_t r, std::size_t b) const {
    return (data_[r * words_ + b / kWordBits] >> (b % kWordBits)) & 1U;
  }

  std::span<const Word> row(std::size_t r) const {
    return {data_.data() + r * words_, words_};
  }
  std::span<Word> row(std::size_t r) { return {data_.data() + r * words_, words_}; }

  friend bool operator==(const BitRows&, const BitRows&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t bits_ = 0;
  std::size_t words_ = 0;
  std::vector<Word> data_;
};

/// popcount(a & b) over the first `prefix_bits` bits.
inline std::size_t and_count(std::span<const BitRows::Word> a,
                             std::span<const BitRows::Word> b,
                             std::size_t prefix_bits) {
  const std::size_t full = prefix_bits / BitRows::kWordBits;
  std::size_t count = 0;
  for (std::size_t w = 0; w < full; ++w) count += std::popcount(a[w] & b[w]);
  if (const std::size_t rem = prefix_bits % BitRows::kWordBits; rem != 0) {
    const BitRows::Word mask = (BitRows::Word{1} << rem) - 1;
    count += std::popcount(a[full] & b[full] & mask);
  }
  return count;
}

inline std::size_t and_count(std::span<const BitRows::Word> a,
                             std::span<const BitRows::Word> b) {
  std::size_t count = 0;
  for (std::size_t w = 0; w < a.size(); ++w) count += std::popcount(a[w] & b[w]);
  return count;
}

}  // namespace collabrec
