#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace ddtop {

/// Fixed-capacity bitset over target ids. Instances are limited to
/// `TargetSet::kCapacity` targets so that label sets stay trivially copyable.
class TargetSet {
 public:
  static constexpr std::size_t kWords = 4;
  static constexpr std::size_t kCapacity = kWords * 64;

  constexpr TargetSet() = default;

  constexpr void insert(std::size_t t) { words_[t >> 6] |= std::uint64_t{1} << (t & 63); }
  constexpr void erase(std::size_t t) { words_[t >> 6] &= ~(std::uint64_t{1} << (t & 63)); }
  [[nodiscard]] constexpr bool contains(std::size_t t) const {
    return (words_[t >> 6] >> (t & 63)) & 1U;
  }

  [[nodiscard]] constexpr bool empty() const {
    for (auto w : words_)
      if (w != 0) return false;
    return true;
  }

  [[nodiscard]] constexpr std::size_t size() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  [[nodiscard]] constexpr bool is_subset_of(const TargetSet& other) const {
    for (std::size_t i = 0; i < kWords; ++i)
      if ((words_[i] & ~other.words_[i]) != 0) return false;
    return true;
  }

  [[nodiscard]] constexpr bool intersects(const TargetSet& other) const {
    for (std::size_t i = 0; i < kWords; ++i)
      if ((words_[i] & other.words_[i]) != 0) return true;
    return false;
  }

  constexpr TargetSet& operator|=(const TargetSet& other) {
    for (std::size_t i = 0; i < kWords; ++i) words_[i] |= other.words_[i];
    return *this;
  }

  [[nodiscard]] friend constexpr TargetSet operator&(TargetSet a, const TargetSet& b) {
    for (std::size_t i = 0; i < kWords; ++i) a.words_[i] &= b.words_[i];
    return a;
  }

  [[nodiscard]] friend constexpr TargetSet operator|(TargetSet a, const TargetSet& b) {
    a |= b;
    return a;
  }

  friend constexpr bool operator==(const TargetSet&, const TargetSet&) = default;

  /// Members in increasing order.
  [[nodiscard]] std::vector<int> to_vector() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < kWords; ++i) {
      auto w = words_[i];
      while (w != 0) {
        out.push_back(static_cast<int>(i * 64 + static_cast<std::size_t>(std::countr_zero(w))));
        w &= w - 1;
      }
    }
    return out;
  }

 private:
  std::array<std::uint64_t, kWords> words_{};
};

}  // namespace ddtop
