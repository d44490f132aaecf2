#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace brl {

// Fixed-width bitset over observation indices. Word layout keeps unused tail
// bits zero so popcounts never need masking.
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(std::size_t n_bits, bool value = false)
      : n_(n_bits), words_((n_bits + 63) / 64, value ? ~0ull : 0ull) {
    trim_tail();
  }

  std::size_t size() const { return n_; }

  bool test(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1ull;
  }
  void set(std::size_t i) { words_[i >> 6] |= 1ull << (i & 63); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(1ull << (i & 63)); }

  std::size_t count() const {
    std::size_t c = 0;
    for (std::uint64_t w : words_) c += std::popcount(w);
    return c;
  }

  Bitset& operator&=(const Bitset& o) {
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= o.words_[k];
    return *this;
  }

  // this := this & ~o
  void and_not(const Bitset& o) {
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= ~o.words_[k];
  }

  static std::size_t and_count(const Bitset& a, const Bitset& b) {
    std::size_t c = 0;
    for (std::size_t k = 0; k < a.words_.size(); ++k)
      c += std::popcount(a.words_[k] & b.words_[k]);
    return c;
  }

  static std::size_t and_count(const Bitset& a, const Bitset& b,
                               const Bitset& c) {
    std::size_t r = 0;
    for (std::size_t k = 0; k < a.words_.size(); ++k)
      r += std::popcount(a.words_[k] & b.words_[k] & c.words_[k]);
    return r;
  }

  template <typename Fn>
  void for_each_set(Fn&& fn) const {
    for (std::size_t k = 0; k < words_.size(); ++k) {
      std::uint64_t w = words_[k];
      while (w) {
        fn(k * 64 + static_cast<std::size_t>(std::countr_zero(w)));
        w &= w - 1;
      }
    }
  }

  bool operator==(const Bitset&) const = default;

 private:
  void trim_tail() {
    if (n_ & 63) words_.back() &= (1ull << (n_ & 63)) - 1;
  }

  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace brl
