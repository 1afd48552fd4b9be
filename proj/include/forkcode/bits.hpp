#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "forkcode/errors.hpp"
#include "forkcode/prng.hpp"

namespace forkcode {

// Packed bit string. Bit i lives at word i/64, position i%64 (LSB first).
// Lexicographic order compares bit 0 first, matching the textual "0"/"1"
// representation.
class BitString {
 public:
  BitString() = default;

  explicit BitString(size_t nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

  static BitString from_string(const std::string& text) {
    BitString out(text.size());
    for (size_t i = 0; i < text.size(); ++i) {
      if (text[i] == '1') {
        out.set(i, true);
      } else if (text[i] != '0') {
        fail(ErrorCode::kParseError, "bit string may contain only '0'/'1'");
      }
    }
    return out;
  }

  // Low `nbits` of `value`, bit 0 of the string = LSB of value.
  static BitString from_word(uint64_t value, size_t nbits) {
    BitString out(nbits);
    if (nbits > 0) {
      out.words_[0] = nbits >= 64 ? value : (value & ((uint64_t{1} << nbits) - 1));
    }
    return out;
  }

  size_t size() const { return nbits_; }
  bool empty() const { return nbits_ == 0; }
  size_t word_count() const { return words_.size(); }
  uint64_t word(size_t i) const { return words_[i]; }
  const std::vector<uint64_t>& words() const { return words_; }

  bool get(size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }

  void set(size_t i, bool v) {
    uint64_t mask = uint64_t{1} << (i & 63);
    if (v) {
      words_[i >> 6] |= mask;
    } else {
      words_[i >> 6] &= ~mask;
    }
  }

  void set_word(size_t i, uint64_t w) {
    words_[i] = w;
    trim();
  }

  BitString& operator^=(const BitString& other) {
    for (size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
    return *this;
  }

  friend BitString operator^(BitString a, const BitString& b) {
    a ^= b;
    return a;
  }

  // Parity of the AND of two equal-length strings (GF(2) inner product).
  friend bool dot_parity(const BitString& a, const BitString& b) {
    uint64_t acc = 0;
    for (size_t i = 0; i < a.words_.size(); ++i) acc ^= a.words_[i] & b.words_[i];
    return std::popcount(acc) & 1u;
  }

  size_t popcount() const {
    size_t n = 0;
    for (uint64_t w : words_) n += std::popcount(w);
    return n;
  }

  bool operator==(const BitString& other) const {
    return nbits_ == other.nbits_ && words_ == other.words_;
  }
  bool operator!=(const BitString& other) const { return !(*this == other); }

  // Strict lexicographic order on the bit text; shorter prefix wins ties.
  bool lex_less(const BitString& other) const {
    size_t common_words = std::min(words_.size(), other.words_.size());
    for (size_t i = 0; i < common_words; ++i) {
      uint64_t diff = words_[i] ^ other.words_[i];
      if (diff != 0) {
        int bit = std::countr_zero(diff);
        return ((words_[i] >> bit) & 1u) == 0;
      }
    }
    return nbits_ < other.nbits_;
  }

  std::string to_string() const {
    std::string s(nbits_, '0');
    for (size_t i = 0; i < nbits_; ++i)
      if (get(i)) s[i] = '1';
    return s;
  }

  BitString concat(const BitString& other) const {
    BitString out(nbits_ + other.nbits_);
    for (size_t i = 0; i < nbits_; ++i) out.set(i, get(i));
    for (size_t i = 0; i < other.nbits_; ++i) out.set(nbits_ + i, other.get(i));
    return out;
  }

  BitString prefix(size_t n) const {
    BitString out(n);
    for (size_t i = 0; i < n; ++i) out.set(i, get(i));
    return out;
  }

 private:
  void trim() {
    if (nbits_ % 64 != 0 && !words_.empty()) {
      words_.back() &= (uint64_t{1} << (nbits_ % 64)) - 1;
    }
  }

  size_t nbits_ = 0;
  std::vector<uint64_t> words_;
};

// 64-bit key for hash-map use; exact for strings up to 64 bits, a mixed
// digest otherwise (callers needing exactness at longer lengths must not
// use this).
inline uint64_t bits_key64(const BitString& b) {
  if (b.word_count() == 0) return 0x9E3779B97F4A7C15ull ^ b.size();
  if (b.word_count() == 1) return b.word(0) * 0x2545F4914F6CDD1Dull + b.size();
  uint64_t acc = b.size();
  for (size_t i = 0; i < b.word_count(); ++i) acc = mix64(acc ^ b.word(i));
  return acc;
}

inline size_t ceil_log2(uint64_t v) {
  if (v <= 1) return 0;
  return 64 - std::countl_zero(v - 1);
}

}  // namespace forkcode
