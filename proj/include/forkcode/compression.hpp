#pragma once

#include <algorithm>
#include <cstdint>

#include "forkcode/bits.hpp"

// Diagnostic complexity estimate from compressed lengths: khat(x|y) is the
// difference C(y . x) - C(y) under a greedy bit-level LZ parse. Useful for
// eyeballing real data; the counting surrogate, not this, backs every
// verification path.

namespace forkcode {

class CompressionSurrogate {
 public:
  // Greedy longest-match LZ parse; token costs are fixed-width.
  static size_t compressed_bits(const BitString& x) {
    constexpr size_t kWindow = 1 << 12;
    constexpr size_t kMaxLen = 255;
    constexpr size_t kMatchCost = 1 + 12 + 8;  // flag + offset + length
    constexpr size_t kLiteralCost = 2;         // flag + bit
    constexpr size_t kMinMatch = 8;

    size_t cost = 0;
    size_t pos = 0;
    const size_t n = x.size();
    while (pos < n) {
      size_t best_len = 0;
      size_t start = pos > kWindow ? pos - kWindow : 0;
      for (size_t cand = start; cand < pos; ++cand) {
        size_t len = 0;
        while (pos + len < n && len < kMaxLen && x.get(cand + len) == x.get(pos + len)) {
          ++len;
        }
        best_len = std::max(best_len, len);
      }
      if (best_len >= kMinMatch) {
        cost += kMatchCost;
        pos += best_len;
      } else {
        cost += kLiteralCost;
        ++pos;
      }
    }
    return cost;
  }

  static double khat(const BitString& x, const BitString& y) {
    size_t joint = compressed_bits(y.concat(x));
    size_t base = compressed_bits(y);
    return joint > base ? static_cast<double>(joint - base) : 0.0;
  }
};

}  // namespace forkcode
