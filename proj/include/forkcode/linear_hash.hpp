#pragma once

#include <cstdint>

#include "forkcode/bits.hpp"
#include "forkcode/errors.hpp"
#include "forkcode/gf2.hpp"

// Seeded GF(2)-linear hash family. One implementation serves both the
// random-binning encoders and the fingerprint extractor.

namespace forkcode {

// l x n_bits linear map; the matrix is a pure function of (seed, n_bits, l)
// via BitMatrix::from_seed.
class LinearHashCode {
 public:
  LinearHashCode(uint64_t seed, size_t n_bits, size_t l)
      : seed_(seed), n_bits_(n_bits), l_(l) {
    if (l > n_bits) fail(ErrorCode::kInvalidArgument, "hash output longer than input");
    matrix_ = BitMatrix::from_seed(seed, l, n_bits);
  }

  uint64_t seed() const { return seed_; }
  size_t n_bits() const { return n_bits_; }
  size_t output_bits() const { return l_; }
  const BitMatrix& matrix() const { return matrix_; }

  BitString apply(const BitString& x) const {
    if (x.size() != n_bits_) {
      fail(ErrorCode::kLengthMismatch, "input length != code input length");
    }
    return matrix_.multiply(x);
  }

  // Preimage {x : hash(x) = target} as an affine coset.
  Coset coset(const BitString& target) const {
    if (target.size() != l_) {
      fail(ErrorCode::kLengthMismatch, "target length != code output length");
    }
    return solve_affine(matrix_, target);
  }

 private:
  uint64_t seed_;
  size_t n_bits_, l_;
  BitMatrix matrix_;
};

struct EncodedMessage {
  int source_index = 0;  // 0-based
  BitString bits;
};

inline BitString encode_block(const BitString& block_bits, const LinearHashCode& code) {
  return code.apply(block_bits);
}

}  // namespace forkcode
