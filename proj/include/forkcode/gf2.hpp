#pragma once

#include <cstdint>
#include <vector>

#include "forkcode/bits.hpp"
#include "forkcode/errors.hpp"
#include "forkcode/prng.hpp"

namespace forkcode {

// Dense GF(2) matrix, rows stored as packed BitStrings.
//
// Seeded expansion rule (the contract golden tests re-derive): row r of an
// `rows x cols` matrix drawn from `seed` is filled word by word from
// SplitMix64(seed_fold(seed, stream_tag::kMatrixRow, cols, rows, r)), the
// last word masked down to `cols % 64` bits.
class BitMatrix {
 public:
  BitMatrix() = default;

  BitMatrix(size_t rows, size_t cols) : rows_(rows), cols_(cols) {
    data_.assign(rows, BitString(cols));
  }

  static BitMatrix from_seed(uint64_t seed, size_t rows, size_t cols) {
    BitMatrix m(rows, cols);
    for (size_t r = 0; r < rows; ++r) {
      SplitMix64 st(seed_fold(seed, stream_tag::kMatrixRow, cols, rows, r));
      for (size_t w = 0; w < m.data_[r].word_count(); ++w) {
        m.data_[r].set_word(w, st.next());
      }
    }
    return m;
  }

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  const BitString& row(size_t r) const { return data_[r]; }
  BitString& row(size_t r) { return data_[r]; }

  bool get(size_t r, size_t c) const { return data_[r].get(c); }
  void set(size_t r, size_t c, bool v) { data_[r].set(c, v); }

  BitString multiply(const BitString& x) const {
    BitString y(rows_);
    for (size_t r = 0; r < rows_; ++r) y.set(r, dot_parity(data_[r], x));
    return y;
  }

 private:
  size_t rows_ = 0, cols_ = 0;
  std::vector<BitString> data_;
};

// Solution set of M x = t: either empty, or particular ^ span(basis).
// Enumeration cost is 2^dim with dim = cols - rank(M).
class Coset {
 public:
  Coset(size_t nbits, bool feasible, BitString particular,
        std::vector<BitString> basis)
      : nbits_(nbits),
        feasible_(feasible),
        particular_(std::move(particular)),
        basis_(std::move(basis)) {}

  bool feasible() const { return feasible_; }
  size_t nbits() const { return nbits_; }
  size_t dimension() const { return basis_.size(); }
  const BitString& particular() const { return particular_; }
  const std::vector<BitString>& basis() const { return basis_; }

  // Number of elements; 0 when infeasible. Guarded against shift overflow.
  uint64_t size() const {
    if (!feasible_) return 0;
    if (basis_.size() >= 63) fail(ErrorCode::kBudgetExceeded, "coset dimension >= 63");
    return uint64_t{1} << basis_.size();
  }

  // Element selected by the binary digits of `index` over the basis.
  BitString element(uint64_t index) const {
    BitString x = particular_;
    for (size_t b = 0; b < basis_.size(); ++b) {
      if ((index >> b) & 1u) x ^= basis_[b];
    }
    return x;
  }

  // Visits every element once, in Gray-code order (one basis xor per step).
  template <typename Fn>
  void for_each(Fn&& fn) const {
    if (!feasible_) return;
    BitString x = particular_;
    fn(x);
    uint64_t n = size();
    for (uint64_t i = 1; i < n; ++i) {
      x ^= basis_[std::countr_zero(i)];
      fn(x);
    }
  }

  std::vector<BitString> elements(uint64_t budget) const {
    if (feasible_ && (basis_.size() >= 63 || size() > budget)) {
      fail(ErrorCode::kBudgetExceeded, "coset larger than enumeration budget");
    }
    std::vector<BitString> out;
    out.reserve(feasible_ ? size() : 0);
    for_each([&](const BitString& x) { out.push_back(x); });
    return out;
  }

 private:
  size_t nbits_;
  bool feasible_;
  BitString particular_;
  std::vector<BitString> basis_;
};

// Reduced row echelon form of [M | t]; yields rank, particular solution and
// nullspace basis in one pass.
inline Coset solve_affine(const BitMatrix& m, const BitString& target) {
  if (target.size() != m.rows()) {
    fail(ErrorCode::kLengthMismatch, "target length must equal matrix rows");
  }
  size_t rows = m.rows(), cols = m.cols();
  std::vector<BitString> work;
  work.reserve(rows);
  BitString aug(rows);  // augmented column, permuted alongside rows
  for (size_t r = 0; r < rows; ++r) {
    work.push_back(m.row(r));
    aug.set(r, target.get(r));
  }

  std::vector<size_t> pivot_col;
  size_t rank = 0;
  for (size_t c = 0; c < cols && rank < rows; ++c) {
    size_t pivot = rank;
    while (pivot < rows && !work[pivot].get(c)) ++pivot;
    if (pivot == rows) continue;
    std::swap(work[pivot], work[rank]);
    bool tmp = aug.get(pivot);
    aug.set(pivot, aug.get(rank));
    aug.set(rank, tmp);
    for (size_t r = 0; r < rows; ++r) {
      if (r != rank && work[r].get(c)) {
        work[r] ^= work[rank];
        aug.set(r, aug.get(r) ^ aug.get(rank));
      }
    }
    pivot_col.push_back(c);
    ++rank;
  }

  // A zero row with a set augmented bit makes the system infeasible.
  for (size_t r = rank; r < rows; ++r) {
    if (aug.get(r)) {
      return Coset(cols, false, BitString(cols), {});
    }
  }

  std::vector<bool> is_pivot(cols, false);
  for (size_t c : pivot_col) is_pivot[c] = true;

  BitString particular(cols);
  for (size_t i = 0; i < rank; ++i) particular.set(pivot_col[i], aug.get(i));

  std::vector<BitString> basis;
  basis.reserve(cols - rank);
  for (size_t c = 0; c < cols; ++c) {
    if (is_pivot[c]) continue;
    BitString v(cols);
    v.set(c, true);
    for (size_t i = 0; i < rank; ++i) v.set(pivot_col[i], work[i].get(c));
    basis.push_back(v);
  }
  return Coset(cols, true, std::move(particular), std::move(basis));
}

inline size_t gf2_rank(const BitMatrix& m) {
  BitString zero(m.rows());
  Coset c = solve_affine(m, zero);
  return m.cols() - c.dimension();
}

}  // namespace forkcode
