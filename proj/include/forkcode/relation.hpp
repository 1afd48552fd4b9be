#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "forkcode/bits.hpp"
#include "forkcode/errors.hpp"
#include "forkcode/linear_hash.hpp"

// Explicit finite relation over tuples of bit strings, and the counting
// surrogate for conditional description complexity: khat(W | conditioning)
// is the log2 number of distinct completions of the W coordinates among
// tuples satisfying the conditioning. Conditioning may pin a coordinate to
// a value or constrain it through a seeded linear fingerprint, which is how
// already-extracted codewords enter as side information.

namespace forkcode {

inline constexpr uint64_t kMaxRelationTuples = uint64_t{1} << 20;

class CandidateRelation {
 public:
  // `k` main coordinates; when `has_b`, column k holds the side string b.
  CandidateRelation(int k, bool has_b) : k_(k), has_b_(has_b) {
    if (k < 1 || k > 16) fail(ErrorCode::kInvalidArgument, "coordinate count out of range");
    values_.resize(columns());
    value_index_.resize(columns());
  }

  int k() const { return k_; }
  bool has_b() const { return has_b_; }
  int columns() const { return k_ + (has_b_ ? 1 : 0); }
  int b_column() const { return k_; }

  size_t tuple_count() const { return tuples_.size(); }
  const std::vector<uint32_t>& tuple(size_t i) const { return tuples_[i]; }

  size_t value_count(int col) const { return values_[col].size(); }
  const BitString& value(int col, uint32_t index) const { return values_[col][index]; }

  std::optional<uint32_t> find_value(int col, const BitString& bits) const {
    auto range = value_index_[col].equal_range(bits_key64(bits));
    for (auto it = range.first; it != range.second; ++it) {
      if (values_[col][it->second] == bits) return it->second;
    }
    return std::nullopt;
  }

  void add_tuple(const std::vector<BitString>& coords) {
    if (static_cast<int>(coords.size()) != columns()) {
      fail(ErrorCode::kShapeMismatch, "tuple arity != relation arity");
    }
    if (tuples_.size() >= kMaxRelationTuples) {
      fail(ErrorCode::kInvalidArgument, "relation exceeds the tuple limit");
    }
    std::vector<uint32_t> row(columns());
    for (int c = 0; c < columns(); ++c) row[c] = intern(c, coords[c]);
    tuples_.push_back(std::move(row));
  }

  // Bit strings of one tuple, main coordinates only.
  std::vector<BitString> tuple_strings(size_t i) const {
    std::vector<BitString> out;
    out.reserve(k_);
    for (int c = 0; c < k_; ++c) out.push_back(values_[c][tuples_[i][c]]);
    return out;
  }

 private:
  uint32_t intern(int col, const BitString& bits) {
    if (std::optional<uint32_t> found = find_value(col, bits)) return *found;
    uint32_t idx = static_cast<uint32_t>(values_[col].size());
    values_[col].push_back(bits);
    value_index_[col].emplace(bits_key64(bits), idx);
    return idx;
  }

  int k_;
  bool has_b_;
  std::vector<std::vector<BitString>> values_;  // per column, interned values
  std::vector<std::unordered_multimap<uint64_t, uint32_t>> value_index_;
  std::vector<std::vector<uint32_t>> tuples_;   // value indices per column
};

struct CoordConstraint {
  enum class Kind { kFree, kEquals, kHashEquals };
  Kind kind = Kind::kFree;

  // kEquals: interned value index, or kNoValue when the value is absent from
  // the column (matches nothing).
  static constexpr uint32_t kNoValue = 0xFFFFFFFFu;
  uint32_t value_index = kNoValue;

  // kHashEquals: seeded linear fingerprint of the coordinate must equal
  // target; the coordinate's length must equal hash_input_bits (the length
  // is part of the extractor's logged parameters).
  uint64_t hash_seed = 0;
  size_t hash_bits = 0;
  size_t hash_input_bits = 0;
  BitString hash_target;
};

using Conditioning = std::vector<CoordConstraint>;  // one entry per column

class ComplexitySurrogate {
 public:
  explicit ComplexitySurrogate(const CandidateRelation& relation)
      : relation_(relation) {}

  const CandidateRelation& relation() const { return relation_; }

  Conditioning free_conditioning() const {
    return Conditioning(relation_.columns());
  }

  // Pins `col` to a concrete string (kNoValue if it is not in the column).
  void pin_equals(Conditioning& cond, int col, const BitString& bits) const {
    CoordConstraint c;
    c.kind = CoordConstraint::Kind::kEquals;
    std::optional<uint32_t> idx = relation_.find_value(col, bits);
    c.value_index = idx ? *idx : CoordConstraint::kNoValue;
    cond[col] = c;
  }

  void pin_hash(Conditioning& cond, int col, uint64_t seed, size_t bits,
                size_t input_bits, BitString target) const {
    CoordConstraint c;
    c.kind = CoordConstraint::Kind::kHashEquals;
    c.hash_seed = seed;
    c.hash_bits = bits;
    c.hash_input_bits = input_bits;
    c.hash_target = std::move(target);
    cond[col] = c;
  }

  // Number of distinct projections onto the columns of `w_mask` among tuples
  // satisfying `cond`. Columns inside w_mask must be free in `cond`.
  uint64_t count_completions(uint32_t w_mask, const Conditioning& cond) const {
    std::vector<int> proj_cols;
    for (int c = 0; c < relation_.columns(); ++c) {
      if (w_mask >> c & 1u) proj_cols.push_back(c);
    }
    bool packable = proj_cols.size() <= 3;
    for (int c : proj_cols) packable = packable && relation_.value_count(c) < (1u << 21);

    std::unordered_set<uint64_t> packed;
    std::vector<std::vector<uint32_t>> raw;
    for (size_t i = 0; i < relation_.tuple_count(); ++i) {
      const std::vector<uint32_t>& row = relation_.tuple(i);
      if (!matches(row, cond)) continue;
      if (packable) {
        uint64_t key = 0;
        for (int c : proj_cols) key = (key << 21) | row[c];
        packed.insert(key);
      } else {
        std::vector<uint32_t> key;
        key.reserve(proj_cols.size());
        for (int c : proj_cols) key.push_back(row[c]);
        raw.push_back(std::move(key));
      }
    }
    if (packable) return packed.size();
    std::sort(raw.begin(), raw.end());
    raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
    return raw.size();
  }

  // khat(a_W | conditioning) in bits. Throws UnknownConditioning when no
  // tuple satisfies the conditioning.
  double khat(uint32_t w_mask, const Conditioning& cond) const {
    uint64_t count = count_completions(w_mask, cond);
    if (count == 0) {
      fail(ErrorCode::kUnknownConditioning, "conditioning matches no tuple");
    }
    return std::log2(static_cast<double>(count));
  }

  // Indices of tuples satisfying `cond` (used by exhaustive decoders).
  std::vector<size_t> matching_tuples(const Conditioning& cond, uint64_t budget) const {
    std::vector<size_t> out;
    for (size_t i = 0; i < relation_.tuple_count(); ++i) {
      if (matches(relation_.tuple(i), cond)) {
        out.push_back(i);
        if (out.size() > budget) {
          fail(ErrorCode::kBudgetExceeded, "matching-tuple scan exceeds budget");
        }
      }
    }
    return out;
  }

  // Fingerprint of an interned value under (seed, bits); cached per column.
  const BitString& cached_fingerprint(int col, uint64_t seed, size_t bits,
                                      uint32_t value_index) const {
    CacheKey key{col, seed, bits};
    auto it = fp_cache_.find(key);
    if (it == fp_cache_.end()) {
      if (fp_cache_.size() > 24) fp_cache_.clear();  // bound memory across seeds
      std::vector<BitString> fps;
      fps.reserve(relation_.value_count(col));
      for (size_t v = 0; v < relation_.value_count(col); ++v) {
        const BitString& x = relation_.value(col, static_cast<uint32_t>(v));
        LinearHashCode code(seed, x.size(), std::min(bits, x.size()));
        fps.push_back(code.apply(x));
      }
      it = fp_cache_.emplace(key, std::move(fps)).first;
    }
    return it->second[value_index];
  }

 private:
  struct CacheKey {
    int col;
    uint64_t seed;
    size_t bits;
    bool operator<(const CacheKey& o) const {
      if (col != o.col) return col < o.col;
      if (seed != o.seed) return seed < o.seed;
      return bits < o.bits;
    }
  };

  bool matches(const std::vector<uint32_t>& row, const Conditioning& cond) const {
    for (int c = 0; c < relation_.columns(); ++c) {
      const CoordConstraint& cc = cond[c];
      switch (cc.kind) {
        case CoordConstraint::Kind::kFree:
          break;
        case CoordConstraint::Kind::kEquals:
          if (row[c] != cc.value_index) return false;
          break;
        case CoordConstraint::Kind::kHashEquals:
          if (relation_.value(c, row[c]).size() != cc.hash_input_bits) return false;
          if (cached_fingerprint(c, cc.hash_seed, cc.hash_bits, row[c]) !=
              cc.hash_target) {
            return false;
          }
          break;
      }
    }
    return true;
  }

  const CandidateRelation& relation_;
  mutable std::map<CacheKey, std::vector<BitString>> fp_cache_;
};

}  // namespace forkcode
