#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include "forkcode/bits.hpp"
#include "forkcode/errors.hpp"
#include "forkcode/linear_hash.hpp"
#include "forkcode/relation.hpp"

// Fingerprint extraction: a seeded linear hash of x0 of prescribed length r.
// The extractor's full description given x0 is (seed, r, |x0|); everything
// the audits certify is counted exactly against the relation surrogate.

namespace forkcode {

struct FingerprintSpec {
  size_t r = 0;        // output length in bits
  uint64_t seed = 0;
  size_t input_bits = 0;

  // Bits needed to describe the extraction procedure given x0.
  uint64_t description_bits() const { return 64 + 32 + 32; }
};

inline BitString muchnik_fingerprint(const BitString& x0, size_t r, uint64_t seed) {
  if (r > x0.size()) {
    fail(ErrorCode::kLengthError, "fingerprint length exceeds the input length");
  }
  return LinearHashCode(seed, x0.size(), r).apply(x0);
}

struct FingerprintDecodeResult {
  enum class Status { kDecoded, kZeroMatches, kCollision };
  Status status = Status::kZeroMatches;
  BitString value;              // recovered x0 when decoded
  uint64_t candidates = 0;      // conditioning-consistent completions examined
  uint64_t matches = 0;         // candidates whose fingerprint equals y
};

// Recovers the value of `target_col` from its fingerprint plus conditioning:
// enumerates the completions allowed by the relation and keeps those whose
// fingerprint equals y. Unique match -> decoded; otherwise the failure mode
// distinguishes zero matches from collisions.
inline FingerprintDecodeResult fingerprint_decode(const BitString& y,
                                                  const ComplexitySurrogate& sur,
                                                  int target_col,
                                                  const Conditioning& cond,
                                                  size_t input_bits, uint64_t seed,
                                                  uint64_t budget) {
  FingerprintDecodeResult result;
  std::vector<size_t> rows = sur.matching_tuples(cond, budget);

  std::unordered_map<uint32_t, char> seen;  // distinct candidate value indices
  uint32_t match_index = 0;
  for (size_t row : rows) {
    uint32_t vi = sur.relation().tuple(row)[target_col];
    if (!seen.emplace(vi, 0).second) continue;
    ++result.candidates;
    if (result.candidates > budget) {
      fail(ErrorCode::kBudgetExceeded, "candidate set exceeds budget");
    }
    const BitString& x = sur.relation().value(target_col, vi);
    if (x.size() != input_bits) continue;
    if (sur.cached_fingerprint(target_col, seed, y.size(), vi) == y) {
      ++result.matches;
      match_index = vi;
    }
  }
  if (result.matches == 1) {
    result.status = FingerprintDecodeResult::Status::kDecoded;
    result.value = sur.relation().value(target_col, match_index);
  } else if (result.matches > 1) {
    result.status = FingerprintDecodeResult::Status::kCollision;
  }
  return result;
}

// --- numeric audits of the extractor ----------------------------------------

struct RemarkAuditEntry {
  int condition_col = -1;
  double khat_x0_given_xj = 0.0;   // log2 |candidate set|
  double khat_y_given_xj = 0.0;    // log2 #distinct fingerprints of candidates
  double upper = 0.0;              // min(khat_x0_given_xj, r)
  bool upper_ok = false;           // khat_y <= upper (exact counting bound)
  double lower_gap = 0.0;          // upper - khat_y, >= 0
  double khat_x0_given_y_xj = 0.0; // log2 |fiber of the true fingerprint|
  double khat_x0y_given_xj = 0.0;  // equals khat_x0_given_xj: y is a function of x0
  double additivity_defect = 0.0;  // khat_x0y - khat_y - khat_x0_given_y
  bool reconstruction = false;     // fiber of the true y is a singleton
};

struct RemarkAuditReport {
  size_t r = 0;
  uint64_t seed = 0;
  BitString y;
  std::vector<RemarkAuditEntry> entries;
};

// For each conditioning column j: candidate set = completions of x0 given
// x_j; the audit counts the image and fiber structure of the fingerprint map
// on that set and reports the additivity defect of the counting identity
// khat(x0, y | x_j) = khat(y | x_j) + khat(x0 | y, x_j).
inline RemarkAuditReport remark_audits(
    const ComplexitySurrogate& sur, int x0_col, const BitString& x0,
    const std::vector<std::pair<int, BitString>>& conditions, size_t r,
    uint64_t seed) {
  RemarkAuditReport report;
  report.r = r;
  report.seed = seed;
  report.y = muchnik_fingerprint(x0, r, seed);

  for (const auto& [col, value] : conditions) {
    Conditioning cond = sur.free_conditioning();
    sur.pin_equals(cond, col, value);

    std::vector<size_t> rows = sur.matching_tuples(cond, kMaxRelationTuples);
    std::unordered_map<uint32_t, char> candidates;
    for (size_t row : rows) candidates.emplace(sur.relation().tuple(row)[x0_col], 0);
    if (candidates.empty()) {
      fail(ErrorCode::kUnknownConditioning, "conditioning matches no tuple");
    }

    std::map<std::vector<uint64_t>, uint64_t> image;  // fingerprint -> fiber size
    uint64_t true_fiber = 0;
    for (const auto& kv : candidates) {
      const BitString& x = sur.relation().value(x0_col, kv.first);
      if (x.size() != x0.size()) continue;
      const BitString& fp = sur.cached_fingerprint(x0_col, seed, r, kv.first);
      uint64_t fiber = ++image[fp.words()];
      if (fp == report.y) true_fiber = fiber;
    }

    RemarkAuditEntry entry;
    entry.condition_col = col;
    entry.khat_x0_given_xj = std::log2(static_cast<double>(candidates.size()));
    entry.khat_y_given_xj = std::log2(static_cast<double>(image.size()));
    entry.upper = std::min(entry.khat_x0_given_xj, static_cast<double>(r));
    entry.upper_ok = entry.khat_y_given_xj <= entry.upper + 1e-9;
    entry.lower_gap = entry.upper - entry.khat_y_given_xj;
    entry.khat_x0_given_y_xj =
        true_fiber > 0 ? std::log2(static_cast<double>(true_fiber)) : 0.0;
    entry.khat_x0y_given_xj = entry.khat_x0_given_xj;
    entry.additivity_defect = entry.khat_x0y_given_xj - entry.khat_y_given_xj -
                              entry.khat_x0_given_y_xj;
    entry.reconstruction = true_fiber == 1;
    report.entries.push_back(entry);
  }
  return report;
}

}  // namespace forkcode
