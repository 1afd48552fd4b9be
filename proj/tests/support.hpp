#pragma once

// Shared fixtures for the test suites: seeded random pmfs, random bit
// strings, the fixed relation families exercised across the complexity
// suites, and an independent brute-force joint decoder used as the oracle
// for the coset-ML implementation.

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "forkcode/bits.hpp"
#include "forkcode/linear_hash.hpp"
#include "forkcode/prng.hpp"
#include "forkcode/relation.hpp"
#include "forkcode/source_model.hpp"

namespace testsupport {

using forkcode::BitString;
using forkcode::CandidateRelation;
using forkcode::JointSourceSpec;
using forkcode::SplitMix64;

inline BitString random_bits(SplitMix64& rng, size_t len) {
  BitString out(len);
  for (size_t w = 0; w < out.word_count(); ++w) out.set_word(w, rng.next());
  return out;
}

// `count` distinct random strings of length `len`.
inline std::vector<BitString> distinct_strings(uint64_t seed, size_t count, size_t len) {
  SplitMix64 rng(seed);
  std::vector<BitString> out;
  std::set<std::string> seen;
  while (out.size() < count) {
    BitString s = random_bits(rng, len);
    if (seen.insert(s.to_string()).second) out.push_back(s);
  }
  return out;
}

// Random joint pmf: k in [1, kmax], alphabet sizes in {2, 3}, exponential
// weights normalized to a point of the simplex.
inline JointSourceSpec random_spec(uint64_t seed, int kmax = 4) {
  SplitMix64 rng(seed);
  int k = 1 + static_cast<int>(rng.next_below(kmax));
  std::vector<uint32_t> sizes;
  uint64_t cells = 1;
  for (int j = 0; j < k; ++j) {
    uint32_t s = 2 + static_cast<uint32_t>(rng.next_below(2));
    sizes.push_back(s);
    cells *= s;
  }
  std::vector<double> pmf(cells);
  double total = 0.0;
  for (double& p : pmf) {
    p = -std::log(1.0 - rng.next_double());
    total += p;
  }
  for (double& p : pmf) p /= total;
  return forkcode::build_joint(sizes, pmf);
}

inline JointSourceSpec dsbs_quarter() {
  return forkcode::build_joint({2, 2}, {0.375, 0.125, 0.125, 0.375});
}

// Independent-uniform relation: all pairs from two sampled value sets.
inline CandidateRelation product_relation(uint64_t seed, size_t count1, size_t count2,
                                          size_t len) {
  std::vector<BitString> s1 = distinct_strings(forkcode::seed_fold(seed, 1), count1, len);
  std::vector<BitString> s2 = distinct_strings(forkcode::seed_fold(seed, 2), count2, len);
  CandidateRelation rel(2, false);
  for (const BitString& a : s1) {
    for (const BitString& b : s2) rel.add_tuple({a, b});
  }
  return rel;
}

// Pairs (x, y) with x from a sampled set and y within Hamming distance 1.
inline CandidateRelation hamming_ball_relation(uint64_t seed, size_t count, size_t len) {
  std::vector<BitString> s = distinct_strings(seed, count, len);
  CandidateRelation rel(2, false);
  for (const BitString& x : s) {
    rel.add_tuple({x, x});
    for (size_t i = 0; i < len; ++i) {
      BitString y = x;
      y.set(i, !y.get(i));
      rel.add_tuple({x, y});
    }
  }
  return rel;
}

// k=3 coordinates sharing a common part: a_j = s . u_j over all combinations
// of `parts` choices for s and each u_j.
inline CandidateRelation shared_part_relation(uint64_t seed, size_t parts, size_t len) {
  std::vector<BitString> shared = distinct_strings(forkcode::seed_fold(seed, 10), parts, len);
  std::vector<std::vector<BitString>> unique(3);
  for (int j = 0; j < 3; ++j) {
    unique[j] = distinct_strings(forkcode::seed_fold(seed, 20 + j), parts, len);
  }
  CandidateRelation rel(3, false);
  for (const BitString& s : shared) {
    for (const BitString& u1 : unique[0]) {
      for (const BitString& u2 : unique[1]) {
        for (const BitString& u3 : unique[2]) {
          rel.add_tuple({s.concat(u1), s.concat(u2), s.concat(u3)});
        }
      }
    }
  }
  return rel;
}

// 8-regular bipartite pairing over 256 + 256 values: khat(a1|a2) = 3,
// khat(a2|a1) = 3, khat(a1,a2) = 11.
inline CandidateRelation circulant_relation(uint64_t seed, size_t len) {
  std::vector<BitString> left = distinct_strings(forkcode::seed_fold(seed, 1), 256, len);
  std::vector<BitString> right = distinct_strings(forkcode::seed_fold(seed, 2), 256, len);
  CandidateRelation rel(2, false);
  for (size_t i = 0; i < 256; ++i) {
    for (size_t s = 0; s < 8; ++s) {
      rel.add_tuple({left[i], right[(i + 32 * s) % 256]});
    }
  }
  return rel;
}

// Independent brute-force joint decoder for k=2 binary sources: scans all
// 2^(2n) tuples, keeps those matching both hash constraints, scores with the
// canonical histogram formula, breaks ties lexicographically.
inline std::optional<std::pair<BitString, BitString>> brute_force_decode(
    const JointSourceSpec& spec, size_t n, const forkcode::LinearHashCode& c1,
    const forkcode::LinearHashCode& c2, const BitString& m1, const BitString& m2) {
  std::array<double, 4> w{};
  for (int c = 0; c < 4; ++c) {
    double p = spec.pmf()[c];
    w[c] = p > 0.0 ? std::log2(p) : -std::numeric_limits<double>::infinity();
  }
  bool have = false;
  double best = 0.0;
  BitString bx, by;
  for (uint64_t a = 0; a < (uint64_t{1} << n); ++a) {
    BitString x = BitString::from_word(a, n);
    if (!(c1.apply(x) == m1)) continue;
    for (uint64_t b = 0; b < (uint64_t{1} << n); ++b) {
      BitString y = BitString::from_word(b, n);
      if (!(c2.apply(y) == m2)) continue;
      std::array<uint64_t, 4> counts{};
      for (size_t i = 0; i < n; ++i) {
        ++counts[(x.get(i) ? 2 : 0) + (y.get(i) ? 1 : 0)];
      }
      double score = 0.0;
      for (int c = 0; c < 4; ++c) {
        if (counts[c] > 0) score += static_cast<double>(counts[c]) * w[c];
      }
      bool better = !have || score > best;
      if (!better && score == best) {
        if (x != bx) {
          better = x.lex_less(bx);
        } else {
          better = y.lex_less(by);
        }
      }
      if (better) {
        have = true;
        best = score;
        bx = x;
        by = y;
      }
    }
  }
  if (!have) return std::nullopt;
  return std::make_pair(bx, by);
}

}  // namespace testsupport
