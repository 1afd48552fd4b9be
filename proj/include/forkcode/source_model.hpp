#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "forkcode/errors.hpp"
#include "forkcode/prng.hpp"

// Joint distribution of k correlated sources over finite alphabets, with
// exact conditional-entropy queries and reproducible i.i.d. block sampling.
// All entropies are in bits (base-2 logs), with 0*log(0) = 0.

namespace forkcode {

inline constexpr int kMaxSources = 8;
inline constexpr uint64_t kMaxPmfCells = uint64_t{1} << 24;
inline constexpr double kNormalizationTolerance = 1e-9;

// Index subsets are bitmasks: bit j (0-based) selects source j+1.
using SubsetMask = uint32_t;

inline SubsetMask full_mask(int k) { return (SubsetMask{1} << k) - 1; }

inline std::string subset_pretty(SubsetMask mask, int k) {
  std::string out = "{";
  bool first = true;
  for (int j = 0; j < k; ++j) {
    if (mask >> j & 1u) {
      if (!first) out += ",";
      out += std::to_string(j + 1);
      first = false;
    }
  }
  out += "}";
  return out;
}

struct SourceBlock {
  size_t n = 0;
  // symbols[j][i]: symbol of source j at position i, in [0, alphabet_sizes[j]).
  std::vector<std::vector<uint32_t>> symbols;

  bool operator==(const SourceBlock& other) const {
    return n == other.n && symbols == other.symbols;
  }
};

class JointSourceSpec {
 public:
  int k() const { return static_cast<int>(sizes_.size()); }
  const std::vector<uint32_t>& alphabet_sizes() const { return sizes_; }
  const std::vector<double>& pmf() const { return pmf_; }

  uint64_t cell_count() const { return pmf_.size(); }

  // Row-major flat index, last source index fastest.
  uint64_t flat_index(const std::vector<uint32_t>& symbols) const {
    uint64_t idx = 0;
    for (size_t j = 0; j < sizes_.size(); ++j) idx = idx * sizes_[j] + symbols[j];
    return idx;
  }

  std::vector<uint32_t> unflatten(uint64_t idx) const {
    std::vector<uint32_t> symbols(sizes_.size());
    for (size_t j = sizes_.size(); j-- > 0;) {
      symbols[j] = static_cast<uint32_t>(idx % sizes_[j]);
      idx /= sizes_[j];
    }
    return symbols;
  }

  friend JointSourceSpec build_joint(const std::vector<uint32_t>& alphabet_sizes,
                                     std::vector<double> pmf_values);

 private:
  std::vector<uint32_t> sizes_;
  std::vector<double> pmf_;
};

// Validates shape and normalization. A total within kNormalizationTolerance
// of 1 is renormalized exactly; anything further off is rejected.
inline JointSourceSpec build_joint(const std::vector<uint32_t>& alphabet_sizes,
                                   std::vector<double> pmf_values) {
  if (alphabet_sizes.empty() || alphabet_sizes.size() > kMaxSources) {
    fail(ErrorCode::kShapeMismatch, "number of sources must be in 1..8");
  }
  uint64_t cells = 1;
  for (uint32_t s : alphabet_sizes) {
    if (s == 0) fail(ErrorCode::kShapeMismatch, "alphabet size must be positive");
    cells *= s;
    if (cells > kMaxPmfCells) {
      fail(ErrorCode::kShapeMismatch, "pmf exceeds the dense-tensor cell limit");
    }
  }
  if (pmf_values.size() != cells) {
    fail(ErrorCode::kShapeMismatch, "pmf length does not match alphabet shape");
  }
  double total = 0.0;
  for (double p : pmf_values) {
    if (p < 0.0) fail(ErrorCode::kNegativeProbability, "pmf entry below zero");
    total += p;
  }
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    fail(ErrorCode::kNotNormalized, "pmf sums to " + std::to_string(total));
  }
  for (double& p : pmf_values) p /= total;

  JointSourceSpec spec;
  spec.sizes_ = alphabet_sizes;
  spec.pmf_ = std::move(pmf_values);
  return spec;
}

inline void check_subset(const JointSourceSpec& spec, SubsetMask mask) {
  if (mask & ~full_mask(spec.k())) {
    fail(ErrorCode::kIndexOutOfRange, "subset references a source beyond k");
  }
}

// Joint pmf of the sources in `mask`, remaining sources summed out.
inline JointSourceSpec marginalize(const JointSourceSpec& spec, SubsetMask mask) {
  check_subset(spec, mask);
  if (mask == 0) fail(ErrorCode::kEmptySubset, "cannot marginalize onto the empty set");

  const int k = spec.k();
  std::vector<uint32_t> kept;
  std::vector<uint32_t> kept_sizes;
  for (int j = 0; j < k; ++j) {
    if (mask >> j & 1u) {
      kept.push_back(j);
      kept_sizes.push_back(spec.alphabet_sizes()[j]);
    }
  }
  uint64_t out_cells = 1;
  for (uint32_t s : kept_sizes) out_cells *= s;

  std::vector<double> out(out_cells, 0.0);
  for (uint64_t idx = 0; idx < spec.cell_count(); ++idx) {
    std::vector<uint32_t> symbols = spec.unflatten(idx);
    uint64_t out_idx = 0;
    for (size_t m = 0; m < kept.size(); ++m) {
      out_idx = out_idx * kept_sizes[m] + symbols[kept[m]];
    }
    out[out_idx] += spec.pmf()[idx];
  }
  return build_joint(kept_sizes, std::move(out));
}

inline double entropy_bits(const std::vector<double>& pmf) {
  double h = 0.0;
  for (double p : pmf) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h < 0.0 ? 0.0 : h;
}

// H(sources in mask | all remaining sources), in bits.
inline double conditional_entropy(const JointSourceSpec& spec, SubsetMask mask) {
  check_subset(spec, mask);
  if (mask == 0) return 0.0;
  double h_joint = entropy_bits(spec.pmf());
  SubsetMask rest = full_mask(spec.k()) & ~mask;
  if (rest == 0) return h_joint;
  double h_rest = entropy_bits(marginalize(spec, rest).pmf());
  double h = h_joint - h_rest;
  return h < 0.0 ? 0.0 : h;
}

// `count` blocks of `n` i.i.d. symbol tuples. Block b draws from the child
// stream seed_fold(seed, kSampleBlock, b); inverse-CDF over the flat pmf.
inline std::vector<SourceBlock> sample_blocks(const JointSourceSpec& spec, size_t n,
                                              uint64_t seed, size_t count) {
  if (n < 1 || count < 1) {
    fail(ErrorCode::kInvalidArgument, "block length and count must be >= 1");
  }
  std::vector<SourceBlock> blocks;
  blocks.reserve(count);
  const std::vector<double>& pmf = spec.pmf();
  for (size_t b = 0; b < count; ++b) {
    SplitMix64 st(seed_fold(seed, stream_tag::kSampleBlock, b));
    SourceBlock block;
    block.n = n;
    block.symbols.assign(spec.k(), std::vector<uint32_t>(n));
    for (size_t i = 0; i < n; ++i) {
      double u = st.next_double();
      double acc = 0.0;
      uint64_t idx = 0;
      for (; idx + 1 < pmf.size(); ++idx) {
        acc += pmf[idx];
        if (u < acc) break;
      }
      std::vector<uint32_t> symbols = spec.unflatten(idx);
      for (int j = 0; j < spec.k(); ++j) block.symbols[j][i] = symbols[j];
    }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

}  // namespace forkcode
