#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "forkcode/bits.hpp"
#include "forkcode/errors.hpp"
#include "forkcode/gf2.hpp"
#include "forkcode/linear_hash.hpp"
#include "forkcode/prng.hpp"
#include "forkcode/rate_region.hpp"
#include "forkcode/source_model.hpp"

// Random binning over error-free links: each sender hashes its binarized
// block with a seeded GF(2)-linear map, the receiver searches the product
// of hash preimages (affine cosets) for the jointly most likely tuple.

namespace forkcode {

// --- symbol <-> bit packing -------------------------------------------------

inline size_t symbol_bits(uint32_t alphabet_size) { return ceil_log2(alphabet_size); }

// Symbol i occupies bits [i*m, (i+1)*m), most significant bit first.
inline BitString pack_symbols(const std::vector<uint32_t>& symbols, uint32_t alphabet_size) {
  size_t m = symbol_bits(alphabet_size);
  BitString out(symbols.size() * m);
  for (size_t i = 0; i < symbols.size(); ++i) {
    for (size_t t = 0; t < m; ++t) {
      out.set(i * m + t, (symbols[i] >> (m - 1 - t)) & 1u);
    }
  }
  return out;
}

// Returns false when some group decodes to a value >= alphabet_size.
inline bool unpack_symbols(const BitString& bits, uint32_t alphabet_size, size_t n,
                           std::vector<uint32_t>& out) {
  size_t m = symbol_bits(alphabet_size);
  out.assign(n, 0);
  for (size_t i = 0; i < n; ++i) {
    uint32_t v = 0;
    for (size_t t = 0; t < m; ++t) v = (v << 1) | (bits.get(i * m + t) ? 1u : 0u);
    if (v >= alphabet_size) return false;
    out[i] = v;
  }
  return true;
}

inline BitString block_to_bits(const JointSourceSpec& spec, const SourceBlock& block,
                               int source) {
  return pack_symbols(block.symbols[source], spec.alphabet_sizes()[source]);
}

// --- joint maximum-likelihood decoding --------------------------------------

// Candidate score contract: with count[c] the per-cell symbol-tuple
// histogram, score = sum over flat cells in index order of
// count[c] * log2(pmf[c]), zero counts skipped. Ties in score fall to the
// lexicographically smaller concatenation of the candidates' bit strings.

struct DecodeResult {
  enum class Status { kDecoded, kNoCandidate };
  Status status = Status::kNoCandidate;
  SourceBlock block;
  uint64_t candidates_scored = 0;
};

namespace detail {

inline std::vector<double> log2_pmf(const JointSourceSpec& spec) {
  std::vector<double> w(spec.cell_count());
  for (size_t i = 0; i < w.size(); ++i) {
    double p = spec.pmf()[i];
    w[i] = p > 0.0 ? std::log2(p) : -std::numeric_limits<double>::infinity();
  }
  return w;
}

inline double score_histogram(const std::vector<uint64_t>& counts,
                              const std::vector<double>& weights) {
  double score = 0.0;
  for (size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] > 0) score += static_cast<double>(counts[c]) * weights[c];
  }
  return score;
}

// Generic product-coset scan. Candidates with out-of-alphabet symbol groups
// are skipped (they correspond to no source block).
inline DecodeResult decode_generic(const std::vector<Coset>& cosets,
                                   const JointSourceSpec& spec, size_t n,
                                   const std::vector<double>& weights) {
  const int k = spec.k();
  std::vector<uint64_t> sizes(k);
  for (int j = 0; j < k; ++j) sizes[j] = cosets[j].size();

  DecodeResult result;
  std::vector<uint64_t> odometer(k, 0);
  std::vector<BitString> cand_bits(k);
  std::vector<std::vector<uint32_t>> cand_symbols(k);
  std::vector<uint64_t> counts(spec.cell_count());
  bool have_best = false;
  double best_score = 0.0;
  std::vector<BitString> best_bits;
  std::vector<std::vector<uint32_t>> best_symbols;

  for (int j = 0; j < k; ++j) cand_bits[j] = cosets[j].element(0);

  while (true) {
    ++result.candidates_scored;
    bool valid = true;
    for (int j = 0; j < k && valid; ++j) {
      valid = unpack_symbols(cand_bits[j], spec.alphabet_sizes()[j], n, cand_symbols[j]);
    }
    if (valid) {
      counts.assign(spec.cell_count(), 0);
      for (size_t i = 0; i < n; ++i) {
        uint64_t idx = 0;
        for (int j = 0; j < k; ++j) {
          idx = idx * spec.alphabet_sizes()[j] + cand_symbols[j][i];
        }
        ++counts[idx];
      }
      double score = score_histogram(counts, weights);
      bool better = false;
      if (!have_best || score > best_score) {
        better = true;
      } else if (score == best_score) {
        for (int j = 0; j < k; ++j) {
          if (cand_bits[j] != best_bits[j]) {
            better = cand_bits[j].lex_less(best_bits[j]);
            break;
          }
        }
      }
      if (better) {
        have_best = true;
        best_score = score;
        best_bits = cand_bits;
        best_symbols = cand_symbols;
      }
    }
    // Odometer step over the product of cosets.
    int j = k - 1;
    for (; j >= 0; --j) {
      if (++odometer[j] < sizes[j]) {
        cand_bits[j] = cosets[j].element(odometer[j]);
        break;
      }
      odometer[j] = 0;
      cand_bits[j] = cosets[j].element(0);
    }
    if (j < 0) break;
  }

  if (!have_best) return result;  // all candidates invalid
  result.status = DecodeResult::Status::kDecoded;
  result.block.n = n;
  result.block.symbols = std::move(best_symbols);
  return result;
}

// Fast scan for k=2 binary sources: the smaller coset is iterated in an
// outer loop, the larger one word-wise with Gray-code updates. For a fixed
// outer element the score depends only on (popcount(y), popcount(y & outer)),
// so scores are read from a table precomputed with the canonical histogram
// formula (bitwise identical to the generic path).
inline DecodeResult decode_two_binary(const std::vector<Coset>& cosets, size_t n,
                                      const std::vector<double>& weights) {
  const int inner = cosets[0].dimension() >= cosets[1].dimension() ? 0 : 1;
  const int outer = 1 - inner;
  const Coset& inner_cs = cosets[inner];
  const Coset& outer_cs = cosets[outer];
  const size_t words = inner_cs.particular().word_count();

  // Score tables keyed by the outer block's popcount; entry [ci*(n+1)+cross]
  // covers ci ones in the inner block, cross positions with ones in both.
  std::vector<std::vector<double>> tables_by_outer_ones(n + 1);
  std::vector<uint64_t> counts(4);
  auto table_for = [&](uint64_t outer_ones) -> const std::vector<double>& {
    std::vector<double>& table = tables_by_outer_ones[outer_ones];
    if (table.empty()) {
      table.assign((n + 1) * (n + 1), -std::numeric_limits<double>::infinity());
      for (uint64_t ci = 0; ci <= n; ++ci) {
        for (uint64_t cross = 0; cross <= std::min(ci, outer_ones); ++cross) {
          uint64_t ones0 = inner == 0 ? ci : outer_ones;
          uint64_t ones1 = inner == 1 ? ci : outer_ones;
          if (ones0 + ones1 > n + cross) continue;  // infeasible overlap
          counts[3] = cross;
          counts[2] = ones0 - cross;
          counts[1] = ones1 - cross;
          counts[0] = n - ones0 - ones1 + cross;
          table[ci * (n + 1) + cross] = score_histogram(counts, weights);
        }
      }
    }
    return table;
  };

  std::vector<std::vector<uint64_t>> basis_w;
  basis_w.reserve(inner_cs.dimension());
  for (const BitString& b : inner_cs.basis()) basis_w.push_back(b.words());

  auto lex_less_words = [&](const std::vector<uint64_t>& a,
                            const std::vector<uint64_t>& b) {
    for (size_t i = 0; i < words; ++i) {
      uint64_t diff = a[i] ^ b[i];
      if (diff != 0) {
        int bit = std::countr_zero(diff);
        return ((a[i] >> bit) & 1u) == 0;
      }
    }
    return false;
  };

  bool have_best = false;
  double best_score = 0.0;
  std::vector<uint64_t> best_inner, best_outer;
  uint64_t inner_total = inner_cs.size();

  outer_cs.for_each([&](const BitString& outer_bits) {
    const std::vector<uint64_t>& ow = outer_bits.words();
    const std::vector<double>& table = table_for(outer_bits.popcount());
    std::vector<uint64_t> y(inner_cs.particular().words());
    for (uint64_t i = 0;; ++i) {
      if (i != 0) {
        const std::vector<uint64_t>& bw = basis_w[std::countr_zero(i)];
        for (size_t w = 0; w < words; ++w) y[w] ^= bw[w];
      }
      uint64_t ci = 0, cross = 0;
      for (size_t w = 0; w < words; ++w) {
        ci += std::popcount(y[w]);
        cross += std::popcount(y[w] & ow[w]);
      }
      double score = table[ci * (n + 1) + cross];
      bool better = !have_best || score > best_score;
      if (!better && score == best_score) {
        // Lexicographic tie-break on the concatenation source 0, source 1.
        const std::vector<uint64_t>& c0 = inner == 0 ? y : ow;
        const std::vector<uint64_t>& c1 = inner == 0 ? ow : y;
        const std::vector<uint64_t>& b0 = inner == 0 ? best_inner : best_outer;
        const std::vector<uint64_t>& b1 = inner == 0 ? best_outer : best_inner;
        if (c0 != b0) {
          better = lex_less_words(c0, b0);
        } else {
          better = lex_less_words(c1, b1);
        }
      }
      if (better) {
        have_best = true;
        best_score = score;
        best_inner = y;
        best_outer = ow;
      }
      if (i + 1 == inner_total) break;
    }
  });

  DecodeResult result;
  result.candidates_scored = inner_total * outer_cs.size();
  result.status = DecodeResult::Status::kDecoded;
  result.block.n = n;
  result.block.symbols.assign(2, {});
  BitString inner_bits(n), outer_final(n);
  for (size_t w = 0; w < words; ++w) {
    inner_bits.set_word(w, best_inner[w]);
    outer_final.set_word(w, best_outer[w]);
  }
  unpack_symbols(inner == 0 ? inner_bits : outer_final, 2, n, result.block.symbols[0]);
  unpack_symbols(inner == 1 ? inner_bits : outer_final, 2, n, result.block.symbols[1]);
  return result;
}

}  // namespace detail

// Exact joint ML decoding over the product of the k hash cosets.
// Throws BudgetExceeded when the product of coset sizes exceeds `budget`;
// returns NoCandidate only when some coset is empty.
inline DecodeResult decode_joint(const std::vector<EncodedMessage>& messages,
                                 const JointSourceSpec& spec, size_t n,
                                 const std::vector<LinearHashCode>& codes,
                                 uint64_t budget) {
  const int k = spec.k();
  if (static_cast<int>(messages.size()) != k || static_cast<int>(codes.size()) != k) {
    fail(ErrorCode::kDimensionMismatch, "need one message and one code per source");
  }
  std::vector<Coset> cosets;
  cosets.reserve(k);
  size_t dim_sum = 0;
  for (int j = 0; j < k; ++j) {
    if (messages[j].bits.size() != codes[j].output_bits()) {
      fail(ErrorCode::kLengthMismatch, "message length != code output length");
    }
    cosets.push_back(codes[j].coset(messages[j].bits));
    if (!cosets.back().feasible()) {
      return DecodeResult{};  // NoCandidate
    }
    dim_sum += cosets.back().dimension();
  }
  if (dim_sum >= 63 || (uint64_t{1} << dim_sum) > budget) {
    fail(ErrorCode::kBudgetExceeded, "product of coset sizes exceeds budget");
  }

  std::vector<double> weights = detail::log2_pmf(spec);
  if (k == 2 && spec.alphabet_sizes()[0] == 2 && spec.alphabet_sizes()[1] == 2) {
    return detail::decode_two_binary(cosets, n, weights);
  }
  return detail::decode_generic(cosets, spec, n, weights);
}

// --- achievability experiments ----------------------------------------------

struct ExperimentPlan {
  JointSourceSpec spec;
  RatePoint rates;
  double delta = 0.05;
  std::vector<size_t> n_list;
  size_t trials = 0;
  uint64_t master_seed = 0;
  uint64_t budget = uint64_t{1} << 26;
};

// Message length in bits for one source at block length n, clamped to the
// raw binarized length.
inline size_t message_bits(const ExperimentPlan& plan, int source, size_t n) {
  size_t raw = n * symbol_bits(plan.spec.alphabet_sizes()[source]);
  double r = plan.rates.rates[source];
  if (r == kUnboundedRate) return raw;
  double l = std::ceil((r + plan.delta) * static_cast<double>(n));
  if (l < 0.0) l = 0.0;
  return std::min<size_t>(raw, static_cast<size_t>(l));
}

struct WilsonInterval {
  double low = 0.0, high = 1.0;
};

inline WilsonInterval wilson_interval(uint64_t errors, uint64_t trials) {
  if (trials == 0) return {0.0, 1.0};
  constexpr double z = 1.959963984540054;  // 95% two-sided normal quantile
  double t = static_cast<double>(trials);
  double p = static_cast<double>(errors) / t;
  double z2 = z * z;
  double denom = 1.0 + z2 / t;
  double center = (p + z2 / (2.0 * t)) / denom;
  double half = z * std::sqrt(p * (1.0 - p) / t + z2 / (4.0 * t * t)) / denom;
  double lo = center - half, hi = center + half;
  return {lo < 0.0 ? 0.0 : lo, hi > 1.0 ? 1.0 : hi};
}

struct AchievabilityRow {
  size_t n = 0;
  std::vector<double> rates;
  double delta = 0.0;
  uint64_t trials = 0;
  uint64_t errors = 0;
  double error_rate = 0.0;
  WilsonInterval ci;
  double mean_candidates = 0.0;
  uint64_t master_seed = 0;
  bool budget_exceeded = false;
};

// Runs `trials` independent sessions per block length. Trial t at length n
// draws its block from seed_fold(master, kTrialSample, n, t) and its code
// for source j from seed_fold(master, kTrialCode, n, t, j); results are a
// pure function of the plan.
inline std::vector<AchievabilityRow> run_achievability(const ExperimentPlan& plan) {
  validate_rate_point(plan.rates);
  if (plan.rates.k() != plan.spec.k()) {
    fail(ErrorCode::kDimensionMismatch, "rate dimension != source count");
  }
  std::vector<AchievabilityRow> rows;
  if (plan.trials == 0) return rows;

  const int k = plan.spec.k();
  for (size_t n : plan.n_list) {
    AchievabilityRow row;
    row.n = n;
    row.rates = plan.rates.rates;
    row.delta = plan.delta;
    row.trials = plan.trials;
    row.master_seed = plan.master_seed;

    std::vector<size_t> lengths(k);
    size_t full_rank_dim_sum = 0;
    for (int j = 0; j < k; ++j) {
      lengths[j] = message_bits(plan, j, n);
      full_rank_dim_sum += n * symbol_bits(plan.spec.alphabet_sizes()[j]) - lengths[j];
    }
    if (full_rank_dim_sum >= 63 || (uint64_t{1} << full_rank_dim_sum) > plan.budget) {
      row.budget_exceeded = true;
      rows.push_back(row);
      continue;
    }

    uint64_t total_candidates = 0;
    try {
      for (size_t t = 0; t < plan.trials; ++t) {
        SourceBlock block = sample_blocks(
            plan.spec, n, seed_fold(plan.master_seed, stream_tag::kTrialSample, n, t),
            1)[0];
        std::vector<LinearHashCode> codes;
        std::vector<EncodedMessage> messages;
        codes.reserve(k);
        messages.reserve(k);
        for (int j = 0; j < k; ++j) {
          codes.emplace_back(
              seed_fold(plan.master_seed, stream_tag::kTrialCode, n, t, j),
              n * symbol_bits(plan.spec.alphabet_sizes()[j]), lengths[j]);
          messages.push_back({j, encode_block(block_to_bits(plan.spec, block, j),
                                              codes.back())});
        }
        DecodeResult decoded = decode_joint(messages, plan.spec, n, codes, plan.budget);
        total_candidates += decoded.candidates_scored;
        if (decoded.status != DecodeResult::Status::kDecoded ||
            !(decoded.block == block)) {
          ++row.errors;
        }
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kBudgetExceeded) throw;
      row.budget_exceeded = true;
      rows.push_back(row);
      continue;
    }
    row.error_rate = static_cast<double>(row.errors) / static_cast<double>(row.trials);
    row.ci = wilson_interval(row.errors, row.trials);
    row.mean_candidates =
        static_cast<double>(total_candidates) / static_cast<double>(row.trials);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace forkcode
