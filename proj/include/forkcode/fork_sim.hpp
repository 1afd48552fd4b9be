#pragma once

#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "forkcode/binning_codec.hpp"
#include "forkcode/fork_construct.hpp"
#include "forkcode/relation.hpp"
#include "forkcode/source_model.hpp"

// End-to-end session on the fork topology: k senders, one receiver, lossless
// ordered links. Statistical mode runs the random-binning codec on a sampled
// block; combinatorial mode runs the fingerprint construction on a relation
// tuple. Sessions are deterministic functions of their config; the event log
// is replayable byte for byte.

namespace forkcode {

struct NetworkConfig {
  enum class Mode { kStatistical, kCombinatorial };
  Mode mode = Mode::kStatistical;

  // Statistical mode.
  std::optional<JointSourceSpec> spec;
  RatePoint rates;        // bits per source symbol
  double delta = 0.05;
  size_t n = 0;           // block length in symbols

  // Combinatorial mode.
  std::optional<CandidateRelation> relation;
  size_t tuple_index = 0;
  std::vector<uint32_t> int_rates;  // bits per codeword
  double slack = 0.0;

  uint64_t seed = 0;
  uint64_t budget = uint64_t{1} << 26;
};

struct LinkReport {
  int link = 0;             // 1-based, one per source
  uint64_t bits_sent = 0;   // encoder output length, exact
  uint64_t n_symbols = 0;   // symbols carried (bits for combinatorial mode)
  double bits_per_symbol = 0.0;
};

struct SessionReport {
  std::string mode;
  int k = 0;
  uint64_t n = 0;
  std::vector<LinkReport> links;
  bool decode_success = false;
  uint64_t decode_candidates = 0;
  // Deterministic per-phase work counters (the serializable analogue of
  // phase timings).
  uint64_t sampled_symbols = 0;
  uint64_t encoded_bits = 0;
  // Replayable JSON-lines event log, one record per line.
  std::vector<std::string> events;
};

namespace detail {

inline void emit(SessionReport& report, const std::string& line) {
  report.events.push_back(line);
}

inline std::string fmt_event(const char* fmt, ...) {
  char buf[256];
  va_list args;
  va_start(args, fmt);
  vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return std::string(buf);
}

}  // namespace detail

inline SessionReport run_session(const NetworkConfig& config) {
  if (config.spec.has_value() == config.relation.has_value()) {
    fail(ErrorCode::kInvalidArgument, "config must carry exactly one of spec/relation");
  }
  SessionReport report;
  if (config.mode == NetworkConfig::Mode::kStatistical) {
    if (!config.spec) fail(ErrorCode::kInvalidArgument, "statistical mode needs a source spec");
    const JointSourceSpec& spec = *config.spec;
    const int k = spec.k();
    report.mode = "statistical";
    report.k = k;
    report.n = config.n;

    ExperimentPlan plan;
    plan.spec = spec;
    plan.rates = config.rates;
    plan.delta = config.delta;
    plan.budget = config.budget;

    SourceBlock block = sample_blocks(
        spec, config.n, seed_fold(config.seed, stream_tag::kTrialSample, config.n, 0),
        1)[0];
    report.sampled_symbols = static_cast<uint64_t>(k) * config.n;
    detail::emit(report, detail::fmt_event("{\"type\":\"source_emit\",\"sources\":%d,\"n\":%zu}",
                                           k, config.n));

    std::vector<LinearHashCode> codes;
    std::vector<EncodedMessage> messages;
    for (int j = 0; j < k; ++j) {
      size_t l = message_bits(plan, j, config.n);
      codes.emplace_back(seed_fold(config.seed, stream_tag::kTrialCode, config.n, 0, j),
                         config.n * symbol_bits(spec.alphabet_sizes()[j]), l);
      // Encoder j sees only source j's block and the shared seed.
      messages.push_back({j, encode_block(block_to_bits(spec, block, j), codes.back())});
      report.encoded_bits += l;
      detail::emit(report, detail::fmt_event("{\"type\":\"encode\",\"source\":%d,\"bits\":%zu}",
                                             j + 1, l));
      detail::emit(report, detail::fmt_event("{\"type\":\"transmit\",\"link\":%d,\"bits\":%zu}",
                                             j + 1, l));
      LinkReport lr;
      lr.link = j + 1;
      lr.bits_sent = l;
      lr.n_symbols = config.n;
      lr.bits_per_symbol = static_cast<double>(l) / static_cast<double>(config.n);
      report.links.push_back(lr);
    }

    DecodeResult decoded = decode_joint(messages, spec, config.n, codes, config.budget);
    report.decode_candidates = decoded.candidates_scored;
    detail::emit(report, detail::fmt_event(
                             "{\"type\":\"decode_attempt\",\"candidates\":%llu}",
                             static_cast<unsigned long long>(decoded.candidates_scored)));
    report.decode_success = decoded.status == DecodeResult::Status::kDecoded &&
                            decoded.block == block;
    detail::emit(report, detail::fmt_event("{\"type\":\"decode_result\",\"success\":%s}",
                                           report.decode_success ? "true" : "false"));
    return report;
  }

  // Combinatorial mode.
  if (!config.relation) fail(ErrorCode::kInvalidArgument, "combinatorial mode needs a relation");
  const CandidateRelation& rel = *config.relation;
  if (config.tuple_index >= rel.tuple_count()) {
    fail(ErrorCode::kIndexOutOfRange, "tuple index beyond relation size");
  }
  const int k = rel.k();
  report.mode = "combinatorial";
  report.k = k;

  ComplexitySurrogate sur(rel);
  std::vector<BitString> a = rel.tuple_strings(config.tuple_index);
  BitString b;
  const BitString* b_ptr = nullptr;
  if (rel.has_b()) {
    b = rel.value(rel.b_column(), rel.tuple(config.tuple_index)[rel.b_column()]);
    b_ptr = &b;
  }
  uint64_t total_bits = 0;
  for (const BitString& s : a) total_bits += s.size();
  report.n = total_bits;
  report.sampled_symbols = total_bits;
  detail::emit(report, detail::fmt_event(
                           "{\"type\":\"source_emit\",\"sources\":%d,\"n\":%llu}", k,
                           static_cast<unsigned long long>(total_bits)));

  ConstructionResult built =
      fork_code_construct(sur, a, b_ptr, config.int_rates, config.seed, config.slack);
  if (built.status != ConstructionResult::Status::kSuccess) {
    fail(built.status == ConstructionResult::Status::kPreconditionViolated
             ? ErrorCode::kPreconditionViolated
             : ErrorCode::kConstructionFailed,
         "fork code construction failed");
  }

  for (int j = 0; j < k; ++j) {
    size_t l = built.codewords[j].bits.size();
    report.encoded_bits += l;
    detail::emit(report, detail::fmt_event("{\"type\":\"encode\",\"source\":%d,\"bits\":%zu}",
                                           j + 1, l));
    detail::emit(report, detail::fmt_event("{\"type\":\"transmit\",\"link\":%d,\"bits\":%zu}",
                                           j + 1, l));
    LinkReport lr;
    lr.link = j + 1;
    lr.bits_sent = l;
    lr.n_symbols = a[j].size();
    lr.bits_per_symbol = static_cast<double>(l) / static_cast<double>(a[j].size());
    report.links.push_back(lr);
  }

  StarReport star = verify_star(sur, a, b_ptr, built.codewords, config.int_rates,
                                config.slack, config.budget);
  report.decode_candidates = star.decode_matches;
  detail::emit(report, detail::fmt_event(
                           "{\"type\":\"decode_attempt\",\"candidates\":%llu}",
                           static_cast<unsigned long long>(star.decode_matches)));
  report.decode_success = star.joint_decode_success && star.recovered_matches;
  detail::emit(report, detail::fmt_event("{\"type\":\"decode_result\",\"success\":%s}",
                                         report.decode_success ? "true" : "false"));
  return report;
}

}  // namespace forkcode
