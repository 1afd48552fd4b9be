#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "forkcode/fork_sim.hpp"
#include "forkcode/serialization.hpp"
#include "support.hpp"

using namespace forkcode;

namespace {

NetworkConfig raw_statistical_config() {
  NetworkConfig config;
  config.mode = NetworkConfig::Mode::kStatistical;
  config.spec = testsupport::dsbs_quarter();
  config.rates = RatePoint{{kUnboundedRate, kUnboundedRate}};
  config.delta = 0.0;
  config.n = 24;
  config.seed = 7;
  return config;
}

}  // namespace

TEST(RunSession, RawRatesDecodeExactly) {
  SessionReport report = run_session(raw_statistical_config());
  EXPECT_TRUE(report.decode_success);
  ASSERT_EQ(report.links.size(), 2u);
  for (const LinkReport& link : report.links) {
    EXPECT_EQ(link.bits_sent, 24u);
    EXPECT_DOUBLE_EQ(link.bits_per_symbol, 1.0);  // log2 |A_j|
  }
}

TEST(RunSession, AccountingIdentities) {
  NetworkConfig config = raw_statistical_config();
  config.rates = RatePoint{{0.9, 1.0}};
  config.delta = 0.05;
  SessionReport report = run_session(config);

  uint64_t transmit_total = 0;
  int transmit_records = 0;
  for (const std::string& event : report.events) {
    if (event.find("\"transmit\"") != std::string::npos) {
      ++transmit_records;
      size_t pos = event.rfind(":");
      transmit_total += std::stoull(event.substr(pos + 1));
    }
  }
  EXPECT_EQ(transmit_records, 2);
  uint64_t link_total = 0;
  for (const LinkReport& link : report.links) {
    link_total += link.bits_sent;
    EXPECT_DOUBLE_EQ(link.bits_per_symbol,
                     static_cast<double>(link.bits_sent) / config.n);
    // ceil rounding grants at most one extra bit per block
    double r = config.rates.rates[link.link - 1];
    EXPECT_LE(link.bits_per_symbol, r + config.delta + 1.0 / config.n + 1e-12);
  }
  EXPECT_EQ(link_total, transmit_total);
  EXPECT_EQ(report.encoded_bits, transmit_total);
}

TEST(RunSession, DeterministicEvents) {
  NetworkConfig config = raw_statistical_config();
  config.rates = RatePoint{{0.9, 1.0}};
  SessionReport a = run_session(config);
  SessionReport b = run_session(config);
  EXPECT_EQ(a.events, b.events);
  EXPECT_EQ(events_to_jsonl(a), events_to_jsonl(b));
  EXPECT_EQ(session_to_json(a).dump(), session_to_json(b).dump());
}

TEST(RunSession, ThreeSendersEmitThreeTransmits) {
  NetworkConfig config;
  config.mode = NetworkConfig::Mode::kStatistical;
  // three independent fair bits
  config.spec = build_joint({2, 2, 2}, std::vector<double>(8, 0.125));
  config.rates = RatePoint{{1.0, 1.0, 1.0}};
  config.delta = 0.0;
  config.n = 8;
  config.seed = 3;
  SessionReport report = run_session(config);
  int links = 0;
  for (const std::string& event : report.events) {
    if (event.find("\"transmit\"") != std::string::npos) {
      ++links;
      EXPECT_NE(event.find("\"link\":" + std::to_string(links)), std::string::npos);
    }
  }
  EXPECT_EQ(links, 3);
}

TEST(RunSession, EncoderSeesOnlyItsOwnSource) {
  // Permuting source 1's block never changes encoder 2's output.
  JointSourceSpec spec = testsupport::dsbs_quarter();
  SourceBlock block = sample_blocks(spec, 16, 10, 1)[0];
  LinearHashCode code(77, 16, 12);
  BitString before = encode_block(block_to_bits(spec, block, 1), code);
  SourceBlock permuted = block;
  std::reverse(permuted.symbols[0].begin(), permuted.symbols[0].end());
  BitString after = encode_block(block_to_bits(spec, permuted, 1), code);
  EXPECT_EQ(before, after);
}

TEST(RunSession, BelowMinimumSumRateMostlyFails) {
  int failures = 0;
  for (uint64_t seed = 0; seed < 10; ++seed) {
    NetworkConfig config = raw_statistical_config();
    config.n = 16;
    config.rates = RatePoint{{0.5, 0.5}};  // sum 1.0 < 1.811
    config.delta = 0.0;
    config.seed = seed;
    config.budget = 1 << 20;
    if (!run_session(config).decode_success) ++failures;
  }
  EXPECT_GE(failures, 6);
}

TEST(RunSession, CombinatorialModeUsesConstructedCodewords) {
  NetworkConfig config;
  config.mode = NetworkConfig::Mode::kCombinatorial;
  config.relation.emplace(testsupport::product_relation(2500, 128, 64, 20));
  config.tuple_index = 17;
  config.int_rates = {12, 11};  // khat = 7 and 6, slack 4
  config.slack = 4.0;
  config.seed = 31337;
  config.budget = 1 << 16;
  SessionReport report = run_session(config);
  EXPECT_TRUE(report.decode_success);
  ASSERT_EQ(report.links.size(), 2u);
  EXPECT_EQ(report.links[0].bits_sent, 12u);
  EXPECT_EQ(report.links[1].bits_sent, 11u);
  EXPECT_EQ(report.links[0].n_symbols, 20u);
  EXPECT_DOUBLE_EQ(report.links[0].bits_per_symbol, 12.0 / 20.0);
}

TEST(RunSession, ConfigShapeValidated) {
  NetworkConfig config = raw_statistical_config();
  config.relation.emplace(testsupport::product_relation(1, 4, 4, 6));
  EXPECT_THROW(run_session(config), Error);

  NetworkConfig neither;
  neither.mode = NetworkConfig::Mode::kStatistical;
  EXPECT_THROW(run_session(neither), Error);
}

TEST(ConfigJson, ParsesBothModes) {
  json stat{{"mode", "statistical"},
            {"spec", spec_to_json(testsupport::dsbs_quarter())},
            {"rates", json::array({0.9, "unbounded"})},
            {"delta", 0.0},
            {"n", 16},
            {"seed", 5},
            {"budget", 65536}};
  NetworkConfig config = config_from_json(stat, ".");
  EXPECT_EQ(config.mode, NetworkConfig::Mode::kStatistical);
  EXPECT_EQ(config.n, 16u);
  EXPECT_EQ(config.rates.rates[1], kUnboundedRate);

  json comb{{"mode", "combinatorial"},
            {"relation", relation_to_json(testsupport::product_relation(9, 8, 8, 10))},
            {"tuple_index", 3},
            {"rates", json::array({7, 7})},
            {"slack", 2.0},
            {"seed", 11}};
  NetworkConfig cc = config_from_json(comb, ".");
  EXPECT_EQ(cc.mode, NetworkConfig::Mode::kCombinatorial);
  EXPECT_EQ(cc.relation->tuple_count(), 64u);
  EXPECT_THROW(config_from_json(json{{"mode", "bogus"}}, "."), Error);
}
