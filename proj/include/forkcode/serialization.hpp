#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "forkcode/binning_codec.hpp"
#include "forkcode/errors.hpp"
#include "forkcode/fork_construct.hpp"
#include "forkcode/fork_sim.hpp"
#include "forkcode/rate_region.hpp"
#include "forkcode/relation.hpp"
#include "forkcode/source_model.hpp"

// File formats for every external surface: JSON specs/plans/relations/configs
// in, CSV/JSON/JSON-lines results out. Writes are atomic (temp file + rename)
// so failed runs never leave partial outputs.

namespace forkcode {

using nlohmann::json;

// --- file helpers -------------------------------------------------------------

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  return content;
}

inline void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIoError, "cannot write " + tmp.string());
    out << content;
    if (!out.good()) fail(ErrorCode::kIoError, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) fail(ErrorCode::kIoError, "rename failed for " + path);
}

inline std::string fmt_double(double v, const char* fmt = "%.6f") {
  char buf[64];
  snprintf(buf, sizeof buf, fmt, v);
  return std::string(buf);
}

inline json parse_json(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(ErrorCode::kParseError, "malformed JSON in " + what);
  return j;
}

// --- source spec ----------------------------------------------------------------

inline json spec_to_json(const JointSourceSpec& spec) {
  return json{{"k", spec.k()},
              {"alphabet_sizes", spec.alphabet_sizes()},
              {"pmf", spec.pmf()}};
}

inline JointSourceSpec spec_from_json(const json& j) {
  if (!j.is_object() || !j.contains("k") || !j.contains("alphabet_sizes") ||
      !j.contains("pmf")) {
    fail(ErrorCode::kParseError, "source spec needs k, alphabet_sizes, pmf");
  }
  std::vector<uint32_t> sizes = j.at("alphabet_sizes").get<std::vector<uint32_t>>();
  if (j.at("k").get<int>() != static_cast<int>(sizes.size())) {
    fail(ErrorCode::kShapeMismatch, "k does not match alphabet_sizes length");
  }
  return build_joint(sizes, j.at("pmf").get<std::vector<double>>());
}

// --- rate region ----------------------------------------------------------------

inline std::string region_to_csv(const RateRegion& region) {
  std::string out = "subset_bitmask,subset_pretty,bound_bits\n";
  for (const RateConstraint& c : region.constraints) {
    out += std::to_string(c.subset) + ",\"" + subset_pretty(c.subset, region.k) +
           "\"," + fmt_double(c.bound) + "\n";
  }
  return out;
}

inline json corners_to_json(const RateRegion& region,
                            const std::vector<CornerPoint>& corners) {
  json arr = json::array();
  for (const CornerPoint& c : corners) {
    arr.push_back(json{{"rates", c.point.rates}, {"permutations", c.permutations}});
  }
  return json{{"k", region.k},
              {"min_sum_rate", min_sum_rate(region)},
              {"corners", arr}};
}

// --- experiment plans -------------------------------------------------------------

inline json rates_to_json(const RatePoint& rates) {
  json arr = json::array();
  for (double r : rates.rates) {
    if (r == kUnboundedRate) {
      arr.push_back("unbounded");
    } else {
      arr.push_back(r);
    }
  }
  return arr;
}

inline RatePoint rates_from_json(const json& j) {
  RatePoint p;
  for (const json& v : j) {
    if (v.is_string()) {
      if (v.get<std::string>() != "unbounded") {
        fail(ErrorCode::kParseError, "rate entries are numbers or \"unbounded\"");
      }
      p.rates.push_back(kUnboundedRate);
    } else {
      p.rates.push_back(v.get<double>());
    }
  }
  validate_rate_point(p);
  return p;
}

inline ExperimentPlan plan_from_json(const json& j) {
  ExperimentPlan plan;
  plan.spec = spec_from_json(j.at("spec"));
  plan.rates = rates_from_json(j.at("rates"));
  plan.delta = j.value("delta", 0.05);
  plan.n_list = j.at("n_list").get<std::vector<size_t>>();
  plan.trials = j.at("trials").get<size_t>();
  if (j.contains("master_seed")) plan.master_seed = j.at("master_seed").get<uint64_t>();
  plan.budget = j.value("budget", uint64_t{1} << 26);
  return plan;
}

inline std::string achievability_header(int k) {
  std::string out = "n";
  for (int j = 1; j <= k; ++j) out += ",r_" + std::to_string(j);
  out += ",delta,trials,errors,error_rate,ci_low,ci_high,mean_candidates,master_seed\n";
  return out;
}

inline std::string achievability_to_csv(const std::vector<AchievabilityRow>& rows, int k) {
  std::string out = achievability_header(k);
  for (const AchievabilityRow& row : rows) {
    if (row.budget_exceeded) continue;  // reported out of band
    out += std::to_string(row.n);
    for (double r : row.rates) {
      out += ",";
      out += r == kUnboundedRate ? "unbounded" : fmt_double(r);
    }
    out += "," + fmt_double(row.delta);
    out += "," + std::to_string(row.trials);
    out += "," + std::to_string(row.errors);
    out += "," + fmt_double(row.error_rate);
    out += "," + fmt_double(row.ci.low);
    out += "," + fmt_double(row.ci.high);
    out += "," + fmt_double(row.mean_candidates, "%.3f");
    out += "," + std::to_string(row.master_seed);
    out += "\n";
  }
  return out;
}

inline json achievability_to_json(const std::vector<AchievabilityRow>& rows) {
  json arr = json::array();
  for (const AchievabilityRow& row : rows) {
    json r{{"n", row.n},
           {"rates", row.rates},
           {"delta", row.delta},
           {"trials", row.trials},
           {"master_seed", row.master_seed},
           {"budget_exceeded", row.budget_exceeded}};
    if (!row.budget_exceeded) {
      r["errors"] = row.errors;
      r["error_rate"] = row.error_rate;
      r["ci_low"] = row.ci.low;
      r["ci_high"] = row.ci.high;
      r["mean_candidates"] = row.mean_candidates;
    }
    arr.push_back(r);
  }
  return json{{"rows", arr}};
}

// --- relations ---------------------------------------------------------------------

inline json relation_to_json(const CandidateRelation& rel) {
  json tuples = json::array();
  for (size_t i = 0; i < rel.tuple_count(); ++i) {
    json row = json::array();
    for (int c = 0; c < rel.columns(); ++c) {
      row.push_back(rel.value(c, rel.tuple(i)[c]).to_string());
    }
    tuples.push_back(row);
  }
  return json{{"k", rel.k()}, {"has_b", rel.has_b()}, {"tuples", tuples}};
}

inline CandidateRelation relation_from_json(const json& j) {
  if (!j.is_object() || !j.contains("k") || !j.contains("tuples")) {
    fail(ErrorCode::kParseError, "relation needs k and tuples");
  }
  CandidateRelation rel(j.at("k").get<int>(), j.value("has_b", false));
  const json& tuples = j.at("tuples");
  if (!tuples.is_array() || tuples.empty()) {
    fail(ErrorCode::kParseError, "relation has no tuples");
  }
  for (const json& row : tuples) {
    std::vector<BitString> coords;
    for (const json& cell : row) {
      coords.push_back(BitString::from_string(cell.get<std::string>()));
    }
    rel.add_tuple(coords);
  }
  return rel;
}

// --- construction / star / necessity -------------------------------------------------

inline json subset_to_json(uint32_t mask, int k) {
  json arr = json::array();
  for (int j = 0; j < k; ++j) {
    if (mask >> j & 1u) arr.push_back(j + 1);
  }
  return arr;
}

inline std::string trace_to_jsonl(const ConstructionResult& result, int k) {
  std::string out;
  for (const LevelTrace& level : result.trace) {
    json checks = json::array();
    for (const CaseCheck& c : level.checks) {
      checks.push_back(json{{"subset", subset_to_json(c.subset_mask, k)},
                            {"case_label", c.case1 ? "case1" : "case2"},
                            {"case_threshold", c.case_threshold},
                            {"rate_sum", c.rate_sum},
                            {"khat_after", c.khat_after},
                            {"margin", c.margin}});
    }
    json line{{"level", level.level + 1},
              {"seed", level.seed},
              {"retries", level.retries},
              {"fingerprint_bits", level.fingerprint_bits},
              {"recover_count", level.recover_count},
              {"subset_checks", checks}};
    out += line.dump();
    out += "\n";
  }
  return out;
}

inline json star_to_json(const StarReport& report) {
  json codewords = json::array();
  for (const Codeword& cw : report.codewords) {
    codewords.push_back(json{{"bits", cw.bits.to_string()},
                             {"length", cw.bits.size()},
                             {"extractor", cw.is_fingerprint ? "fingerprint" : "prefix"},
                             {"seed", cw.seed},
                             {"input_bits", cw.input_bits}});
  }
  return json{{"k", report.k},
              {"rates", report.rates},
              {"slack", report.slack_used},
              {"codewords", codewords},
              {"length_ok", report.length_ok},
              {"lengths_ok", report.lengths_ok},
              {"extractor_description_bits", report.extractor_description_bits},
              {"extractors_reproducible", report.extractors_reproducible},
              {"decode_matches", report.decode_matches},
              {"joint_decode_success", report.joint_decode_success},
              {"recovered_matches", report.recovered_matches},
              {"pass", report.all_clauses_pass()}};
}

inline json necessity_to_json(const NecessityReport& report, int k) {
  json verdicts = json::array();
  for (const SubsetVerdict& v : report.verdicts) {
    verdicts.push_back(json{{"subset", subset_to_json(v.subset, k)},
                            {"rate_sum", v.rate_sum},
                            {"khat", v.khat},
                            {"margin", v.margin},
                            {"pass", v.pass},
                            {"codeword_bits", v.codeword_bits},
                            {"max_fiber_bits", v.max_fiber_bits},
                            {"chain_ok", v.chain_ok}});
  }
  return json{{"verdicts", verdicts},
              {"all_pass", report.all_pass},
              {"consistent", report.consistent}};
}

// --- network config / session report ---------------------------------------------------

inline NetworkConfig config_from_json(const json& j, const std::string& base_dir) {
  NetworkConfig config;
  std::string mode = j.at("mode").get<std::string>();
  config.seed = j.value("seed", uint64_t{0});
  config.budget = j.value("budget", uint64_t{1} << 26);
  if (mode == "statistical") {
    config.mode = NetworkConfig::Mode::kStatistical;
    config.spec = spec_from_json(j.at("spec"));
    config.rates = rates_from_json(j.at("rates"));
    config.delta = j.value("delta", 0.05);
    config.n = j.at("n").get<size_t>();
  } else if (mode == "combinatorial") {
    config.mode = NetworkConfig::Mode::kCombinatorial;
    if (j.contains("relation")) {
      config.relation = relation_from_json(j.at("relation"));
    } else if (j.contains("relation_path")) {
      std::filesystem::path p(j.at("relation_path").get<std::string>());
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      config.relation =
          relation_from_json(parse_json(read_file(p.string()), p.string()));
    } else {
      fail(ErrorCode::kParseError, "combinatorial config needs relation or relation_path");
    }
    config.tuple_index = j.value("tuple_index", size_t{0});
    config.int_rates = j.at("rates").get<std::vector<uint32_t>>();
    config.slack = j.value("slack", 0.0);
  } else {
    fail(ErrorCode::kParseError, "mode must be statistical or combinatorial");
  }
  return config;
}

inline json session_to_json(const SessionReport& report) {
  json links = json::array();
  for (const LinkReport& l : report.links) {
    links.push_back(json{{"link", l.link},
                         {"bits_sent", l.bits_sent},
                         {"n_symbols", l.n_symbols},
                         {"bits_per_symbol", l.bits_per_symbol}});
  }
  return json{{"mode", report.mode},
              {"k", report.k},
              {"n", report.n},
              {"links", links},
              {"decode_success", report.decode_success},
              {"decode_candidates", report.decode_candidates},
              {"phase_work", json{{"sampled_symbols", report.sampled_symbols},
                                  {"encoded_bits", report.encoded_bits}}}};
}

inline std::string events_to_jsonl(const SessionReport& report) {
  std::string out;
  for (const std::string& line : report.events) {
    out += line;
    out += "\n";
  }
  return out;
}

inline void export_events(const SessionReport& report, const std::string& path) {
  atomic_write_file(path, events_to_jsonl(report));
}

}  // namespace forkcode
