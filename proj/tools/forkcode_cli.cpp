// Command-line harness: computes admissible-rate regions, runs random-binning
// achievability sweeps, builds and audits fingerprint codes over relations,
// and simulates single fork-network sessions. Every stochastic subcommand is
// seeded explicitly; outputs are deterministic functions of the inputs.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "forkcode/forkcode.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitBudget = 3;
constexpr int kExitConstruction = 4;

int map_error(const forkcode::Error& e) {
  switch (e.code()) {
    case forkcode::ErrorCode::kBudgetExceeded:
      return kExitBudget;
    case forkcode::ErrorCode::kConstructionFailed:
    case forkcode::ErrorCode::kPreconditionViolated:
      return kExitConstruction;
    default:
      return kExitInput;
  }
}

std::string sibling_path(const std::string& out, const std::string& suffix) {
  std::filesystem::path p(out);
  std::filesystem::path sib = p.parent_path() / (p.stem().string() + suffix);
  return sib.string();
}

std::string infer_format(const std::string& out, const std::string& override_fmt) {
  if (!override_fmt.empty()) return override_fmt;
  std::string ext = std::filesystem::path(out).extension().string();
  return ext == ".json" ? "json" : "csv";
}

struct SeedFlag {
  std::optional<uint64_t> value;
};

uint64_t resolve_seed(const SeedFlag& flag, const forkcode::json& doc,
                      const char* field) {
  if (flag.value) return *flag.value;
  if (doc.contains(field)) return doc.at(field).get<uint64_t>();
  forkcode::fail(forkcode::ErrorCode::kInvalidArgument,
                 std::string("no --seed flag and no \"") + field +
                     "\" in the input file; wall-clock seeding is not supported");
}

int cmd_region(const std::string& spec_path, const std::string& out,
               const std::string& fmt) {
  using namespace forkcode;
  JointSourceSpec spec = spec_from_json(parse_json(read_file(spec_path), spec_path));
  RateRegion region = build_region(spec);
  std::vector<CornerPoint> corners = corner_points(region);

  if (infer_format(out, fmt) == "json") {
    json constraints = json::array();
    for (const RateConstraint& c : region.constraints) {
      constraints.push_back(json{{"subset_bitmask", c.subset},
                                 {"subset_pretty", subset_pretty(c.subset, region.k)},
                                 {"bound_bits", c.bound}});
    }
    atomic_write_file(out, json{{"k", region.k}, {"constraints", constraints}}.dump(2) + "\n");
  } else {
    atomic_write_file(out, region_to_csv(region));
  }
  atomic_write_file(sibling_path(out, ".corners.json"),
                    corners_to_json(region, corners).dump(2) + "\n");
  return kExitOk;
}

int cmd_achievability(const std::string& plan_path, const std::string& out,
                      const std::string& fmt, const SeedFlag& seed,
                      std::optional<uint64_t> trials,
                      const std::vector<size_t>& n_override,
                      std::optional<double> delta, std::optional<uint64_t> budget) {
  using namespace forkcode;
  json doc = parse_json(read_file(plan_path), plan_path);
  ExperimentPlan plan = plan_from_json(doc);
  plan.master_seed = resolve_seed(seed, doc, "master_seed");
  if (trials) plan.trials = *trials;
  if (!n_override.empty()) plan.n_list = n_override;
  if (delta) plan.delta = *delta;
  if (budget) plan.budget = *budget;

  std::vector<AchievabilityRow> rows = run_achievability(plan);
  size_t exceeded = 0;
  for (const AchievabilityRow& row : rows) {
    if (row.budget_exceeded) {
      ++exceeded;
      std::cerr << "warning: n=" << row.n << " exceeds the decode budget; row omitted\n";
    }
  }
  if (infer_format(out, fmt) == "json") {
    atomic_write_file(out, achievability_to_json(rows).dump(2) + "\n");
  } else {
    atomic_write_file(out, achievability_to_csv(rows, plan.spec.k()));
  }
  if (!rows.empty() && exceeded == rows.size()) return kExitBudget;
  return kExitOk;
}

int cmd_fingerprint(const std::string& relation_path, const std::string& out,
                    const SeedFlag& seed, const std::vector<uint32_t>& rates,
                    std::optional<double> slack, size_t tuple_index,
                    uint64_t budget) {
  using namespace forkcode;
  json doc = parse_json(read_file(relation_path), relation_path);
  CandidateRelation rel = relation_from_json(doc);
  if (tuple_index >= rel.tuple_count()) {
    fail(ErrorCode::kIndexOutOfRange, "tuple index beyond relation size");
  }
  if (static_cast<int>(rates.size()) != rel.k()) {
    fail(ErrorCode::kDimensionMismatch, "need one rate per relation coordinate");
  }
  uint64_t master_seed = resolve_seed(seed, doc, "seed");

  ComplexitySurrogate sur(rel);
  std::vector<BitString> a = rel.tuple_strings(tuple_index);
  BitString b;
  const BitString* b_ptr = nullptr;
  if (rel.has_b()) {
    b = rel.value(rel.b_column(), rel.tuple(tuple_index)[rel.b_column()]);
    b_ptr = &b;
  }
  double slack_bits = slack ? *slack : default_slack(a, b_ptr);

  ConstructionResult built =
      fork_code_construct(sur, a, b_ptr, rates, master_seed, slack_bits);
  if (built.status == ConstructionResult::Status::kPreconditionViolated) {
    std::cerr << "error: rates inadmissible for subset "
              << subset_pretty(built.failing_subset, rel.k()) << " (deficit "
              << fmt_double(built.deficit, "%.3f") << " bits)\n";
    return kExitConstruction;
  }
  if (built.status == ConstructionResult::Status::kConstructionFailed) {
    std::cerr << "error: fingerprint collisions persisted at level "
              << built.failing_level + 1 << " after retries\n";
    return kExitConstruction;
  }

  StarReport star = verify_star(sur, a, b_ptr, built.codewords, rates, slack_bits, budget);
  NecessityReport necessity = necessity_audit(star, sur, rates, slack_bits);

  json report{{"construction_status", "success"},
              {"tuple_index", tuple_index},
              {"master_seed", master_seed},
              {"star", star_to_json(star)},
              {"necessity", necessity_to_json(necessity, rel.k())}};
  atomic_write_file(out, report.dump(2) + "\n");
  atomic_write_file(sibling_path(out, ".trace.jsonl"), trace_to_jsonl(built, rel.k()));
  return star.all_clauses_pass() ? kExitOk : kExitConstruction;
}

int cmd_simulate(const std::string& config_path, const std::string& out,
                 const SeedFlag& seed) {
  using namespace forkcode;
  json doc = parse_json(read_file(config_path), config_path);
  std::string base_dir = std::filesystem::path(config_path).parent_path().string();
  NetworkConfig config = config_from_json(doc, base_dir);
  config.seed = resolve_seed(seed, doc, "seed");

  SessionReport report = run_session(config);
  atomic_write_file(out, session_to_json(report).dump(2) + "\n");
  export_events(report, sibling_path(out, ".events.jsonl"));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fork-network coding toolkit"};
  app.require_subcommand(1);

  std::string input, out, fmt;
  SeedFlag seed;
  std::optional<uint64_t> trials, budget_opt;
  std::optional<double> delta, slack;
  std::vector<size_t> n_list;
  std::vector<uint32_t> rates;
  size_t tuple_index = 0;
  uint64_t budget = uint64_t{1} << 26;

  auto add_seed = [&seed](CLI::App* cmd) {
    cmd->add_option_function<uint64_t>(
        "--seed", [&seed](const uint64_t& v) { seed.value = v; },
        "master seed (required unless the input file carries one)");
  };

  CLI::App* region = app.add_subcommand("region", "rate-region constraints and corner points");
  region->add_option("spec", input, "source spec JSON")->required();
  region->add_option("--out", out, "output path")->required();
  region->add_option("--format", fmt, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  CLI::App* ach = app.add_subcommand("achievability", "random-binning error-rate sweep");
  ach->add_option("plan", input, "experiment plan JSON")->required();
  ach->add_option("--out", out, "output path")->required();
  ach->add_option("--format", fmt, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  add_seed(ach);
  ach->add_option("--trials", trials, "override trial count");
  ach->add_option("--n", n_list, "override block lengths")->delimiter(',');
  ach->add_option("--delta", delta, "override rate margin");
  ach->add_option("--budget", budget_opt, "override decoder budget");

  CLI::App* fp = app.add_subcommand("fingerprint", "fingerprint construction and audits");
  fp->add_option("relation", input, "relation JSON")->required();
  fp->add_option("--out", out, "report path")->required();
  fp->add_option("--rates", rates, "codeword bit budgets")->delimiter(',')->required();
  add_seed(fp);
  fp->add_option("--slack", slack, "slack bits (default 2*ceil(log2 n)+16)");
  fp->add_option("--tuple-index", tuple_index, "relation tuple to encode");
  fp->add_option("--budget", budget, "decode enumeration budget");

  CLI::App* sim = app.add_subcommand("simulate", "single fork-network session");
  sim->add_option("config", input, "network config JSON")->required();
  sim->add_option("--out", out, "report path")->required();
  add_seed(sim);

  CLI11_PARSE(app, argc, argv);

  try {
    if (region->parsed()) return cmd_region(input, out, fmt);
    if (ach->parsed()) {
      return cmd_achievability(input, out, fmt, seed, trials, n_list, delta, budget_opt);
    }
    if (fp->parsed()) {
      return cmd_fingerprint(input, out, seed, rates, slack, tuple_index, budget);
    }
    if (sim->parsed()) return cmd_simulate(input, out, seed);
  } catch (const forkcode::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return map_error(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
