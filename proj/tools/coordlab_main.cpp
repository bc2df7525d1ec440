// coordlab: finite-alphabet coordination-coding laboratory.
//
// Subcommands:
//   region check <target.json> --region {noncausal|causal|strict|separation}
//   simulate <config.json> [--out PATH] [--format csv|json] [--plotdata PATH]
//   example binary --p P --eps E --d D [--emit-target PATH] [--emit-witness PATH]
//
// Exit codes: 0 success / member; 1 not_found or infeasible verdicts;
// 2 usage and config errors.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "coordlab/experiment.hpp"

using namespace coordlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerdict = 1;
constexpr int kExitUsage = 2;

void print_witness_summary(const Witness& w) {
  std::printf("witness scheme: %s\n", std::string(scheme_name(w.scheme)).c_str());
  for (const auto& a : w.aux_alphabets)
    std::printf("  aux alphabet %s: %zu symbols\n", a.name().c_str(), a.size());
  for (const auto& [name, c] : w.factors) {
    std::printf("  factor %s:", name.c_str());
    for (size_t r = 0; r < c.row_count(); ++r) {
      std::printf(" [");
      auto row = c.row(r);
      for (size_t i = 0; i < row.size(); ++i)
        std::printf("%s%.6g", i ? " " : "", row[i]);
      std::printf("]");
    }
    std::printf("\n");
  }
  for (const auto& [name, m] : w.maps) {
    std::printf("  map %s:", name.c_str());
    for (size_t i = 0; i < m.table().size(); ++i)
      std::printf(" %s", m.to().symbol(m.table()[i]).c_str());
    std::printf("\n");
  }
  std::printf("  slack: %.6f bits\n", w.slack_bits);
}

int run_region_check(const std::string& target_path, const std::string& region_name,
                     size_t card_u, size_t card_v, int starts, int threads, uint64_t seed) {
  CoordinationTarget target = target_from_json(load_json_file(target_path));

  SearchConfig cfg;
  cfg.starts = starts;
  cfg.threads = threads;
  cfg.seed = seed;

  MembershipVerdict verdict;
  std::string region = region_name == "strict" ? "strictly_causal" : region_name;
  const Scheme scheme = scheme_from_name(region);
  switch (scheme) {
    case Scheme::noncausal:
      verdict = check_noncausal_inner(target, card_u ? card_u : default_card_u(target), cfg);
      break;
    case Scheme::causal:
      verdict = check_causal(target, card_u ? card_u : 2, card_v ? card_v : 4, cfg);
      break;
    case Scheme::strictly_causal:
      verdict = check_strictly_causal(target, card_v ? card_v : 4, cfg);
      break;
    case Scheme::separation:
      verdict = check_separation(target);
      break;
  }

  if (scheme == Scheme::separation) {
    std::printf("I(S;Shat) = %.6f bits\n",
                mutual_information(target.joint, {kAxisS}, {kAxisShat}));
    std::printf("I(X;Y)    = %.6f bits\n",
                mutual_information(target.joint, {kAxisX}, {kAxisY}));
  }

  switch (verdict.status) {
    case MembershipStatus::member_with_witness:
      std::printf("verdict: member_with_witness (region %s)\n", region.c_str());
      print_witness_summary(*verdict.witness);
      return kExitOk;
    case MembershipStatus::not_found:
      std::printf("verdict: not_found (region %s)\n", region.c_str());
      std::printf("  best residual %.3g, note: %s\n", verdict.log.best_residual,
                  verdict.log.note.c_str());
      return kExitVerdict;
    case MembershipStatus::infeasible_factorization:
      std::printf("verdict: infeasible_factorization\n  %s\n", verdict.log.note.c_str());
      return kExitVerdict;
  }
  return kExitVerdict;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coordlab: joint source-channel coordination laboratory"};
  app.require_subcommand(1);

  // region check
  auto* region_cmd = app.add_subcommand("region", "membership checks");
  auto* check_cmd = region_cmd->add_subcommand("check", "decide membership of a target file");
  std::string target_path, region_name;
  size_t card_u = 0, card_v = 0;
  int starts = 64;
  uint64_t check_seed = 0x5eed;
  int check_threads = 1;
  check_cmd->add_option("target", target_path, "target JSON file")->required();
  check_cmd->add_option("--region", region_name, "noncausal|causal|strict|separation")
      ->required()
      ->check(CLI::IsMember({"noncausal", "causal", "strict", "strictly_causal", "separation"}));
  check_cmd->add_option("--card-u", card_u, "auxiliary U cardinality");
  check_cmd->add_option("--card-v", card_v, "auxiliary V cardinality");
  check_cmd->add_option("--budget", starts, "multistart budget (default 64)");
  check_cmd->add_option("--seed", check_seed, "search seed");
  check_cmd->add_option("--threads", check_threads, "worker threads");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "run a Monte Carlo experiment config");
  std::string config_path, out_path, format = "csv", plot_path;
  uint64_t sim_seed = 0;
  bool sim_seed_given = false;
  int sim_threads = 1;
  sim_cmd->add_option("config", config_path, "experiment config JSON")->required();
  sim_cmd->add_option("--out", out_path, "results file (default: results.csv next to stdout summary)");
  sim_cmd->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  sim_cmd->add_option("--plotdata", plot_path, "per-n aggregate series CSV");
  sim_cmd->add_option("--seed", sim_seed, "override the config master_seed")
      ->each([&](const std::string&) { sim_seed_given = true; });
  sim_cmd->add_option("--threads", sim_threads, "worker threads");

  // example binary
  auto* example_cmd = app.add_subcommand("example", "closed-form constructions");
  auto* binary_cmd = example_cmd->add_subcommand("binary", "binary source / BSC instance");
  double p = 0.0, eps = 0.0, d = 0.0;
  std::string emit_target, emit_witness;
  binary_cmd->add_option("--p", p, "source bias")->required();
  binary_cmd->add_option("--eps", eps, "channel crossover")->required();
  binary_cmd->add_option("--d", d, "Hamming distortion of X and Shat")->required();
  binary_cmd->add_option("--emit-target", emit_target, "write the target JSON here");
  binary_cmd->add_option("--emit-witness", emit_witness, "write the witness JSON here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check_cmd->parsed()) {
      return run_region_check(target_path, region_name, card_u, card_v, starts, check_threads,
                              check_seed);
    }
    if (sim_cmd->parsed()) {
      ExperimentConfig cfg;
      try {
        cfg = load_config(config_path);
      } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
      }
      if (sim_seed_given) cfg.master_seed = sim_seed;
      cfg.threads = sim_threads;
      const ResultsTable table = run_experiment(cfg);
      if (!out_path.empty()) emit_results(table, format, out_path);
      if (!plot_path.empty()) emit_plotdata(table, plot_path);
      std::printf("n,trials,median_tv,mean_tv,failure_rate\n");
      for (const auto& a : table.aggregates)
        std::printf("%zu,%zu,%.6g,%.6g,%.6g\n", a.n, a.trials, a.median_tv, a.mean_tv,
                    a.failure_rate);
      size_t errors = 0;
      for (const auto& r : table.rows) errors += !r.error.empty();
      if (errors)
        std::printf("note: %zu of %zu trials recorded errors (see the results table)\n", errors,
                    table.rows.size());
      return kExitOk;
    }
    if (binary_cmd->parsed()) {
      std::pair<CoordinationTarget, Witness> made;
      try {
        made = make_binary_example(p, eps, d);
      } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
      }
      const auto& [target, witness] = made;
      const CertificateCheck check = verify_witness(target, witness);
      std::printf("binary example p=%.4g eps=%.4g d=%.4g\n", p, eps, d);
      std::printf("I(U;S) = %.6f bits\nI(U;Y) = %.6f bits\nslack  = %.6f bits\n",
                  check.lhs_bits, check.rhs_bits, check.slack_bits);
      print_witness_summary(witness);
      if (!emit_target.empty()) save_json_file(emit_target, to_json(target));
      if (!emit_witness.empty()) save_json_file(emit_witness, to_json(witness));
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
