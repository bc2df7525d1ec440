#pragma once

#include "coordlab/blockmarkov.hpp"
#include "coordlab/hybrid.hpp"
#include "coordlab/serialize.hpp"

namespace coordlab {

enum class ExperimentScheme { hybrid, separation, blockmarkov_strict, blockmarkov_causal,
                              region_check };

std::string_view experiment_scheme_name(ExperimentScheme s);
ExperimentScheme experiment_scheme_from_name(std::string_view name);

// Config parse/validation failure; `details` lists every violation found.
struct ConfigError : std::runtime_error {
  std::vector<std::string> details;
  explicit ConfigError(std::vector<std::string> problems);
};

struct ExperimentConfig {
  ExperimentScheme scheme = ExperimentScheme::hybrid;

  // target provenance: exactly one of preset / explicit target
  std::optional<std::string> preset_name;  // "binary_example" | "lossless_state"
  std::map<std::string, double> preset_params;
  std::optional<CoordinationTarget> target;
  std::optional<Witness> witness;  // optional override; otherwise preset/search provides it

  std::vector<size_t> n_values;
  size_t trials_per_n = 1;
  size_t blocks = 0;  // B, block-Markov schemes only
  EpsilonPolicy epsilon_policy = EpsilonPolicy::schedule();
  double rate_margin = -1.0;  // scheme-appropriate default when negative
  double failure_epsilon = 0.15;
  uint64_t master_seed = 0;
  std::optional<ForcedRates> force_rates;  // block-Markov stress knob

  // region_check options
  std::optional<Scheme> region;
  SearchConfig search;
  std::optional<size_t> card_u, card_v;

  int threads = 1;  // runtime knob (CLI flag), not part of the file schema
};

ExperimentConfig config_from_json(const Json& j);
ExperimentConfig load_config(const std::string& path);

struct ResultRow {
  std::string scheme;
  size_t n = 0;
  size_t trial = 0;
  uint64_t seed = 0;
  double tv = 0.0;
  bool encode_ok = false;
  bool decode_ok = false;
  bool index_correct = false;
  std::string error;       // per-trial failure; the sweep never aborts
  double elapsed_ms = 0.0;  // excluded from canonical outputs
};

struct Aggregate {
  size_t n = 0;
  size_t trials = 0;
  double median_tv = 0.0;
  double mean_tv = 0.0;
  double failure_rate = 0.0;  // empirical P[tv > failure_epsilon]
};

struct ResultsTable {
  std::vector<ResultRow> rows;
  std::vector<Aggregate> aggregates;
  double failure_epsilon = 0.15;
};

std::vector<Aggregate> aggregate_rows(const std::vector<ResultRow>& rows, double failure_epsilon);

// Resolves the target/witness (preset, explicit, or found by search) and
// runs the configured sweep. Per-trial seeds derive from
// stable_hash(master_seed, scheme, n, trial); codebooks per n derive from
// stable_hash(master_seed, "codebook", n). The table is a pure function of
// the config, independent of thread count.
ResultsTable run_experiment(const ExperimentConfig& cfg);

struct ResolvedProblem {
  CoordinationTarget target;
  std::optional<Witness> witness;
};
ResolvedProblem resolve_problem(const ExperimentConfig& cfg);

// Canonical archival format. Columns:
//   scheme,n,trial,seed,tv,encode_ok,decode_ok,index_correct,error
// Timing is deliberately omitted so reruns are byte-identical.
std::string results_csv(const ResultsTable& table);
Json results_json(const ResultsTable& table);
void emit_results(const ResultsTable& table, const std::string& format, const std::string& path);

// Per-n aggregate series for external plotting:
//   n,trials,median_tv,mean_tv,failure_rate
std::string plotdata_csv(const ResultsTable& table);
void emit_plotdata(const ResultsTable& table, const std::string& path);

}  // namespace coordlab
