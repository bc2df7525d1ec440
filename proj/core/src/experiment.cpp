#include "coordlab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "coordlab/parallel.hpp"

namespace coordlab {

std::string_view experiment_scheme_name(ExperimentScheme s) {
  switch (s) {
    case ExperimentScheme::hybrid: return "hybrid";
    case ExperimentScheme::separation: return "separation";
    case ExperimentScheme::blockmarkov_strict: return "blockmarkov_strict";
    case ExperimentScheme::blockmarkov_causal: return "blockmarkov_causal";
    case ExperimentScheme::region_check: return "region_check";
  }
  return "?";
}

ExperimentScheme experiment_scheme_from_name(std::string_view name) {
  if (name == "hybrid") return ExperimentScheme::hybrid;
  if (name == "separation") return ExperimentScheme::separation;
  if (name == "blockmarkov_strict") return ExperimentScheme::blockmarkov_strict;
  if (name == "blockmarkov_causal") return ExperimentScheme::blockmarkov_causal;
  if (name == "region_check") return ExperimentScheme::region_check;
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error([&] {
        std::string what = "invalid experiment config:";
        for (const auto& p : problems) what += "\n  - " + p;
        return what;
      }()),
      details(std::move(problems)) {}

namespace {

void check_keys(const Json& obj, std::initializer_list<const char*> allowed,
                const std::string& ctx, std::vector<std::string>& errs) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok) errs.push_back(ctx + ": unknown key '" + key + "'");
  }
}

bool is_blockmarkov(ExperimentScheme s) {
  return s == ExperimentScheme::blockmarkov_strict || s == ExperimentScheme::blockmarkov_causal;
}

}  // namespace

ExperimentConfig config_from_json(const Json& j) {
  std::vector<std::string> errs;
  if (!j.is_object()) throw ConfigError({"top level must be a JSON object"});
  check_keys(j,
             {"scheme", "preset", "target", "witness", "n_values", "trials_per_n", "B",
              "epsilon_policy", "margins", "master_seed", "failure_epsilon", "search", "region",
              "force_rates"},
             "config", errs);

  ExperimentConfig cfg;
  if (!j.contains("scheme")) {
    errs.push_back("missing required key 'scheme'");
  } else {
    try {
      cfg.scheme = experiment_scheme_from_name(j["scheme"].get<std::string>());
    } catch (const std::exception& e) {
      errs.push_back(e.what());
    }
  }

  const bool has_preset = j.contains("preset");
  const bool has_target = j.contains("target");
  if (has_preset == has_target)
    errs.push_back("exactly one of 'preset' and 'target' must be given");

  if (has_preset) {
    const Json& p = j["preset"];
    if (!p.is_object() || !p.contains("name")) {
      errs.push_back("'preset' must be an object with a 'name'");
    } else {
      cfg.preset_name = p["name"].get<std::string>();
      if (*cfg.preset_name == "binary_example") {
        check_keys(p, {"name", "p", "eps", "d"}, "preset", errs);
        for (const char* k : {"p", "eps", "d"}) {
          if (!p.contains(k))
            errs.push_back(std::string("preset binary_example: missing '") + k + "'");
          else
            cfg.preset_params[k] = p[k].get<double>();
        }
      } else if (*cfg.preset_name == "lossless_state") {
        check_keys(p, {"name", "p", "channel_eps"}, "preset", errs);
        for (const char* k : {"p", "channel_eps"}) {
          if (!p.contains(k))
            errs.push_back(std::string("preset lossless_state: missing '") + k + "'");
          else
            cfg.preset_params[k] = p[k].get<double>();
        }
      } else {
        errs.push_back("unknown preset '" + *cfg.preset_name + "'");
      }
    }
  }
  if (has_target) {
    try {
      cfg.target = target_from_json(j["target"]);
    } catch (const std::exception& e) {
      errs.push_back(std::string("target: ") + e.what());
    }
  }
  if (j.contains("witness")) {
    try {
      cfg.witness = witness_from_json(j["witness"]);
    } catch (const std::exception& e) {
      errs.push_back(std::string("witness: ") + e.what());
    }
  }

  const bool simulate = cfg.scheme != ExperimentScheme::region_check;
  if (simulate) {
    if (!j.contains("n_values")) {
      errs.push_back("missing required key 'n_values'");
    } else {
      for (const auto& v : j["n_values"]) {
        const long long n = v.get<long long>();
        if (n < 1) errs.push_back("n_values entries must be positive");
        cfg.n_values.push_back(static_cast<size_t>(std::max(1ll, n)));
      }
      if (cfg.n_values.empty()) errs.push_back("n_values must be nonempty");
    }
    if (!j.contains("trials_per_n")) {
      errs.push_back("missing required key 'trials_per_n'");
    } else {
      const long long trials = j["trials_per_n"].get<long long>();
      if (trials < 1) errs.push_back("trials_per_n must be >= 1");
      cfg.trials_per_n = static_cast<size_t>(std::max(1ll, trials));
    }
  } else {
    if (j.contains("n_values")) errs.push_back("n_values is not used by region_check");
    if (j.contains("trials_per_n")) errs.push_back("trials_per_n is not used by region_check");
  }

  if (is_blockmarkov(cfg.scheme)) {
    if (!j.contains("B")) {
      errs.push_back("block-Markov schemes require 'B'");
    } else {
      const long long b = j["B"].get<long long>();
      if (b < 2) errs.push_back("B must be >= 2");
      cfg.blocks = static_cast<size_t>(std::max(2ll, b));
    }
  } else if (j.contains("B")) {
    errs.push_back("'B' applies only to block-Markov schemes");
  }

  if (j.contains("epsilon_policy")) {
    const Json& e = j["epsilon_policy"];
    check_keys(e, {"type", "value", "coefficient"}, "epsilon_policy", errs);
    const std::string type = e.value("type", "schedule");
    if (type == "fixed") {
      if (!e.contains("value"))
        errs.push_back("epsilon_policy fixed requires 'value'");
      else
        cfg.epsilon_policy = EpsilonPolicy::fixed(e["value"].get<double>());
    } else if (type == "schedule") {
      cfg.epsilon_policy = EpsilonPolicy::schedule();
      if (e.contains("coefficient"))
        cfg.epsilon_policy.coefficient = e["coefficient"].get<double>();
    } else {
      errs.push_back("epsilon_policy type must be 'fixed' or 'schedule'");
    }
  }

  if (j.contains("margins")) {
    const Json& m = j["margins"];
    check_keys(m, {"rate"}, "margins", errs);
    if (m.contains("rate")) cfg.rate_margin = m["rate"].get<double>();
  }

  if (!j.contains("master_seed"))
    errs.push_back("missing required key 'master_seed'");
  else
    cfg.master_seed = j["master_seed"].get<uint64_t>();

  if (j.contains("failure_epsilon")) cfg.failure_epsilon = j["failure_epsilon"].get<double>();

  if (j.contains("region")) {
    if (cfg.scheme != ExperimentScheme::region_check)
      errs.push_back("'region' applies only to region_check");
    else {
      try {
        cfg.region = scheme_from_name(j["region"].get<std::string>());
      } catch (const std::exception& e) {
        errs.push_back(e.what());
      }
    }
  } else if (cfg.scheme == ExperimentScheme::region_check) {
    errs.push_back("region_check requires 'region'");
  }

  if (j.contains("search")) {
    const Json& s = j["search"];
    check_keys(s, {"starts", "max_sweeps", "match_tol", "slack_tol", "map_samples", "threads",
                   "card_u", "card_v"},
               "search", errs);
    if (s.contains("starts")) cfg.search.starts = s["starts"].get<int>();
    if (s.contains("max_sweeps")) cfg.search.max_sweeps = s["max_sweeps"].get<int>();
    if (s.contains("match_tol")) cfg.search.match_tol = s["match_tol"].get<double>();
    if (s.contains("slack_tol")) cfg.search.slack_tol = s["slack_tol"].get<double>();
    if (s.contains("map_samples")) cfg.search.map_samples = s["map_samples"].get<int>();
    if (s.contains("card_u")) cfg.card_u = s["card_u"].get<size_t>();
    if (s.contains("card_v")) cfg.card_v = s["card_v"].get<size_t>();
  }

  if (j.contains("force_rates")) {
    if (!is_blockmarkov(cfg.scheme)) {
      errs.push_back("'force_rates' applies only to block-Markov schemes");
    } else {
      const Json& f = j["force_rates"];
      check_keys(f, {"rate_v", "rate_m"}, "force_rates", errs);
      if (!f.contains("rate_v") || !f.contains("rate_m"))
        errs.push_back("force_rates requires rate_v and rate_m");
      else
        cfg.force_rates = ForcedRates{f["rate_v"].get<double>(), f["rate_m"].get<double>()};
    }
  }

  if (!errs.empty()) throw ConfigError(std::move(errs));
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  return config_from_json(load_json_file(path));
}

ResolvedProblem resolve_problem(const ExperimentConfig& cfg) {
  ResolvedProblem out;
  if (cfg.preset_name) {
    if (*cfg.preset_name == "binary_example") {
      auto [t, w] = make_binary_example(cfg.preset_params.at("p"), cfg.preset_params.at("eps"),
                                        cfg.preset_params.at("d"));
      out.target = std::move(t);
      out.witness = std::move(w);
    } else {
      auto [t, w] =
          make_lossless_state(cfg.preset_params.at("p"), cfg.preset_params.at("channel_eps"));
      out.target = std::move(t);
      out.witness = std::move(w);
    }
  } else {
    out.target = *cfg.target;
  }
  if (cfg.witness) out.witness = cfg.witness;

  // lift or search for a witness in the scheme the codec needs
  const auto want_scheme = [&]() -> std::optional<Scheme> {
    switch (cfg.scheme) {
      case ExperimentScheme::hybrid: return Scheme::noncausal;
      case ExperimentScheme::blockmarkov_strict: return Scheme::strictly_causal;
      case ExperimentScheme::blockmarkov_causal: return Scheme::causal;
      default: return std::nullopt;
    }
  }();
  if (!want_scheme) return out;

  if (out.witness && out.witness->scheme == *want_scheme) return out;
  if (out.witness && *want_scheme == Scheme::causal &&
      out.witness->scheme == Scheme::strictly_causal) {
    out.witness = strict_to_causal(*out.witness);
    return out;
  }

  SearchConfig search = cfg.search;
  search.seed = stable_hash(cfg.master_seed, "witness-search");
  MembershipVerdict verdict;
  switch (*want_scheme) {
    case Scheme::noncausal:
      verdict = check_noncausal_inner(out.target, cfg.card_u.value_or(default_card_u(out.target)),
                                      search);
      break;
    case Scheme::strictly_causal:
      verdict = check_strictly_causal(out.target, cfg.card_v.value_or(4), search);
      break;
    case Scheme::causal:
      verdict = check_causal(out.target, cfg.card_u.value_or(2), cfg.card_v.value_or(4), search);
      break;
    default: break;
  }
  if (verdict.status != MembershipStatus::member_with_witness)
    throw std::runtime_error("no " + std::string(scheme_name(*want_scheme)) +
                             " witness available for the target (" + verdict.log.note + ")");
  out.witness = verdict.witness;
  return out;
}

std::vector<Aggregate> aggregate_rows(const std::vector<ResultRow>& rows, double failure_epsilon) {
  std::vector<size_t> ns;
  for (const auto& r : rows)
    if (std::find(ns.begin(), ns.end(), r.n) == ns.end()) ns.push_back(r.n);
  std::sort(ns.begin(), ns.end());

  std::vector<Aggregate> out;
  for (size_t n : ns) {
    Aggregate a;
    a.n = n;
    std::vector<double> tvs;
    for (const auto& r : rows) {
      if (r.n != n || !r.error.empty()) continue;
      tvs.push_back(r.tv);
      if (r.tv > failure_epsilon) a.failure_rate += 1.0;
      a.mean_tv += r.tv;
    }
    a.trials = tvs.size();
    if (!tvs.empty()) {
      a.mean_tv /= static_cast<double>(tvs.size());
      a.failure_rate /= static_cast<double>(tvs.size());
      std::sort(tvs.begin(), tvs.end());
      const size_t mid = tvs.size() / 2;
      a.median_tv = tvs.size() % 2 ? tvs[mid] : 0.5 * (tvs[mid - 1] + tvs[mid]);
    }
    out.push_back(a);
  }
  return out;
}

namespace {

ResultRow chain_to_row(const ChainResult& chain) {
  ResultRow row;
  row.encode_ok = true;
  row.decode_ok = true;
  row.index_correct = true;
  double mean_tv = 0.0;
  for (const auto& b : chain.per_block) {
    row.encode_ok = row.encode_ok && b.cover_ok;
    row.decode_ok = row.decode_ok && b.bin_decode_ok && b.v_decode_ok;
    row.index_correct = row.index_correct && b.indices_correct;
    mean_tv += b.tv_distance;
  }
  row.tv = chain.per_block.empty() ? 0.0 : mean_tv / static_cast<double>(chain.per_block.size());
  return row;
}

}  // namespace

ResultsTable run_experiment(const ExperimentConfig& cfg) {
  ResultsTable table;
  table.failure_epsilon = cfg.failure_epsilon;
  const std::string scheme = std::string(experiment_scheme_name(cfg.scheme));

  if (cfg.scheme == ExperimentScheme::region_check) {
    ResolvedProblem prob = resolve_problem(cfg);
    SearchConfig search = cfg.search;
    search.seed = stable_hash(cfg.master_seed, "region-check");
    search.threads = cfg.threads;
    MembershipVerdict v;
    switch (*cfg.region) {
      case Scheme::noncausal:
        v = check_noncausal_inner(prob.target, cfg.card_u.value_or(default_card_u(prob.target)),
                                  search);
        break;
      case Scheme::causal:
        v = check_causal(prob.target, cfg.card_u.value_or(2), cfg.card_v.value_or(4), search);
        break;
      case Scheme::strictly_causal:
        v = check_strictly_causal(prob.target, cfg.card_v.value_or(4), search);
        break;
      case Scheme::separation: v = check_separation(prob.target); break;
    }
    ResultRow row;
    row.scheme = scheme;
    row.seed = cfg.master_seed;
    row.tv = std::isinf(v.log.best_residual) ? 1.0 : v.log.best_residual;
    row.decode_ok = v.status == MembershipStatus::member_with_witness;
    row.encode_ok = row.decode_ok;
    row.index_correct = row.decode_ok;
    if (v.status != MembershipStatus::member_with_witness) row.error = v.log.note;
    table.rows.push_back(std::move(row));
    table.aggregates = aggregate_rows(table.rows, table.failure_epsilon);
    return table;
  }

  ResolvedProblem prob = resolve_problem(cfg);

  // one codebook per n, independent of trial scheduling
  struct PerN {
    std::optional<HybridCode> hybrid;
    std::optional<SeparationCode> separation;
    std::optional<BlockMarkovCode> blockmarkov;
    std::string build_error;
  };
  std::vector<PerN> codes(cfg.n_values.size());
  for (size_t k = 0; k < cfg.n_values.size(); ++k) {
    const size_t n = cfg.n_values[k];
    Rng build_rng(stable_hash(cfg.master_seed, "codebook", n));
    try {
      switch (cfg.scheme) {
        case ExperimentScheme::hybrid: {
          HybridBuildOptions opt;
          opt.rate_margin = cfg.rate_margin;
          opt.eps_policy = cfg.epsilon_policy;
          codes[k].hybrid = build_hybrid(prob.target, *prob.witness, n, opt, build_rng);
          break;
        }
        case ExperimentScheme::separation: {
          SeparationBuildOptions opt;
          opt.source_margin = cfg.rate_margin;
          opt.channel_margin = cfg.rate_margin;
          opt.eps_policy = cfg.epsilon_policy;
          codes[k].separation = build_separation(prob.target, n, opt, build_rng);
          break;
        }
        default: {
          BlockMarkovBuildOptions opt;
          opt.margin = cfg.rate_margin;
          opt.eps_policy = cfg.epsilon_policy;
          opt.force_rates = cfg.force_rates;
          codes[k].blockmarkov =
              build_blockmarkov(prob.target, *prob.witness, n, cfg.blocks, opt, build_rng);
          break;
        }
      }
    } catch (const std::exception& e) {
      codes[k].build_error = e.what();
    }
  }

  const size_t total = cfg.n_values.size() * cfg.trials_per_n;
  auto rows = parallel_map(total, cfg.threads, [&](size_t idx) {
    const size_t k = idx / cfg.trials_per_n;
    const size_t trial = idx % cfg.trials_per_n;
    const size_t n = cfg.n_values[k];
    ResultRow row;
    row.scheme = scheme;
    row.n = n;
    row.trial = trial;
    row.seed = stable_hash(cfg.master_seed, scheme, n, trial);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      if (!codes[k].build_error.empty()) throw std::runtime_error(codes[k].build_error);
      Rng rng(row.seed);
      if (codes[k].hybrid) {
        const TrialResult r = run_hybrid_trial(*codes[k].hybrid, prob.target, rng);
        row.tv = r.tv_distance;
        row.encode_ok = r.encode_ok;
        row.decode_ok = r.decode_ok;
        row.index_correct = r.decoded_index_correct;
      } else if (codes[k].separation) {
        const TrialResult r = run_separation_trial(*codes[k].separation, prob.target, rng);
        row.tv = r.tv_distance;
        row.encode_ok = r.encode_ok;
        row.decode_ok = r.decode_ok;
        row.index_correct = r.decoded_index_correct;
      } else {
        const ChainResult chain = run_chain(*codes[k].blockmarkov, prob.target, rng);
        ResultRow agg = chain_to_row(chain);
        row.tv = agg.tv;
        row.encode_ok = agg.encode_ok;
        row.decode_ok = agg.decode_ok;
        row.index_correct = agg.index_correct;
      }
    } catch (const std::exception& e) {
      row.error = e.what();
      row.tv = std::numeric_limits<double>::quiet_NaN();
    }
    row.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return row;
  });

  table.rows = std::move(rows);
  table.aggregates = aggregate_rows(table.rows, table.failure_epsilon);
  return table;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string results_csv(const ResultsTable& table) {
  std::ostringstream out;
  out << "scheme,n,trial,seed,tv,encode_ok,decode_ok,index_correct,error\n";
  for (const auto& r : table.rows) {
    out << r.scheme << ',' << r.n << ',' << r.trial << ',' << r.seed << ','
        << format_double(r.tv) << ',' << (r.encode_ok ? 1 : 0) << ',' << (r.decode_ok ? 1 : 0)
        << ',' << (r.index_correct ? 1 : 0) << ',' << csv_escape(r.error) << '\n';
  }
  return out.str();
}

Json results_json(const ResultsTable& table) {
  Json rows = Json::array();
  for (const auto& r : table.rows) {
    rows.push_back(Json{{"scheme", r.scheme},
                        {"n", r.n},
                        {"trial", r.trial},
                        {"seed", r.seed},
                        {"tv", r.tv},
                        {"encode_ok", r.encode_ok},
                        {"decode_ok", r.decode_ok},
                        {"index_correct", r.index_correct},
                        {"error", r.error}});
  }
  Json aggs = Json::array();
  for (const auto& a : table.aggregates) {
    aggs.push_back(Json{{"n", a.n},
                        {"trials", a.trials},
                        {"median_tv", a.median_tv},
                        {"mean_tv", a.mean_tv},
                        {"failure_rate", a.failure_rate}});
  }
  return Json{{"failure_epsilon", table.failure_epsilon},
              {"rows", std::move(rows)},
              {"aggregates", std::move(aggs)}};
}

void emit_results(const ResultsTable& table, const std::string& format, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  if (format == "csv") {
    out << results_csv(table);
  } else if (format == "json") {
    out << results_json(table).dump(2) << "\n";
  } else {
    throw std::invalid_argument("emit_results: format must be csv or json");
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::string plotdata_csv(const ResultsTable& table) {
  std::ostringstream out;
  out << "n,trials,median_tv,mean_tv,failure_rate\n";
  for (const auto& a : table.aggregates) {
    out << a.n << ',' << a.trials << ',' << format_double(a.median_tv) << ','
        << format_double(a.mean_tv) << ',' << format_double(a.failure_rate) << '\n';
  }
  return out.str();
}

void emit_plotdata(const ResultsTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << plotdata_csv(table);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace coordlab
