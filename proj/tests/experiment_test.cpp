#include <doctest.h>

#include <stdexcept>

#include "coordlab/experiment.hpp"
#include "test_util.hpp"

using namespace coordlab;

namespace {

Json minimal_hybrid_config() {
  return Json::parse(R"({
    "scheme": "hybrid",
    "preset": {"name": "binary_example", "p": 0.5, "eps": 0.1, "d": 0.44},
    "n_values": [100],
    "trials_per_n": 1,
    "margins": {"rate": 0.004},
    "master_seed": 7
  })");
}

}  // namespace

TEST_CASE("config validation: happy path and violations") {
  const ExperimentConfig cfg = config_from_json(minimal_hybrid_config());
  CHECK(cfg.scheme == ExperimentScheme::hybrid);
  CHECK(cfg.n_values == std::vector<size_t>{100});

  // missing trials_per_n
  Json bad = minimal_hybrid_config();
  bad.erase("trials_per_n");
  CHECK_THROWS_WITH_AS(config_from_json(bad), doctest::Contains("trials_per_n"), ConfigError);

  // trials_per_n = 0
  Json zero = minimal_hybrid_config();
  zero["trials_per_n"] = 0;
  CHECK_THROWS_WITH_AS(config_from_json(zero), doctest::Contains(">= 1"), ConfigError);

  // unknown keys are rejected (strict schema)
  Json unknown = minimal_hybrid_config();
  unknown["trails_per_n"] = 3;
  CHECK_THROWS_WITH_AS(config_from_json(unknown), doctest::Contains("unknown key"), ConfigError);

  // scheme-specific keys must not leak
  Json stray_b = minimal_hybrid_config();
  stray_b["B"] = 4;
  CHECK_THROWS_WITH_AS(config_from_json(stray_b), doctest::Contains("block-Markov"), ConfigError);

  // multiple violations are all reported
  Json multi = minimal_hybrid_config();
  multi.erase("trials_per_n");
  multi.erase("master_seed");
  try {
    config_from_json(multi);
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(e.details.size() == 2);
  }
}

TEST_CASE("single-trial experiment produces one row") {
  ExperimentConfig cfg = config_from_json(minimal_hybrid_config());
  const ResultsTable table = run_experiment(cfg);
  REQUIRE(table.rows.size() == 1);
  CHECK(table.rows[0].scheme == "hybrid");
  CHECK(table.rows[0].n == 100);
  CHECK(table.rows[0].error.empty());
  CHECK(table.aggregates.size() == 1);
}

TEST_CASE("reruns are byte-identical, including across thread counts") {
  Json j = minimal_hybrid_config();
  j["n_values"] = {50, 100};
  j["trials_per_n"] = 5;
  ExperimentConfig cfg = config_from_json(j);

  cfg.threads = 1;
  const std::string csv1 = results_csv(run_experiment(cfg));
  const std::string json1 = results_json(run_experiment(cfg)).dump(2);
  cfg.threads = 4;
  const std::string csv4 = results_csv(run_experiment(cfg));
  cfg.threads = 3;
  const std::string csv3 = results_csv(run_experiment(cfg));
  CHECK(csv1 == csv4);
  CHECK(csv1 == csv3);
  CHECK(json1 == results_json(run_experiment(cfg)).dump(2));
}

TEST_CASE("aggregates recompute from rows") {
  Json j = minimal_hybrid_config();
  j["n_values"] = {60, 120};
  j["trials_per_n"] = 8;
  ExperimentConfig cfg = config_from_json(j);
  const ResultsTable table = run_experiment(cfg);
  const auto again = aggregate_rows(table.rows, table.failure_epsilon);
  REQUIRE(again.size() == table.aggregates.size());
  for (size_t i = 0; i < again.size(); ++i) {
    CHECK(again[i].n == table.aggregates[i].n);
    CHECK(again[i].median_tv == table.aggregates[i].median_tv);
    CHECK(again[i].mean_tv == table.aggregates[i].mean_tv);
    CHECK(again[i].failure_rate == table.aggregates[i].failure_rate);
  }
}

TEST_CASE("build failures land in rows without aborting the sweep") {
  Json j = minimal_hybrid_config();
  // n = 2000 with the classic example rate would blow the codebook cap
  j["preset"] = Json{{"name", "binary_example"}, {"p", 0.4}, {"eps", 0.1}, {"d", 0.2}};
  j["margins"] = Json{{"rate", 0.05}};
  j["n_values"] = {60, 2000};
  j["trials_per_n"] = 2;
  ExperimentConfig cfg = config_from_json(j);
  const ResultsTable table = run_experiment(cfg);
  REQUIRE(table.rows.size() == 4);
  int errors = 0;
  for (const auto& r : table.rows) {
    if (r.n == 2000) {
      CHECK(!r.error.empty());
      ++errors;
    } else {
      CHECK(r.error.empty());
    }
  }
  CHECK(errors == 2);
  // error rows are excluded from aggregates
  for (const auto& a : table.aggregates)
    if (a.n == 2000) CHECK(a.trials == 0);
}

TEST_CASE("csv and plotdata formats") {
  ResultsTable table;
  table.failure_epsilon = 0.15;
  const std::string empty_csv = results_csv(table);
  CHECK(empty_csv == "scheme,n,trial,seed,tv,encode_ok,decode_ok,index_correct,error\n");
  CHECK(plotdata_csv(table) == "n,trials,median_tv,mean_tv,failure_rate\n");

  ResultRow row;
  row.scheme = "hybrid";
  row.n = 10;
  row.trial = 0;
  row.seed = 42;
  row.tv = 0.125;
  row.encode_ok = true;
  table.rows.push_back(row);
  table.aggregates = aggregate_rows(table.rows, table.failure_epsilon);
  const std::string csv = results_csv(table);
  CHECK(csv.find("hybrid,10,0,42,0.125,1,0,0,\n") != std::string::npos);
  CHECK(plotdata_csv(table).find("10,1,0.125,0.125,0\n") != std::string::npos);

  // errors with commas stay one field
  ResultRow bad;
  bad.scheme = "hybrid";
  bad.n = 20;
  bad.error = "boom, with comma";
  table.rows.push_back(bad);
  CHECK(results_csv(table).find("\"boom, with comma\"") != std::string::npos);
}

TEST_CASE("one-row csv survives a re-parse") {
  Json j = minimal_hybrid_config();
  ExperimentConfig cfg = config_from_json(j);
  const ResultsTable table = run_experiment(cfg);
  REQUIRE(table.rows.size() == 1);
  const std::string csv = results_csv(table);

  // split the single data line back into fields
  const size_t nl = csv.find('\n');
  const std::string line = csv.substr(nl + 1, csv.find('\n', nl + 1) - nl - 1);
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  REQUIRE(fields.size() == 9);
  CHECK(fields[0] == table.rows[0].scheme);
  CHECK(std::stoul(fields[1]) == table.rows[0].n);
  CHECK(std::stoul(fields[2]) == table.rows[0].trial);
  CHECK(std::stoull(fields[3]) == table.rows[0].seed);
  CHECK(std::stod(fields[4]) == table.rows[0].tv);  // %.17g round-trips exactly
  CHECK((fields[5] == "1") == table.rows[0].encode_ok);

  // the json mirror re-parses to the same values
  const Json round = Json::parse(results_json(table).dump());
  CHECK(round["rows"][0]["tv"].get<double>() == table.rows[0].tv);
  CHECK(round["rows"][0]["seed"].get<uint64_t>() == table.rows[0].seed);
}

TEST_CASE("degenerate always-succeed scheme drives the failure estimate to zero") {
  // noiseless identity chain with a constant auxiliary: S = X = Y = Shat
  const Alphabet S = Alphabet::binary(kAxisS), X = Alphabet::binary(kAxisX),
                 Y = Alphabet::binary(kAxisY), H = Alphabet::binary(kAxisShat);
  const Alphabet U1 = Alphabet::indexed(kAxisU, 1);
  const Pmf source = Pmf::bernoulli(S, 0.3);
  const ConditionalPmf noiseless = ConditionalPmf::bsc(X, Y, 0.0);
  const JointPmf joint = compose({
      factor(kAxisS, source),
      factor(kAxisX, {kAxisS}, ConditionalPmf::identity(S, X)),
      factor(kAxisY, {kAxisX}, noiseless),
      factor(kAxisShat, {kAxisY}, ConditionalPmf::identity(Y, H)),
  });
  Witness w;
  w.scheme = Scheme::noncausal;
  w.aux_alphabets = {U1};
  w.factors.emplace("U|S", ConditionalPmf({S}, U1, {{1.0}, {1.0}}));
  w.maps.emplace("x", SymbolMap::project({S, U1}, X, 0));
  w.maps.emplace("shat", SymbolMap::project({U1, Y}, H, 1));

  ExperimentConfig cfg;
  cfg.scheme = ExperimentScheme::hybrid;
  cfg.target = CoordinationTarget{source, noiseless, joint};
  cfg.witness = w;
  cfg.n_values = {50, 200, 800};
  cfg.trials_per_n = 40;
  cfg.failure_epsilon = 0.05;
  cfg.master_seed = 99;
  const ResultsTable table = run_experiment(cfg);
  REQUIRE(table.aggregates.size() == 3);
  CHECK(table.aggregates[2].median_tv < table.aggregates[0].median_tv);
  CHECK(table.aggregates[2].failure_rate == 0.0);
  for (const auto& r : table.rows) {
    CHECK(r.encode_ok);
    CHECK(r.decode_ok);
  }
}

TEST_CASE("region_check scheme produces a verdict row") {
  Json j = Json::parse(R"({
    "scheme": "region_check",
    "preset": {"name": "binary_example", "p": 0.4, "eps": 0.1, "d": 0.2},
    "region": "separation",
    "master_seed": 5
  })");
  ExperimentConfig cfg = config_from_json(j);
  const ResultsTable table = run_experiment(cfg);
  REQUIRE(table.rows.size() == 1);
  CHECK(!table.rows[0].decode_ok);  // hybrid example is not a separation member
  CHECK(table.rows[0].tv > 0.01);

  Json j2 = Json::parse(R"({
    "scheme": "region_check",
    "preset": {"name": "binary_example", "p": 0.4, "eps": 0.1, "d": 0.2},
    "region": "noncausal",
    "search": {"starts": 8, "card_u": 2},
    "master_seed": 5
  })");
  ExperimentConfig cfg2 = config_from_json(j2);
  cfg2.threads = 4;
  const ResultsTable table2 = run_experiment(cfg2);
  REQUIRE(table2.rows.size() == 1);
  CHECK(table2.rows[0].decode_ok);
}

TEST_CASE("blockmarkov experiment through the config layer") {
  Json j = Json::parse(R"({
    "scheme": "blockmarkov_strict",
    "preset": {"name": "lossless_state", "p": 0.001, "channel_eps": 0.05},
    "n_values": [200, 400],
    "trials_per_n": 10,
    "B": 3,
    "margins": {"rate": 0.004},
    "master_seed": 21
  })");
  ExperimentConfig cfg = config_from_json(j);
  cfg.threads = 4;
  const ResultsTable table = run_experiment(cfg);
  REQUIRE(table.rows.size() == 20);
  for (const auto& r : table.rows) CHECK(r.error.empty());
  REQUIRE(table.aggregates.size() == 2);
  CHECK(table.aggregates[1].median_tv < table.aggregates[0].median_tv);

  // causal variant rides the same preset through the lifting
  j["scheme"] = "blockmarkov_causal";
  ExperimentConfig ccfg = config_from_json(j);
  ccfg.threads = 4;
  const ResultsTable ctable = run_experiment(ccfg);
  REQUIRE(ctable.rows.size() == 20);
  for (const auto& r : ctable.rows) CHECK(r.error.empty());
}

TEST_CASE("explicit target without a witness falls back to the region search") {
  auto [t, w] = make_binary_example(0.5, 0.1, 0.44);
  ExperimentConfig cfg;
  cfg.scheme = ExperimentScheme::hybrid;
  cfg.target = t;
  cfg.card_u = 2;
  cfg.search.starts = 8;
  cfg.n_values = {80};
  cfg.trials_per_n = 2;
  cfg.rate_margin = 0.004;
  cfg.master_seed = 77;
  const ResultsTable table = run_experiment(cfg);
  REQUIRE(table.rows.size() == 2);
  for (const auto& r : table.rows) CHECK(r.error.empty());
}
