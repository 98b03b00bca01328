// Copyright 2026 The gemtrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gem/errors.hpp"
#include "gem/report.hpp"
#include "gem/run.hpp"
#include "gem/scenario.hpp"

using namespace gem;

TEST_CASE("empty config resolves to the experiment defaults") {
  const ScenarioConfig cfg = parse_config(nlohmann::json::object());
  CHECK(cfg.n_sensors == 20);
  CHECK(cfg.q == 10);
  CHECK(cfg.n_bar == 5.0);
  CHECK(cfg.beta == 10.0);
  CHECK(cfg.alpha_exponent == 0.7);
  CHECK(cfg.gamma_exponent == 0.8);
  CHECK(cfg.lambda0 == 0.1);
  CHECK(resolved_dims(cfg) == std::vector<int>(20, 2));
}

TEST_CASE("config validation rejects bad setups") {
  nlohmann::json j;
  j["N_bar"] = 30;
  CHECK_THROWS_AS(parse_config(j), ValidationError);

  nlohmann::json unknown;
  unknown["horizon"] = 10;  // the key is named T
  CHECK_THROWS_AS(parse_config(unknown), ParseError);

  nlohmann::json bad_dims;
  bad_dims["dims"] = std::vector<int>{2, 2};
  CHECK_THROWS_AS(parse_config(bad_dims), ValidationError);

  CHECK_THROWS_AS(parse_config_file("/nonexistent/path.json"), ParseError);
}

TEST_CASE("config round-trips through its JSON form") {
  ScenarioConfig cfg;
  cfg.variant = Variant::gem_uk;
  cfg.horizon = 1234;
  cfg.seed = 99;
  cfg.dims = std::vector<int>(20, 3);
  cfg.mean_spread = 0.25;
  const ScenarioConfig back = parse_config(to_json(cfg));
  CHECK(back == cfg);
}

TEST_CASE("genie long-run error matches the conditional-variance oracle") {
  ScenarioConfig cfg;
  cfg.variant = Variant::gen;
  cfg.q = 2;
  cfg.horizon = 100000;
  cfg.seed = 5;
  const RunResult r = run_scenario(cfg);

  // Oracle: with the previous state known, the error is the conditional
  // variance 1 − ‖row‖², averaged over the stationary law.
  const TransitionMatrix truth = truth_tpm_for(cfg);
  const Belief pi = stationary_distribution(truth);
  double want = 0.0;
  for (int i = 0; i < truth.q(); ++i) {
    double row_sq = 0.0;
    for (int j = 0; j < truth.q(); ++j) row_sq += truth(i, j) * truth(i, j);
    want += pi.p[i] * (1.0 - row_sq);
  }
  CHECK(r.summary.mse_final == doctest::Approx(want).epsilon(0.02));

  // No sensors, no multiplier, no chain estimate: those columns are empty.
  CHECK(r.series.active_avg.empty());
  CHECK(r.series.lambda.empty());
  CHECK(r.series.tpm_frob.empty());
}

TEST_CASE("uniform sampling meets the activation budget on average") {
  ScenarioConfig cfg;
  cfg.variant = Variant::gem_u;
  cfg.q = 4;
  cfg.dims = std::vector<int>(20, 1);
  cfg.horizon = 100000;
  cfg.mean_spread = 0.5;
  cfg.seed = 7;
  const RunResult r = run_scenario(cfg);
  CHECK(r.summary.active_avg_final == doctest::Approx(5.0).epsilon(0.02));
  CHECK(std::abs(r.summary.active_avg_final - 5.0) < 0.1);
  CHECK(std::isnan(r.summary.lambda_final));
}

TEST_CASE("full observation keeps every sensor active") {
  struct CountCheck : RunObserver {
    bool all_on = true;
    void on_step(const StepContext& ctx) override {
      if (ctx.activation && ctx.activation->count() != ctx.activation->size())
        all_on = false;
    }
  } check;
  ScenarioConfig cfg;
  cfg.variant = Variant::gem_fo;
  cfg.q = 3;
  cfg.n_sensors = 6;
  cfg.n_bar = 2;
  cfg.dims = std::vector<int>(6, 1);
  cfg.horizon = 300;
  cfg.mean_spread = 0.5;
  const RunResult r = run_scenario(cfg, &check);
  CHECK(check.all_on);
  CHECK(r.summary.active_avg_final == 6.0);
}

TEST_CASE("csv layout: exactly one row per step plus the header") {
  ScenarioConfig cfg;
  cfg.variant = Variant::gem_k;
  cfg.q = 2;
  cfg.n_sensors = 3;
  cfg.n_bar = 2;
  cfg.dims = std::vector<int>(3, 1);
  cfg.horizon = 3;
  cfg.mean_spread = 0.5;
  const RunResult r = run_scenario(cfg);
  const std::string csv = time_series_csv(r.series, 1);
  int lines = 0;
  for (char ch : csv) lines += (ch == '\n');
  CHECK(lines == 4);
  CHECK(csv.rfind("t,mse_inst,mse_avg,active_avg,lambda,tpm_frob\n", 0) == 0);
}

TEST_CASE("downsampled csv always includes the final step") {
  RunTimeSeries ts;
  ts.horizon = 10;
  for (int t = 0; t < 10; ++t) {
    ts.mse_inst.push_back(t);
    ts.mse_avg.push_back(t);
  }
  const std::string csv = time_series_csv(ts, 4);
  // Rows at t = 0, 4, 8 and the final step 9.
  int lines = 0;
  for (char ch : csv) lines += (ch == '\n');
  CHECK(lines == 5);
  CHECK(csv.find("\n9,") != std::string::npos);
}

TEST_CASE("reruns with one seed are byte-identical") {
  ScenarioConfig cfg;
  cfg.variant = Variant::gem_k;
  cfg.horizon = 500;
  cfg.mean_spread = 0.5;
  cfg.seed = 11;
  const RunResult a = run_scenario(cfg);
  const RunResult b = run_scenario(cfg);
  CHECK(time_series_csv(a.series, 1) == time_series_csv(b.series, 1));
}

TEST_CASE("running averages in the csv are recomputable") {
  ScenarioConfig cfg;
  cfg.variant = Variant::gem_k;
  cfg.horizon = 400;
  cfg.mean_spread = 0.5;
  cfg.seed = 13;
  const RunResult r = run_scenario(cfg);
  const std::string csv = time_series_csv(r.series, 1);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  double acc = 0.0;
  int t = 0;
  while (std::getline(in, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const auto c3 = line.find(',', c2 + 1);
    const double inst = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    const double avg = std::stod(line.substr(c2 + 1, c3 - c2 - 1));
    acc += (inst - acc) / (t + 1);
    REQUIRE(std::abs(acc - avg) < 1e-9);
    ++t;
  }
  CHECK(t == 400);
}

TEST_CASE("summary json embeds a re-parseable config") {
  ScenarioConfig cfg;
  cfg.variant = Variant::gem_fi;
  cfg.horizon = 50;
  cfg.mean_spread = 0.5;
  const RunResult r = run_scenario(cfg);
  const nlohmann::json j = summary_json(r.summary, cfg);
  CHECK(j.at("variant") == "GEM-FI");
  const ScenarioConfig echoed = parse_config(j.at("config"));
  CHECK(echoed == cfg);
  // No chain estimate in the full-information mode.
  CHECK(j.at("tpm_frob_final").is_null());
  CHECK(std::isfinite(j.at("mse_db").get<double>()));
}

TEST_CASE("comparison report: dB values, gaps and ordering verdict") {
  auto mk = [](const std::string& v, std::uint64_t seed, double mse) {
    nlohmann::json j;
    j["variant"] = v;
    j["seed"] = seed;
    j["mse_final"] = mse;
    return j;
  };
  std::vector<nlohmann::json> summaries;
  for (std::uint64_t s : {1, 2, 3}) {
    summaries.push_back(mk("GEN", s, 0.5));
    summaries.push_back(mk("GEM-FO", s, 0.6));
    summaries.push_back(mk("GEM-K", s, 0.7));
    summaries.push_back(mk("GEM-U", s, s == 2 ? 0.65 : 0.75));
    summaries.push_back(mk("GEM-UK", s, 0.8));
  }
  const CompareReport rep = compare(summaries);
  CHECK(rep.report.at("variants").at("GEN").at("median_db").get<double>() ==
        doctest::Approx(-3.0103).epsilon(1e-4));
  const double gap = rep.report.at("pairwise_db_gap")
                         .at("GEM-K vs GEM-FO")
                         .get<double>();
  CHECK(gap == doctest::Approx(10.0 * std::log10(0.7 / 0.6)).epsilon(1e-9));
  CHECK(rep.report.at("ordering").at("num_seeds") == 3);
  CHECK(rep.report.at("ordering").at("num_ok") == 2);  // seed 2 breaks K<=U
}

TEST_CASE("equal errors give a zero dB gap") {
  nlohmann::json a, b;
  a["variant"] = "GEM-K";
  a["seed"] = 1;
  a["mse_final"] = 0.5;
  b["variant"] = "GEM-U";
  b["seed"] = 1;
  b["mse_final"] = 0.5;
  const CompareReport rep = compare({a, b});
  CHECK(rep.report.at("pairwise_db_gap").at("GEM-K vs GEM-U").get<double>() ==
        doctest::Approx(0.0));
}

TEST_CASE("multiplier settles onto the slow timescale") {
  ScenarioConfig cfg;
  cfg.variant = Variant::gem_k;
  cfg.horizon = 20000;
  cfg.seed = 21;
  const RunResult r = run_scenario(cfg);
  REQUIRE(!r.series.lambda.empty());
  const std::int64_t window = cfg.horizon / 10;
  auto stddev = [&](std::int64_t from) {
    double mean = 0.0, sq = 0.0;
    for (std::int64_t t = from; t < from + window; ++t) mean += r.series.lambda[t];
    mean /= window;
    for (std::int64_t t = from; t < from + window; ++t) {
      const double d = r.series.lambda[t] - mean;
      sq += d * d;
    }
    return std::sqrt(sq / window);
  };
  // The activation average is near the budget late in the run, and the
  // multiplier wanders much less than during the opening transient.
  CHECK(std::abs(r.summary.active_avg_window - 5.0) <= 0.3);
  CHECK(stddev(cfg.horizon - window) < stddev(0));
}

TEST_CASE("per-step cost does not grow with history") {
  struct Timer : RunObserver {
    std::vector<double> stamps;
    void on_step(const StepContext&) override {
      stamps.push_back(std::chrono::duration<double>(
                           std::chrono::steady_clock::now().time_since_epoch())
                           .count());
    }
  } timer;
  ScenarioConfig cfg;
  cfg.variant = Variant::gem_k;
  cfg.horizon = 4000;
  cfg.mean_spread = 0.5;
  run_scenario(cfg, &timer);
  const std::size_t quarter = timer.stamps.size() / 4;
  const double first = timer.stamps[quarter] - timer.stamps[0];
  const double last =
      timer.stamps[4 * quarter - 1] - timer.stamps[3 * quarter];
  // Linear growth in history would show up as a ~7x ratio; leave slack for
  // scheduler jitter on loaded machines.
  CHECK(last < 4.0 * first + 1e-3);
}

TEST_CASE("glob expansion matches wildcards in the last component") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "gem_glob_test";
  fs::create_directories(dir);
  for (const char* name : {"a_seed1.summary.json", "a_seed2.summary.json",
                           "a_seed1.csv", "other.txt"}) {
    std::ofstream((dir / name).string()) << "{}";
  }
  const auto hits = expand_glob((dir / "*.summary.json").string());
  CHECK(hits.size() == 2);
  const auto exact = expand_glob((dir / "other.txt").string());
  CHECK(exact.size() == 1);
  fs::remove_all(dir);
}

TEST_CASE("write_outputs produces the canonical files") {
  namespace fs = std::filesystem;
  ScenarioConfig cfg;
  cfg.variant = Variant::gen;
  cfg.q = 2;
  cfg.horizon = 10;
  cfg.seed = 3;
  cfg.out_dir = (fs::temp_directory_path() / "gem_out_test").string();
  const RunResult r = run_scenario(cfg);
  write_outputs(r.series, r.summary, cfg);
  CHECK(fs::exists(fs::path(cfg.out_dir) / "GEN_seed3.csv"));
  CHECK(fs::exists(fs::path(cfg.out_dir) / "GEN_seed3.summary.json"));
  fs::remove_all(cfg.out_dir);
}
