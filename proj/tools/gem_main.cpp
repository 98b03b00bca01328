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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "gem/errors.hpp"
#include "gem/report.hpp"
#include "gem/run.hpp"
#include "gem/scenario.hpp"

namespace {

using gem::ScenarioConfig;

// Runs each job (in parallel across jobs, each job sequential inside),
// writes its outputs, and returns the summaries in job order.
std::vector<nlohmann::json> run_jobs(const std::vector<ScenarioConfig>& jobs) {
  std::vector<nlohmann::json> summaries(jobs.size());
  std::mutex err_mutex;
  std::vector<std::string> errors;
  std::size_t next = 0;
  std::mutex next_mutex;
  const unsigned n_threads = std::max(
      1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                             static_cast<unsigned>(jobs.size())));
  auto worker = [&]() {
    for (;;) {
      std::size_t idx;
      {
        std::lock_guard<std::mutex> lock(next_mutex);
        if (next >= jobs.size()) return;
        idx = next++;
      }
      try {
        const gem::RunResult result = gem::run_scenario(jobs[idx]);
        gem::write_outputs(result.series, result.summary, jobs[idx]);
        summaries[idx] = gem::summary_json(result.summary, jobs[idx]);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mutex);
        errors.push_back(gem::run_basename(jobs[idx]) + ": " + e.what());
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (!errors.empty()) {
    for (const auto& e : errors) std::cerr << "run failed: " << e << "\n";
    throw gem::Error("one or more runs failed");
  }
  return summaries;
}

std::vector<ScenarioConfig> replicate(const ScenarioConfig& base) {
  std::vector<ScenarioConfig> jobs;
  for (int r = 0; r < base.reps; ++r) {
    ScenarioConfig cfg = base;
    cfg.seed = base.seed + static_cast<std::uint64_t>(r);
    cfg.reps = 1;
    jobs.push_back(cfg);
  }
  return jobs;
}

void write_report(const gem::CompareReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw gem::IoError("cannot open " + path);
  out << report.report.dump(2) << '\n';
  std::cout << report.table;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained sensor-subset scheduling and chain tracking"};
  app.require_subcommand(1);

  std::string config_path, out_dir, variant_name, inputs_glob, report_path;
  std::int64_t horizon = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int reps = -1;

  auto add_overrides = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON scenario file");
    cmd->add_option("--variant", variant_name,
                    "GEM-K|GEM-UK|GEM-FO|GEM-U|GEM-FI|GEN");
    cmd->add_option("--seed", seed, "base seed")->each([&](const std::string&) {
      seed_set = true;
    });
    cmd->add_option("--horizon", horizon, "steps per run (T)");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--reps", reps, "replications (seeds seed..seed+R-1)");
  };

  CLI::App* cmd_run = app.add_subcommand("run", "simulate one scenario");
  add_overrides(cmd_run);

  CLI::App* cmd_sweep = app.add_subcommand(
      "sweep", "run every variant over replicated seeds and compare");
  add_overrides(cmd_sweep);
  std::string sweep_variants = "all";
  cmd_sweep->add_option("--variants", sweep_variants,
                        "'all' or comma-separated variant names");

  CLI::App* cmd_compare =
      app.add_subcommand("compare", "aggregate summary JSON files");
  cmd_compare->add_option("--inputs", inputs_glob, "summary glob")->required();
  cmd_compare->add_option("--out", report_path, "report path")
      ->default_val("report.json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_compare->parsed()) {
      std::vector<nlohmann::json> summaries;
      for (const auto& path : gem::expand_glob(inputs_glob)) {
        std::ifstream in(path);
        nlohmann::json j;
        in >> j;
        summaries.push_back(std::move(j));
      }
      if (summaries.size() < 2)
        throw gem::ValidationError("compare needs at least two summaries");
      write_report(gem::compare(summaries), report_path);
      return 0;
    }

    ScenarioConfig base;
    if (!config_path.empty()) base = gem::parse_config_file(config_path);
    if (!variant_name.empty())
      base.variant = gem::variant_from_string(variant_name);
    if (seed_set) base.seed = seed;
    if (horizon > 0) base.horizon = horizon;
    if (!out_dir.empty()) base.out_dir = out_dir;
    if (reps > 0) base.reps = reps;
    gem::validate(base);

    if (cmd_run->parsed()) {
      const auto summaries = run_jobs(replicate(base));
      for (const auto& s : summaries)
        std::cout << s.at("variant").get<std::string>() << " seed "
                  << s.at("seed") << ": mse " << s.at("mse_final")
                  << " (" << s.at("mse_db") << " dB)\n";
      return 0;
    }

    // sweep
    std::vector<gem::Variant> variants;
    if (sweep_variants == "all") {
      variants = {gem::Variant::gen,    gem::Variant::gem_fi,
                  gem::Variant::gem_fo, gem::Variant::gem_k,
                  gem::Variant::gem_u,  gem::Variant::gem_uk};
    } else {
      std::string rest = sweep_variants;
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        variants.push_back(gem::variant_from_string(rest.substr(0, comma)));
        rest = comma == std::string::npos ? "" : rest.substr(comma + 1);
      }
    }
    std::vector<ScenarioConfig> jobs;
    for (const gem::Variant v : variants) {
      ScenarioConfig cfg = base;
      cfg.variant = v;
      for (const auto& job : replicate(cfg)) jobs.push_back(job);
    }
    const auto summaries = run_jobs(jobs);
    const std::string path =
        (std::filesystem::path(base.out_dir) / "report.json").string();
    write_report(gem::compare(summaries), path);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
