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

#include "gem/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "gem/errors.hpp"

namespace gem {

namespace {

void append_double(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

void append_field(std::string& out, const std::vector<double>& col,
                  std::int64_t t) {
  out += ',';
  if (!col.empty()) append_double(out, col[t]);
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

nlohmann::json number_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace

std::string time_series_csv(const RunTimeSeries& ts, std::int64_t stride) {
  std::string out = "t,mse_inst,mse_avg,active_avg,lambda,tpm_frob\n";
  const std::int64_t T = ts.horizon;
  for (std::int64_t t = 0; t < T; ++t) {
    if (t % stride != 0 && t != T - 1) continue;
    out += std::to_string(t);
    append_field(out, ts.mse_inst, t);
    append_field(out, ts.mse_avg, t);
    append_field(out, ts.active_avg, t);
    append_field(out, ts.lambda, t);
    append_field(out, ts.tpm_frob, t);
    out += '\n';
  }
  return out;
}

nlohmann::json summary_json(const RunSummary& s, const ScenarioConfig& cfg) {
  // The embedded config must parse back to the exact input.
  nlohmann::json j;
  j["variant"] = to_string(s.variant);
  j["seed"] = s.seed;
  j["mse_final"] = s.mse_final;
  j["mse_db"] = s.mse_db;
  j["mse_final_window"] = s.mse_final_window;
  j["active_avg_final"] = number_or_null(s.active_avg_final);
  j["active_avg_window"] = number_or_null(s.active_avg_window);
  j["lambda_final"] = number_or_null(s.lambda_final);
  j["tpm_frob_final"] = number_or_null(s.tpm_frob_final);
  j["tpm_frob_avg_final"] = number_or_null(s.tpm_frob_avg_final);
  j["wall_time_s"] = s.wall_time_s;
  j["config"] = to_json(cfg);
  return j;
}

std::string run_basename(const ScenarioConfig& cfg) {
  return to_string(cfg.variant) + "_seed" + std::to_string(cfg.seed);
}

void write_outputs(const RunTimeSeries& ts, const RunSummary& s,
                   const ScenarioConfig& cfg) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + cfg.out_dir);
  const std::string base = (fs::path(cfg.out_dir) / run_basename(cfg)).string();
  {
    std::ofstream csv(base + ".csv", std::ios::binary);
    if (!csv) throw IoError("cannot open " + base + ".csv for writing");
    csv << time_series_csv(ts, cfg.output_stride);
    if (!csv) throw IoError("failed writing " + base + ".csv");
  }
  {
    std::ofstream js(base + ".summary.json", std::ios::binary);
    if (!js) throw IoError("cannot open " + base + ".summary.json");
    js << summary_json(s, cfg).dump(2) << '\n';
    if (!js) throw IoError("failed writing " + base + ".summary.json");
  }
}

CompareReport compare(const std::vector<nlohmann::json>& summaries) {
  // variant → (seed → mse).
  std::map<std::string, std::map<std::uint64_t, double>> mse;
  for (const auto& s : summaries) {
    const std::string variant = s.at("variant").get<std::string>();
    const std::uint64_t seed = s.at("seed").get<std::uint64_t>();
    mse[variant][seed] = s.at("mse_final").get<double>();
  }

  nlohmann::json report;
  std::string table;
  table += "variant      n   median MSE   median dB\n";
  std::map<std::string, double> median_db;
  for (const auto& [variant, by_seed] : mse) {
    std::vector<double> values;
    for (const auto& [seed, v] : by_seed) values.push_back(v);
    const double med = median(values);
    const double db = mse_to_db(med);
    median_db[variant] = db;
    report["variants"][variant] = {
        {"n", values.size()}, {"median_mse", med}, {"median_db", db}};
    char line[96];
    std::snprintf(line, sizeof(line), "%-10s %3zu   %10.6f   %+9.4f\n",
                  variant.c_str(), values.size(), med, db);
    table += line;
  }

  for (const auto& [va, dba] : median_db)
    for (const auto& [vb, dbb] : median_db)
      if (va != vb) report["pairwise_db_gap"][va + " vs " + vb] = dba - dbb;

  // Per-seed ordering check over the five comparable modes.
  const std::vector<std::string> expected_order = {"GEN", "GEM-FO", "GEM-K",
                                                   "GEM-U", "GEM-UK"};
  report["ordering"]["expected"] = expected_order;
  int num_ok = 0, num_seeds = 0;
  nlohmann::json per_seed = nlohmann::json::array();
  std::map<std::uint64_t, std::map<std::string, double>> by_seed;
  for (const auto& [variant, seeds] : mse)
    for (const auto& [seed, v] : seeds) by_seed[seed][variant] = v;
  for (const auto& [seed, values] : by_seed) {
    bool have_all = true;
    for (const auto& v : expected_order)
      if (values.find(v) == values.end()) have_all = false;
    if (!have_all) continue;
    ++num_seeds;
    bool ok = true;
    for (std::size_t i = 0; i + 1 < expected_order.size(); ++i)
      if (values.at(expected_order[i]) > values.at(expected_order[i + 1]))
        ok = false;
    num_ok += ok ? 1 : 0;
    nlohmann::json entry;
    entry["seed"] = seed;
    entry["order_ok"] = ok;
    for (const auto& [variant, v] : values) entry["mse"][variant] = v;
    per_seed.push_back(entry);
  }
  report["ordering"]["per_seed"] = per_seed;
  report["ordering"]["num_ok"] = num_ok;
  report["ordering"]["num_seeds"] = num_seeds;
  if (num_seeds > 0) {
    char line[64];
    std::snprintf(line, sizeof(line), "ordering holds on %d of %d seeds\n",
                  num_ok, num_seeds);
    table += line;
  }
  return CompareReport{std::move(report), std::move(table)};
}

std::vector<std::string> expand_glob(const std::string& pattern) {
  namespace fs = std::filesystem;
  const fs::path p(pattern);
  const std::string name = p.filename().string();
  if (name.find('*') == std::string::npos &&
      name.find('?') == std::string::npos) {
    return fs::exists(p) ? std::vector<std::string>{pattern}
                         : std::vector<std::string>{};
  }
  const fs::path dir = p.parent_path().empty() ? "." : p.parent_path();
  // Wildcard match: '*' any run, '?' any single character.
  auto matches = [&](const std::string& s) {
    std::size_t si = 0, pi = 0, star_p = std::string::npos, star_s = 0;
    while (si < s.size()) {
      if (pi < name.size() && (name[pi] == '?' || name[pi] == s[si])) {
        ++si, ++pi;
      } else if (pi < name.size() && name[pi] == '*') {
        star_p = pi++;
        star_s = si;
      } else if (star_p != std::string::npos) {
        pi = star_p + 1;
        si = ++star_s;
      } else {
        return false;
      }
    }
    while (pi < name.size() && name[pi] == '*') ++pi;
    return pi == name.size();
  };
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file()) continue;
    if (matches(entry.path().filename().string()))
      out.push_back(entry.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace gem
