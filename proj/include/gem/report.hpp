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

#ifndef GEM_REPORT_HPP
#define GEM_REPORT_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "gem/run.hpp"
#include "gem/scenario.hpp"

namespace gem {

/// CSV with header `t,mse_inst,mse_avg,active_avg,lambda,tpm_frob`. Fields
/// that do not apply to the variant stay empty. Rows are emitted every
/// `stride` steps plus always the final step; doubles use %.17g so the
/// file round-trips exactly.
std::string time_series_csv(const RunTimeSeries& ts, std::int64_t stride = 1);

/// Summary document embedding the fully resolved config, so a result file
/// is self-describing and re-parseable.
nlohmann::json summary_json(const RunSummary& s, const ScenarioConfig& cfg);

/// Canonical output names for a run within cfg.out_dir.
std::string run_basename(const ScenarioConfig& cfg);

/// Write <out_dir>/<base>.csv and <out_dir>/<base>.summary.json, creating
/// the directory if needed. Throws IoError.
void write_outputs(const RunTimeSeries& ts, const RunSummary& s,
                   const ScenarioConfig& cfg);

inline double mse_to_db(double mse) { return 10.0 * std::log10(mse); }

/// Cross-run comparison over summary documents: per-variant medians, the
/// pairwise dB gaps, and a per-seed check of the expected error ordering
/// GEN ≤ GEM-FO ≤ GEM-K ≤ GEM-U ≤ GEM-UK (evaluated for the seeds that
/// have all five). Also renders a plain-text table.
struct CompareReport {
  nlohmann::json report;
  std::string table;
};
CompareReport compare(const std::vector<nlohmann::json>& summaries);

/// Minimal glob over one path: '*' and '?' wildcards in the final
/// component only.
std::vector<std::string> expand_glob(const std::string& pattern);

}  // namespace gem

#endif  // GEM_REPORT_HPP
