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

#include "gem/scenario.hpp"

#include <fstream>
#include <iostream>
#include <set>

#include "gem/errors.hpp"

namespace gem {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::gem_k:
      return "GEM-K";
    case Variant::gem_uk:
      return "GEM-UK";
    case Variant::gem_fo:
      return "GEM-FO";
    case Variant::gem_u:
      return "GEM-U";
    case Variant::gem_fi:
      return "GEM-FI";
    case Variant::gen:
      return "GEN";
  }
  return "?";
}

Variant variant_from_string(const std::string& s) {
  if (s == "GEM-K") return Variant::gem_k;
  if (s == "GEM-UK") return Variant::gem_uk;
  if (s == "GEM-FO") return Variant::gem_fo;
  if (s == "GEM-U") return Variant::gem_u;
  if (s == "GEM-FI") return Variant::gem_fi;
  if (s == "GEN") return Variant::gen;
  throw ParseError("unknown variant '" + s + "'");
}

namespace {

const std::set<std::string> kKnownKeys = {
    "variant",        "N",
    "q",              "N_bar",
    "beta",           "T",
    "alpha_exponent", "gamma_exponent",
    "lambda0",        "l",
    "default_f",      "dims",
    "mean_spread",    "seed",
    "reps",           "normalized_weight",
    "out_dir",        "output_stride",
};

}  // namespace

ScenarioConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (kKnownKeys.find(key) == kKnownKeys.end())
      throw ParseError("unknown config key '" + key + "'");
  }
  ScenarioConfig cfg;
  try {
    if (j.contains("variant"))
      cfg.variant = variant_from_string(j.at("variant").get<std::string>());
    if (j.contains("N")) cfg.n_sensors = j.at("N").get<int>();
    if (j.contains("q")) cfg.q = j.at("q").get<int>();
    if (j.contains("N_bar")) cfg.n_bar = j.at("N_bar").get<double>();
    if (j.contains("beta")) cfg.beta = j.at("beta").get<double>();
    if (j.contains("T")) cfg.horizon = j.at("T").get<std::int64_t>();
    if (j.contains("alpha_exponent"))
      cfg.alpha_exponent = j.at("alpha_exponent").get<double>();
    if (j.contains("gamma_exponent"))
      cfg.gamma_exponent = j.at("gamma_exponent").get<double>();
    if (j.contains("lambda0")) cfg.lambda0 = j.at("lambda0").get<double>();
    if (j.contains("l")) cfg.bound = j.at("l").get<double>();
    if (j.contains("default_f"))
      cfg.default_f = j.at("default_f").get<double>();
    if (j.contains("dims")) {
      if (j.at("dims").is_array())
        cfg.dims = j.at("dims").get<std::vector<int>>();
      else
        cfg.dims.assign(cfg.n_sensors, j.at("dims").get<int>());
    }
    if (j.contains("mean_spread"))
      cfg.mean_spread = j.at("mean_spread").get<double>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("reps")) cfg.reps = j.at("reps").get<int>();
    if (j.contains("normalized_weight"))
      cfg.normalized_weight = j.at("normalized_weight").get<bool>();
    if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("output_stride"))
      cfg.output_stride = j.at("output_stride").get<std::int64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config decode failed: ") + e.what());
  }
  if (cfg.variant == Variant::gen &&
      (j.contains("beta") || j.contains("lambda0")))
    std::cerr << "warning: variant GEN uses no scheduler; beta/lambda0 are "
                 "ignored\n";
  validate(cfg);
  return cfg;
}

ScenarioConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

nlohmann::json to_json(const ScenarioConfig& cfg) {
  nlohmann::json j;
  j["variant"] = to_string(cfg.variant);
  j["N"] = cfg.n_sensors;
  j["q"] = cfg.q;
  j["N_bar"] = cfg.n_bar;
  j["beta"] = cfg.beta;
  j["T"] = cfg.horizon;
  j["alpha_exponent"] = cfg.alpha_exponent;
  j["gamma_exponent"] = cfg.gamma_exponent;
  j["lambda0"] = cfg.lambda0;
  j["l"] = cfg.bound;
  j["default_f"] = cfg.default_f;
  if (!cfg.dims.empty()) j["dims"] = cfg.dims;
  j["mean_spread"] = cfg.mean_spread;
  j["seed"] = cfg.seed;
  j["reps"] = cfg.reps;
  j["normalized_weight"] = cfg.normalized_weight;
  j["out_dir"] = cfg.out_dir;
  j["output_stride"] = cfg.output_stride;
  return j;
}

std::vector<int> resolved_dims(const ScenarioConfig& cfg) {
  if (cfg.dims.empty()) return std::vector<int>(cfg.n_sensors, 2);
  return cfg.dims;
}

void validate(const ScenarioConfig& cfg) {
  if (cfg.n_sensors < 1) throw ValidationError("N must be >= 1");
  if (cfg.q < 1) throw ValidationError("q must be >= 1");
  if (cfg.n_bar > cfg.n_sensors)
    throw ValidationError("activation budget N_bar exceeds sensor count N");
  if (cfg.n_bar < 0) throw ValidationError("N_bar must be >= 0");
  if (cfg.horizon < 1) throw ValidationError("T must be >= 1");
  if (cfg.beta <= 0) throw ValidationError("beta must be > 0");
  if (!(cfg.alpha_exponent > 0.5 && cfg.alpha_exponent <= 1.0))
    throw ValidationError("alpha_exponent must lie in (0.5, 1]");
  if (!(cfg.gamma_exponent > 0.5 && cfg.gamma_exponent <= 1.0))
    throw ValidationError("gamma_exponent must lie in (0.5, 1]");
  if (cfg.gamma_exponent <= cfg.alpha_exponent)
    throw ValidationError(
        "gamma_exponent must exceed alpha_exponent (timescale separation)");
  if (cfg.lambda0 < 0 || cfg.lambda0 > cfg.bound)
    throw ValidationError("lambda0 must lie in [0, l]");
  if (cfg.bound <= 0) throw ValidationError("l must be > 0");
  if (cfg.default_f < 0 || cfg.default_f > cfg.bound)
    throw ValidationError("default_f must lie in [0, l]");
  if (!cfg.dims.empty() &&
      static_cast<int>(cfg.dims.size()) != cfg.n_sensors)
    throw ValidationError("dims must have one entry per sensor");
  for (int d : cfg.dims)
    if (d < 1) throw ValidationError("every sensor dimension must be >= 1");
  if (cfg.mean_spread < 0) throw ValidationError("mean_spread must be >= 0");
  if (cfg.reps < 1) throw ValidationError("reps must be >= 1");
  if (cfg.output_stride < 1)
    throw ValidationError("output_stride must be >= 1");
}

}  // namespace gem
