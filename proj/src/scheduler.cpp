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

#include "gem/scheduler.hpp"

#include <cassert>
#include <cmath>

#include "gem/errors.hpp"

namespace gem {

StepSchedule::StepSchedule(double exponent, Kind kind)
    : exponent_(exponent), kind_(kind) {
  assert(exponent > 0.5 && exponent <= 1.0);
}

double StepSchedule::operator()(std::int64_t n) const {
  if (n < 1) throw InvalidIndexError("step schedule index must be >= 1");
  return std::pow(static_cast<double>(n), -exponent_);
}

CostTable::CostTable(double default_mse, double bound)
    : default_mse_(default_mse), bound_(bound) {
  assert(bound > 0.0 && default_mse >= 0.0 && default_mse <= bound);
}

double CostTable::mse(const ActivationVector& b) const {
  const auto it = table_.find(b);
  return it == table_.end() ? default_mse_ : it->second.f;
}

std::int64_t CostTable::visits(const ActivationVector& b) const {
  const auto it = table_.find(b);
  return it == table_.end() ? 0 : it->second.visits;
}

double CostTable::cost(double lambda, const ActivationVector& b) const {
  return mse(b) + lambda * static_cast<double>(b.count());
}

void CostTable::update(const ActivationVector& b_used, double observed_error,
                       const StepSchedule& alpha) {
  assert(observed_error >= 0.0);
  auto [it, inserted] = table_.try_emplace(b_used, Entry{default_mse_, 0});
  Entry& e = it->second;
  e.visits += 1;
  const double step = alpha(e.visits);
  double f = e.f + step * (observed_error - e.f);
  f = std::min(std::max(f, 0.0), bound_);
  e.f = f;
}

std::pair<double, double> CostTable::value_range() const {
  if (table_.empty()) return {0.0, 0.0};
  double lo = table_.begin()->second.f, hi = lo;
  for (const auto& [key, entry] : table_) {
    lo = std::min(lo, entry.f);
    hi = std::max(hi, entry.f);
  }
  return {lo, hi};
}

Multiplier::Multiplier(double initial, double bound)
    : lambda_(initial), bound_(bound) {
  assert(initial >= 0.0 && initial <= bound);
}

void Multiplier::update(std::int64_t t, int active_count, double target,
                        const StepSchedule& gamma) {
  const double step = gamma(t + 1);
  double next = lambda_ + step * (static_cast<double>(active_count) - target);
  lambda_ = std::min(std::max(next, 0.0), bound_);
}

double gibbs_activation_probability(double cost_on, double cost_off,
                                    double beta) {
  assert(beta > 0.0);
  // 1/(1 + e^x) with x = β(h_on − h_off); never exponentiates a large
  // positive argument.
  const double x = beta * (cost_on - cost_off);
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

ActivationVector gibbs_step(const ActivationVector& prev,
                            const CostTable& table, double lambda, double beta,
                            RandomStream& rng) {
  const int n = prev.size();
  assert(n >= 1);
  const int site = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
  ActivationVector on = prev;
  on.set(site, true);
  ActivationVector off = prev;
  off.set(site, false);
  const double p_on = gibbs_activation_probability(
      table.cost(lambda, on), table.cost(lambda, off), beta);
  return rng.uniform01() < p_on ? on : off;
}

}  // namespace gem
