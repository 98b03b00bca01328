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

#include "gem/run.hpp"

#include <chrono>
#include <cmath>

#include "gem/errors.hpp"
#include "gem/estimator.hpp"

namespace gem {

namespace {

// Fixed stream ids deriving every random source from the run seed. Truth
// streams come first so that all variants sharing a seed see the same
// chain matrix, sensor parameters and chain path.
enum StreamId : std::uint64_t {
  kStreamTruthTpm = 0,
  kStreamTruthSensors = 1,
  kStreamChain = 2,
  kStreamNoise = 3,
  kStreamScheduler = 4,
  kStreamEstimateTpm = 5,
  kStreamEstimateSensors = 6,
};

struct VariantTraits {
  bool gibbs = false;        // single-site sampler drives activation
  bool lambda_update = false;
  bool full_activation = false;
  bool bernoulli = false;
  bool em = false;
  bool known_means = true;
  bool estimator_uses_truth_tpm = false;
  bool genie = false;
};

VariantTraits traits_for(Variant v) {
  VariantTraits t;
  switch (v) {
    case Variant::gem_k:
      t.gibbs = t.lambda_update = t.em = true;
      break;
    case Variant::gem_uk:
      t.gibbs = t.lambda_update = t.em = true;
      t.known_means = false;
      break;
    case Variant::gem_fo:
      t.full_activation = t.em = true;
      break;
    case Variant::gem_u:
      t.bernoulli = t.em = true;
      break;
    case Variant::gem_fi:
      t.gibbs = t.lambda_update = true;
      t.estimator_uses_truth_tpm = true;
      break;
    case Variant::gen:
      t.genie = true;
      break;
  }
  return t;
}

double one_hot_error(const Belief& belief, StateIndex truth) {
  // ‖belief − e_truth‖² without materializing the basis vector.
  return norm2_squared(belief.p) + 1.0 - 2.0 * belief.p[truth];
}

double running(double prev_avg, double sample, std::int64_t n) {
  return prev_avg + (sample - prev_avg) / static_cast<double>(n);
}

double window_mean(const std::vector<double>& v, std::int64_t window) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::int64_t n = static_cast<std::int64_t>(v.size());
  const std::int64_t w = std::max<std::int64_t>(1, std::min(window, n));
  double s = 0.0;
  for (std::int64_t i = n - w; i < n; ++i) s += v[i];
  return s / static_cast<double>(w);
}

}  // namespace

TransitionMatrix truth_tpm_for(const ScenarioConfig& cfg) {
  RandomStream rng(cfg.seed, kStreamTruthTpm);
  return TransitionMatrix::random(cfg.q, rng);
}

SensorLibrary truth_library_for(const ScenarioConfig& cfg) {
  RandomStream rng(cfg.seed, kStreamTruthSensors);
  return SensorLibrary::random(cfg.n_sensors, cfg.q, resolved_dims(cfg),
                               cfg.mean_spread, rng);
}

RunResult run_scenario(const ScenarioConfig& cfg, RunObserver* observer) {
  validate(cfg);
  const auto t_start = std::chrono::steady_clock::now();
  const VariantTraits traits = traits_for(cfg.variant);
  const int q = cfg.q;
  const std::int64_t horizon = cfg.horizon;
  const std::vector<int> dims = resolved_dims(cfg);

  RandomStream rng_chain(cfg.seed, kStreamChain);
  RandomStream rng_noise(cfg.seed, kStreamNoise);
  RandomStream rng_sched(cfg.seed, kStreamScheduler);

  const TransitionMatrix truth_tpm = truth_tpm_for(cfg);
  const Belief pi = Belief::uniform(q);

  RunResult out;
  RunTimeSeries& ts = out.series;
  ts.horizon = horizon;
  ts.mse_inst.reserve(horizon);
  ts.mse_avg.reserve(horizon);

  if (traits.genie) {
    // The genie sees the exact previous state and predicts its conditional
    // mean; nothing else runs.
    StateIndex x = rng_chain.categorical(pi.p);
    double mse_acc = 0.0;
    Belief belief = pi;
    for (std::int64_t t = 0; t < horizon; ++t) {
      if (t > 0) {
        const StateIndex prev = x;
        x = step_chain(truth_tpm, x, rng_chain);
        belief.p.assign(truth_tpm.row(prev), truth_tpm.row(prev) + q);
      }
      const double err = one_hot_error(belief, x);
      mse_acc = running(mse_acc, err, t + 1);
      ts.mse_inst.push_back(err);
      ts.mse_avg.push_back(mse_acc);
      if (observer) {
        StepContext ctx;
        ctx.t = t;
        ctx.belief = &belief;
        observer->on_step(ctx);
      }
    }
  } else {
    const SensorLibrary truth_lib = truth_library_for(cfg);

    // The estimator and the EM read parameters from this library; known
    // families are the truth, unknown ones start from independent draws.
    SensorLibrary est_lib = truth_lib;
    if (!traits.known_means) {
      RandomStream rng_est_sensors(cfg.seed, kStreamEstimateSensors);
      const SensorLibrary init = SensorLibrary::random(
          cfg.n_sensors, q, dims, cfg.mean_spread, rng_est_sensors);
      for (int k = 0; k < est_lib.size(); ++k)
        est_lib.sensor(k).means = init.sensor(k).means;
    }

    const StepSchedule alpha(cfg.alpha_exponent, StepSchedule::Kind::fast);
    const StepSchedule gamma(cfg.gamma_exponent, StepSchedule::Kind::slow);
    CostTable table(cfg.default_f, cfg.bound);
    Multiplier multiplier(cfg.lambda0, cfg.bound);

    std::optional<OnlineEM> em;
    if (traits.em) {
      RandomStream rng_est_tpm(cfg.seed, kStreamEstimateTpm);
      OnlineEM::Options opt;
      opt.known_means = traits.known_means;
      opt.known_covs = true;
      opt.normalized_weight = cfg.normalized_weight;
      em.emplace(pi, TransitionMatrix::random(q, rng_est_tpm), opt, gamma);
    }

    const bool track_active = true;
    const bool track_lambda = traits.lambda_update;
    const bool track_tpm = traits.em;
    if (track_active) ts.active_avg.reserve(horizon);
    if (track_lambda) ts.lambda.reserve(horizon);
    if (track_tpm) {
      ts.tpm_frob.reserve(horizon);
      ts.tpm_frob_avg.reserve(horizon);
    }

    StateIndex x = 0;
    // The sampler's initial state starts the activation count near the
    // budget, so the multiplier is not kicked far from lambda0 by the
    // full-step first update.
    ActivationVector b_prev(cfg.n_sensors);
    if (traits.gibbs) {
      const double p_on = cfg.n_bar / static_cast<double>(cfg.n_sensors);
      for (int k = 0; k < cfg.n_sensors; ++k)
        b_prev.set(k, rng_sched.uniform01() < p_on);
    }
    EstimatorState est = initial_estimator_state(pi);
    double mse_acc = 0.0, active_acc = 0.0, tpm_acc = 0.0;

    for (std::int64_t t = 0; t < horizon; ++t) {
      x = (t == 0) ? rng_chain.categorical(pi.p)
                   : step_chain(truth_tpm, x, rng_chain);

      ActivationVector b(cfg.n_sensors);
      if (traits.gibbs) {
        b = gibbs_step(b_prev, table, multiplier.value(), cfg.beta, rng_sched);
      } else if (traits.full_activation) {
        b = ActivationVector::ones(cfg.n_sensors);
      } else {
        const double p_on = cfg.n_bar / static_cast<double>(cfg.n_sensors);
        for (int k = 0; k < cfg.n_sensors; ++k)
          b.set(k, rng_sched.uniform01() < p_on);
      }
      b_prev = b;
      const double lambda_used = multiplier.value();
      if (traits.lambda_update)
        multiplier.update(t, b.count(), cfg.n_bar, gamma);

      const Observation y = observe(truth_lib, b, x, rng_noise);
      const SubsetParams sp = subset_params(est_lib, b);

      const TransitionMatrix& est_tpm =
          traits.estimator_uses_truth_tpm ? truth_tpm : em->tpm();
      if (t > 0) est = estimate_step(est, est_tpm, sp, b, y);

      const double err = one_hot_error(est.belief, x);
      mse_acc = running(mse_acc, err, t + 1);
      ts.mse_inst.push_back(err);
      ts.mse_avg.push_back(mse_acc);

      table.update(b, trace(est.cov_est), alpha);

      if (traits.em) em->step(t, y, b, sp, est_lib);

      active_acc = running(active_acc, b.count(), t + 1);
      ts.active_avg.push_back(active_acc);
      if (track_lambda) ts.lambda.push_back(lambda_used);
      if (track_tpm) {
        const double frob =
            frobenius_distance(truth_tpm.rows(), em->tpm().rows());
        tpm_acc = running(tpm_acc, frob, t + 1);
        ts.tpm_frob.push_back(frob);
        ts.tpm_frob_avg.push_back(tpm_acc);
      }

      if (observer) {
        StepContext ctx;
        ctx.t = t;
        ctx.belief = &est.belief;
        ctx.em_filter = traits.em ? &em->filter() : nullptr;
        ctx.tpm_estimate = traits.em ? &em->tpm() : &est_tpm;
        ctx.estimates = &est_lib;
        ctx.costs = &table;
        ctx.activation = &b;
        ctx.lambda = traits.lambda_update
                         ? multiplier.value()
                         : std::numeric_limits<double>::quiet_NaN();
        observer->on_step(ctx);
      }
    }

    out.summary.lambda_final =
        track_lambda ? multiplier.value()
                     : std::numeric_limits<double>::quiet_NaN();
  }

  RunSummary& s = out.summary;
  s.variant = cfg.variant;
  s.seed = cfg.seed;
  s.mse_final = ts.mse_avg.back();
  s.mse_db = 10.0 * std::log10(s.mse_final);
  const std::int64_t window = std::max<std::int64_t>(1, horizon / 10);
  s.mse_final_window = window_mean(ts.mse_inst, window);
  if (!ts.active_avg.empty()) {
    s.active_avg_final = ts.active_avg.back();
    double acc = 0.0;
    std::int64_t w = std::min<std::int64_t>(window, horizon);
    // Mean activation count over the final window, recovered from the
    // running averages so the instantaneous counts need not be stored.
    const double total_T = ts.active_avg.back() * horizon;
    const double total_head =
        (horizon - w) > 0 ? ts.active_avg[horizon - w - 1] * (horizon - w)
                          : 0.0;
    acc = (total_T - total_head) / static_cast<double>(w);
    s.active_avg_window = acc;
  }
  if (!ts.tpm_frob.empty()) {
    s.tpm_frob_final = ts.tpm_frob.back();
    s.tpm_frob_avg_final = ts.tpm_frob_avg.back();
  }
  s.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return out;
}

}  // namespace gem
