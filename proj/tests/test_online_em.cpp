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

#include <algorithm>
#include <cmath>

#include "gem/errors.hpp"
#include "gem/online_em.hpp"
#include "gem/rng.hpp"

using namespace gem;

namespace {

SensorLibrary scalar_pair(double sep, double var, int q = 2) {
  std::vector<SensorParams> sensors(2);
  for (auto& s : sensors) {
    s.dim = 1;
    for (int i = 0; i < q; ++i) {
      s.means.push_back({i == 0 ? -sep : sep});
      Mat c(1, 1);
      c(0, 0) = var;
      s.covs.push_back(c);
    }
  }
  return SensorLibrary(std::move(sensors), q);
}

Observation make_obs(std::vector<int> sensors, std::vector<Vec> blocks) {
  Observation y;
  y.sensors = std::move(sensors);
  y.blocks = std::move(blocks);
  for (const auto& blk : y.blocks)
    y.stacked.insert(y.stacked.end(), blk.begin(), blk.end());
  return y;
}

}  // namespace

TEST_CASE("gaussian weight closed forms") {
  SensorParams s;
  s.dim = 1;
  s.means = {{0.0}};
  Mat c(1, 1);
  c(0, 0) = 1.0;
  s.covs = {c};
  const SensorLibrary lib({s}, 1);
  const ActivationVector b = ActivationVector::ones(1);
  const SubsetParams sp = subset_params(lib, b);

  const Observation at_mean = make_obs({0}, {{0.0}});
  CHECK(std::exp(log_gaussian_weight(sp, 0, at_mean, false)) ==
        doctest::Approx(1.0));

  const Observation at_one = make_obs({0}, {{1.0}});
  CHECK(std::exp(log_gaussian_weight(sp, 0, at_one, false)) ==
        doctest::Approx(0.60653).epsilon(1e-5));
  CHECK(std::exp(log_gaussian_weight(sp, 0, at_one, true)) ==
        doctest::Approx(0.24197).epsilon(1e-5));

  CHECK(log_gaussian_weight(sp, 0, Observation{}, true) == 0.0);
}

TEST_CASE("initial statistics carry the delta structure") {
  const SensorLibrary lib = scalar_pair(4.0, 1.0);
  ActivationVector b0(2);
  b0.set(0, true);
  const SubsetParams sp = subset_params(lib, b0);
  const Observation y0 = make_obs({0}, {{1.5}});
  const EMState st = em_init(Belief::uniform(2), y0, sp, b0, lib, true);

  for (double v : st.rho_a) CHECK(v == 0.0);

  // Active sensor: diagonal entries hold (1, y, y²); off-diagonal zero.
  const SensorStats& s0 = st.sensor_stats[0];
  for (int i = 0; i < 2; ++i) {
    CHECK(s0.at(i, i, 2)[0] == 1.0);
    CHECK(s0.at(i, i, 2)[1] == 1.5);
    CHECK(s0.at(i, i, 2)[2] == doctest::Approx(2.25));
    CHECK(s0.at(i, 1 - i, 2)[0] == 0.0);
  }
  CHECK(st.sensor_clock[0] == 1);

  // Inactive sensor: zeroed blocks, clock untouched.
  for (double v : st.sensor_stats[1].data) CHECK(v == 0.0);
  CHECK(st.sensor_clock[1] == 0);
}

TEST_CASE("initial filter with no evidence is the prior") {
  const SensorLibrary lib = scalar_pair(4.0, 1.0);
  const ActivationVector none(2);
  const SubsetParams sp = subset_params(lib, none);
  const Belief pi{{0.3, 0.7}};
  const EMState st = em_init(pi, Observation{}, sp, none, lib, true);
  CHECK(st.phi.p[0] == doctest::Approx(0.3));
  CHECK(st.phi.p[1] == doctest::Approx(0.7));
}

TEST_CASE("filter update closed forms") {
  const SensorLibrary lib = scalar_pair(4.0, 1.0);
  const ActivationVector none(2);
  const SubsetParams sp_none = subset_params(lib, none);

  // Identity chain, vacuous weights: filter unchanged.
  const TransitionMatrix id(Mat::identity(2));
  const Belief phi{{0.25, 0.75}};
  const Belief out = filter_update(phi, id, sp_none, Observation{}, true);
  CHECK(out.p[0] == doctest::Approx(0.25).epsilon(1e-12));

  // Uniform prior and chain with a 2:1:1 weight vector: posterior is the
  // weights normalized. Means chosen so the state-0 density is exactly
  // twice the others at y = 0.
  const int q = 3;
  std::vector<SensorParams> sensors(1);
  sensors[0].dim = 1;
  const double mu1 = std::sqrt(2.0 * std::log(2.0));
  sensors[0].means = {{0.0}, {mu1}, {mu1}};
  Mat c(1, 1);
  c(0, 0) = 1.0;
  sensors[0].covs = {c, c, c};
  const SensorLibrary lib3(std::move(sensors), q);
  const ActivationVector b = ActivationVector::ones(1);
  const SubsetParams sp = subset_params(lib3, b);
  Mat uniform_rows(q, q, 1.0 / q);
  const TransitionMatrix u(uniform_rows);
  const Observation y = make_obs({0}, {{0.0}});
  const Belief post = filter_update(Belief::uniform(q), u, sp, y, false);
  CHECK(post.p[0] == doctest::Approx(2.0 / (q + 1)).epsilon(1e-12));
  CHECK(post.p[1] == doctest::Approx(1.0 / (q + 1)).epsilon(1e-12));
  double sum = 0.0;
  for (double v : post.p) sum += v;
  CHECK(std::abs(sum - 1.0) < 1e-12);
}

TEST_CASE("retrospective kernel closed forms and normalization") {
  Mat uniform_rows(4, 4, 0.25);
  const TransitionMatrix u(uniform_rows);
  const RetrospectiveKernel r = retrospective(Belief::uniform(4), u);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(r(i, j) == doctest::Approx(0.25));

  RandomStream rng(3);
  const TransitionMatrix p = TransitionMatrix::random(4, rng);
  const RetrospectiveKernel r2 = retrospective(Belief::one_hot(4, 1), p);
  for (int j = 0; j < 4; ++j) {
    CHECK(r2(1, j) == doctest::Approx(1.0));
    double col = 0.0;
    for (int i = 0; i < 4; ++i) col += r2(i, j);
    CHECK(col == doctest::Approx(1.0).epsilon(1e-12));
  }
}

namespace {

EMState fresh_state(const SensorLibrary& lib, const ActivationVector& b0,
                    const Observation& y0) {
  return em_init(Belief::uniform(lib.q()), y0, subset_params(lib, b0), b0,
                 lib, true);
}

}  // namespace

TEST_CASE("transition statistics at full and zero step") {
  RandomStream rng(7);
  const SensorLibrary lib = scalar_pair(4.0, 1.0);
  const ActivationVector b = ActivationVector::ones(2);
  const Observation y0 = make_obs({0, 1}, {{-4.0}, {-4.1}});
  const StepSchedule gamma(0.8, StepSchedule::Kind::slow);

  const TransitionMatrix p = TransitionMatrix::random(2, rng);
  const Belief phi{{0.6, 0.4}};
  const RetrospectiveKernel r = retrospective(phi, p);

  EMState full = fresh_state(lib, b, y0);
  e_step(full, r, y0, b, 1.0, gamma, true);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        CHECK(full.rho_a_at(i, j, k) ==
              doctest::Approx(j == k ? r(i, j) : 0.0));

  EMState zero = fresh_state(lib, b, y0);
  const Vec before = zero.rho_a;  // all zeros after init
  e_step(zero, r, y0, b, 0.0, gamma, true);
  for (double v : zero.rho_a) CHECK(v == 0.0);
  (void)before;
}

TEST_CASE("active sensors keep unit column mass, inactive ones contract") {
  RandomStream rng(11);
  const SensorLibrary lib = scalar_pair(4.0, 1.0);
  const StepSchedule gamma(0.8, StepSchedule::Kind::slow);
  const TransitionMatrix p = TransitionMatrix::random(2, rng);

  ActivationVector both = ActivationVector::ones(2);
  const Observation y0 = make_obs({0, 1}, {{-4.0}, {3.9}});
  EMState st = fresh_state(lib, both, y0);

  Belief phi = st.phi;
  ActivationVector only0(2);
  only0.set(0, true);
  double prev_max_mass = 1.0;
  for (int t = 1; t <= 30; ++t) {
    const RetrospectiveKernel r = retrospective(phi, p);
    const Observation y = make_obs({0}, {{-4.0 + 0.1 * t}});
    e_step(st, r, y, only0, StepSchedule(0.8, StepSchedule::Kind::slow)(t),
           gamma, true);
    phi = filter_update(phi, p, subset_params(lib, only0), y, true);

    // Sensor 0 observes every step: for each conditioning state the counts
    // over the counted state stay a distribution.
    const SensorStats& s0 = st.sensor_stats[0];
    for (int j = 0; j < 2; ++j) {
      double mass = 0.0;
      for (int i = 0; i < 2; ++i) mass += s0.at(i, j, 2)[0];
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    }
    // Sensor 1 never observes: its worst-case column mass is non-increasing.
    const SensorStats& s1 = st.sensor_stats[1];
    double max_mass = 0.0;
    for (int j = 0; j < 2; ++j) {
      double mass = 0.0;
      for (int i = 0; i < 2; ++i) mass += s1.at(i, j, 2)[0];
      max_mass = std::max(max_mass, mass);
    }
    CHECK(max_mass <= prev_max_mass + 1e-12);
    prev_max_mass = max_mass;
  }
  CHECK(st.sensor_clock[0] == 31);
  CHECK(st.sensor_clock[1] == 1);
}

TEST_CASE("re-estimation closed forms") {
  // Hand-crafted statistics: phi = (1/2, 1/2), sensor blocks picked so
  // S0 = 2, S1 = 4, S2 = 10 for state 0, giving mean 2 and variance 1.
  const SensorLibrary lib = scalar_pair(1.0, 1.0);
  ActivationVector b(2);
  b.set(0, true);
  const Observation y0 = make_obs({0}, {{0.0}});
  EMState st = fresh_state(lib, b, y0);
  st.phi = Belief{{0.5, 0.5}};
  SensorStats& s0 = st.sensor_stats[0];
  std::fill(s0.data.begin(), s0.data.end(), 0.0);  // wipe the init seeding
  s0.at(0, 0, 2)[0] = 4.0;
  s0.at(0, 0, 2)[1] = 8.0;
  s0.at(0, 0, 2)[2] = 20.0;
  // Give the transition stats a known shape: rho(i,j,k) = delta_jk * w_ij.
  const double w[2][2] = {{0.3, 0.1}, {0.2, 0.6}};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        st.rho_a[(i * 2 + j) * 2 + k] = (j == k) ? w[i][j] : 0.0;

  const TransitionMatrix prev(Mat::identity(2));
  const SubsetParams sp = subset_params(lib, b);
  const MStepResult m = m_step(st, prev, sp, b, false, false);

  // Rows normalize the phi-weighted stats: row i ∝ (w[i][0], w[i][1]).
  CHECK(m.tpm(0, 0) == doctest::Approx(0.75));
  CHECK(m.tpm(0, 1) == doctest::Approx(0.25));
  CHECK(m.tpm(1, 0) == doctest::Approx(0.25));
  CHECK(m.tpm(1, 1) == doctest::Approx(0.75));

  CHECK(m.params.means[0][0] == doctest::Approx(2.0));
  CHECK(m.params.cov_blocks[0][0](0, 0) == doctest::Approx(1.0));
  // State 1 had no evidence (S0 = 0): parameters kept.
  CHECK(m.params.means[1][0] == sp.means[1][0]);
}

TEST_CASE("re-estimated rows always sum to one, zero mass freezes the row") {
  const SensorLibrary lib = scalar_pair(1.0, 1.0);
  const ActivationVector none(2);
  EMState st = fresh_state(lib, none, Observation{});
  // All-zero transition stats: every row frozen at the previous estimate.
  RandomStream rng(13);
  const TransitionMatrix prev = TransitionMatrix::random(2, rng);
  const MStepResult m =
      m_step(st, prev, subset_params(lib, none), none, true, true);
  CHECK(m.tpm == prev);
}

TEST_CASE("single-state chain is forced to the trivial matrix") {
  SensorParams s;
  s.dim = 1;
  s.means = {{0.0}};
  Mat c(1, 1);
  c(0, 0) = 1.0;
  s.covs = {c};
  const SensorLibrary lib({s}, 1);
  const ActivationVector b = ActivationVector::ones(1);
  const Observation y0 = make_obs({0}, {{0.2}});
  EMState st = fresh_state(lib, b, y0);
  const StepSchedule gamma(0.8, StepSchedule::Kind::slow);
  const TransitionMatrix one(Mat(1, 1, 1.0));
  const RetrospectiveKernel r = retrospective(st.phi, one);
  e_step(st, r, y0, b, 1.0, gamma, true);
  const MStepResult m = m_step(st, one, subset_params(lib, b), b, true, true);
  CHECK(m.tpm(0, 0) == 1.0);
}

TEST_CASE("covariance re-estimates are floored to stay PSD") {
  // Second moments deliberately inconsistent with the mean so the raw
  // covariance estimate is negative.
  const SensorLibrary lib = scalar_pair(1.0, 1.0);
  ActivationVector b(2);
  b.set(0, true);
  EMState st = fresh_state(lib, b, make_obs({0}, {{0.0}}));
  st.phi = Belief{{1.0, 0.0}};
  SensorStats& s0 = st.sensor_stats[0];
  s0.at(0, 0, 2)[0] = 1.0;
  s0.at(0, 0, 2)[1] = 3.0;   // mean 3
  s0.at(0, 0, 2)[2] = 4.0;   // raw covariance 4 - 9 = -5
  const MStepResult m = m_step(st, TransitionMatrix(Mat::identity(2)),
                               subset_params(lib, b), b, false, false);
  CHECK(m.params.cov_blocks[0][0](0, 0) >= 1e-6 - 1e-12);
}

TEST_CASE("writeback is local to the active sensors and round-trips") {
  RandomStream rng(17);
  const std::vector<int> dims = {2, 1, 2};
  SensorLibrary lib = SensorLibrary::random(3, 3, dims, 1.0, rng);
  const SensorLibrary before = lib;

  // Writing back the unmodified extraction changes nothing.
  ActivationVector b(3);
  b.set(0, true);
  b.set(2, true);
  writeback(lib, b, subset_params(lib, b));
  CHECK(lib == before);

  // Empty activation: identity.
  writeback(lib, ActivationVector(3), subset_params(lib, ActivationVector(3)));
  CHECK(lib == before);

  // Only the single active sensor changes.
  ActivationVector only1(3);
  only1.set(1, true);
  SubsetParams sp = subset_params(lib, only1);
  sp.means[0][0] = 42.0;
  sp.mean_matrix(0, 0) = 42.0;
  writeback(lib, only1, sp);
  CHECK(lib.sensor(1).means[0][0] == 42.0);
  CHECK(lib.sensor(0) == before.sensor(0));
  CHECK(lib.sensor(2) == before.sensor(2));

  // Shape mismatch is rejected.
  CHECK_THROWS_AS(writeback(lib, b, sp), DimensionError);
}

TEST_CASE("known-parameter mode never touches the library") {
  RandomStream rng(19);
  const std::vector<int> dims = {1, 1, 2};
  SensorLibrary lib = SensorLibrary::random(3, 3, dims, 2.0, rng);
  const SensorLibrary frozen = lib;
  const TransitionMatrix truth = TransitionMatrix::random(3, rng);
  RandomStream init_rng(20);
  OnlineEM em(Belief::uniform(3), TransitionMatrix::random(3, init_rng),
              OnlineEM::Options{true, true, true},
              StepSchedule(0.8, StepSchedule::Kind::slow));
  StateIndex x = 0;
  RandomStream noise(21);
  for (std::int64_t t = 0; t < 200; ++t) {
    if (t > 0) x = step_chain(truth, x, rng);
    ActivationVector b(3);
    for (int k = 0; k < 3; ++k) b.set(k, noise.uniform01() < 0.6);
    const Observation y = observe(lib, b, x, noise);
    em.step(t, y, b, subset_params(lib, b), lib);
    REQUIRE(lib == frozen);
    REQUIRE(em.filter().on_simplex(1e-9));
    for (int i = 0; i < 3; ++i) {
      double sum = 0.0;
      for (int j = 0; j < 3; ++j) {
        REQUIRE(em.tpm()(i, j) >= 0.0);
        sum += em.tpm()(i, j);
      }
      REQUIRE(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("small-instance consistency against the generator truth") {
  // Two always-active scalar sensors with well separated means, known
  // covariances: the chain estimate approaches the truth and the mean
  // estimates land near the generator values. Reduced-horizon version of
  // the full acceptance check.
  Mat rows(2, 2);
  rows(0, 0) = 0.8;
  rows(0, 1) = 0.2;
  rows(1, 0) = 0.3;
  rows(1, 1) = 0.7;
  const TransitionMatrix truth(rows);
  SensorLibrary truth_lib = scalar_pair(4.0, 1.0);

  // Estimates start near the truth basin: means perturbed, chain random.
  SensorLibrary est_lib = truth_lib;
  RandomStream perturb(23);
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      est_lib.sensor(k).means[i][0] += 1.5 * (perturb.uniform01() - 0.5);

  RandomStream init_rng(24);
  OnlineEM em(Belief::uniform(2), TransitionMatrix::random(2, init_rng),
              OnlineEM::Options{false, true, true},
              StepSchedule(0.8, StepSchedule::Kind::slow));
  const ActivationVector b = ActivationVector::ones(2);
  RandomStream chain_rng(25), noise(26);
  StateIndex x = 0;
  for (std::int64_t t = 0; t < 20000; ++t) {
    if (t > 0) x = step_chain(truth, x, chain_rng);
    const Observation y = observe(truth_lib, b, x, noise);
    em.step(t, y, b, subset_params(est_lib, b), est_lib);
  }
  CHECK(frobenius_distance(em.tpm().rows(), truth.rows()) < 0.2);
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      CHECK(std::abs(est_lib.sensor(k).means[i][0] -
                     truth_lib.sensor(k).means[i][0]) < 0.3);
}
