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

#include "gem/chain.hpp"

#include <cmath>
#include <span>
#include <string>

#include "gem/errors.hpp"

namespace gem {

namespace {

constexpr double kRowSumTol = 1e-9;

void check_square_nonempty(const Mat& rows) {
  if (rows.rows() == 0 || rows.cols() == 0)
    throw EmptyMatrixError("transition matrix must have at least one state");
  if (rows.rows() != rows.cols())
    throw NonStochasticError("transition matrix must be square");
}

}  // namespace

TransitionMatrix::TransitionMatrix(Mat rows) : p_(std::move(rows)) {
  check_square_nonempty(p_);
  for (std::size_t i = 0; i < p_.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < p_.cols(); ++j) {
      const double v = p_(i, j);
      if (!(v >= 0.0) || !std::isfinite(v))
        throw NonStochasticError("negative or non-finite entry in row " +
                                 std::to_string(i));
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTol)
      throw NonStochasticError("row " + std::to_string(i) + " sums to " +
                               std::to_string(sum));
  }
}

TransitionMatrix TransitionMatrix::normalized(Mat rows) {
  check_square_nonempty(rows);
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < rows.cols(); ++j) {
      if (!(rows(i, j) >= 0.0) || !std::isfinite(rows(i, j)))
        throw NonStochasticError("negative or non-finite entry in row " +
                                 std::to_string(i));
      sum += rows(i, j);
    }
    if (sum <= 0.0)
      throw NonStochasticError("row " + std::to_string(i) +
                               " has zero sum, cannot normalize");
    for (std::size_t j = 0; j < rows.cols(); ++j) rows(i, j) /= sum;
  }
  return TransitionMatrix(std::move(rows), Unchecked{});
}

TransitionMatrix TransitionMatrix::random(int q, RandomStream& rng) {
  if (q < 1) throw EmptyMatrixError("transition matrix needs q >= 1");
  Mat rows(q, q);
  for (std::size_t i = 0; i < rows.size(); ++i)
    rows.data()[i] = rng.uniform01();
  return normalized(std::move(rows));
}

StateIndex step_chain(const TransitionMatrix& p, StateIndex s,
                      RandomStream& rng) {
  return rng.categorical(std::span<const double>(p.row(s), p.q()));
}

ChainTrajectory simulate_chain(const TransitionMatrix& p, StateIndex s0,
                               int steps, RandomStream& rng) {
  ChainTrajectory traj;
  traj.reserve(steps + 1);
  traj.push_back(s0);
  StateIndex s = s0;
  for (int t = 0; t < steps; ++t) {
    s = step_chain(p, s, rng);
    traj.push_back(s);
  }
  return traj;
}

namespace {

// One power-iteration run; empty result when the residual cap is hit.
std::optional<Vec> power_iterate(const TransitionMatrix& p, Vec pi) {
  constexpr long kCap = 1000000;
  constexpr double kResidual = 1e-12;
  for (long it = 0; it < kCap; ++it) {
    Vec next = vecmat(pi, p.rows());
    double sum = 0.0;
    for (double v : next) sum += v;
    for (double& v : next) v /= sum;
    if (l1_distance(next, pi) < kResidual) return next;
    pi = std::move(next);
  }
  return std::nullopt;
}

}  // namespace

Belief stationary_distribution(const TransitionMatrix& p) {
  const int q = p.q();
  auto from_uniform = power_iterate(p, Vec(q, 1.0 / q));
  Vec e0(q, 0.0);
  e0[0] = 1.0;
  auto from_corner = power_iterate(p, std::move(e0));
  if (!from_uniform || !from_corner)
    throw NoConvergenceError("power iteration did not converge");
  if (l1_distance(*from_uniform, *from_corner) > 1e-8)
    throw NoConvergenceError(
        "stationary distribution is not unique (reducible chain)");
  // Polish: the fixed point satisfies pi P = pi to well below 1e-8.
  return Belief{*from_uniform};
}

bool Belief::on_simplex(double tol) const {
  double sum = 0.0;
  for (double v : p) {
    if (v < -tol || !std::isfinite(v)) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= tol;
}

}  // namespace gem
