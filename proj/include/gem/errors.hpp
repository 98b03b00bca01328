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

#ifndef GEM_ERRORS_HPP
#define GEM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gem {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A matrix intended to be row-stochastic has a negative entry or a row
/// whose sum is not 1 within tolerance.
struct NonStochasticError : Error {
  using Error::Error;
};

/// A transition matrix with zero states was requested.
struct EmptyMatrixError : Error {
  using Error::Error;
};

/// An iterative fixed-point computation did not converge within its cap,
/// or converged to conflicting fixed points.
struct NoConvergenceError : Error {
  using Error::Error;
};

/// A Cholesky factorization failed even after jitter retries.
struct CholeskyError : Error {
  using Error::Error;
};

/// The innovation matrix of the state estimator could not be factored
/// even after regularization.
struct SingularInnovationError : Error {
  using Error::Error;
};

/// A step-size schedule was evaluated at an index below 1.
struct InvalidIndexError : Error {
  using Error::Error;
};

/// Mismatched dimensions between a library and data written into it.
struct DimensionError : Error {
  using Error::Error;
};

/// A configuration file could not be read or decoded.
struct ParseError : Error {
  using Error::Error;
};

/// A configuration decoded fine but violates a constraint.
struct ValidationError : Error {
  using Error::Error;
};

/// A file output could not be written.
struct IoError : Error {
  using Error::Error;
};

}  // namespace gem

#endif  // GEM_ERRORS_HPP
