//
// Project epifilter - Copyright 2026 the epifilter authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef EPIFILTER_ERRORS_HPP
#define EPIFILTER_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace epi {

/// Base class of everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A type invariant or operation precondition does not hold.
struct ValidationError : Error {
  using Error::Error;
};

/// Problems with run configuration (missing keys, bad field values).
struct ConfigError : Error {
  using Error::Error;
};

/// Malformed, missing, or insufficient input data.
struct DataError : Error {
  using Error::Error;
};
struct ParseError : DataError {
  using DataError::DataError;
};
struct InsufficientDataError : DataError {
  using DataError::DataError;
};

/// Numerical failures of the model, filter, or optimizer.
struct NumericalError : Error {
  using Error::Error;
};

/// Two distinct regions share a centroid, so gravity weights are undefined.
struct DegenerateDistanceError : NumericalError {
  using NumericalError::NumericalError;
};

/// Per-region exposure probabilities sum past one; the discrete-time model
/// is invalid in this parameter regime.
struct InfectionPressureError : NumericalError {
  using NumericalError::NumericalError;
};

/// Reported positivity lies outside (alpha, beta); the testing-rate
/// inversion has no solution.
struct InversionInfeasibleError : NumericalError {
  using NumericalError::NumericalError;
};

/// A denominator of the testing-rate inversion vanished.
struct DegenerateStateError : NumericalError {
  using NumericalError::NumericalError;
};

/// The testing-rate inversion produced a value outside [0, 1].
struct InconsistentInputsError : NumericalError {
  using NumericalError::NumericalError;
};

/// Covariance not factorizable even after the jitter schedule.
struct NonPsdCovarianceError : NumericalError {
  using NumericalError::NumericalError;
};

/// Innovation covariance is singular; the filter update cannot proceed.
struct SingularInnovationError : NumericalError {
  using NumericalError::NumericalError;
};

/// The initial observation is inconsistent with the region population.
struct InitializationError : NumericalError {
  using NumericalError::NumericalError;
};

/// Every point sampled at optimizer start-up was infeasible.
struct AllInfeasibleError : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace epi

#endif  // EPIFILTER_ERRORS_HPP
