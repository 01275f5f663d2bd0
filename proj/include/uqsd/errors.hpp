#pragma once

#include <stdexcept>
#include <string>

namespace uqsd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input matrix is not square, contains NaN/Inf, or is otherwise malformed.
class InvalidMatrix : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  using Error::Error;
};

class NotPositiveSemidefinite : public Error {
 public:
  using Error::Error;
};

class TraceDefect : public Error {
 public:
  using Error::Error;
};

/// The eigensolver did not converge. The message carries a fingerprint of
/// the offending matrix (dimension, Frobenius norm, trace).
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class InvalidProblem : public Error {
 public:
  using Error::Error;
};

/// A closed-form solver was called on states without the required geometry.
class StructureMismatch : public Error {
 public:
  using Error::Error;
};

/// Priors lie outside the interval where a closed-form optimum is valid.
class PriorsOutsideWindow : public Error {
 public:
  using Error::Error;
};

class InfeasibleProjection : public Error {
 public:
  using Error::Error;
};

class InvalidPovm : public Error {
 public:
  using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A problem or vector file is malformed. The message names the offending
/// field (for example `rho1[2][3]`) or the parser's line and column.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace uqsd
