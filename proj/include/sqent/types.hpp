#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sqent {

using cplx = std::complex<double>;
using Index = Eigen::Index;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Numerical floors shared by every module.
inline constexpr double kPsdFloor = 1e-10;
inline constexpr double kHermitianTolerance = 1e-10;
inline constexpr double kRankThreshold = 1e-12;
inline constexpr double kSupportThreshold = 1e-10;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller supplied arguments outside an operation's domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical invariant did not hold (non-PSD input, cross-check mismatch).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// Malformed external input (state file, config).
class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace sqent
