// Common numeric types and the error type shared by every module.
#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace schottky {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

enum class ErrorCode {
  NotSymmetric,
  NotPositiveDefinite,
  DimensionMismatch,
  PlanMismatch,
  OrderExceeded,
  AllZero,
  TooFewSamples,
  RankDeficient,
  DivergedInduction,
  NoConvergence,
  NonFiniteResidual,
  InsufficientRoots,
  PreconditionViolated,
  InvalidInput,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::PlanMismatch: return "PlanMismatch";
    case ErrorCode::OrderExceeded: return "OrderExceeded";
    case ErrorCode::AllZero: return "AllZero";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DivergedInduction: return "DivergedInduction";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NonFiniteResidual: return "NonFiniteResidual";
    case ErrorCode::InsufficientRoots: return "InsufficientRoots";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// |value| / scale with a floor on the denominator, so that exactly vanishing
/// identities report 0 instead of NaN.
inline double relative(double magnitude, double scale) {
  constexpr double kTiny = 1e-300;
  return magnitude / std::max(scale, kTiny);
}

}  // namespace schottky
