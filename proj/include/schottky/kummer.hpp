// Second-order theta functions Theta[s](z) = theta[s/2; 0](2z | 2 tau), the
// Kummer map they define, and collinearity residuals.
#pragma once

#include <vector>

#include "siegel.hpp"
#include "solver.hpp"
#include "theta.hpp"

namespace schottky {

/// 2^g second-order thetas with a shared exponent: value_s = mantissa_s * exp(exponent).
struct SecondOrderValues {
  Complex exponent{0.0, 0.0};
  CVector mantissa;
  CVector values() const { return mantissa * std::exp(exponent); }
};

/// Evaluator for the second-order thetas of one Riemann matrix; owns the plan
/// for 2 tau. Index s in [0, 2^g) encodes the characteristic bit s_j = (s >> j) & 1.
class KummerMap {
 public:
  explicit KummerMap(const RiemannMatrix& tau, double target_abs_error = 1e-14)
      : tau_(tau), plan2_(tau.scaled(2.0), target_abs_error, 1) {
    const int g = tau.genus();
    for (int s = 0; s < (1 << g); ++s) {
      RVector a(g);
      for (int j = 0; j < g; ++j) a[j] = 0.5 * ((s >> j) & 1);
      chars_.push_back(a);
    }
  }

  const RiemannMatrix& tau() const { return tau_; }
  const EvalPlan& plan() const { return plan2_; }
  int genus() const { return tau_.genus(); }
  int dimension() const { return 1 << tau_.genus(); }

  /// Unnormalized second-order thetas at z.
  SecondOrderValues evaluate(const CVector& z) const {
    std::vector<ThetaBatch> batches;
    const std::vector<Direction> none;
    for (const auto& a : chars_) batches.push_back(theta_batch(plan2_, 2.0 * z, std::span(&none, 1), &a));
    return combine(batches, 0);
  }

  /// Values and first derivatives: column 0 holds Theta[s](u), column j the
  /// derivative along e_j, all sharing one exponent.
  struct Jet {
    Complex exponent{0.0, 0.0};
    CMatrix mantissa;  // 2^g x (g+1)
  };

  Jet jet(const CVector& u) const {
    const int g = genus();
    std::vector<ThetaBatch> batches;
    for (const auto& a : chars_) batches.push_back(theta_gradient(plan2_, 2.0 * u, &a));
    double ref = -std::numeric_limits<double>::infinity();
    for (const auto& b : batches) ref = std::max(ref, b.exponent.real());
    Jet out;
    out.exponent = Complex(ref, 0.0);
    out.mantissa.resize(dimension(), g + 1);
    for (int s = 0; s < dimension(); ++s) {
      const Complex f = std::exp(batches[s].exponent - ref);
      out.mantissa(s, 0) = batches[s].mantissa[0] * f;
      for (int j = 0; j < g; ++j) out.mantissa(s, j + 1) = 2.0 * batches[s].mantissa[j + 1] * f;
    }
    return out;
  }

 private:
  SecondOrderValues combine(const std::vector<ThetaBatch>& batches, std::size_t k) const {
    double ref = -std::numeric_limits<double>::infinity();
    for (const auto& b : batches) ref = std::max(ref, b.exponent.real());
    SecondOrderValues out;
    out.exponent = Complex(ref, 0.0);
    out.mantissa.resize(dimension());
    for (int s = 0; s < dimension(); ++s)
      out.mantissa[s] = batches[s].mantissa[k] * std::exp(batches[s].exponent - ref);
    return out;
  }

  RiemannMatrix tau_;
  EvalPlan plan2_;
  std::vector<RVector> chars_;
};

using KummerVector = CVector;

/// Unit norm, first coordinate above 1e-13 of the largest made real positive.
inline KummerVector normalize_projective(const CVector& v) {
  const double max = v.cwiseAbs().maxCoeff();
  if (!(max > 0.0) || !std::isfinite(max)) throw Error(ErrorCode::AllZero, "all Kummer coordinates vanish");
  CVector out = v / max;
  out /= out.norm();
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (std::abs(out[i]) > 1e-13) {
      out *= std::conj(out[i]) / std::abs(out[i]);
      out[i] = std::abs(out[i]);
      break;
    }
  }
  return out;
}

inline KummerVector kummer_map(const CVector& z, const KummerMap& km) {
  const SecondOrderValues v = km.evaluate(canonical_z(z, km.tau()));
  if (v.mantissa.cwiseAbs().maxCoeff() < 1e-13)
    throw Error(ErrorCode::AllZero, "second-order thetas numerically vanish");
  return normalize_projective(v.mantissa);
}

inline KummerVector kummer_map(const CVector& z, const RiemannMatrix& tau) {
  return kummer_map(z, KummerMap(tau));
}

/// Sine of the projective angle between two Kummer vectors.
inline double projective_sine(const CVector& p, const CVector& q) {
  const double c = std::abs(p.dot(q)) / (p.norm() * q.norm());
  return std::sqrt(std::max(0.0, 1.0 - c * c));
}

/// sigma_3 / sigma_1 of the 3 x 2^g matrix of normalized Kummer vectors.
inline double collinearity_residual(const CVector& a, const CVector& b, const CVector& c, const KummerMap& km) {
  CMatrix m(3, km.dimension());
  m.row(0) = kummer_map(a, km).transpose();
  m.row(1) = kummer_map(b, km).transpose();
  m.row(2) = kummer_map(c, km).transpose();
  const RVector s = Eigen::JacobiSVD<CMatrix>(m).singularValues();
  if (s.size() < 3) return 0.0;
  return s[2] / s[0];
}

/// exp(-2 pi y^T Im(tau) y) for z = x + tau y: a row weight that removes the
/// Gaussian growth of products of two thetas at z - s and z + s.
inline double product_row_log_weight(const CVector& z, const RiemannMatrix& tau) {
  return -2.0 * log_envelope(z, tau);
}

/// theta(z - s) theta(z + s) times the row weight.
inline Complex weighted_product(const EvalPlan& plan, const CVector& z, const CVector& s) {
  const std::vector<Direction> none;
  const ThetaBatch m = theta_batch(plan, z - s, std::span(&none, 1));
  const ThetaBatch p = theta_batch(plan, z + s, std::span(&none, 1));
  return m.mantissa[0] * p.mantissa[0] *
         std::exp(m.exponent + p.exponent + product_row_log_weight(z, plan.tau()));
}

struct SectionFit {
  Complex alpha, beta, gamma;
  double residual = 0.0;
  RVector singular_values;
};

/// Null vector of the N x 3 matrix of weighted products theta(z -+ a) etc.
inline SectionFit section_collinearity_fit(const CVector& a, const CVector& b, const CVector& c,
                                           const EvalPlan& plan, const std::vector<CVector>& samples) {
  const int g = plan.genus();
  if (samples.size() < 3u * (1u << g))
    throw Error(ErrorCode::TooFewSamples, "need at least 3*2^g samples, got " + std::to_string(samples.size()));
  CMatrix m(samples.size(), 3);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    m(i, 0) = weighted_product(plan, samples[i], a);
    m(i, 1) = weighted_product(plan, samples[i], b);
    m(i, 2) = weighted_product(plan, samples[i], c);
  }
  const auto h = homogeneous_lsq(m);
  return {h.x[0], h.x[1], h.x[2], h.ratio, h.singular_values};
}

/// |theta(z+a) theta(z-a) - sum_s Theta[s](a) Theta[s](z)| / (1 + |lhs|).
inline double addition_formula_residual(const CVector& z, const CVector& a, const EvalPlan& plan,
                                        const KummerMap& km) {
  const std::vector<Direction> none;
  const ThetaBatch p = theta_batch(plan, z + a, std::span(&none, 1));
  const ThetaBatch m = theta_batch(plan, z - a, std::span(&none, 1));
  const Complex lhs = p.value() * m.value();
  const SecondOrderValues ka = km.evaluate(a), kz = km.evaluate(z);
  const Complex rhs = (ka.mantissa.transpose() * kz.mantissa)(0, 0) * std::exp(ka.exponent + kz.exponent);
  return std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
}

}  // namespace schottky
