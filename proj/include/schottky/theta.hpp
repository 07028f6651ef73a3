// Riemann theta functions with characteristics and their directional
// derivatives, evaluated by a truncated lattice sum after argument reduction.
//
//   theta[a;b](z|tau) = sum_n exp(i pi (n+a)^T tau (n+a) + 2 pi i (n+a)^T (z+b))
//
// Evaluation writes w = z + tau a + b = x + tau y, splits y = m + c with m
// integral and c in [-1/2, 1/2)^g, and sums the reduced series at c. The
// value is returned as mantissa * exp(exponent), where Re(exponent) is the
// Gaussian envelope pi y0^T Im(tau) y0 and every summed term of the mantissa
// has modulus at most 1.
#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "core.hpp"
#include "siegel.hpp"

namespace schottky {

/// Constant tangent vector on C^g.
using Direction = CVector;

namespace detail {

// Upper bound on sum_{v in L, |v| >= R} (alpha |v| + beta)^N exp(-|v|^2) for
// a shifted lattice L whose points are pairwise at least rho apart. Each point
// owns a disjoint ball of radius rho/2; the sum is dominated by the integral
// of the enlarged integrand over |w| >= R - rho/2.
inline double gaussian_tail_bound(int g, int order, double radius, double rho, double alpha,
                                  double beta) {
  if (radius < rho) return std::numeric_limits<double>::infinity();
  const double s0 = radius - rho;
  // integrand in s = |w| - rho/2
  auto f = [&](double s) {
    return std::pow(s + 0.5 * rho, g - 1) * std::pow(alpha * (s + rho) + beta, order) *
           std::exp(-s * s);
  };
  const double upper = s0 + 12.0 + std::sqrt(static_cast<double>(g + order));
  const int steps = 4000;
  const double h = (upper - s0) / steps;
  double acc = f(s0) + f(upper);
  for (int k = 1; k < steps; ++k) acc += f(s0 + k * h) * ((k % 2) ? 4.0 : 2.0);
  const double integral = acc * h / 3.0;
  return g * std::pow(2.0 / rho, g) * integral;
}

}  // namespace detail

/// Truncation plan for one Riemann matrix: the ellipsoid radius certified for
/// target_abs_error and deriv_order, and the lattice points it covers.
///
/// The error guarantee refers to the mantissa (the value divided by its
/// Gaussian envelope) for unit-norm directions at canonical arguments:
///   |sum over dropped n of prod_k 2 pi (n.d_k) * term| <= target_abs_error.
/// The stored points are every n with |U(n + c)| <= R for some c in the
/// reduction cube [-1/2, 1/2]^g, where U^T U = pi Im(tau)
class EvalPlan {
 public:
  explicit EvalPlan(const RiemannMatrix& tau, double target_abs_error = 1e-14, int deriv_order = 4,
                    bool allow_order5 = false, double radius_override = 0.0)
      : tau_(tau), target_(target_abs_error), order_(deriv_order), allow5_(allow_order5) {
    if (!(target_abs_error > 0.0)) throw Error(ErrorCode::InvalidInput, "target_abs_error must be > 0");
    if (deriv_order < 0) throw Error(ErrorCode::InvalidInput, "deriv_order must be >= 0");
    if (deriv_order > 4 && !allow_order5)
      throw Error(ErrorCode::OrderExceeded, "derivative order above 4 requires the order-5 extension");
    if (deriv_order > 5) throw Error(ErrorCode::OrderExceeded, "derivative order above 5 unsupported");
    g_ = tau.genus();
    upper_ = std::sqrt(kPi) * tau.im_cholesky().transpose();
    Eigen::JacobiSVD<RMatrix> svd(upper_);
    rho_ = svd.singularValues().minCoeff();
    const double inv_norm = 1.0 / rho_;
    radius_ = radius_override > 0.0
                  ? radius_override
                  : choose_radius(2.0 * kPi * inv_norm, kPi * std::sqrt(static_cast<double>(g_)));
    // the reduction cube is widest at a vertex
    double cube = 0.0;
    for (int mask = 0; mask < (1 << g_); ++mask) {
      RVector c(g_);
      for (int j = 0; j < g_; ++j) c[j] = (mask >> j & 1) ? 0.5 : -0.5;
      cube = std::max(cube, (upper_ * c).norm());
    }
    enumerate(radius_ + cube);
  }

  const RiemannMatrix& tau() const { return tau_; }
  int genus() const { return g_; }
  double target_abs_error() const { return target_; }
  int deriv_order() const { return order_; }
  bool allows_order5() const { return allow5_; }
  double radius() const { return radius_; }
  std::size_t size() const { return count_; }
  /// Shortest-vector lower bound used by the tail estimate.
  double rho() const { return rho_; }
  /// Upper triangular U with U^T U = pi Im(tau).
  const RMatrix& upper() const { return upper_; }

  /// Tail bound at radius r for derivative order k.
  double tail_bound(double r, int k) const {
    return detail::gaussian_tail_bound(g_, k, r, rho_, 2.0 * kPi / rho_,
                                       kPi * std::sqrt(static_cast<double>(g_)));
  }

  // Flat storage, g entries per point.
  const std::vector<double>& lattice() const { return n_; }
  const std::vector<double>& lattice_image() const { return un_; }
  const std::vector<double>& quadratic_phase() const { return phase_; }

  RVector point(std::size_t k) const {
    return Eigen::Map<const RVector>(n_.data() + k * g_, g_);
  }

 private:
  // Smallest radius on a 1/64 grid whose tail bound meets the target.
  double choose_radius(double alpha, double beta) const {
    auto ok = [&](double r) { return detail::gaussian_tail_bound(g_, order_, r, rho_, alpha, beta) <= target_; };
    double lo = rho_, hi = rho_ + 1.0;
    while (!ok(hi)) {
      lo = hi;
      hi += 2.0;
    }
    while (hi - lo > 1.0 / 64) {
      const double mid = 0.5 * (lo + hi);
      (ok(mid) ? hi : lo) = mid;
    }
    return hi;
  }

  void enumerate(double bound) {
    std::vector<double> n(g_, 0.0);
    recurse(g_ - 1, bound * bound, n);
    count_ = phase_.size();
  }

  // Fincke-Pohst traversal of |U n|^2 <= budget, last coordinate first.
  void recurse(int i, double budget, std::vector<double>& n) {
    double center = 0.0;
    for (int j = i + 1; j < g_; ++j) center += upper_(i, j) * n[j];
    const double uii = upper_(i, i);
    const double half = std::sqrt(std::max(budget, 0.0)) / uii;
    const double lo = std::ceil(-center / uii - half);
    const double hi = std::floor(-center / uii + half);
    for (double k = lo; k <= hi; k += 1.0) {
      n[i] = k;
      const double t = uii * k + center;
      const double rest = budget - t * t;
      if (rest < 0.0) continue;
      if (i == 0) {
        RVector nv = Eigen::Map<RVector>(n.data(), g_);
        const RVector un = upper_ * nv;
        for (int j = 0; j < g_; ++j) {
          n_.push_back(nv[j]);
          un_.push_back(un[j]);
        }
        phase_.push_back(kPi * nv.dot(tau_.re() * nv));
      } else {
        recurse(i - 1, rest, n);
      }
    }
    n[i] = 0.0;
  }

  RiemannMatrix tau_;
  double target_;
  int order_;
  bool allow5_;
  int g_ = 0;
  RMatrix upper_;
  double rho_ = 0.0;
  double radius_ = 0.0;
  std::size_t count_ = 0;
  std::vector<double> n_, un_, phase_;
};

/// mantissa[k] * exp(exponent) is the k-th requested value.
struct ThetaBatch {
  Complex exponent{0.0, 0.0};
  std::vector<Complex> mantissa;

  Complex value(std::size_t k = 0) const { return mantissa[k] * std::exp(exponent); }
  double log_envelope() const { return exponent.real(); }
};

namespace detail {

struct Reduced {
  RVector c;       // reduced lattice coordinate
  RVector shift;   // a - m: offset added to n in derivative factors
  RVector q;       // x_r + Re(tau) c
  RVector uc;      // U c
  Complex exponent;
};

inline Reduced reduce(const EvalPlan& plan, const CVector& z, const RVector* char_a,
                      const RVector* char_b) {
  const RiemannMatrix& tau = plan.tau();
  const int g = tau.genus();
  CVector w = z;
  Complex char_exp{0.0, 0.0};
  if (char_a) {
    const CVector a = char_a->cast<Complex>();
    const CVector zb = char_b ? CVector(z + char_b->cast<Complex>()) : z;
    char_exp = kI * kPi * a.dot(tau.tau() * a) + 2.0 * kPi * kI * a.dot(zb);
    w += tau.tau() * a;
  }
  if (char_b) w += char_b->cast<Complex>();
  Reduced r;
  const RVector y = tau.im_inverse() * w.imag();
  const RVector x = w.real() - tau.re() * y;
  r.c.resize(g);
  RVector m(g), xr(g);
  for (int j = 0; j < g; ++j) {
    r.c[j] = reduce_coordinate(y[j]);
    m[j] = std::round(y[j] - r.c[j]);
    xr[j] = reduce_coordinate(x[j]);
  }
  r.q = xr + tau.re() * r.c;
  r.uc = plan.upper() * r.c;
  r.shift = -m;
  if (char_a) r.shift += *char_a;
  const CVector mc = m.cast<Complex>();
  const CVector wr = xr.cast<Complex>() + tau.tau() * r.c.cast<Complex>();
  // note: Eigen's dot conjugates its first argument; use transpose products
  const Complex mtm = (mc.transpose() * tau.tau() * mc)(0, 0);
  const Complex mwr = (mc.transpose() * wr)(0, 0);
  r.exponent = char_exp - kI * kPi * mtm - 2.0 * kPi * kI * mwr + kPi * r.c.dot(tau.im() * r.c);
  return r;
}

inline Complex bilinear(const CVector& a, const CVector& b) { return (a.transpose() * b)(0, 0); }

}  // namespace detail

/// Evaluates every requested derivative in one lattice pass. Each request is
/// an ordered list of directions; the empty list requests the value.
inline ThetaBatch theta_batch(const EvalPlan& plan, const CVector& z,
                              std::span<const std::vector<Direction>> requests,
                              const RVector* char_a = nullptr, const RVector* char_b = nullptr) {
  const int g = plan.genus();
  if (z.size() != g) throw Error(ErrorCode::DimensionMismatch, "point has wrong dimension");
  const int max_order = plan.allows_order5() ? 5 : 4;
  std::vector<Direction> dirs;
  std::vector<std::vector<int>> request_dirs;
  for (const auto& req : requests) {
    if (static_cast<int>(req.size()) > plan.deriv_order() || static_cast<int>(req.size()) > max_order)
      throw Error(ErrorCode::OrderExceeded, "requested order " + std::to_string(req.size()) +
                                                " exceeds plan order " +
                                                std::to_string(plan.deriv_order()));
    std::vector<int> idx;
    for (const auto& d : req) {
      if (d.size() != g) throw Error(ErrorCode::DimensionMismatch, "direction has wrong dimension");
      idx.push_back(static_cast<int>(dirs.size()));
      dirs.push_back(d);
    }
    request_dirs.push_back(std::move(idx));
  }
  const detail::Reduced red = detail::reduce(plan, z, char_a, char_b);
  const std::size_t nd = dirs.size();
  std::vector<Complex> dir_offset(nd);
  for (std::size_t k = 0; k < nd; ++k)
    dir_offset[k] = 2.0 * kPi * kI * detail::bilinear(red.shift.cast<Complex>(), dirs[k]);

  const double r2 = plan.radius() * plan.radius();
  const auto& lat = plan.lattice();
  const auto& img = plan.lattice_image();
  const auto& qph = plan.quadratic_phase();
  std::vector<Complex> acc(requests.size(), Complex{0.0, 0.0});
  std::vector<Complex> factor(nd);
  for (std::size_t p = 0; p < plan.size(); ++p) {
    const double* n = lat.data() + p * g;
    const double* un = img.data() + p * g;
    double norm2 = 0.0;
    for (int j = 0; j < g; ++j) {
      const double v = un[j] + red.uc[j];
      norm2 += v * v;
    }
    if (norm2 > r2) continue;
    double phase = qph[p];
    for (int j = 0; j < g; ++j) phase += 2.0 * kPi * n[j] * red.q[j];
    const double mag = std::exp(-norm2);
    const Complex term(mag * std::cos(phase), mag * std::sin(phase));
    for (std::size_t k = 0; k < nd; ++k) {
      Complex dot{0.0, 0.0};
      for (int j = 0; j < g; ++j) dot += n[j] * dirs[k][j];
      factor[k] = 2.0 * kPi * kI * dot + dir_offset[k];
    }
    for (std::size_t r = 0; r < requests.size(); ++r) {
      Complex t = term;
      for (int k : request_dirs[r]) t *= factor[k];
      acc[r] += t;
    }
  }
  return {red.exponent, std::move(acc)};
}

namespace detail {
inline void check_plan(const RiemannMatrix& tau, const EvalPlan& plan) {
  if (!(tau == plan.tau())) throw Error(ErrorCode::PlanMismatch, "plan was built for a different tau");
}
}  // namespace detail

inline Complex theta(const CVector& z, const RiemannMatrix& tau, const EvalPlan& plan) {
  detail::check_plan(tau, plan);
  const std::vector<Direction> none;
  return theta_batch(plan, z, std::span(&none, 1)).value();
}

/// d_1 ... d_k theta(z|tau), k <= 4 (5 with an order-5 plan).
inline Complex theta_deriv(const CVector& z, const RiemannMatrix& tau,
                           const std::vector<Direction>& dirs, const EvalPlan& plan) {
  detail::check_plan(tau, plan);
  return theta_batch(plan, z, std::span(&dirs, 1)).value();
}

inline Complex theta_char(const RVector& a, const RVector& b, const CVector& z,
                          const RiemannMatrix& tau, const EvalPlan& plan) {
  detail::check_plan(tau, plan);
  const std::vector<Direction> none;
  return theta_batch(plan, z, std::span(&none, 1), &a, &b).value();
}

inline Complex theta_char_deriv(const RVector& a, const RVector& b, const CVector& z,
                                const RiemannMatrix& tau, const std::vector<Direction>& dirs,
                                const EvalPlan& plan) {
  detail::check_plan(tau, plan);
  return theta_batch(plan, z, std::span(&dirs, 1), &a, &b).value();
}

/// Value and gradient in one pass: [theta, d_1 theta, ..., d_g theta].
inline ThetaBatch theta_gradient(const EvalPlan& plan, const CVector& z,
                                 const RVector* char_a = nullptr, const RVector* char_b = nullptr) {
  const int g = plan.genus();
  std::vector<std::vector<Direction>> req(g + 1);
  for (int j = 0; j < g; ++j) req[j + 1] = {CVector::Unit(g, j)};
  return theta_batch(plan, z, req, char_a, char_b);
}

/// Gaussian envelope log-magnitude pi y^T Im(tau) y with y = Im(tau)^{-1} Im z.
inline double log_envelope(const CVector& z, const RiemannMatrix& tau) {
  const RVector y = tau.im_inverse() * z.imag();
  return kPi * y.dot(tau.im() * y);
}

/// All partial-derivative tensors of theta at z up to `order`, as mantissas
/// sharing one exponent. tensors[k] has g^k entries, index i_1 + g i_2 + ...
struct ThetaJet {
  int genus = 0;
  Complex exponent{0.0, 0.0};
  std::vector<std::vector<Complex>> tensors;

  /// Full contraction of the order-k tensor with the given directions.
  Complex contract(std::span<const Direction> dirs) const {
    const std::size_t k = dirs.size();
    std::vector<Complex> cur = tensors.at(k);
    std::size_t len = cur.size();
    for (std::size_t level = k; level > 0; --level) {
      const Direction& d = dirs[level - 1];
      const std::size_t next = len / genus;
      std::vector<Complex> out(next, Complex{0.0, 0.0});
      // the last index is the slowest-varying one
      for (std::size_t i = 0; i < next; ++i)
        for (int j = 0; j < genus; ++j) out[i] += cur[i + next * j] * d[j];
      cur.swap(out);
      len = next;
    }
    return cur[0];
  }
};

inline ThetaJet theta_jet(const EvalPlan& plan, const CVector& z, int order) {
  const int g = plan.genus();
  if (order > plan.deriv_order() || order > 4)
    throw Error(ErrorCode::OrderExceeded, "jet order exceeds plan order");
  const detail::Reduced red = detail::reduce(plan, z, nullptr, nullptr);
  ThetaJet jet;
  jet.genus = g;
  jet.exponent = red.exponent;
  jet.tensors.resize(order + 1);
  std::size_t len = 1;
  for (int k = 0; k <= order; ++k) {
    jet.tensors[k].assign(len, Complex{0.0, 0.0});
    len *= g;
  }
  const double r2 = plan.radius() * plan.radius();
  const auto& lat = plan.lattice();
  const auto& img = plan.lattice_image();
  const auto& qph = plan.quadratic_phase();
  std::vector<double> pim(g);
  std::vector<Complex> level, next;
  for (std::size_t p = 0; p < plan.size(); ++p) {
    const double* n = lat.data() + p * g;
    const double* un = img.data() + p * g;
    double norm2 = 0.0;
    for (int j = 0; j < g; ++j) {
      const double v = un[j] + red.uc[j];
      norm2 += v * v;
    }
    if (norm2 > r2) continue;
    double phase = qph[p];
    for (int j = 0; j < g; ++j) {
      phase += 2.0 * kPi * n[j] * red.q[j];
      pim[j] = 2.0 * kPi * (n[j] + red.shift[j]);  // factor is i * pim
    }
    const double mag = std::exp(-norm2);
    level.assign(1, Complex(mag * std::cos(phase), mag * std::sin(phase)));
    jet.tensors[0][0] += level[0];
    for (int k = 1; k <= order; ++k) {
      next.resize(level.size() * g);
      for (int j = 0; j < g; ++j) {
        const Complex f(0.0, pim[j]);
        for (std::size_t i = 0; i < level.size(); ++i) next[i + level.size() * j] = level[i] * f;
      }
      level.swap(next);
      auto& t = jet.tensors[k];
      for (std::size_t i = 0; i < level.size(); ++i) t[i] += level[i];
    }
  }
  return jet;
}

}  // namespace schottky
