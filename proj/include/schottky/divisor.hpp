// Points of theta divisors and their intersections by damped Newton, and
// pointwise checks of identities that hold on those divisors.
#pragma once

#include <algorithm>
#include <array>
#include <initializer_list>
#include <random>
#include <vector>

#include "kummer.hpp"
#include "sampling.hpp"
#include "theta.hpp"
#include "trisecant.hpp"

namespace schottky {

struct DivisorPoint {
  CVector z;                   // canonical representative
  std::vector<double> residuals;  // |theta(z - s_k)| divided by its envelope
  double condition = 0.0;      // smallest singular value of the row-normalized Jacobian
};

struct NewtonOptions {
  std::size_t max_starts = 0;  // 0: 40 * n_points
  int max_iter = 60;
  double residual_tol = 1e-10;
  double step_tol = 1e-12;
  double min_condition = 1e-8;
  double distinct = 1e-6;
};

namespace detail {

struct NewtonSystem {
  const EvalPlan* plan;
  std::vector<CVector> shifts;
  CMatrix slice;      // rows c_k for the affine equations c_k . z = d_k
  CVector slice_rhs;

  // Row-scaled values and Jacobian: theta rows are mantissas, slice rows raw.
  void evaluate(const CVector& z, CVector& f, CMatrix& jac, std::vector<double>* res = nullptr) const {
    const int g = plan->genus();
    f.resize(g);
    jac.resize(g, g);
    for (std::size_t k = 0; k < shifts.size(); ++k) {
      const ThetaBatch b = theta_gradient(*plan, z - shifts[k]);
      f[k] = b.mantissa[0];
      for (int j = 0; j < g; ++j) jac(k, j) = b.mantissa[j + 1];
      if (res) res->push_back(std::abs(b.mantissa[0]));
    }
    for (Eigen::Index r = 0; r < slice.rows(); ++r) {
      const Eigen::Index k = shifts.size() + r;
      f[k] = (slice.row(r) * z)(0, 0) - slice_rhs[r];
      jac.row(k) = slice.row(r);
    }
  }
};

inline double normalized_condition(CMatrix jac) {
  for (Eigen::Index r = 0; r < jac.rows(); ++r) {
    const double n = jac.row(r).norm();
    if (n > 0.0) jac.row(r) /= n;
  }
  const RVector s = Eigen::JacobiSVD<CMatrix>(jac).singularValues();
  return s[s.size() - 1];
}

}  // namespace detail

/// Up to n_points distinct nondegenerate solutions of theta(z - s_k) = 0,
/// completed by seeded random affine slices when there are fewer than g
/// shifts. Returns what the start budget yields.
inline std::vector<DivisorPoint> find_intersection_points(const std::vector<CVector>& shifts, const EvalPlan& plan,
                                                          std::size_t n_points, std::uint64_t seed,
                                                          const NewtonOptions& opts = {}) {
  const int g = plan.genus();
  const RiemannMatrix& tau = plan.tau();
  if (shifts.empty() || static_cast<int>(shifts.size()) > g)
    throw Error(ErrorCode::InvalidInput, "need between 1 and g shifts");
  std::mt19937_64 rng(seed);
  detail::NewtonSystem sys{&plan, shifts, CMatrix(g - shifts.size(), g), CVector(g - shifts.size())};
  for (Eigen::Index r = 0; r < sys.slice.rows(); ++r) {
    sys.slice.row(r) = random_complex_vector(g, rng).transpose();
    sys.slice_rhs[r] = (sys.slice.row(r) * random_point(tau, rng))(0, 0);
  }
  const std::size_t budget = opts.max_starts ? opts.max_starts : 40 * n_points;
  std::vector<DivisorPoint> out;
  CVector f, ft;
  CMatrix jac, jt;
  for (std::size_t start = 0; start < budget && out.size() < n_points; ++start) {
    CVector z = random_point(tau, rng);
    sys.evaluate(z, f, jac);
    bool converged = false;
    for (int it = 0; it < opts.max_iter; ++it) {
      const CVector step = jac.fullPivLu().solve(-f);
      if (!step.allFinite()) break;
      double t = 1.0;
      bool accepted = false;
      for (int h = 0; h <= 30; ++h, t *= 0.5) {
        const CVector trial = z + t * step;
        sys.evaluate(trial, ft, jt);
        if (ft.norm() < f.norm() || ft.norm() == 0.0) {
          z = trial;
          f = ft;
          jac = jt;
          accepted = true;
          break;
        }
      }
      if (t * step.norm() < opts.step_tol) {
        converged = true;
        break;
      }
      if (!accepted) break;
    }
    if (!converged) continue;
    // the slices are not periodic: check them before canonicalizing
    sys.evaluate(z, f, jac);
    if (sys.slice.rows() > 0 && f.tail(sys.slice.rows()).cwiseAbs().maxCoeff() > opts.residual_tol) continue;
    const double condition = detail::normalized_condition(jac);
    DivisorPoint p;
    p.condition = condition;
    p.z = canonical_z(z, tau);
    sys.evaluate(p.z, f, jac, &p.residuals);
    if (*std::max_element(p.residuals.begin(), p.residuals.end()) > opts.residual_tol) continue;
    if (p.condition <= opts.min_condition) continue;
    bool fresh = true;
    for (const auto& q : out) fresh = fresh && torus_distance(q.z, p.z, tau) > opts.distinct;
    if (fresh) out.push_back(std::move(p));
  }
  return out;
}

/// As find_intersection_points, but fewer than n_points is an error.
inline std::vector<DivisorPoint> newton_on_intersection(const std::vector<CVector>& shifts, const EvalPlan& plan,
                                                        std::size_t n_points, std::uint64_t seed,
                                                        const NewtonOptions& opts = {}) {
  auto out = find_intersection_points(shifts, plan, n_points, seed, opts);
  if (out.size() < n_points)
    throw Error(ErrorCode::InsufficientRoots,
                "found " + std::to_string(out.size()) + " of " + std::to_string(n_points) + " points");
  return out;
}

// ---------------------------------------------------------------------------
// Identity checks. Each returns |sum of terms| / scale, where scale is the
// largest term, each term first raised to the Gaussian envelope of its theta
// factors (times |D1| for a derivative factor). On the divisor the floor keeps
// identities whose every term vanishes at 0 instead of 0/0.

namespace detail {
inline Complex value_at(const EvalPlan& plan, const CVector& z) {
  const std::vector<Direction> none;
  return theta_batch(plan, z, std::span(&none, 1)).value();
}

inline Complex deriv_at(const EvalPlan& plan, const CVector& z, const Direction& d) {
  const std::vector<Direction> one{d};
  return theta_batch(plan, z, std::span(&one, 1)).value();
}

struct Term {
  Complex value;
  double floor;
};

inline double envelope(const EvalPlan& plan, std::initializer_list<CVector> points, double factor = 1.0) {
  double e = 0.0;
  for (const auto& p : points) e += log_envelope(p, plan.tau());
  return factor * std::exp(e);
}

inline double identity_ratio(std::initializer_list<Term> terms) {
  Complex sum = 0.0;
  double scale = 0.0;
  for (const auto& t : terms) {
    sum += t.value;
    scale = std::max({scale, std::abs(t.value), t.floor});
  }
  return relative(std::abs(sum), scale);
}
}  // namespace detail

struct Residuals38 {
  double r38 = 0.0;
  double r39 = 0.0;
};

/// On Theta_u: theta(z+u) D1 theta(z-u) - theta(z+v) theta(z-v) and
/// theta(z-3u) D1 theta(z-u) + theta(z-2u+v) theta(z-2u-v).
inline Residuals38 check_38_39(const CVector& z, const DegenerateConfig& cfg, const EvalPlan& plan) {
  using namespace detail;
  const CVector &u = cfg.u, &v = cfg.v;
  const Complex d1m = deriv_at(plan, z - u, cfg.D1);
  const double d = cfg.D1.norm();
  Residuals38 r;
  r.r38 = identity_ratio({{value_at(plan, z + u) * d1m, envelope(plan, {z + u, z - u}, d)},
                          {-value_at(plan, z + v) * value_at(plan, z - v), envelope(plan, {z + v, z - v})}});
  r.r39 = identity_ratio(
      {{value_at(plan, z - 3.0 * u) * d1m, envelope(plan, {z - 3.0 * u, z - u}, d)},
       {value_at(plan, z - 2.0 * u + v) * value_at(plan, z - 2.0 * u - v), envelope(plan, {z - 2.0 * u + v, z - 2.0 * u - v})}});
  return r;
}

/// e^n coefficient of
///   alpha(e) R(z) theta(z-3u) D1 theta(z-u) + R(z-2u) theta(z+u) D1 theta(z-u)
///   + e R(z-u+v) theta(z-v) theta(z-2u-v)
/// with R(z, e) = sum P_k(z) e^k, relative to the largest of the six products
/// it expands into on Theta_u.
inline double check_lemma_310(const CVector& z, const FormalCurveData& data, const CVector& u, const CVector& v,
                              const EvalPlan& plan, int n) {
  using namespace detail;
  if (n < 1 || n > 3) throw Error(ErrorCode::OrderExceeded, "order must be in [1, 3]");
  if (data.order() < 1) throw Error(ErrorCode::InvalidInput, "data needs D1");
  const Direction& d1 = data.dirs[0];
  const Complex d1m = deriv_at(plan, z - u, d1);
  const Complex a = value_at(plan, z - 3.0 * u) * d1m;
  const Complex b = value_at(plan, z + u) * d1m;
  const Complex c = value_at(plan, z - v) * value_at(plan, z - 2.0 * u - v);
  const auto p0 = pn_values(z, data, u, v, plan, n);
  const auto p2 = pn_values(z - 2.0 * u, data, u, v, plan, n);
  const auto p3 = pn_values(z - u + v, data, u, v, plan, n);
  Complex total = b * p2[n] + c * p3[n - 1];
  for (int k = 0; k <= n; ++k) total += data.alpha(k) * a * p0[n - k];

  // the six products, with theta(z-u) = 0 dropped
  auto series = [&](const CVector& p, int order) {
    const auto s = series_values(plan, p, data, order);
    std::vector<Complex> t(order + 1);
    for (int j = 0; j <= order; ++j) t[j] = s.t[j] * std::exp(s.exponent);
    return t;
  };
  const auto tm = series(z - u, n);           // theta(z-u+D)
  const auto tv = series(z + v, n);           // theta(z+v+D)
  const auto tw = series(z - 2.0 * u + v, n);  // theta(z-2u+v+D)
  auto alpha_times = [&](const std::vector<Complex>& t, int m) {
    Complex s = 0.0;
    for (int k = 0; k <= m; ++k) s += data.alpha(k) * t[m - k];
    return s;
  };
  const Complex tzu = value_at(plan, z + u), tz3u = value_at(plan, z - 3.0 * u), tzv = value_at(plan, z - v),
                tzpv = value_at(plan, z + v), t2uv = value_at(plan, z - 2.0 * u - v),
                t2upv = value_at(plan, z - 2.0 * u + v);
  const std::array<Complex, 6> terms{
      -tz3u * d1m * tzu * alpha_times(tm, n),
      tzu * d1m * tz3u * alpha_times(tm, n),
      tz3u * d1m * tzv * alpha_times(tv, n - 1),
      tzv * t2uv * t2upv * alpha_times(tv, n - 1),
      tzu * d1m * t2uv * tw[n - 1],
      -tzv * t2uv * tzpv * tw[n - 1]};
  const double d = d1.norm();
  const std::array<double, 6> floors{envelope(plan, {z - 3.0 * u, z - u, z + u, z - u}, d),
                                     envelope(plan, {z + u, z - u, z - 3.0 * u, z - u}, d),
                                     envelope(plan, {z - 3.0 * u, z - u, z - v, z + v}, d),
                                     envelope(plan, {z - v, z - 2.0 * u - v, z - 2.0 * u + v, z + v}),
                                     envelope(plan, {z + u, z - u, z - 2.0 * u - v, z - 2.0 * u + v}, d),
                                     envelope(plan, {z - v, z - 2.0 * u - v, z + v, z - 2.0 * u + v})};
  double scale = 0.0;
  for (int k = 0; k < 6; ++k) scale = std::max({scale, std::abs(terms[k]), floors[k]});
  return relative(std::abs(total), scale);
}

/// On Theta_a: P^c(z-a+b) theta(z-b) + P^c(z) theta(z-2a+b), P^c = theta(z-a-b-c) theta(z+c).
inline double check_lemma_43(const CVector& z, const TrisecantTriple& t, const EvalPlan& plan) {
  using namespace detail;
  const CVector s = t.a + t.b + t.c;
  const CVector z1 = z - t.a + t.b;
  const Complex first = Px_eval(z1, t.c, t.a, t.b, t.c, plan) * value_at(plan, z - t.b);
  const Complex second = Px_eval(z, t.c, t.a, t.b, t.c, plan) * value_at(plan, z - 2.0 * t.a + t.b);
  return identity_ratio({{first, envelope(plan, {z1 - s, z1 + t.c, z - t.b})},
                         {second, envelope(plan, {z - s, z + t.c, z - 2.0 * t.a + t.b})}});
}

/// |P^c(z)| over the envelope of its two factors; meant for points of Theta_a and Theta_b.
inline double check_pc_vanishing(const CVector& z, const TrisecantTriple& t, const EvalPlan& plan) {
  const Complex pc = Px_eval(z, t.c, t.a, t.b, t.c, plan);
  return relative(std::abs(pc), detail::envelope(plan, {z - t.a - t.b - t.c, z + t.c}));
}

struct Lemma49Result {
  double residual = 0.0;
  DegenerateFit fit;        // u = (a-b)/2, v = u-a-c
  DegenerateFit fit_prime;  // u' = (a-c)/2, v' = u'-a-b
};

/// |beta D1' + gamma D1| / max(|beta D1'|, |gamma D1|).
inline Lemma49Result check_lemma_49_order1(const TrisecantTriple& t, const EvalPlan& plan,
                                           const std::vector<CVector>& samples) {
  const CVector u = 0.5 * (t.a - t.b), v = u - t.a - t.c;
  const CVector up = 0.5 * (t.a - t.c), vp = up - t.a - t.b;
  Lemma49Result r;
  r.fit = degenerate_linear_fit(u, v, plan, samples);
  r.fit_prime = degenerate_linear_fit(up, vp, plan, samples);
  const CVector lhs = t.coeffs[1] * r.fit_prime.cfg.D1;
  const CVector rhs = t.coeffs[2] * r.fit.cfg.D1;
  r.residual = relative((lhs + rhs).norm(), std::max(lhs.norm(), rhs.norm()));
  return r;
}

}  // namespace schottky
