// The K-P bilinear expression
//   D1^4 th.th - 4 D1^3 th.D1 th + 3 (D1^2 th)^2 - 3 (D2 th)^2 + 3 D2^2 th.th
//   + 3 D1 th.D3 th - 3 D1 D3 th.th + d3 th^2
// as a residual functional, a gauge-fixed fit of (D1, D2, D3, d3), and the
// derivative identity D1 P.D1 th - P.D1^2 th on the theta divisor.
#pragma once

#include <optional>
#include <random>
#include <vector>

#include <json.hpp>

#include "sampling.hpp"
#include "solver.hpp"
#include "theta.hpp"
#include "trisecant.hpp"

namespace schottky {

struct KPData {
  Direction D1, D2, D3;
  Complex d3{0.0, 0.0};

  static KPData zero(int g) { return {CVector::Zero(g), CVector::Zero(g), CVector::Zero(g), 0.0}; }

  /// (lambda D1, lambda^2 D2, lambda^3 D3, lambda^4 d3).
  KPData regauged(Complex lambda) const {
    return {lambda * D1, lambda * lambda * D2, lambda * lambda * lambda * D3, std::pow(lambda, 4) * d3};
  }
};

/// Representative with |D1| = 1 and first nonzero entry of D1 real positive.
inline KPData gauge_fixed(const KPData& kp) {
  const double n = kp.D1.norm();
  if (!(n > 0.0)) throw Error(ErrorCode::InvalidInput, "D1 must be nonzero");
  Complex phase = 1.0;
  for (Eigen::Index i = 0; i < kp.D1.size(); ++i)
    if (std::abs(kp.D1[i]) > 1e-12 * n) {
      phase = std::conj(kp.D1[i]) / std::abs(kp.D1[i]);
      break;
    }
  KPData out = kp.regauged(phase / n);
  for (Eigen::Index i = 0; i < out.D1.size(); ++i)
    if (std::abs(out.D1[i]) > 1e-12) {
      out.D1[i] = std::abs(out.D1[i]);
      break;
    }
  return out;
}

namespace detail {
struct KPTerms {
  std::array<Complex, 8> t;  // the eight products, in the order written above
  Complex sum() const {
    Complex s = 0.0;
    for (auto x : t) s += x;
    return s;
  }
};

inline KPTerms kp_terms(Complex th, Complex t1, Complex t11, Complex t111, Complex t1111, Complex t2, Complex t22,
                        Complex t3, Complex t13, Complex d3) {
  return {{t1111 * th, -4.0 * t111 * t1, 3.0 * t11 * t11, -3.0 * t2 * t2, 3.0 * t22 * th, 3.0 * t1 * t3,
           -3.0 * t13 * th, d3 * th * th}};
}
}  // namespace detail

/// Value of the K-P expression at z.
inline Complex kp_residual(const CVector& z, const EvalPlan& plan, const KPData& kp) {
  const std::vector<std::vector<Direction>> req{{},
                                                {kp.D1},
                                                {kp.D1, kp.D1},
                                                {kp.D1, kp.D1, kp.D1},
                                                {kp.D1, kp.D1, kp.D1, kp.D1},
                                                {kp.D2},
                                                {kp.D2, kp.D2},
                                                {kp.D3},
                                                {kp.D1, kp.D3}};
  const ThetaBatch b = theta_batch(plan, z, req);
  const auto& m = b.mantissa;
  return detail::kp_terms(m[0], m[1], m[2], m[3], m[4], m[5], m[6], m[7], m[8], kp.d3).sum() *
         std::exp(2.0 * b.exponent);
}

/// Jets of theta on a sample set; evaluates the normalized K-P residual
///   sqrt(sum |KP(z_i)|^2 / sum |theta(z_i)|^4)
/// with every sample divided by its own envelope, and solves for the
/// linear unknowns (D3, d3) given (D1, D2).
class KPObjective {
 public:
  KPObjective(const EvalPlan& plan, const std::vector<CVector>& samples) : g_(plan.genus()) {
    if (plan.deriv_order() < 4) throw Error(ErrorCode::OrderExceeded, "K-P needs an order-4 plan");
    jets_.reserve(samples.size());
    for (const auto& z : samples) jets_.push_back(theta_jet(plan, z, 4));
    double s = 0.0;
    for (const auto& j : jets_) s += std::norm(j.tensors[0][0] * j.tensors[0][0]);
    scale_ = std::sqrt(s);
  }

  int genus() const { return g_; }
  std::size_t size() const { return jets_.size(); }
  double scale() const { return scale_; }

  struct Eval {
    CVector residual;  // per-sample K-P mantissas / scale
    Direction D3;
    Complex d3;
    double norm() const { return residual.norm(); }
  };

  /// Residuals for fixed (D1, D2, D3, d3).
  CVector residuals(const KPData& kp) const {
    CVector r(jets_.size());
    for (std::size_t i = 0; i < jets_.size(); ++i) {
      const Parts p = parts(jets_[i], kp.D1, kp.D2);
      const Complex t3 = dot(p.grad, kp.D3), t13 = dot(p.grad1, kp.D3);
      r[i] = (p.known + 3.0 * p.t1 * t3 - 3.0 * t13 * p.th + kp.d3 * p.th * p.th) / scale_;
    }
    return r;
  }

  double normalized_residual(const KPData& kp) const { return residuals(kp).norm(); }

  /// Best (D3, d3) for given (D1, D2).
  Eval solve(const Direction& d1, const Direction& d2) const {
    const std::size_t n = jets_.size();
    CMatrix a(n, g_ + 1);
    CVector b(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Parts p = parts(jets_[i], d1, d2);
      for (int j = 0; j < g_; ++j) a(i, j) = 3.0 * (p.t1 * p.grad[j] - p.th * p.grad1[j]);
      a(i, g_) = p.th * p.th;
      b[i] = p.known;
    }
    Eigen::ColPivHouseholderQR<CMatrix> qr(a);
    const CVector x = -qr.solve(b);
    return {(a * x + b) / scale_, x.head(g_), x[g_]};
  }

 private:
  struct Parts {
    Complex th, t1, known;
    CVector grad, grad1;  // d_j theta and d_j D1 theta
  };

  static Complex dot(const CVector& a, const CVector& b) { return (a.transpose() * b)(0, 0); }

  // Contract the last index of a g^k tensor with d.
  std::vector<Complex> lower(const std::vector<Complex>& t, const Direction& d) const {
    const std::size_t next = t.size() / g_;
    std::vector<Complex> out(next, Complex{0.0, 0.0});
    for (int j = 0; j < g_; ++j)
      for (std::size_t i = 0; i < next; ++i) out[i] += t[i + next * j] * d[j];
    return out;
  }

  Parts parts(const ThetaJet& jet, const Direction& d1, const Direction& d2) const {
    Parts p;
    p.th = jet.tensors[0][0];
    const auto t4 = lower(jet.tensors[4], d1);  // order 3 along d1 remains
    const auto t3 = lower(jet.tensors[3], d1);
    const auto t2 = lower(jet.tensors[2], d1);
    p.grad = Eigen::Map<const CVector>(jet.tensors[1].data(), g_);
    p.grad1 = Eigen::Map<const CVector>(t2.data(), g_);
    p.t1 = dot(p.grad, d1);
    const Complex t11 = dot(p.grad1, d1);
    const Complex t111 = dot(Eigen::Map<const CVector>(lower(t3, d1).data(), g_), d1);
    const Complex t1111 = dot(Eigen::Map<const CVector>(lower(lower(t4, d1), d1).data(), g_), d1);
    const Complex t2v = dot(p.grad, d2);
    const auto s2 = lower(jet.tensors[2], d2);
    const Complex t22 = dot(Eigen::Map<const CVector>(s2.data(), g_), d2);
    p.known = t1111 * p.th - 4.0 * t111 * p.t1 + 3.0 * t11 * t11 - 3.0 * t2v * t2v + 3.0 * t22 * p.th;
    return p;
  }

  int g_;
  std::vector<ThetaJet> jets_;
  double scale_ = 1.0;
};

struct KPFitOptions {
  std::size_t n_starts = 16;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::size_t n_samples = 0;  // 0: 16 (3g+1)
  int max_iter = 200;
  double d2_scale = 1.0;
  std::optional<std::vector<bool>> support;  // restrict every direction to these coordinates
};

struct KPFit {
  KPData data;
  double residual = 0.0;
  std::size_t best_start = 0;
  std::vector<double> start_residuals;
};

inline std::size_t default_kp_samples(int g) { return 16u * static_cast<std::size_t>(3 * g + 1); }

/// Multi-start LM over (D1, D2) with |D1| normalized inside the residual map;
/// (D3, d3) are solved linearly at every evaluation.
inline KPFit kp_fit_on(const KPObjective& obj, const KPFitOptions& opts = {}) {
  const int g = obj.genus();
  if (obj.size() < 8u * (3 * g + 1))
    throw Error(ErrorCode::TooFewSamples, "need at least 8(3g+1) samples, got " + std::to_string(obj.size()));
  std::vector<Eigen::Index> free;
  for (int j = 0; j < g; ++j)
    if (!opts.support || (*opts.support)[j]) free.push_back(j);
  const int k = static_cast<int>(free.size());
  if (k == 0) throw Error(ErrorCode::InvalidInput, "empty support");
  auto expand = [&](const RVector& x, Eigen::Index offset) {
    CVector d = CVector::Zero(g);
    for (int i = 0; i < k; ++i) d[free[i]] = Complex(x[offset + 2 * i], x[offset + 2 * i + 1]);
    return d;
  };
  auto normalized = [&](const RVector& x) {
    const CVector d1 = expand(x, 0);
    const double n = std::max(d1.norm(), 1e-300);
    return std::pair<CVector, CVector>(d1 / n, expand(x, 2 * k) / (n * n));
  };
  auto factory = [&] {
    LeastSquaresProblem p;
    p.n_params = 4 * k;
    p.residual = [&](const RVector& x) {
      const auto [d1, d2] = normalized(x);
      return RVector(pack_complex(obj.solve(d1, d2).residual));
    };
    p.project = [&](RVector& x) {
      const double n = std::max(expand(x, 0).norm(), 1e-300);
      x.head(2 * k) /= n;
      x.tail(2 * k) /= n * n;
    };
    return p;
  };
  auto sampler = [&](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    RVector x(4 * k);
    for (int i = 0; i < 2 * k; ++i) x[i] = normal(rng);
    for (int i = 0; i < 2 * k; ++i) x[2 * k + i] = opts.d2_scale * normal(rng);
    return x;
  };
  LMOptions lm;
  lm.max_iter = opts.max_iter;
  const MultiStartResult ms = multi_start(factory, sampler, opts.n_starts, opts.seed, lm, opts.threads);
  KPFit out;
  out.best_start = ms.best_index;
  for (const auto& r : ms.all) out.start_residuals.push_back(r ? r->final_norm : std::nan(""));
  const auto [d1, d2] = normalized(ms.best.x);
  const auto e = obj.solve(d1, d2);
  out.data = gauge_fixed({d1, d2, e.D3, e.d3});
  out.residual = obj.normalized_residual(out.data);
  return out;
}

inline KPFit kp_fit(const RiemannMatrix& tau, const EvalPlan& plan, const KPFitOptions& opts = {}) {
  detail::check_plan(tau, plan);
  const std::size_t n = opts.n_samples ? opts.n_samples : default_kp_samples(tau.genus());
  return kp_fit_on(KPObjective(plan, sample_points(tau, n, opts.seed)), opts);
}

// ---------------------------------------------------------------------------

struct Step1Result {
  double max_residual = 0.0;
  std::vector<double> residuals;
};

/// max over points of |D1 P.D1 th - P.D1^2 th| / scale, P the K-P expression.
/// The order-5 term D1^5 th needs a plan built with the order-5 extension.
inline Step1Result step1_check(const EvalPlan& plan5, const KPData& kp, const std::vector<CVector>& points) {
  if (!plan5.allows_order5() || plan5.deriv_order() < 5)
    throw Error(ErrorCode::OrderExceeded, "step-1 check needs an order-5 plan");
  const Direction &a = kp.D1, &b = kp.D2, &c = kp.D3;
  const std::vector<std::vector<Direction>> req{
      {}, {a}, {a, a}, {a, a, a}, {a, a, a, a}, {a, a, a, a, a}, {b}, {a, b}, {b, b}, {a, b, b}, {c}, {a, c}, {a, a, c}};
  Step1Result out;
  for (const auto& z : points) {
    const ThetaBatch bt = theta_batch(plan5, z, req);
    const auto& m = bt.mantissa;
    const Complex th = m[0], t1 = m[1], t11 = m[2], t111 = m[3], t1111 = m[4], t11111 = m[5], t2 = m[6], t12 = m[7],
                  t22 = m[8], t122 = m[9], t3 = m[10], t13 = m[11], t113 = m[12];
    const auto p = detail::kp_terms(th, t1, t11, t111, t1111, t2, t22, t3, t13, kp.d3);
    const std::array<Complex, 9> dp{t11111 * th,   -3.0 * t1111 * t1, 2.0 * t11 * t111,
                                    -6.0 * t2 * t12, 3.0 * t122 * th,  3.0 * t22 * t1,
                                    3.0 * t11 * t3, -3.0 * t113 * th, 2.0 * kp.d3 * th * t1};
    Complex value = 0.0;
    double scale = 0.0;
    for (auto x : dp) {
      value += x * t1;
      scale = std::max(scale, std::abs(x * t1));
    }
    for (auto x : p.t) {
      value -= x * t11;
      scale = std::max(scale, std::abs(x * t11));
    }
    out.residuals.push_back(relative(std::abs(value), scale));
    out.max_residual = std::max(out.max_residual, out.residuals.back());
  }
  return out;
}

inline nlohmann::json to_json(const KPData& kp, double residual, int g, std::uint64_t seed) {
  return {{"D1", vector_json(kp.D1)},     {"D2", vector_json(kp.D2)}, {"D3", vector_json(kp.D3)},
          {"d3", complex_json(kp.d3)},    {"residual", residual},     {"g", g},
          {"seed", seed}};
}

inline KPData kp_data_from_json(const nlohmann::json& j, int g) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidInput, "K-P data must be a JSON object");
  for (const char* f : {"D1", "D2", "D3", "d3"})
    if (!j.contains(f)) throw Error(ErrorCode::InvalidInput, std::string("field '") + f + "' missing");
  return {vector_from_json(j["D1"], "D1", g), vector_from_json(j["D2"], "D2", g), vector_from_json(j["D3"], "D3", g),
          complex_from_json(j["d3"], "d3")};
}

}  // namespace schottky
