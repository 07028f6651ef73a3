// Degenerate trisecants and their formal continuation.
//
// For shifts u, v and a formal direction series D(e) = sum D_n e^n with
// alpha(e) = 1 + sum alpha_n e^n, the function
//   R(z, e) = alpha(e) theta(z-u) theta(z+u+D(e)) - theta(z+u) theta(z-u+D(e))
//             + e theta(z-v) theta(z+v+D(e))
// has e-coefficients P_n(z), P_0 = 0. P_1 = 0 is the tangency condition; each
// higher P_n is linear in (alpha_n, D_n) with the same design matrix as P_1.
#pragma once

#include <limits>
#include <optional>
#include <random>
#include <vector>

#include <json.hpp>

#include "kummer.hpp"
#include "sampling.hpp"
#include "solver.hpp"
#include "theta.hpp"

namespace schottky {

struct DegenerateConfig {
  CVector u;
  CVector v;
  Complex alpha1{0.0, 0.0};
  Direction D1;
};

/// alphas[k-1] = alpha_k and dirs[k-1] = D_k for k = 1..order. alpha_0 = 1,
/// beta = -1 and gamma = e are implied.
struct FormalCurveData {
  std::vector<Complex> alphas;
  std::vector<Direction> dirs;

  int order() const { return static_cast<int>(dirs.size()); }
  Complex alpha(int k) const {
    if (k == 0) return 1.0;
    return k <= order() ? alphas[k - 1] : Complex{0.0, 0.0};
  }

  static FormalCurveData from(const DegenerateConfig& cfg) { return {{cfg.alpha1}, {cfg.D1}}; }

  /// Reparametrization e -> lambda e: D_n -> lambda^n D_n, alpha_n -> lambda^n alpha_n.
  FormalCurveData rescaled(Complex lambda) const {
    FormalCurveData out = *this;
    Complex f = 1.0;
    for (int k = 0; k < order(); ++k) {
      f *= lambda;
      out.alphas[k] *= f;
      out.dirs[k] *= f;
    }
    return out;
  }
};

struct TrisecantTriple {
  CVector a, b, c;
  Eigen::Vector3cd coeffs;  // (alpha, beta, gamma), unit norm
  double residual = 0.0;
};

namespace detail {

inline std::vector<std::vector<int>> compositions(int n) {
  if (n == 0) return {{}};
  std::vector<std::vector<int>> out;
  for (int first = 1; first <= n; ++first)
    for (auto rest : compositions(n - first)) {
      rest.insert(rest.begin(), first);
      out.push_back(std::move(rest));
    }
  return out;
}

struct SeriesValues {
  Complex exponent{0.0, 0.0};
  std::vector<Complex> t;  // mantissas of T_0..T_n
};

// T_j(p) = e^j coefficient of theta(p + D(e)) for j = 0..n in one lattice pass.
inline SeriesValues series_values(const EvalPlan& plan, const CVector& p, const FormalCurveData& data, int n) {
  if (n > 4) throw Error(ErrorCode::OrderExceeded, "series coefficients are supported up to order 4");
  std::vector<std::vector<Direction>> requests;
  std::vector<std::pair<int, double>> target;  // (j, 1/k!)
  for (int j = 0; j <= n; ++j) {
    for (const auto& comp : compositions(j)) {
      bool available = true;
      for (int part : comp) available = available && part <= data.order();
      if (!available) continue;
      std::vector<Direction> req;
      for (int part : comp) req.push_back(data.dirs[part - 1]);
      double inv_fact = 1.0;
      for (std::size_t k = 2; k <= comp.size(); ++k) inv_fact /= static_cast<double>(k);
      requests.push_back(std::move(req));
      target.emplace_back(j, inv_fact);
    }
  }
  const ThetaBatch batch = theta_batch(plan, p, requests);
  SeriesValues out{batch.exponent, std::vector<Complex>(n + 1, Complex{0.0, 0.0})};
  for (std::size_t r = 0; r < requests.size(); ++r) out.t[target[r].first] += target[r].second * batch.mantissa[r];
  return out;
}

}  // namespace detail

/// e^n coefficient of theta(z + w + D(e)).
inline Complex series_coefficient(int n, const CVector& z, const CVector& w, const FormalCurveData& data,
                                  const EvalPlan& plan) {
  if (n > data.order() && n > 0) throw Error(ErrorCode::OrderExceeded, "n exceeds the data order");
  const auto s = detail::series_values(plan, z + w, data, n);
  return s.t[n] * std::exp(s.exponent);
}

/// P_0..P_{n_max} at z, each multiplied by exp(log_weight). Data beyond its
/// order counts as zero.
inline std::vector<Complex> pn_values(const CVector& z, const FormalCurveData& data, const CVector& u,
                                      const CVector& v, const EvalPlan& plan, int n_max, double log_weight = 0.0) {
  const auto sp = detail::series_values(plan, z + u, data, n_max);
  const auto sm = detail::series_values(plan, z - u, data, n_max);
  const auto sv = detail::series_values(plan, z + v, data, std::max(n_max - 1, 0));
  const std::vector<Direction> none;
  const ThetaBatch vm = theta_batch(plan, z - v, std::span(&none, 1));
  const Complex fu = std::exp(sp.exponent + sm.exponent + log_weight);
  const Complex fv = std::exp(sv.exponent + vm.exponent + log_weight);
  std::vector<Complex> out(n_max + 1, Complex{0.0, 0.0});
  for (int n = 0; n <= n_max; ++n) {
    Complex acc = -sp.t[0] * sm.t[n];
    for (int k = 0; k <= n; ++k) acc += data.alpha(k) * sm.t[0] * sp.t[n - k];
    out[n] = fu * acc;
    if (n >= 1) out[n] += fv * vm.mantissa[0] * sv.t[n - 1];
  }
  return out;
}

inline Complex Pn_coefficient(int n, const CVector& z, const FormalCurveData& data, const CVector& u,
                              const CVector& v, const EvalPlan& plan) {
  if (n > data.order() && n > 0) throw Error(ErrorCode::OrderExceeded, "n exceeds the data order");
  return pn_values(z, data, u, v, plan, n)[n];
}

/// alpha1 theta(z-u) theta(z+u) + theta(z-u) D1 theta(z+u) - theta(z+u) D1 theta(z-u) + theta(z-v) theta(z+v).
inline Complex P1_eval(const CVector& z, const DegenerateConfig& cfg, const EvalPlan& plan) {
  return pn_values(z, FormalCurveData::from(cfg), cfg.u, cfg.v, plan, 1)[1];
}

/// theta(z-a-b-c) theta(z+x).
inline Complex Px_eval(const CVector& z, const CVector& x, const CVector& a, const CVector& b, const CVector& c,
                       const EvalPlan& plan) {
  const std::vector<Direction> none;
  const ThetaBatch p = theta_batch(plan, z - a - b - c, std::span(&none, 1));
  const ThetaBatch q = theta_batch(plan, z + x, std::span(&none, 1));
  return p.mantissa[0] * q.mantissa[0] * std::exp(p.exponent + q.exponent);
}

// ---------------------------------------------------------------------------
// Linear fits on sample sets. Rows are weighted by exp(-2 pi y^T Im(tau) y).

namespace detail {

// Row of the design matrix shared by every order:
// [theta(z-u) theta(z+u), theta(z-u) d_j theta(z+u) - theta(z+u) d_j theta(z-u)].
inline Eigen::RowVectorXcd design_row(const EvalPlan& plan, const CVector& z, const CVector& u, double log_weight) {
  const int g = plan.genus();
  Eigen::RowVectorXcd row(g + 1);
  const ThetaBatch p = theta_gradient(plan, z + u);
  const ThetaBatch m = theta_gradient(plan, z - u);
  const Complex f = std::exp(p.exponent + m.exponent + log_weight);
  row(0, 0) = f * m.mantissa[0] * p.mantissa[0];
  for (int j = 0; j < g; ++j)
    row(0, j + 1) = f * (m.mantissa[0] * p.mantissa[j + 1] - p.mantissa[0] * m.mantissa[j + 1]);
  return row;
}

inline CMatrix design_matrix(const EvalPlan& plan, const std::vector<CVector>& samples, const CVector& u) {
  CMatrix a(samples.size(), plan.genus() + 1);
  for (std::size_t i = 0; i < samples.size(); ++i)
    a.row(i) = design_row(plan, samples[i], u, product_row_log_weight(samples[i], plan.tau()));
  return a;
}

inline CVector known_column(const EvalPlan& plan, const std::vector<CVector>& samples, const FormalCurveData& data,
                            const CVector& u, const CVector& v, int n) {
  CVector b(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    b[i] = pn_values(samples[i], data, u, v, plan, n, product_row_log_weight(samples[i], plan.tau()))[n];
  return b;
}

inline constexpr double kRankTolerance = 1e-10;

inline void check_rank(const RVector& s) {
  if (s[s.size() - 1] <= kRankTolerance * s[0])
    throw Error(ErrorCode::RankDeficient, "design matrix condition " + std::to_string(s[s.size() - 1] / s[0]) +
                                              " below tolerance; enlarge the sample set");
}

}  // namespace detail

struct DegenerateFit {
  DegenerateConfig cfg;
  double residual = 0.0;
  RVector singular_values;
  bool degenerate = false;  // D1 numerically zero
};

inline std::size_t default_fit_samples(int g) { return 16u * static_cast<std::size_t>(g + 1); }

/// Least squares over (alpha1, D1) of the sampled P_1.
inline DegenerateFit degenerate_linear_fit(const CVector& u, const CVector& v, const EvalPlan& plan,
                                           const std::vector<CVector>& samples) {
  const int g = plan.genus();
  if (samples.size() < 4u * (g + 1))
    throw Error(ErrorCode::TooFewSamples, "need at least 4(g+1) samples, got " + std::to_string(samples.size()));
  const CMatrix a = detail::design_matrix(plan, samples, u);
  const CVector b = detail::known_column(plan, samples, {}, u, v, 1);
  const LinearLsqResult lsq = linear_lsq(a, b);
  detail::check_rank(lsq.singular_values);
  DegenerateFit out;
  out.cfg = {u, v, lsq.x[0], lsq.x.tail(g)};
  out.residual = lsq.residual_ratio;
  out.singular_values = lsq.singular_values;
  out.degenerate = out.cfg.D1.norm() <= 1e-6;
  return out;
}

/// |sampled P_1| / |sampled theta(z-v) theta(z+v)| for a given configuration.
inline double p1_sample_residual(const DegenerateConfig& cfg, const EvalPlan& plan,
                                 const std::vector<CVector>& samples) {
  const CVector b = detail::known_column(plan, samples, {}, cfg.u, cfg.v, 1);
  const CVector p = detail::known_column(plan, samples, FormalCurveData::from(cfg), cfg.u, cfg.v, 1);
  return relative(p.norm(), b.norm());
}

struct Continuation {
  FormalCurveData data;
  std::vector<double> residuals;  // residuals[n-1] belongs to order n
  bool diverged = false;
};

struct ExtendOptions {
  bool check_precondition = true;
  double precondition_tol = 1e-8;
  double divergence_tol = 1e-4;
};

/// Order-by-order least squares for (alpha_n, D_n), n = 2..n_max. Records
/// divergence instead of throwing.
inline Continuation continue_formal_curve(const DegenerateConfig& cfg, int n_max, const EvalPlan& plan,
                                          const std::vector<CVector>& samples, const ExtendOptions& opts = {}) {
  const int g = plan.genus();
  if (n_max < 1 || n_max > 3) throw Error(ErrorCode::OrderExceeded, "continuation order must be in [1, 3]");
  if (cfg.D1.size() != g || cfg.u.size() != g || cfg.v.size() != g)
    throw Error(ErrorCode::DimensionMismatch, "configuration has wrong dimension");
  Continuation out;
  out.data = FormalCurveData::from(cfg);
  out.residuals.push_back(p1_sample_residual(cfg, plan, samples));
  if (opts.check_precondition && out.residuals[0] > opts.precondition_tol)
    throw Error(ErrorCode::PreconditionViolated,
                "P1 residual " + std::to_string(out.residuals[0]) + " exceeds " + std::to_string(opts.precondition_tol));
  const CMatrix a = detail::design_matrix(plan, samples, cfg.u);
  for (int n = 2; n <= n_max; ++n) {
    const CVector b = detail::known_column(plan, samples, out.data, cfg.u, cfg.v, n);
    const LinearLsqResult lsq = linear_lsq(a, b);
    detail::check_rank(lsq.singular_values);
    out.data.alphas.push_back(lsq.x[0]);
    out.data.dirs.push_back(lsq.x.tail(g));
    out.residuals.push_back(lsq.residual_ratio);
    if (lsq.residual_ratio > opts.divergence_tol) {
      out.diverged = true;
      break;
    }
  }
  return out;
}

inline Continuation extend_to_order(const DegenerateConfig& cfg, int n_max, const EvalPlan& plan,
                                    const std::vector<CVector>& samples, const ExtendOptions& opts = {}) {
  Continuation c = continue_formal_curve(cfg, n_max, plan, samples, opts);
  if (c.diverged)
    throw Error(ErrorCode::DivergedInduction, "order " + std::to_string(c.residuals.size()) + " residual " +
                                                  std::to_string(c.residuals.back()));
  return c;
}

// ---------------------------------------------------------------------------
// Search over (u, v) with the inner fit in Kummer coordinates. Sampled P_1
// equals sum_s c_s Theta[s](z) with c = alpha1 K(u) + d_{D1} K(u) + K(v), so
// with G = QR the sampled residual is |R c| / |R K(v)|.

struct KummerFitter {
  const KummerMap* km;
  CMatrix r;  // 2^g x 2^g

  KummerFitter(const KummerMap& map, const std::vector<CVector>& samples) : km(&map) {
    const int dim = map.dimension();
    CMatrix gm(samples.size(), dim);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const SecondOrderValues s = map.evaluate(samples[i]);
      gm.row(i) = (s.mantissa * std::exp(s.exponent + product_row_log_weight(samples[i], map.tau()))).transpose();
    }
    Eigen::HouseholderQR<CMatrix> qr(gm);
    r = qr.matrixQR().topRows(dim).triangularView<Eigen::Upper>();
  }

  struct Result {
    Complex alpha1;
    Direction D1;
    double residual;
    double separation;  // projective sine between K(u) and K(v)
    CVector weighted;   // R c / |R K(v)|
  };

  Result fit(const CVector& u, const CVector& v) const {
    const int g = km->genus();
    const KummerMap::Jet ju = km->jet(u);
    const SecondOrderValues kv = km->evaluate(v);
    const CMatrix a = r * ju.mantissa;
    const CVector b = r * kv.mantissa;
    Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const CVector x = -svd.solve(b);
    Result out;
    const double bn = std::max(b.norm(), 1e-300);
    out.weighted = (a * x + b) / bn;
    out.residual = out.weighted.norm();
    const Complex scale = std::exp(kv.exponent - ju.exponent);
    out.alpha1 = x[0] * scale;
    out.D1 = x.tail(g) * scale;
    out.separation = projective_sine(ju.mantissa.col(0), kv.mantissa);
    return out;
  }
};

struct SearchOptions {
  std::size_t n_starts = 32;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::size_t n_samples = 0;  // 0: default_fit_samples(g)
  int max_iter = 100;
  double min_direction = 1e-6;
  double min_separation = 1e-6;
  double stall_threshold = 1e-2;
};

struct SearchStart {
  double objective = 0.0;
  double residual = std::numeric_limits<double>::infinity();
  double tangency = std::numeric_limits<double>::infinity();
  bool accepted = false;
  std::string rejection;
};

struct SearchResult {
  DegenerateFit best;
  double kummer_residual = 0.0;
  double separation = 0.0;
  /// kummer_residual / separation^2; starts are ranked by this.
  double tangency = std::numeric_limits<double>::infinity();
  std::size_t best_start = 0;
  std::vector<SearchStart> starts;
  bool converged = false;
};

namespace detail {
inline CVector point_from_coords(const RVector& p, Eigen::Index offset, const RiemannMatrix& tau) {
  const int g = tau.genus();
  return p.segment(offset, g).cast<Complex>() + tau.tau() * p.segment(offset + g, g).cast<Complex>();
}
}  // namespace detail

/// Multi-start minimization of the tangency residual over (u, v). The
/// objective divides by the squared separation of K(u) and K(v), which keeps
/// starts away from the trivial solutions v = +-u.
inline SearchResult run_degenerate_search(const RiemannMatrix& tau, const EvalPlan& plan, const KummerMap& km,
                                          const SearchOptions& opts = {}) {
  const int g = tau.genus();
  if (opts.n_starts < 1) throw Error(ErrorCode::InvalidInput, "n_starts must be >= 1");
  const std::size_t n_samples = opts.n_samples ? opts.n_samples : default_fit_samples(g);
  const auto samples = sample_points(tau, n_samples, opts.seed);
  const KummerFitter fitter(km, samples);
  auto factory = [&] {
    LeastSquaresProblem p;
    p.n_params = 4 * g;
    p.residual = [&](const RVector& x) {
      const auto f = fitter.fit(detail::point_from_coords(x, 0, tau), detail::point_from_coords(x, 2 * g, tau));
      const double s = std::max(f.separation, 1e-8);
      return RVector(pack_complex(f.weighted) / (s * s));
    };
    return p;
  };
  auto sampler = [&](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> half(-0.5, 0.5);
    RVector x(4 * g);
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = half(rng);
    return x;
  };
  LMOptions lm;
  lm.max_iter = opts.max_iter;
  const MultiStartResult ms = multi_start(factory, sampler, opts.n_starts, opts.seed, lm, opts.threads);

  SearchResult out;
  out.starts.resize(opts.n_starts);
  bool any = false;
  for (std::size_t i = 0; i < opts.n_starts; ++i) {
    SearchStart& st = out.starts[i];
    if (!ms.all[i]) {
      st.rejection = "start failed";
      continue;
    }
    st.objective = ms.all[i]->final_norm;
    const CVector u = canonical_z(detail::point_from_coords(ms.all[i]->x, 0, tau), tau);
    const CVector v = canonical_z(detail::point_from_coords(ms.all[i]->x, 2 * g, tau), tau);
    const auto kf = fitter.fit(u, v);
    DegenerateFit fit;
    try {
      fit = degenerate_linear_fit(u, v, plan, samples);
    } catch (const Error& e) {
      st.rejection = e.what();
      continue;
    }
    st.residual = fit.residual;
    st.tangency = kf.residual / std::max(kf.separation * kf.separation, 1e-300);
    if (fit.cfg.D1.norm() <= opts.min_direction) {
      st.rejection = "D1 vanishes";
    } else if (torus_distance(u, CVector::Zero(g), tau) <= 1e-6) {
      st.rejection = "u is a lattice point";
    } else if (kf.separation <= opts.min_separation) {
      st.rejection = "K(u) and K(v) coincide";
    } else {
      st.accepted = true;
    }
    if (st.accepted && (!any || st.tangency < out.tangency)) {
      any = true;
      out.best = fit;
      out.best_start = i;
      out.kummer_residual = kf.residual;
      out.separation = kf.separation;
      out.tangency = st.tangency;
    }
  }
  out.converged = any && out.tangency <= opts.stall_threshold;
  return out;
}

inline SearchResult degenerate_search(const RiemannMatrix& tau, const SearchOptions& opts = {}) {
  const EvalPlan plan(tau);
  const KummerMap km(tau);
  SearchResult r = run_degenerate_search(tau, plan, km, opts);
  if (!r.converged)
    throw Error(ErrorCode::NoConvergence,
                "no start reached tangency residual " + std::to_string(opts.stall_threshold) +
                    (r.best.cfg.u.size() ? "; best " + std::to_string(r.tangency) : ""));
  return r;
}

// ---------------------------------------------------------------------------
// Trisecant triples for g <= 2: given a and b, find c with K(c) on the line
// through K(a) and K(b) and c away from +-a, +-b.

inline TrisecantTriple locate_trisecant_triple(const RiemannMatrix& tau, const EvalPlan& plan, const KummerMap& km,
                                               std::uint64_t seed, std::size_t n_samples = 0) {
  const int g = tau.genus();
  if (g > 2) throw Error(ErrorCode::InvalidInput, "triple location is implemented for g <= 2");
  std::mt19937_64 rng(seed);
  const CVector a = random_point(tau, rng);
  const CVector b = random_point(tau, rng);
  CVector c;
  if (g == 1) {
    c = random_point(tau, rng);
  } else {
    CMatrix span(km.dimension(), 2);
    span.col(0) = kummer_map(a, km);
    span.col(1) = kummer_map(b, km);
    const CMatrix q = Eigen::HouseholderQR<CMatrix>(span).householderQ();
    const CMatrix complement = q.rightCols(km.dimension() - 2);
    LeastSquaresProblem p;
    p.n_params = 2 * g;
    p.residual = [&](const RVector& x) {
      const SecondOrderValues k = km.evaluate(detail::point_from_coords(x, 0, tau));
      return pack_complex(complement.adjoint() * k.mantissa / k.mantissa.norm());
    };
    bool found = false;
    std::uniform_real_distribution<double> half(-0.5, 0.5);
    for (int attempt = 0; attempt < 64 && !found; ++attempt) {
      RVector x0(2 * g);
      for (Eigen::Index i = 0; i < x0.size(); ++i) x0[i] = half(rng);
      const LMResult r = levenberg_marquardt(p, x0);
      if (r.final_norm > 1e-13) continue;
      const CVector cand = canonical_z(detail::point_from_coords(r.x, 0, tau), tau);
      const double sep = std::min({torus_distance(cand, a, tau), torus_distance(cand, -a, tau),
                                   torus_distance(cand, b, tau), torus_distance(cand, -b, tau)});
      if (sep < 1e-3) continue;
      c = cand;
      found = true;
    }
    if (!found) throw Error(ErrorCode::NoConvergence, "no third collinear point found");
  }
  const auto samples = sample_points(tau, n_samples ? n_samples : 6u << g, seed);
  const SectionFit fit = section_collinearity_fit(a, b, c, plan, samples);
  TrisecantTriple t{a, b, c, Eigen::Vector3cd(fit.alpha, fit.beta, fit.gamma), fit.residual};
  return t;
}

// ---------------------------------------------------------------------------
// JSON: complex numbers as [re, im], vectors as arrays of those.

inline nlohmann::json complex_json(Complex c) { return nlohmann::json::array({c.real(), c.imag()}); }

inline nlohmann::json vector_json(const CVector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v[i]));
  return out;
}

inline Complex complex_from_json(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(ErrorCode::InvalidInput, "field '" + field + "' must be a [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline CVector vector_from_json(const nlohmann::json& j, const std::string& field, int g) {
  if (!j.is_array() || static_cast<int>(j.size()) != g)
    throw Error(ErrorCode::InvalidInput, "field '" + field + "' must hold " + std::to_string(g) + " complex entries");
  CVector v(g);
  for (int i = 0; i < g; ++i) v[i] = complex_from_json(j[i], field);
  return v;
}

inline nlohmann::json to_json(const DegenerateConfig& cfg, double residual, const std::vector<double>& orders) {
  return {{"u", vector_json(cfg.u)},           {"v", vector_json(cfg.v)}, {"alpha1", complex_json(cfg.alpha1)},
          {"D1", vector_json(cfg.D1)},         {"residual", residual},    {"orders", orders}};
}

inline DegenerateConfig degenerate_config_from_json(const nlohmann::json& j, int g) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidInput, "configuration must be a JSON object");
  for (const char* f : {"u", "v", "alpha1", "D1"})
    if (!j.contains(f)) throw Error(ErrorCode::InvalidInput, std::string("field '") + f + "' missing");
  return {vector_from_json(j["u"], "u", g), vector_from_json(j["v"], "v", g), complex_from_json(j["alpha1"], "alpha1"),
          vector_from_json(j["D1"], "D1", g)};
}

inline nlohmann::json to_json(const TrisecantTriple& t) {
  return {{"a", vector_json(t.a)}, {"b", vector_json(t.b)},         {"c", vector_json(t.c)},
          {"coeffs", vector_json(t.coeffs)}, {"residual", t.residual}};
}

inline TrisecantTriple triple_from_json(const nlohmann::json& j, int g) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidInput, "triple must be a JSON object");
  for (const char* f : {"a", "b", "c", "coeffs"})
    if (!j.contains(f)) throw Error(ErrorCode::InvalidInput, std::string("field '") + f + "' missing");
  TrisecantTriple t;
  t.a = vector_from_json(j["a"], "a", g);
  t.b = vector_from_json(j["b"], "b", g);
  t.c = vector_from_json(j["c"], "c", g);
  t.coeffs = vector_from_json(j["coeffs"], "coeffs", 3);
  t.residual = j.value("residual", 0.0);
  return t;
}

}  // namespace schottky
