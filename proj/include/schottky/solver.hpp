// Dense least squares: SVD-based linear solves, Levenberg-Marquardt with
// forward-difference Jacobians, and seeded multi-start orchestration.
//
// Complex unknowns are packed into real parameter vectors as interleaved
// (re, im) pairs; see pack_complex / unpack_complex.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "core.hpp"

namespace schottky {

struct LinearLsqResult {
  CVector x;
  double residual_ratio = 0.0;  // |A x + b| / |b|
  RVector singular_values;      // descending
};

/// Minimizes |A x + b| through the SVD of A.
inline LinearLsqResult linear_lsq(const CMatrix& a, const CVector& b) {
  if (a.rows() < a.cols() || a.cols() < 1)
    throw Error(ErrorCode::DimensionMismatch, "linear_lsq needs rows >= cols >= 1");
  if (b.size() != a.rows()) throw Error(ErrorCode::DimensionMismatch, "rhs size mismatch");
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  LinearLsqResult out;
  out.singular_values = svd.singularValues();
  out.x = -svd.solve(b);
  const double bn = b.norm();
  out.residual_ratio = bn > 0.0 ? (a * out.x + b).norm() / bn : 0.0;
  return out;
}

struct HomogeneousLsqResult {
  CVector x;           // unit right singular vector of the smallest singular value
  double ratio = 0.0;  // smallest / largest singular value
  RVector singular_values;
};

/// min |A x| over |x| = 1. The phase of x is fixed so that its first
/// non-negligible entry is real positive.
inline HomogeneousLsqResult homogeneous_lsq(const CMatrix& a) {
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullV);
  HomogeneousLsqResult out;
  out.singular_values = svd.singularValues();
  const Eigen::Index k = a.cols() - 1;
  out.x = svd.matrixV().col(k);
  const double smin = k < out.singular_values.size() ? out.singular_values[k] : 0.0;
  out.ratio = out.singular_values[0] > 0.0 ? smin / out.singular_values[0] : 0.0;
  for (Eigen::Index i = 0; i < out.x.size(); ++i) {
    if (std::abs(out.x[i]) > 1e-12) {
      out.x *= std::conj(out.x[i]) / std::abs(out.x[i]);
      break;
    }
  }
  return out;
}

inline RVector pack_complex(const CVector& v) {
  RVector out(2 * v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out[2 * i] = v[i].real();
    out[2 * i + 1] = v[i].imag();
  }
  return out;
}

inline CVector unpack_complex(const RVector& v, Eigen::Index offset, Eigen::Index count) {
  CVector out(count);
  for (Eigen::Index i = 0; i < count; ++i) out[i] = Complex(v[offset + 2 * i], v[offset + 2 * i + 1]);
  return out;
}

inline RVector split_complex(const CVector& r) { return pack_complex(r); }

struct LeastSquaresProblem {
  int n_params = 0;
  std::function<RVector(const RVector&)> residual;
  std::optional<RVector> lower;
  std::optional<RVector> upper;
  /// Applied after every trial step; must map x to an equivalent point.
  std::function<void(RVector&)> project;
};

struct LMOptions {
  int max_iter = 200;
  double ftol = 1e-12;
  double xtol = 1e-12;
  double lambda0 = 1e-3;
};

struct LMResult {
  RVector x;
  double final_norm = 0.0;
  int iterations = 0;
  std::vector<double> trace;  // residual norm after each accepted step, starting with x0
  std::string stop_reason;
};

namespace detail {

inline void apply_constraints(const LeastSquaresProblem& p, RVector& x) {
  if (p.lower) x = x.cwiseMax(*p.lower);
  if (p.upper) x = x.cwiseMin(*p.upper);
  if (p.project) p.project(x);
}

inline RVector checked_residual(const LeastSquaresProblem& p, const RVector& x) {
  RVector r = p.residual(x);
  if (!r.allFinite()) throw Error(ErrorCode::NonFiniteResidual, "residual map returned a non-finite value");
  return r;
}

}  // namespace detail

inline LMResult levenberg_marquardt(const LeastSquaresProblem& problem, const RVector& x0,
                                    const LMOptions& opts = {}) {
  if (!x0.allFinite()) throw Error(ErrorCode::InvalidInput, "x0 is not finite");
  if (x0.size() != problem.n_params) throw Error(ErrorCode::DimensionMismatch, "x0 has wrong size");
  LMResult out;
  RVector x = x0;
  detail::apply_constraints(problem, x);
  RVector r = detail::checked_residual(problem, x);
  if (r.size() < x.size()) throw Error(ErrorCode::DimensionMismatch, "fewer residuals than parameters");
  double norm = r.norm();
  out.trace.push_back(norm);
  double lambda = opts.lambda0;
  const Eigen::Index n = x.size();
  RMatrix jac(r.size(), n);
  bool need_jacobian = true;
  out.stop_reason = "max_iter";
  while (out.iterations < opts.max_iter) {
    if (norm == 0.0) {
      out.stop_reason = "zero_residual";
      break;
    }
    if (need_jacobian) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double h = 1e-7 * (1.0 + std::abs(x[j]));
        RVector xp = x;
        xp[j] += h;
        jac.col(j) = (detail::checked_residual(problem, xp) - r) / h;
      }
      need_jacobian = false;
    }
    const RMatrix jtj = jac.transpose() * jac;
    const RVector grad = jac.transpose() * r;
    // Marquardt scaling with a floor, so directions the projection flattens
    // (zero Jacobian columns) stay damped.
    const double floor = std::max(1e-6 * jtj.diagonal().maxCoeff(), 1e-300);
    RMatrix lhs = jtj;
    for (Eigen::Index j = 0; j < n; ++j) lhs(j, j) += lambda * std::max(jtj(j, j), floor);
    const RVector step = lhs.ldlt().solve(-grad);
    if (!step.allFinite() || step.norm() < opts.xtol) {
      out.stop_reason = "xtol";
      break;
    }
    RVector trial = x + step;
    detail::apply_constraints(problem, trial);
    const RVector rt = detail::checked_residual(problem, trial);
    const double nt = rt.norm();
    if (nt < norm) {
      const double decrease = (norm - nt) / norm;
      const double moved = (trial - x).norm();
      x = trial;
      r = rt;
      norm = nt;
      lambda = std::max(lambda / 10.0, 1e-12);
      ++out.iterations;
      out.trace.push_back(norm);
      need_jacobian = true;
      if (decrease < opts.ftol) {
        out.stop_reason = "ftol";
        break;
      }
      if (moved < opts.xtol) {
        out.stop_reason = "xtol";
        break;
      }
    } else {
      lambda *= 10.0;
      if (lambda > 1e16) {
        out.stop_reason = "stalled";
        break;
      }
    }
  }
  out.x = x;
  out.final_norm = norm;
  return out;
}

struct MultiStartResult {
  LMResult best;
  std::size_t best_index = 0;
  std::vector<std::optional<LMResult>> all;  // empty entries are failed starts
  std::vector<std::string> failures;
};

/// splitmix64 step; derives independent per-start seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Runs one LM per start from sampler(seed_i), seed_i = mix_seed(base_seed + i).
/// Results are independent of the thread count.
inline MultiStartResult multi_start(const std::function<LeastSquaresProblem()>& factory,
                                    const std::function<RVector(std::uint64_t)>& sampler,
                                    std::size_t n_starts, std::uint64_t base_seed,
                                    const LMOptions& opts = {}, unsigned threads = 1) {
  if (n_starts < 1) throw Error(ErrorCode::InvalidInput, "n_starts must be >= 1");
  MultiStartResult out;
  out.all.resize(n_starts);
  std::vector<std::string> errors(n_starts);
  auto run = [&](std::size_t i, const LeastSquaresProblem& problem) {
    try {
      out.all[i] = levenberg_marquardt(problem, sampler(mix_seed(base_seed + i)), opts);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_starts)));
  if (threads == 1) {
    const LeastSquaresProblem problem = factory();
    for (std::size_t i = 0; i < n_starts; ++i) run(i, problem);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        const LeastSquaresProblem problem = factory();
        for (std::size_t i = t; i < n_starts; i += threads) run(i, problem);
      });
    }
  }
  bool any = false;
  for (std::size_t i = 0; i < n_starts; ++i) {
    if (!out.all[i]) {
      out.failures.push_back("start " + std::to_string(i) + ": " + errors[i]);
      continue;
    }
    if (!any || out.all[i]->final_norm < out.best.final_norm) {
      out.best = *out.all[i];
      out.best_index = i;
      any = true;
    }
  }
  if (!any) throw Error(ErrorCode::NoConvergence, "all " + std::to_string(n_starts) + " starts failed");
  return out;
}

}  // namespace schottky
