#include <gtest/gtest.h>

#include <random>

#include <schottky/solver.hpp>

using namespace schottky;

namespace {

CMatrix random_cmatrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = Complex(n(rng), n(rng));
  return m;
}

LeastSquaresProblem rosenbrock() {
  LeastSquaresProblem p;
  p.n_params = 2;
  p.residual = [](const RVector& x) {
    RVector r(2);
    r << 10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0];
    return r;
  };
  return p;
}

// Two basins: r(x) = (x^2 - 1)(x - 3) + 0.5 has a global root near x = 2.9 only
// if approached from the right; the left well at x = -1 has a positive floor.
LeastSquaresProblem two_basin() {
  LeastSquaresProblem p;
  p.n_params = 1;
  p.residual = [](const RVector& x) {
    RVector r(2);
    r[0] = (x[0] * x[0] - 1.0) * (x[0] - 2.0);
    r[1] = 0.3 * (x[0] + 1.0) * (x[0] - 2.0) / (1.0 + x[0] * x[0]);
    return r;
  };
  return p;
}

}  // namespace

TEST(LinearLsq, IdentityRecoversUnitVector) {
  const CMatrix a = CMatrix::Identity(3, 3);
  CVector b = CVector::Zero(3);
  b[0] = -1.0;
  const auto res = linear_lsq(a, b);
  EXPECT_LE((res.x - CVector::Unit(3, 0)).norm(), 1e-15);
  EXPECT_LE(res.residual_ratio, 1e-15);
}

TEST(LinearLsq, RhsOrthogonalToRangeGivesZero) {
  CMatrix a = CMatrix::Zero(3, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;
  CVector b = CVector::Zero(3);
  b[2] = Complex(0.0, 3.0);
  const auto res = linear_lsq(a, b);
  EXPECT_LE(res.x.norm(), 1e-15);
  EXPECT_NEAR(res.residual_ratio, 1.0, 1e-15);
}

TEST(LinearLsq, MatchesNormalEquations) {
  std::mt19937_64 rng(11);
  const CMatrix a = random_cmatrix(20, 5, rng);
  const CVector b = random_cmatrix(20, 1, rng).col(0);
  const CVector oracle = (a.adjoint() * a).ldlt().solve(-(a.adjoint() * b));
  const auto res = linear_lsq(a, b);
  EXPECT_LE((res.x - oracle).norm(), 1e-10 * oracle.norm());
}

TEST(LinearLsq, HomogeneousFindsNullVector) {
  std::mt19937_64 rng(5);
  CMatrix a = random_cmatrix(10, 3, rng);
  a.col(2) = a.col(0) - Complex(0.0, 2.0) * a.col(1);
  const auto res = homogeneous_lsq(a);
  EXPECT_LE((a * res.x).norm(), 1e-12 * a.norm());
  EXPECT_NEAR(res.x.norm(), 1.0, 1e-14);
  EXPECT_LE(res.ratio, 1e-14);
  EXPECT_NEAR(res.x[0].imag(), 0.0, 1e-15);
  EXPECT_GT(res.x[0].real(), 0.0);
}

TEST(Packing, InterleavesRealAndImaginaryParts) {
  CVector v(2);
  v << Complex(1, 2), Complex(3, 4);
  const RVector p = pack_complex(v);
  EXPECT_EQ(p, (RVector(4) << 1, 2, 3, 4).finished());
  EXPECT_EQ(unpack_complex(p, 0, 2), v);
}

TEST(LevenbergMarquardt, LinearProblemConvergesInThreeSteps) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  RMatrix a(12, 4);
  RVector b(12);
  for (int i = 0; i < 12; ++i) {
    b[i] = n(rng);
    for (int j = 0; j < 4; ++j) a(i, j) = n(rng);
  }
  LeastSquaresProblem p;
  p.n_params = 4;
  p.residual = [&](const RVector& x) { return RVector(a * x + b); };
  const RVector exact = a.colPivHouseholderQr().solve(-b);
  const auto res = levenberg_marquardt(p, RVector::Zero(4));
  EXPECT_LE(res.iterations, 3);
  EXPECT_LE((res.x - exact).norm(), 1e-6);
  EXPECT_NEAR(res.final_norm, (a * exact + b).norm(), 1e-10);
}

TEST(LevenbergMarquardt, RosenbrockFromClassicalStart) {
  const auto res = levenberg_marquardt(rosenbrock(), (RVector(2) << -1.2, 1.0).finished());
  EXPECT_LE(res.final_norm, 1e-8);
  EXPECT_NEAR(res.x[0], 1.0, 1e-7);
  EXPECT_NEAR(res.x[1], 1.0, 1e-7);
  EXPECT_EQ(rosenbrock().residual(RVector::Ones(2)).norm(), 0.0);
}

TEST(LevenbergMarquardt, TraceIsNonIncreasing) {
  const auto res = levenberg_marquardt(rosenbrock(), (RVector(2) << -1.2, 1.0).finished());
  ASSERT_EQ(res.trace.size(), static_cast<std::size_t>(res.iterations) + 1);
  for (std::size_t i = 1; i < res.trace.size(); ++i) EXPECT_LE(res.trace[i], res.trace[i - 1]);
}

TEST(LevenbergMarquardt, StartAtMinimumDoesNotMove) {
  const RVector x0 = RVector::Ones(2);
  const auto res = levenberg_marquardt(rosenbrock(), x0);
  EXPECT_LE(res.iterations, 1);
  EXPECT_LE((res.x - x0).norm(), 1e-12);
}

TEST(LevenbergMarquardt, NonFiniteResidualAborts) {
  LeastSquaresProblem p;
  p.n_params = 1;
  p.residual = [](const RVector& x) { return RVector::Constant(1, std::log(x[0])); };
  try {
    levenberg_marquardt(p, RVector::Constant(1, -1.0));
    FAIL() << "expected NonFiniteResidual";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteResidual);
  }
}

TEST(LevenbergMarquardt, BoxConstraintIsRespected) {
  LeastSquaresProblem p = rosenbrock();
  p.upper = RVector::Constant(2, 0.5);
  const auto res = levenberg_marquardt(p, (RVector(2) << -1.2, 0.0).finished());
  EXPECT_LE(res.x.maxCoeff(), 0.5);
}

TEST(LevenbergMarquardt, GaugeProjectionPreservesResidualOfSymmetricProblem) {
  // Residual depends on x only through |x|, so projecting onto the first
  // coordinate axis is a symmetry.
  LeastSquaresProblem p;
  p.n_params = 2;
  p.residual = [](const RVector& x) { return RVector::Constant(2, x.squaredNorm() - 4.0); };
  const RVector x{{0.6, 0.8}};
  RVector projected = x;
  p.project = [](RVector& v) { v = RVector{{v.norm(), 0.0}}; };
  p.project(projected);
  EXPECT_LE((p.residual(x) - p.residual(projected)).norm(), 1e-12);
  const auto res = levenberg_marquardt(p, x);
  EXPECT_EQ(res.x[1], 0.0);
  EXPECT_NEAR(res.x[0], 2.0, 1e-6);
}

TEST(MultiStart, SingleStartEqualsDirectRun) {
  auto sampler = [](std::uint64_t s) {
    std::mt19937_64 rng(s);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    return RVector{{u(rng), u(rng)}};
  };
  const auto ms = multi_start(rosenbrock, sampler, 1, 42);
  const auto direct = levenberg_marquardt(rosenbrock(), sampler(mix_seed(42)));
  EXPECT_EQ(ms.best.x, direct.x);
  EXPECT_EQ(ms.best.iterations, direct.iterations);
}

TEST(MultiStart, DeterministicAcrossRunsAndThreads) {
  auto sampler = [](std::uint64_t s) {
    std::mt19937_64 rng(s);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    return RVector{{u(rng)}};
  };
  const auto a = multi_start(two_basin, sampler, 8, 9);
  const auto b = multi_start(two_basin, sampler, 8, 9);
  const auto c = multi_start(two_basin, sampler, 8, 9, {}, 3);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(a.all[i]->x, b.all[i]->x);
    EXPECT_EQ(a.all[i]->x, c.all[i]->x);
    EXPECT_EQ(a.all[i]->iterations, c.all[i]->iterations);
  }
}

TEST(MultiStart, MoreStartsNeverWorse) {
  auto sampler = [](std::uint64_t s) {
    std::mt19937_64 rng(s);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    return RVector{{u(rng)}};
  };
  const auto one = multi_start(two_basin, sampler, 1, 4);
  const auto eight = multi_start(two_basin, sampler, 8, 4);
  EXPECT_LE(eight.best.final_norm, one.best.final_norm);
  EXPECT_LE(eight.best.final_norm, 1e-8);
  EXPECT_NEAR(eight.best.x[0], 2.0, 1e-6);
}

TEST(MultiStart, FailsOnlyWhenAllStartsFail) {
  auto factory = [] {
    LeastSquaresProblem p;
    p.n_params = 1;
    p.residual = [](const RVector& x) {
      if (x[0] < 0.0) return RVector::Constant(1, std::nan(""));
      return RVector::Constant(1, x[0] - 1.0);
    };
    return p;
  };
  auto sampler = [](std::uint64_t s) { return RVector::Constant(1, (s % 2) ? -1.0 : 3.0); };
  const auto ms = multi_start(factory, sampler, 6, 0);
  EXPECT_FALSE(ms.failures.empty());
  EXPECT_LE(ms.best.final_norm, 1e-8);
  auto bad = [](std::uint64_t) { return RVector::Constant(1, -1.0); };
  EXPECT_THROW(multi_start(factory, bad, 3, 0), Error);
}
