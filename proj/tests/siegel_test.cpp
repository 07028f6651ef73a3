#include <gtest/gtest.h>

#include <schottky/siegel.hpp>

using namespace schottky;

namespace {
CMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}
}  // namespace

TEST(Validate, AcceptsGenusOne) {
  CMatrix m(1, 1);
  m(0, 0) = kI;
  const RiemannMatrix tau = validate(1, m);
  EXPECT_EQ(tau.genus(), 1);
  EXPECT_DOUBLE_EQ(tau.im_cholesky()(0, 0), 1.0);
}

TEST(Validate, AcceptsCoupledGenusTwo) {
  const RiemannMatrix tau = validate(2, mat2(kI, 0.5, 0.5, kI));
  EXPECT_EQ((tau.tau() - tau.tau().transpose()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_NEAR((tau.im() - RMatrix::Identity(2, 2)).norm(), 0.0, 0.0);
}

TEST(Validate, RejectsIndefiniteImaginaryPart) {
  try {
    validate(2, mat2(kI, 2.0, 2.0, -kI));
    FAIL() << "expected NotPositiveDefinite";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPositiveDefinite);
  }
}

TEST(Validate, RejectsAsymmetric) {
  try {
    validate(2, mat2(kI, 0.5, 0.25, kI));
    FAIL() << "expected NotSymmetric";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotSymmetric);
  }
}

TEST(Validate, SymmetrizesTinyAsymmetry) {
  const RiemannMatrix tau = validate(2, mat2(kI, 0.5, 0.5 + 1e-14, kI));
  EXPECT_EQ(tau.tau()(0, 1), tau.tau()(1, 0));
}

TEST(Validate, RejectsWrongShape) {
  EXPECT_THROW(validate(3, mat2(kI, 0.5, 0.5, kI)), Error);
}

TEST(RandomMatrix, DeterministicForSeed) {
  const RiemannMatrix a = random_riemann_matrix(2, 7);
  const RiemannMatrix b = random_riemann_matrix(2, 7);
  EXPECT_TRUE(a == b);
  EXPECT_FALSE(a == random_riemann_matrix(2, 8));
}

TEST(RandomMatrix, OutputsValidate) {
  for (int g = 1; g <= 5; ++g) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const RiemannMatrix t = random_riemann_matrix(g, seed);
      EXPECT_NO_THROW(validate(g, t.tau()));
    }
  }
  EXPECT_NO_THROW(validate(4, random_riemann_matrix(4, 1).tau()));
}

TEST(RandomMatrix, DeltaFloorGenusOne) {
  const RiemannMatrix t = random_riemann_matrix(1, 3);
  EXPECT_GE(t.im()(0, 0), 0.1);
}

TEST(Decomposable, DiagonalDetected) {
  const RiemannMatrix t = validate(2, mat2(kI, 0.0, 0.0, 2.0 * kI));
  const auto d = is_exactly_block_decomposable(t, 1e-12);
  EXPECT_TRUE(d.decomposable);
  ASSERT_EQ(d.blocks.size(), 2u);
  EXPECT_EQ(d.blocks[0], std::vector<int>{0});
  EXPECT_EQ(d.blocks[1], std::vector<int>{1});
}

TEST(Decomposable, CoupledNotDetected) {
  const RiemannMatrix t = validate(2, mat2(kI, 0.5, 0.5, kI));
  EXPECT_FALSE(is_exactly_block_decomposable(t).decomposable);
}

TEST(Decomposable, BlockDiagonalOfRandomBlocks) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RiemannMatrix t = block_diagonal(random_riemann_matrix(2, seed), random_riemann_matrix(1, seed + 100));
    const auto d = is_exactly_block_decomposable(t);
    EXPECT_TRUE(d.decomposable);
    EXPECT_EQ(d.blocks.size(), 2u);
  }
}

TEST(Canonical, IdempotentExactly) {
  const RiemannMatrix tau = random_riemann_matrix(3, 11);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int trial = 0; trial < 200; ++trial) {
    AbelianPoint p{RVector(3), RVector(3)};
    for (int j = 0; j < 3; ++j) {
      p.x[j] = u(rng);
      p.y[j] = u(rng);
    }
    const AbelianPoint c1 = canonical(p);
    const AbelianPoint c2 = canonical(c1);
    EXPECT_EQ(c1.x, c2.x);
    EXPECT_EQ(c1.y, c2.y);
    for (int j = 0; j < 3; ++j) {
      EXPECT_GE(c1.x[j], -0.5);
      EXPECT_LT(c1.x[j], 0.5);
      EXPECT_GE(c1.y[j], -0.5);
      EXPECT_LT(c1.y[j], 0.5);
    }
  }
}

TEST(Canonical, InvariantUnderLatticeTranslation) {
  const RiemannMatrix tau = random_riemann_matrix(2, 4);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> k(-3, 3);
  for (int trial = 0; trial < 100; ++trial) {
    CVector z(2);
    z << Complex(u(rng), u(rng)), Complex(u(rng), u(rng));
    CVector m(2), n(2);
    m << double(k(rng)), double(k(rng));
    n << double(k(rng)), double(k(rng));
    const CVector shifted = z + m + tau.tau() * n;
    const CVector a = canonical_z(z, tau);
    const CVector b = canonical_z(shifted, tau);
    // boundary points may land on opposite faces; compare modulo the lattice
    EXPECT_LE(torus_distance(a, b, tau), 1e-12);
    if ((a - b).norm() > 1e-9) ADD_FAILURE() << "canonical representatives differ";
  }
}

TEST(MatrixJson, RoundTrip) {
  const RiemannMatrix t = random_riemann_matrix(3, 2);
  const RiemannMatrix back = matrix_from_json(to_json(t));
  EXPECT_LE((t.tau() - back.tau()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(MatrixJson, MalformedNamesField) {
  nlohmann::json j = {{"g", 2}, {"re", {{0.0, 0.5}, {0.5, 0.0}}}, {"im", {{1.0, 0.0}}}};
  try {
    matrix_from_json(j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidInput);
    EXPECT_NE(std::string(e.what()).find("'im'"), std::string::npos);
  }
}

TEST(MatrixJson, DigestStable) {
  const RiemannMatrix t = random_riemann_matrix(2, 7);
  EXPECT_EQ(tau_digest(t), tau_digest(random_riemann_matrix(2, 7)));
  EXPECT_NE(tau_digest(t), tau_digest(random_riemann_matrix(2, 6)));
  EXPECT_EQ(tau_digest(t).size(), 16u);
}
