// Period matrices in the Siegel upper half space and points of the torus
// C^g / (Z^g + tau Z^g).
#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "core.hpp"

namespace schottky {

/// A validated Riemann matrix: symmetric, with positive definite imaginary
/// part. The Cholesky factor of Im(tau) and its inverse are cached.
class RiemannMatrix {
 public:
  int genus() const { return static_cast<int>(tau_.rows()); }
  const CMatrix& tau() const { return tau_; }
  const RMatrix& re() const { return re_; }
  const RMatrix& im() const { return im_; }
  const RMatrix& im_inverse() const { return im_inv_; }
  /// Lower-triangular L with Im(tau) = L L^T.
  const RMatrix& im_cholesky() const { return chol_; }

  bool operator==(const RiemannMatrix& other) const { return tau_ == other.tau_; }

  /// factor * tau; a Riemann matrix for any factor > 0.
  RiemannMatrix scaled(double factor) const {
    RiemannMatrix out = *this;
    out.tau_ *= factor;
    out.re_ *= factor;
    out.im_ *= factor;
    out.im_inv_ /= factor;
    out.chol_ *= std::sqrt(factor);
    return out;
  }

 private:
  RiemannMatrix() = default;
  friend RiemannMatrix validate(int g, const CMatrix& raw);
  CMatrix tau_;
  RMatrix re_, im_, im_inv_, chol_;
};

inline RiemannMatrix validate(int g, const CMatrix& raw) {
  if (g < 1) throw Error(ErrorCode::InvalidInput, "genus must be >= 1");
  if (raw.rows() != g || raw.cols() != g) {
    throw Error(ErrorCode::DimensionMismatch,
                "matrix is " + std::to_string(raw.rows()) + "x" + std::to_string(raw.cols()) +
                    ", expected " + std::to_string(g) + "x" + std::to_string(g));
  }
  if (!raw.allFinite()) throw Error(ErrorCode::InvalidInput, "matrix has non-finite entries");
  const double magnitude = std::max(1.0, raw.cwiseAbs().maxCoeff());
  const double asym = (raw - raw.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * magnitude) {
    throw Error(ErrorCode::NotSymmetric, "max |tau_ij - tau_ji| = " + std::to_string(asym));
  }
  RiemannMatrix out;
  out.tau_ = 0.5 * (raw + raw.transpose());
  out.re_ = out.tau_.real();
  out.im_ = out.tau_.imag();
  Eigen::LLT<RMatrix> llt(out.im_);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite, "Cholesky factorization of Im(tau) failed");
  }
  out.chol_ = llt.matrixL();
  for (int i = 0; i < g; ++i) {
    if (!(out.chol_(i, i) > 0.0)) {
      throw Error(ErrorCode::NotPositiveDefinite,
                  "Cholesky pivot " + std::to_string(i) + " is not positive");
    }
  }
  out.im_inv_ = llt.solve(RMatrix::Identity(g, g));
  return out;
}

/// tau = A + i (B^T B + delta I), A symmetric uniform in [-1/2, 1/2], B uniform in [-1, 1].
inline RiemannMatrix random_riemann_matrix(int g, std::uint64_t seed, double delta = 0.1) {
  if (g < 1) throw Error(ErrorCode::InvalidInput, "genus must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> half(-0.5, 0.5);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  RMatrix a(g, g), b(g, g);
  for (int i = 0; i < g; ++i) {
    for (int j = i; j < g; ++j) {
      a(i, j) = half(rng);
      a(j, i) = a(i, j);
    }
  }
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) b(i, j) = unit(rng);
  RMatrix y = b.transpose() * b + delta * RMatrix::Identity(g, g);
  y = 0.5 * (y + y.transpose());
  CMatrix tau(g, g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) tau(i, j) = Complex(a(i, j), y(i, j));
  return validate(g, tau);
}

struct BlockDecomposition {
  bool decomposable = false;
  std::vector<std::vector<int>> blocks;  // 0-based index sets
};

/// Detects exact block-diagonal structure only; a matrix that becomes block
/// diagonal after a symplectic change of basis is not recognized.
inline BlockDecomposition is_exactly_block_decomposable(const RiemannMatrix& tau, double tol = 1e-12) {
  const int g = tau.genus();
  std::vector<int> component(g, -1);
  int count = 0;
  for (int start = 0; start < g; ++start) {
    if (component[start] >= 0) continue;
    std::vector<int> stack{start};
    component[start] = count;
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      for (int j = 0; j < g; ++j) {
        if (component[j] < 0 && std::abs(tau.tau()(i, j)) > tol) {
          component[j] = count;
          stack.push_back(j);
        }
      }
    }
    ++count;
  }
  BlockDecomposition out;
  out.blocks.assign(count, {});
  for (int i = 0; i < g; ++i) out.blocks[component[i]].push_back(i);
  out.decomposable = count > 1;
  return out;
}

/// Block diagonal matrix diag(t1, t2).
inline RiemannMatrix block_diagonal(const RiemannMatrix& t1, const RiemannMatrix& t2) {
  const int g1 = t1.genus(), g2 = t2.genus();
  CMatrix tau = CMatrix::Zero(g1 + g2, g1 + g2);
  tau.topLeftCorner(g1, g1) = t1.tau();
  tau.bottomRightCorner(g2, g2) = t2.tau();
  return validate(g1 + g2, tau);
}

/// A point of the torus, stored by its real lattice coordinates (x, y) with
/// z = x + tau y. Storing coordinates keeps lattice translation and
/// canonicalization exact.
struct AbelianPoint {
  RVector x;
  RVector y;

  CVector z(const RiemannMatrix& tau) const {
    return x.cast<Complex>() + tau.tau() * y.cast<Complex>();
  }

  static AbelianPoint from_z(const CVector& z, const RiemannMatrix& tau) {
    AbelianPoint p;
    p.y = tau.im_inverse() * z.imag();
    p.x = z.real() - tau.re() * p.y;
    return p;
  }

  static AbelianPoint zero(int g) { return {RVector::Zero(g), RVector::Zero(g)}; }
};

namespace detail {
// Maps t into [-1/2, 1/2); values already in range are returned unchanged.
inline double reduce_coordinate(double t) {
  if (t >= -0.5 && t < 0.5) return t;
  t -= std::floor(t + 0.5);
  if (t >= 0.5) t -= 1.0;
  if (t < -0.5) t += 1.0;
  return t;
}
}  // namespace detail

inline AbelianPoint canonical(const AbelianPoint& p) {
  AbelianPoint out = p;
  for (Eigen::Index i = 0; i < out.x.size(); ++i) {
    out.x[i] = detail::reduce_coordinate(out.x[i]);
    out.y[i] = detail::reduce_coordinate(out.y[i]);
  }
  return out;
}

inline CVector canonical_z(const CVector& z, const RiemannMatrix& tau) {
  return canonical(AbelianPoint::from_z(z, tau)).z(tau);
}

/// Distance between the classes of z1 and z2 modulo the lattice, measured
/// in lattice coordinates.
inline double torus_distance(const CVector& z1, const CVector& z2, const RiemannMatrix& tau) {
  const AbelianPoint d = canonical(AbelianPoint::from_z(z1 - z2, tau));
  return std::sqrt(d.x.squaredNorm() + d.y.squaredNorm());
}

// ---------------------------------------------------------------------------
// Matrix file format: {"g": int, "re": [[...]], "im": [[...]]}, row-major.

inline nlohmann::json to_json(const RiemannMatrix& tau) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (int i = 0; i < tau.genus(); ++i) {
    nlohmann::json rr = nlohmann::json::array(), ir = nlohmann::json::array();
    for (int j = 0; j < tau.genus(); ++j) {
      rr.push_back(tau.tau()(i, j).real());
      ir.push_back(tau.tau()(i, j).imag());
    }
    re.push_back(rr);
    im.push_back(ir);
  }
  return {{"g", tau.genus()}, {"re", re}, {"im", im}};
}

inline RiemannMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidInput, "matrix document must be a JSON object");
  if (!j.contains("g") || !j["g"].is_number_integer())
    throw Error(ErrorCode::InvalidInput, "field 'g' missing or not an integer");
  const int g = j["g"].get<int>();
  if (g < 1) throw Error(ErrorCode::InvalidInput, "field 'g' must be >= 1");
  auto read = [&](const char* name) {
    if (!j.contains(name) || !j[name].is_array() || static_cast<int>(j[name].size()) != g)
      throw Error(ErrorCode::InvalidInput, std::string("field '") + name + "' must be a " +
                                               std::to_string(g) + "-row array");
    RMatrix m(g, g);
    for (int r = 0; r < g; ++r) {
      const auto& row = j[name][r];
      if (!row.is_array() || static_cast<int>(row.size()) != g)
        throw Error(ErrorCode::InvalidInput,
                    std::string("field '") + name + "' row " + std::to_string(r) + " must have " +
                        std::to_string(g) + " entries");
      for (int c = 0; c < g; ++c) {
        if (!row[c].is_number())
          throw Error(ErrorCode::InvalidInput, std::string("field '") + name + "' entry (" +
                                                   std::to_string(r) + "," + std::to_string(c) +
                                                   ") is not a number");
        m(r, c) = row[c].get<double>();
      }
    }
    return m;
  };
  const RMatrix re = read("re");
  const RMatrix im = read("im");
  CMatrix tau(g, g);
  for (int r = 0; r < g; ++r)
    for (int c = 0; c < g; ++c) tau(r, c) = Complex(re(r, c), im(r, c));
  return validate(g, tau);
}

inline RiemannMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open matrix file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, "malformed JSON in '" + path + "': " + e.what());
  }
  return matrix_from_json(j);
}

/// FNV-1a over the row-major (re, im) bytes of tau.
inline std::string tau_digest(const RiemannMatrix& tau) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&](double v) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ull;
    }
  };
  for (int i = 0; i < tau.genus(); ++i)
    for (int j = 0; j < tau.genus(); ++j) {
      mix(tau.tau()(i, j).real());
      mix(tau.tau()(i, j).imag());
    }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

}  // namespace schottky
