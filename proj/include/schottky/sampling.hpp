// Deterministic low-discrepancy points of the fundamental domain and seeded
// random points, in lattice coordinates z = x + tau y with x, y in [-1/2, 1/2)^g.
#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "core.hpp"
#include "siegel.hpp"

namespace schottky {

namespace detail {
inline double radical_inverse(std::uint64_t index, unsigned base) {
  double inv = 1.0 / base, f = inv, out = 0.0;
  while (index > 0) {
    out += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return out;
}

inline unsigned nth_prime(int k) {
  static constexpr std::array<unsigned, 24> primes{2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                                                   41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};
  if (k >= static_cast<int>(primes.size())) throw Error(ErrorCode::InvalidInput, "dimension too large for Halton");
  return primes[k];
}
}  // namespace detail

/// n Halton points in [-1/2, 1/2)^{2g} with a seeded Cranley-Patterson
/// rotation, mapped to the torus. The first g coordinates give x, the rest y.
inline std::vector<AbelianPoint> halton_samples(int g, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> shift(2 * g);
  for (auto& s : shift) s = unit(rng);
  std::vector<AbelianPoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    AbelianPoint p{RVector(g), RVector(g)};
    for (int d = 0; d < 2 * g; ++d) {
      double t = detail::radical_inverse(i + 1, detail::nth_prime(d)) + shift[d];
      t -= std::floor(t);
      (d < g ? p.x[d] : p.y[d - g]) = t - 0.5;
    }
    out.push_back(std::move(p));
  }
  return out;
}

inline std::vector<CVector> sample_points(const RiemannMatrix& tau, std::size_t n, std::uint64_t seed) {
  std::vector<CVector> out;
  out.reserve(n);
  for (const auto& p : halton_samples(tau.genus(), n, seed)) out.push_back(p.z(tau));
  return out;
}

/// Uniform random point of the fundamental domain.
inline CVector random_point(const RiemannMatrix& tau, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> half(-0.5, 0.5);
  const int g = tau.genus();
  AbelianPoint p{RVector(g), RVector(g)};
  for (int j = 0; j < g; ++j) p.x[j] = half(rng);
  for (int j = 0; j < g; ++j) p.y[j] = half(rng);
  return p.z(tau);
}

inline CVector random_complex_vector(int g, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  CVector v(g);
  for (int j = 0; j < g; ++j) v[j] = Complex(normal(rng), normal(rng));
  return v;
}

}  // namespace schottky
