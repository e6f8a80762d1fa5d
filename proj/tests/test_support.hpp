#pragma once

// Test-only field generators and physical-space oracles. Nothing here calls
// the operators under test.

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "ecnv/fields.hpp"
#include "ecnv/forcing.hpp"

namespace ecnv::testing {

inline constexpr double kPi = std::numbers::pi;

/// Samples f on the collocation grid.
inline std::vector<double> sample(const Grid& g, const std::function<double(double, double)>& f) {
  std::vector<double> out(g.size());
  const double h = g.spacing();
  for (int j1 = 0; j1 < g.n(); ++j1) {
    for (int j2 = 0; j2 < g.n(); ++j2) out[std::size_t(j1) * g.n() + j2] = f(j1 * h, j2 * h);
  }
  return out;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs_diff(const SpectralScalar& a, const SpectralScalar& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Random real field with modes |k_i| <= kmax, amplitude decaying like
/// 1/(1+|k|^2)^{decay/2}.
inline SpectralScalar random_scalar(const Grid& g, std::uint64_t seed, int kmax,
                                    bool mean_zero = true, double decay = 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  SpectralScalar q(g, mean_zero);
  for (int k1 = -kmax; k1 <= kmax; ++k1) {
    for (int k2 = 0; k2 <= kmax; ++k2) {
      if (k2 == 0 && k1 < 0) continue;
      if (k1 == 0 && k2 == 0) {
        const double v = nd(rng);
        if (!mean_zero) q.set_mode(0, 0, Complex(v, 0.0));
        continue;
      }
      const double scale = std::pow(1.0 + k1 * k1 + k2 * k2, -decay / 2.0);
      const double re = nd(rng), im = nd(rng);
      q.set_mode(k1, k2, scale * Complex(re, im));
    }
  }
  return q;
}

/// Random divergence-free field: c(k) = i a(k) (-k2, k1) / |k| mode by mode.
inline SpectralVector random_div_free(const Grid& g, std::uint64_t seed, int kmax,
                                      double decay = 0.0) {
  const SpectralScalar a = random_scalar(g, seed, kmax, true, decay);
  SpectralScalar c1 = a.zeros_like(false), c2 = a.zeros_like(false);
  for (std::size_t idx = 1; idx < a.size(); ++idx) {
    const double kk = g.k_abs(idx);
    const Complex ia(-a[idx].imag(), a[idx].real());
    c1[idx] = -g.k2(idx) / kk * ia;
    c2[idx] = g.k1(idx) / kk * ia;
  }
  return SpectralVector(c1, c2, true);
}

/// Bank with n random smooth noise shapes on modes |k_i| <= kmax, zero Phi and f.
inline ForcingBank noisy_bank(const Grid& g, std::size_t n = 2, int kmax = 3) {
  ForcingBank bank = ForcingBank::zero(g, n);
  for (std::size_t l = 0; l < n; ++l) {
    bank.g_tilde[l] = random_scalar(g, 10 + l, kmax, true, 2.0);
    bank.g[l] = random_div_free(g, 20 + l, kmax, 2.0);
  }
  return bank;
}

}  // namespace ecnv::testing
