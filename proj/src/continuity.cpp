#include "ecnv/continuity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ecnv/norms.hpp"
#include "ecnv/operators.hpp"

namespace ecnv {

double h_distance_sq(const SimState& a, const SimState& b) {
  return sobolev_sq(a.q - b.q, -0.5) + sobolev_sq(a.u - b.u, 0.0);
}

double r_integrand(const SimState& s, const Stepper& stepper) {
  double grad_phi_inf_sq = 0.0;
  if (!stepper.params().zero_potential) {
    const auto [p1, p2] = to_physical(gradient(stepper.phi()));
    for (std::size_t i = 0; i < p1.size(); ++i)
      grad_phi_inf_sq = std::max(grad_phi_inf_sq, p1[i] * p1[i] + p2[i] * p2[i]);
  }
  const double grad_u_sq = sobolev_sq(s.u, 1.0);
  const double lap_u_sq = sobolev_sq(s.u, 2.0);
  const double l4_4 = l4_pow4(s.q);
  return grad_phi_inf_sq + grad_u_sq + std::sqrt(grad_u_sq) + std::sqrt(l4_4) + l4_4 + lap_u_sq;
}

GronwallResult gronwall_continuity(const SimState& s1, const SimState& s2, const Stepper& stepper,
                                   WienerDriver& driver, double c0, std::uint64_t sample_every) {
  if (sample_every == 0) throw InvalidParameter("sample_every must be positive");
  const SimParams& p = stepper.params();
  const std::size_t n = stepper.bank().n();
  const std::uint64_t steps = steps_to_reach(s1.t, p.t_end, p.dt);

  GronwallResult out;
  SimState a = s1, b = s2;
  const double h0 = h_distance_sq(a, b);
  GronwallTrace tr;
  tr.t = a.t;
  tr.h_dist_sq = h0;
  tr.bound = h0;
  out.trace.push_back(tr);

  double r_cum = 0.0;
  for (std::uint64_t i = 1; i <= steps; ++i) {
    const double integrand = r_integrand(a, stepper);
    r_cum += integrand * p.dt;
    const NoiseIncrement inc = driver.sample_increment(n, p.dt);
    a = stepper.advance(a, inc);
    b = stepper.advance(b, inc);
    a.t = b.t = s1.t + static_cast<double>(i) * p.dt;

    const double h = h_distance_sq(a, b);
    const double bound = std::exp(c0 * r_cum) * h0;
    const bool bad = h > bound;
    if (bad) ++out.violations;
    if (r_cum > 0.0 && h0 > 0.0 && h > 0.0)
      out.critical_c0 = std::max(out.critical_c0, std::log(h / h0) / r_cum);
    if (i % sample_every == 0 || i == steps) {
      GronwallTrace row{a.t, integrand, r_cum, h, bound, bad};
      out.trace.push_back(row);
    }
  }
  return out;
}

double calibrate_c0(const GronwallResult& pilot, double safety) {
  return std::max(0.0, safety * pilot.critical_c0);
}

std::optional<double> commutator_ratio(const SpectralVector& v, const SpectralScalar& rho) {
  const double lap_v = std::sqrt(sobolev_sq(v, 2.0));
  const double rho_norm = std::sqrt(sobolev_sq(rho, 0.0));
  if (lap_v == 0.0 || rho_norm == 0.0) return std::nullopt;
  const SpectralScalar outer = lambda_power(advect_scalar(v, rho), -0.5);
  const SpectralScalar inner_term = advect_scalar(v, lambda_power(rho, -0.5));
  return std::sqrt(sobolev_sq(outer - inner_term, 0.0)) / (lap_v * rho_norm);
}

std::optional<double> ladyzhenskaya_ratio(const SpectralScalar& w) {
  const double l2 = std::sqrt(sobolev_sq(w, 0.0));
  if (l2 == 0.0) return std::nullopt;
  const double l4 = std::pow(l4_pow4(w), 0.25);
  const double grad = std::sqrt(sobolev_sq(w, 1.0));
  return l4 / (l2 + std::sqrt(l2 * grad));
}

namespace {

// Half-plane modes (k2 > 0, or k2 == 0 and k1 > 0) inside the band, in a
// fixed order independent of the grid.
template <class Fn>
void for_band_modes(int kmax, Fn&& fn) {
  std::size_t j = 0;
  for (int k2 = 0; k2 <= kmax; ++k2)
    for (int k1 = -kmax; k1 <= kmax; ++k1) {
      if (k2 == 0 && k1 <= 0) continue;
      fn(k1, k2, j++);
    }
}

}  // namespace

SpectralScalar random_band_limited(const Grid& grid, std::uint64_t seed, int kmax, double decay) {
  if (kmax < 1 || kmax >= grid.n() / 2) throw InvalidParameter("band limit must be in [1, N/2)");
  const std::size_t count = static_cast<std::size_t>(kmax + 1) * (2 * kmax + 1);
  const std::vector<double> z = standard_normals(seed, 0, 0, 2 * count);
  SpectralScalar out(grid, true);
  for_band_modes(kmax, [&](int k1, int k2, std::size_t j) {
    const double scale = std::pow(1.0 + k1 * k1 + k2 * k2, -0.5 * decay);
    out.set_mode(k1, k2, Complex(z[2 * j], z[2 * j + 1]) * scale);
  });
  return out;
}

SpectralVector random_band_limited_div_free(const Grid& grid, std::uint64_t seed, int kmax,
                                            double decay) {
  // The stream function is one derivative smoother so that v has the requested decay.
  SpectralScalar psi = random_band_limited(grid, seed, kmax, decay);
  for (std::size_t idx = 1; idx < grid.size(); ++idx)
    if (grid.k_sq(idx) > 0.0) psi[idx] /= grid.k_abs(idx);
  return perp_gradient(psi);
}

CommutatorCorpus commutator_corpus(const Grid& grid, int count, std::uint64_t seed, int kmax) {
  CommutatorCorpus out;
  for (int i = 0; i < count; ++i) {
    const std::uint64_t s = seed + 2 * static_cast<std::uint64_t>(i);
    const auto v = random_band_limited_div_free(grid, s, kmax, 1.0);
    const auto rho = random_band_limited(grid, s + 1, kmax, 1.0);
    if (const auto r = commutator_ratio(v, rho)) {
      out.ratios.push_back(*r);
      out.max_ratio = std::max(out.max_ratio, *r);
    }
  }
  return out;
}

}  // namespace ecnv
