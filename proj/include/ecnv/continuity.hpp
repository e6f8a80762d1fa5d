#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ecnv/dynamics.hpp"

namespace ecnv {

struct GronwallTrace {
  double t = 0.0;
  double c_integrand = 0.0;  // ||grad Phi||_inf^2 + ||grad u1||^2 + ||grad u1|| + ||q1||_L4^2 + ||q1||_L4^4 + ||Delta u1||^2
  double r_cum = 0.0;        // left-rectangle integral of c_integrand up to t
  double h_dist_sq = 0.0;    // ||Lambda^{-1/2}(q1 - q2)||^2 + ||u1 - u2||^2
  double bound = 0.0;        // exp(c0 r_cum) h_dist_sq(0)
  bool violation = false;
};

struct GronwallResult {
  std::vector<GronwallTrace> trace;  // t = 0 plus every sample_every-th step
  std::uint64_t violations = 0;      // counted over every step, not only samples
  /// max over steps with r_cum > 0 of log(h_dist_sq / h_dist_sq(0)) / r_cum:
  /// the smallest c0 that would have produced no violation.
  double critical_c0 = 0.0;
};

/// ||Lambda^{-1/2}(q1 - q2)||^2 + ||u1 - u2||^2.
double h_distance_sq(const SimState& a, const SimState& b);
/// The integrand of r(t) evaluated on a state; ||grad Phi||_inf is the grid max of |grad Phi|.
double r_integrand(const SimState& s, const Stepper& stepper);

/// Runs two trajectories driven by the same increments until params.t_end and
/// compares their distance to exp(c0 r_cum) h_dist_sq(0).
GronwallResult gronwall_continuity(const SimState& s1, const SimState& s2, const Stepper& stepper,
                                   WienerDriver& driver, double c0, std::uint64_t sample_every = 1);

/// safety * critical_c0 of a pilot run (at least 0).
double calibrate_c0(const GronwallResult& pilot, double safety = 2.0);

/// ||Lambda^{-1/2}(v.grad rho) - v.grad Lambda^{-1/2} rho|| / (||Delta v|| ||rho||);
/// empty when either denominator factor vanishes.
std::optional<double> commutator_ratio(const SpectralVector& v, const SpectralScalar& rho);

/// ||w||_L4 / (||w|| + ||w||^{1/2} ||grad w||^{1/2}); empty for w = 0.
std::optional<double> ladyzhenskaya_ratio(const SpectralScalar& w);

/// Random real mean-zero scalar supported on 0 < |k_i| <= kmax with Gaussian
/// coefficients scaled by (1 + |k|^2)^{-decay/2}. Coefficients depend only on
/// (seed, kmax, decay), so the same field is produced on every grid that
/// resolves kmax.
SpectralScalar random_band_limited(const Grid& grid, std::uint64_t seed, int kmax, double decay = 0.0);
/// Divergence-free counterpart, built as the perpendicular gradient of a random stream function.
SpectralVector random_band_limited_div_free(const Grid& grid, std::uint64_t seed, int kmax,
                                            double decay = 0.0);

struct CommutatorCorpus {
  std::vector<double> ratios;  // one per pair with nonzero denominators
  double max_ratio = 0.0;
};

/// Ratios over `count` random (v, rho) pairs with band limit kmax.
CommutatorCorpus commutator_corpus(const Grid& grid, int count, std::uint64_t seed, int kmax);

}  // namespace ecnv
