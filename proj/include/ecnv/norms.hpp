#pragma once

#include "ecnv/fields.hpp"

namespace ecnv {

/// Squared Sobolev/Lebesgue norms of a (q, u) pair on the 2pi-torus. L^4 is
/// reported to the fourth power.
struct NormReport {
  double q_l2_sq = 0.0;              // ||q||^2
  double q_l4_4 = 0.0;               // ||q||_{L4}^4, grid quadrature
  double q_h_half_sq = 0.0;          // ||Lambda^{1/2} q||^2
  double q_h_neg_half_sq = 0.0;      // ||Lambda^{-1/2} q||^2
  double q_h1_sq = 0.0;              // ||grad q||^2
  double q_h_three_half_sq = 0.0;    // ||Lambda^{3/2} q||^2
  double u_l2_sq = 0.0;              // ||u||^2
  double u_h1_sq = 0.0;              // ||grad u||^2
  double u_h2_sq = 0.0;              // ||Delta u||^2
  double script_h_sq = 0.0;          // ||Lambda^{-1/2} q||^2 + ||u||^2
  double script_v_sq = 0.0;          // ||q||_{L4}^2 + ||u||^2 + ||grad u||^2
};

NormReport norms(const SpectralScalar& q, const SpectralVector& u);

/// ||q||_{L4}^4 by grid quadrature.
double l4_pow4(const SpectralScalar& q);

/// int (Lambda q) q^3 dx on the grid, and its ratio to ||q||_{L4}^4.
double lambda_cubic_pairing(const SpectralScalar& q);

}  // namespace ecnv
