#include "ecnv/norms.hpp"

#include <cmath>

#include "ecnv/operators.hpp"

namespace ecnv {

double l4_pow4(const SpectralScalar& q) {
  PhysicalField phys = to_physical(q);
  double sum = 0.0;
  for (std::size_t i = 0; i < phys.size(); ++i) {
    const double v2 = phys[i] * phys[i];
    sum += v2 * v2;
  }
  return sum * q.grid().cell_area();
}

double lambda_cubic_pairing(const SpectralScalar& q) {
  const Grid& g = q.grid();
  const SpectralScalar lq = fractional_laplacian(q, 1.0);
  std::vector<double> a(g.size()), b(g.size());
  g.inverse_pair(q.coeffs(), lq.coeffs(), a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * a[i] * a[i] * b[i];
  return sum * g.cell_area();
}

NormReport norms(const SpectralScalar& q, const SpectralVector& u) {
  NormReport r;
  r.q_l2_sq = sobolev_sq(q, 0.0);
  r.q_l4_4 = l4_pow4(q);
  r.q_h_half_sq = sobolev_sq(q, 0.5);
  r.q_h1_sq = sobolev_sq(q, 1.0);
  r.q_h_three_half_sq = sobolev_sq(q, 1.5);
  // The zero mode is excluded from negative powers.
  r.q_h_neg_half_sq = sobolev_sq(q, -0.5);
  r.u_l2_sq = sobolev_sq(u, 0.0);
  r.u_h1_sq = sobolev_sq(u, 1.0);
  r.u_h2_sq = sobolev_sq(u, 2.0);
  r.script_h_sq = r.q_h_neg_half_sq + r.u_l2_sq;
  r.script_v_sq = std::sqrt(r.q_l4_4) + r.u_l2_sq + r.u_h1_sq;
  return r;
}

}  // namespace ecnv
