#pragma once

#include <cstdint>
#include <vector>

#include "ecnv/fields.hpp"

namespace ecnv {

/// Brownian increments over one step: dw[l] ~ N(0, dt).
struct NoiseIncrement {
  std::vector<double> dw;
  double dt = 0.0;
};

/// Reproducible source of the n Brownian increments. Draw s of path p under
/// seed S is a pure function of (S, p, s): Philox4x32-10 with key S and
/// counter (pair index, s, p_lo, p_hi), mapped through Box-Muller.
class WienerDriver {
 public:
  WienerDriver(std::uint64_t seed, std::uint64_t path_id, std::uint64_t step_index = 0)
      : seed_(seed), path_id_(path_id), step_index_(step_index) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t path_id() const noexcept { return path_id_; }
  std::uint64_t step_index() const noexcept { return step_index_; }

  /// Draws n independent N(0, dt) values and advances the step index.
  NoiseIncrement sample_increment(std::size_t n, double dt);

 private:
  std::uint64_t seed_;
  std::uint64_t path_id_;
  std::uint64_t step_index_;
};

/// count standard normals for (seed, path, step).
std::vector<double> standard_normals(std::uint64_t seed, std::uint64_t path_id,
                                     std::uint64_t step_index, std::size_t count);

/// Time-independent data of the model: the noise shapes g~_l (charge) and
/// g_l (velocity) sharing W_l, the potential Phi and the body force f.
struct ForcingBank {
  std::vector<SpectralScalar> g_tilde;
  std::vector<SpectralVector> g;
  SpectralScalar phi;
  SpectralVector f;

  /// All-zero data with n noise processes.
  static ForcingBank zero(const Grid& grid, std::size_t n = 0);

  std::size_t n() const noexcept { return g_tilde.size(); }
  const Grid& grid() const { return phi.grid(); }
  bool phi_is_zero() const;

  /// Throws InvariantViolation naming the first offending field.
  void validate() const;
};

/// Two noise processes per half-plane mode 0 < max(|k1|, |k2|) <= kmax: one
/// for amp cos(k.x) and one for amp sin(k.x), acting on the charge and (as a
/// divergence-free shear of the same amplitude) on the velocity. Throws
/// InvalidParameter unless 1 <= kmax and the modes survive dealiasing.
ForcingBank mode_noise_bank(const Grid& grid, int kmax, double amp);

struct NoiseFields {
  SpectralScalar q;
  SpectralVector u;
};

/// (sum_l g~_l dw_l, sum_l g_l dw_l).
NoiseFields noise_fields(const ForcingBank& bank, const NoiseIncrement& inc);

/// Heat-kernel mollifier J_eps: c(k) -> exp(-eps |k|^2) c(k).
SpectralScalar mollify(const SpectralScalar& field, double eps);
SpectralVector mollify(const SpectralVector& field, double eps);
/// Bank with every noise shape mollified; Phi and f unchanged.
ForcingBank mollify(const ForcingBank& bank, double eps);

}  // namespace ecnv
