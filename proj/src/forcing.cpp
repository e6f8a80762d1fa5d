#include "ecnv/forcing.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ecnv/error.hpp"
#include "ecnv/operators.hpp"
#include "ecnv/philox.hpp"

namespace ecnv {

std::vector<double> standard_normals(std::uint64_t seed, std::uint64_t path_id,
                                     std::uint64_t step_index, std::size_t count) {
  if (step_index > 0xFFFFFFFFull) {
    throw InvalidParameter("WienerDriver: step index exceeds 2^32 per path");
  }
  std::vector<double> out(count);
  const PhiloxKey key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  for (std::size_t pair = 0; 2 * pair < count; ++pair) {
    const PhiloxCounter ctr{static_cast<std::uint32_t>(pair), static_cast<std::uint32_t>(step_index),
                            static_cast<std::uint32_t>(path_id),
                            static_cast<std::uint32_t>(path_id >> 32)};
    const PhiloxCounter bits = philox4x32_10(ctr, key);
    const double u1 = uniform_open_closed(bits[0], bits[1]);
    const double u2 = uniform_open_closed(bits[2], bits[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    out[2 * pair] = radius * std::cos(angle);
    if (2 * pair + 1 < count) out[2 * pair + 1] = radius * std::sin(angle);
  }
  return out;
}

NoiseIncrement WienerDriver::sample_increment(std::size_t n, double dt) {
  if (!(dt > 0.0)) {
    throw InvalidParameter("sample_increment: dt must be > 0, got " + std::to_string(dt));
  }
  NoiseIncrement inc;
  inc.dt = dt;
  inc.dw = standard_normals(seed_, path_id_, step_index_, n);
  const double scale = std::sqrt(dt);
  for (double& w : inc.dw) w *= scale;
  ++step_index_;
  return inc;
}

ForcingBank ForcingBank::zero(const Grid& grid, std::size_t n) {
  ForcingBank bank;
  bank.phi = SpectralScalar(grid, true);
  bank.f = SpectralVector(grid, true);
  for (std::size_t l = 0; l < n; ++l) {
    bank.g_tilde.push_back(bank.phi.zeros_like(true));
    bank.g.push_back(bank.f.zeros_like(true));
  }
  return bank;
}

bool ForcingBank::phi_is_zero() const {
  for (const auto& c : phi.coeffs()) {
    if (c != Complex(0.0, 0.0)) return false;
  }
  return true;
}

namespace {

double max_wavenumber(const Grid& grid) { return grid.n() / 2.0 * std::numbers::sqrt2; }

void check_div_free(const SpectralVector& v, const std::string& name) {
  if (!v.div_free()) throw InvariantViolation(name + " is not flagged divergence-free");
  const double scale = std::max(v.comp1().max_abs(), v.comp2().max_abs()) * max_wavenumber(v.grid());
  if (v.divergence_defect() > 1e-12 * scale) {
    throw InvariantViolation(name + " is not divergence-free");
  }
}

}  // namespace

void ForcingBank::validate() const {
  if (!phi.valid() || !f.valid()) throw InvariantViolation("forcing bank is not initialised");
  if (g.size() != g_tilde.size()) {
    throw InvariantViolation("forcing bank has " + std::to_string(g_tilde.size()) +
                             " charge shapes but " + std::to_string(g.size()) + " velocity shapes");
  }
  for (std::size_t l = 0; l < g_tilde.size(); ++l) {
    const std::string idx = std::to_string(l + 1);
    g_tilde[l].assert_mean_zero(("g_tilde[" + idx + "]").c_str());
    check_div_free(g[l], "g[" + idx + "]");
  }
  check_div_free(f, "f");
  if (f.comp1()[0] != Complex(0.0, 0.0) || f.comp2()[0] != Complex(0.0, 0.0)) {
    throw InvariantViolation("f must have zero spatial average");
  }
}

ForcingBank mode_noise_bank(const Grid& grid, int kmax, double amp) {
  if (kmax < 1 || 3 * kmax >= grid.n()) throw InvalidParameter("mode_noise_bank: kmax out of range");
  std::vector<std::pair<int, int>> modes;
  for (int k2 = 0; k2 <= kmax; ++k2)
    for (int k1 = -kmax; k1 <= kmax; ++k1)
      if (k2 > 0 || k1 > 0) modes.emplace_back(k1, k2);
  ForcingBank bank = ForcingBank::zero(grid, 2 * modes.size());
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const auto [k1, k2] = modes[m];
    const double norm_k = std::hypot(double(k1), double(k2));
    for (int c = 0; c < 2; ++c) {
      // cos(k.x) has c_k = 1/2, sin(k.x) has c_k = -i/2
      const Complex v = c == 0 ? Complex(0.5 * amp, 0.0) : Complex(0.0, -0.5 * amp);
      const std::size_t l = 2 * m + c;
      bank.g_tilde[l].set_mode(k1, k2, v);
      SpectralScalar psi(grid);
      psi.set_mode(k1, k2, v / norm_k);
      bank.g[l] = perp_gradient(psi);
    }
  }
  return bank;
}

NoiseFields noise_fields(const ForcingBank& bank, const NoiseIncrement& inc) {
  if (inc.dw.size() != bank.n()) {
    throw InvalidParameter("noise_fields: increment has " + std::to_string(inc.dw.size()) +
                           " entries, bank has " + std::to_string(bank.n()));
  }
  NoiseFields out{bank.phi.zeros_like(true), bank.f.zeros_like(true)};
  for (std::size_t l = 0; l < bank.n(); ++l) {
    out.q.axpy(inc.dw[l], bank.g_tilde[l]);
    out.u.axpy(inc.dw[l], bank.g[l]);
  }
  return out;
}

SpectralScalar mollify(const SpectralScalar& field, double eps) {
  if (!(eps >= 0.0)) throw InvalidParameter("mollify: eps must be >= 0, got " + std::to_string(eps));
  SpectralScalar out = field;
  if (eps == 0.0) return out;
  const Grid& g = field.grid();
  for (std::size_t idx = 0; idx < out.size(); ++idx) out[idx] *= std::exp(-eps * g.k_sq(idx));
  return out;
}

SpectralVector mollify(const SpectralVector& field, double eps) {
  return SpectralVector(mollify(field.comp1(), eps), mollify(field.comp2(), eps), field.div_free());
}

ForcingBank mollify(const ForcingBank& bank, double eps) {
  ForcingBank out = bank;
  for (auto& gt : out.g_tilde) gt = mollify(gt, eps);
  for (auto& gv : out.g) gv = mollify(gv, eps);
  return out;
}

}  // namespace ecnv
