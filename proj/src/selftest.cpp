#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "ecnv/commands.hpp"
#include "ecnv/continuity.hpp"
#include "ecnv/io.hpp"
#include "ecnv/measure.hpp"
#include "ecnv/operators.hpp"

namespace ecnv {

namespace {

struct Check {
  std::string name;
  std::function<std::pair<bool, std::string>()> body;
};

SpectralScalar single_mode(const Grid& g, int k1, int k2, Complex c) {
  SpectralScalar f(g);
  f.set_mode(k1, k2, c);
  return f;
}

double max_diff(const SpectralScalar& a, const SpectralScalar& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

std::pair<bool, std::string> within(double err, double tol) {
  return {err <= tol, "err " + format_double(err) + " tol " + format_double(tol)};
}

std::vector<Check> operator_checks() {
  static const Grid g(32);
  const Complex c(0.3, -0.7);
  const int k1 = 3, k2 = -4;  // |k| = 5
  std::vector<Check> checks;
  checks.push_back({"fft_round_trip", [] {
    const SpectralScalar f = random_band_limited(g, 11, 10, 0.0);
    return within(max_diff(f, to_spectral(to_physical(f))), 1e-14 * f.max_abs());
  }});
  checks.push_back({"fractional_laplacian_single_mode", [=] {
    const auto f = single_mode(g, k1, k2, c);
    return within(max_diff(lambda_power(f, 1.5), single_mode(g, k1, k2, std::pow(5.0, 1.5) * c)),
                  1e-12 * std::pow(5.0, 1.5) * std::abs(c));
  }});
  checks.push_back({"inverse_lambda_single_mode", [=] {
    const auto f = single_mode(g, k1, k2, c);
    return within(max_diff(inv_lambda(f), single_mode(g, k1, k2, c / 5.0)), 1e-12 * std::abs(c));
  }});
  checks.push_back({"riesz_single_mode", [=] {
    const auto r = riesz(single_mode(g, k1, k2, c));
    const Complex i(0.0, 1.0);
    const double e = std::max(max_diff(r.comp1(), single_mode(g, k1, k2, i * (k1 / 5.0) * c)),
                              max_diff(r.comp2(), single_mode(g, k1, k2, i * (k2 / 5.0) * c)));
    return within(e, 1e-12 * std::abs(c));
  }});
  checks.push_back({"leray_gradient_and_perp", [=] {
    const auto f = single_mode(g, k1, k2, c);
    const auto grad = leray_project(gradient(f));
    const auto perp = perp_gradient(f);
    const auto kept = leray_project(perp);
    const double e = std::max({grad.comp1().max_abs(), grad.comp2().max_abs(),
                               max_diff(kept.comp1(), perp.comp1()), max_diff(kept.comp2(), perp.comp2())});
    return within(e, 1e-12 * 5.0 * std::abs(c));
  }});
  checks.push_back({"divergence_of_gradient", [=] {
    const auto f = single_mode(g, k1, k2, c);
    return within(max_diff(divergence(gradient(f)), single_mode(g, k1, k2, -25.0 * c)), 1e-12 * 25.0 * std::abs(c));
  }});
  checks.push_back({"div_riesz_equals_minus_lambda", [] {
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto q = random_band_limited(g, 100 + s, 10, 0.0);
      auto lhs = divergence(riesz(q));
      lhs += lambda_power(q, 1.0);
      worst = std::max(worst, lhs.max_abs() / lambda_power(q, 1.0).max_abs());
    }
    return within(worst, 1e-12);
  }});
  checks.push_back({"transport_cancellation", [] {
    const auto u = random_band_limited_div_free(g, 7, 6, 1.0);
    const auto q = random_band_limited(g, 8, 6, 1.0);
    const double scale = std::sqrt(sobolev_sq(u, 0.0) * sobolev_sq(q, 1.0) * sobolev_sq(q, 0.0));
    const double e = std::max(std::abs(inner(advect_scalar(u, q), q)), std::abs(inner(advect_vector(u), u)));
    return within(e, 1e-10 * scale);
  }});
  return checks;
}

// Linear OU run with single-mode noise: the pooled time average of |c_k|^2
// over the forced modes matches the AR(1)-corrected stationary variance.
std::pair<bool, std::string> ou_check() {
  const Grid g(16);
  const ForcingBank bank = mode_noise_bank(g, 2, 0.5);
  SimParams p;
  p.alpha = 1.5;
  p.dt = 0.05;
  p.t_end = 400.0;
  p.zero_potential = true;
  p.nonlinear = false;
  const Stepper stepper(bank, p);
  std::vector<std::pair<int, int>> modes;
  double oracle = 0.0;
  for (int k2 = 0; k2 <= 2; ++k2)
    for (int k1 = -2; k1 <= 2; ++k1) {
      if (k2 == 0 && k1 <= 0) continue;
      modes.emplace_back(k1, k2);
      oracle += ou_mode_variance_oracle(k1, k2, p.alpha, p.eps, OuDissipation::fractional, bank, p.dt).discrete;
      oracle += ou_mode_variance_oracle(k1, k2, p.alpha, p.eps, OuDissipation::stokes, bank, p.dt).discrete;
    }
  WienerDriver driver(2024, 0);
  SimState s = SimState::zero(g);
  double acc = 0.0;
  std::uint64_t count = 0;
  const std::uint64_t steps = steps_to_reach(0.0, p.t_end, p.dt);
  for (std::uint64_t i = 1; i <= steps; ++i) {
    s = stepper.step(s, driver);
    if (i * p.dt < 20.0) continue;
    for (const auto& [a, b] : modes)
      acc += std::norm(s.q.at(a, b)) + std::norm(s.u.comp1().at(a, b)) + std::norm(s.u.comp2().at(a, b));
    ++count;
  }
  const double measured = acc / static_cast<double>(count);
  const double rel = std::abs(measured / oracle - 1.0);
  return {rel <= 0.1, "measured " + format_double(measured) + " oracle " + format_double(oracle) +
                          " rel " + format_double(rel)};
}

}  // namespace

bool cmd_selftest(std::ostream& out) {
  auto checks = operator_checks();
  checks.push_back({"snapshot_round_trip", [] {
    const Grid g(16);
    SimState s = SimState::zero(g);
    s.q = random_band_limited(g, 3, 5, 0.0);
    s.u = random_band_limited_div_free(g, 4, 5, 0.0);
    s.t = 1.25;
    const auto bytes = encode_snapshot(s, 1.5, 9);
    const Snapshot back = decode_snapshot(bytes);
    const bool same = back.path_id == 9 && back.alpha == 1.5 && back.state.t == s.t &&
                      max_diff(back.state.q, s.q) == 0.0 && max_diff(back.state.u.comp1(), s.u.comp1()) == 0.0 &&
                      max_diff(back.state.u.comp2(), s.u.comp2()) == 0.0;
    return std::pair<bool, std::string>{same, std::to_string(bytes.size()) + " bytes"};
  }});
  checks.push_back({"ou_stationary_variance", ou_check});
  bool all = true;
  for (const auto& c : checks) {
    std::pair<bool, std::string> r;
    try {
      r = c.body();
    } catch (const std::exception& e) {
      r = {false, std::string("threw: ") + e.what()};
    }
    all = all && r.first;
    out << (r.first ? "PASS " : "FAIL ") << c.name << " (" << r.second << ")\n";
  }
  return all;
}

}  // namespace ecnv
