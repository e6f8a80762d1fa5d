#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ecnv/budgets.hpp"
#include "ecnv/continuity.hpp"
#include "ecnv/moments.hpp"
#include "ecnv/norms.hpp"
#include "ecnv/operators.hpp"
#include "test_support.hpp"

using namespace ecnv;
using namespace ecnv::testing;

namespace {

struct Budgets {
  double cum[3];
  double min_ratio;
};

Budgets run_budgets(const SimState& s0, const Stepper& st, const IncrementSource& src) {
  BudgetMonitor mon(st, true, true, true);
  const Observer obs = mon.observer();
  run_with_source(s0, st, src, std::span<const Observer>(&obs, 1));
  return {{mon.cumulative(BudgetKind::l2_q), mon.cumulative(BudgetKind::l4_q),
           mon.cumulative(BudgetKind::h1_u)},
          mon.min_poincare_ratio()};
}

// RMS over paths of the cumulative residuals at dt and dt/2, each coarse
// path built from the fine one.
std::array<double, 3> halving_ratios(const ForcingBank& bank, const SimState& s0, SimParams p,
                                     int paths) {
  double ms[2][3] = {};
  for (int path = 0; path < paths; ++path) {
    for (int lev = 0; lev < 2; ++lev) {
      SimParams q = p;
      q.dt = p.dt / (1 << lev);
      const Stepper st(bank, q);
      WienerDriver fine(1234, path);
      const int factor = lev == 0 ? 2 : 1;
      const IncrementSource src = [&] { return coarse_increment(fine, bank.n(), q.dt, factor); };
      const Budgets b = run_budgets(s0, st, src);
      for (int k = 0; k < 3; ++k) ms[lev][k] += b.cum[k] * b.cum[k];
    }
  }
  return {std::sqrt(ms[0][0] / ms[1][0]), std::sqrt(ms[0][1] / ms[1][1]),
          std::sqrt(ms[0][2] / ms[1][2])};
}

}  // namespace

TEST_CASE("budgets vanish on zero dynamics") {
  const Grid g(16);
  const Stepper st(ForcingBank::zero(g, 1), SimParams{});
  WienerDriver d(1, 0);
  const IncrementSource src = [&] { return d.sample_increment(1, 0.01); };
  const Budgets b = run_budgets(SimState::zero(g), st, src);
  for (double c : b.cum) CHECK(c == 0.0);
}

TEST_CASE("deterministic decay closes the budgets") {
  const Grid g(32);
  SimState s = SimState::zero(g);
  s.q = random_scalar(g, 3, 6, true, 2.0);
  s.u = random_div_free(g, 4, 6, 2.0);
  SimParams p;
  p.dt = 1e-4;
  p.t_end = 1.0;
  p.nonlinear = false;
  const Stepper st(ForcingBank::zero(g, 1), p);
  const IncrementSource src = [] { return NoiseIncrement{{0.0}, 1e-4}; };
  const Budgets b = run_budgets(s, st, src);
  CHECK(std::abs(b.cum[0]) <= 1e-6);
  CHECK(std::abs(b.cum[1]) <= 1e-6 * l4_pow4(s.q));
  CHECK(std::abs(b.cum[2]) <= 1e-6 * sobolev_sq(s.u, 1.0));
}

TEST_CASE("linear OU charge budget residual is first order") {
  const Grid g(32);
  ForcingBank bank = noisy_bank(g, 2, 4);
  bank.phi.set_mode(1, 1, Complex(0.3, 0.1));
  SimParams p;
  p.dt = 0.01;
  p.t_end = 1.0;
  p.nonlinear = false;
  const auto r = halving_ratios(bank, SimState::zero(g), p, 32);
  CHECK(r[0] >= 1.7);
  CHECK(r[0] <= 2.4);
  CHECK(r[2] >= 1.7);
  CHECK(r[2] <= 2.4);
}

TEST_CASE("Poincare ratio of the l4 budget") {
  const Grid g(32);
  const Stepper st(ForcingBank::zero(g, 1), SimParams{});
  SimState zero = SimState::zero(g);
  SimState c = zero;
  c.q.set_mode(1, 0, Complex(0.5, 0.0));
  NoiseFields noise{zero.q, zero.u};
  DriftEval drift{zero.q, zero.u};
  NoiseIncrement inc{{0.0}, 0.01};

  const BudgetRecord one = l4_budget_q(StepEvent{zero, c, noise, drift, inc, 1}, st);
  REQUIRE(one.poincare_ratio.has_value());
  CHECK(*one.poincare_ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(l4_budget_q(StepEvent{c, zero, noise, drift, inc, 1}, st).poincare_ratio);

  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    SimState r = zero;
    r.q = random_scalar(g, seed, 1 + seed % 10, true, double(seed % 3));
    const auto rec = l4_budget_q(StepEvent{zero, r, noise, drift, inc, 1}, st);
    REQUIRE(rec.poincare_ratio.has_value());
    CHECK(*rec.poincare_ratio >= 0.0);
  }
}

TEST_CASE("h1 budget records its drivers") {
  const Grid g(16);
  ForcingBank bank = ForcingBank::zero(g, 1);
  bank.f.comp1().set_mode(0, 1, Complex(0.5, 0.0));  // f = (cos x2, 0)
  bank.g[0].comp2().set_mode(2, 0, Complex(0.5, 0.0));  // g = (0, cos 2x1)
  const Stepper st(bank, SimParams{});
  SimState s = SimState::zero(g);
  s.q.set_mode(1, 0, Complex(0.5, 0.0));
  WienerDriver d(1, 0);
  BudgetMonitor mon(st, false, false, true);
  NoiseFields noise;
  DriftEval drift;
  const NoiseIncrement inc = d.sample_increment(1, 0.01);
  const SimState next = st.advance(s, inc, &noise, &drift);
  mon.observe(StepEvent{s, next, noise, drift, inc, 1});
  const auto& rec = mon.latest(BudgetKind::h1_u);
  REQUIRE(rec.drivers.has_value());
  const double pi2 = kPi * kPi;
  CHECK(rec.drivers->q_l4_4 == doctest::Approx(1.5 * pi2));
  CHECK(rec.drivers->f_l2_sq == doctest::Approx(2 * pi2));
  CHECK(rec.drivers->grad_g_sq == doctest::Approx(8 * pi2));
  CHECK(std::isfinite(rec.residual));
}

TEST_CASE("Gronwall trace: degenerate cases") {
  const Grid g(16);
  ForcingBank bank = noisy_bank(g, 1, 3);
  SimParams p;
  p.t_end = 0.5;
  const Stepper st(bank, p);
  SimState a = SimState::zero(g);
  a.q = random_scalar(g, 1, 3, true, 2.0);

  WienerDriver d1(5, 0);
  const GronwallResult same = gronwall_continuity(a, a, st, d1, 1.0);
  CHECK(same.violations == 0);
  for (const auto& row : same.trace) CHECK(row.h_dist_sq == 0.0);

  // c0 = 0: the bound is h(0); the perturbation grows through the forcing of
  // u by q, so violations appear.
  SimState b = a;
  b.q.set_mode(1, 0, b.q.at(1, 0) + Complex(1e-3, 0.0));
  WienerDriver d2(5, 0);
  const GronwallResult flat = gronwall_continuity(a, b, st, d2, 0.0);
  for (const auto& row : flat.trace) CHECK(row.bound == flat.trace.front().h_dist_sq);
  double prev = 0.0;
  for (const auto& row : flat.trace) {
    CHECK(row.r_cum >= prev);
    prev = row.r_cum;
  }
  CHECK(flat.critical_c0 >= 0.0);
  CHECK(calibrate_c0(flat, 2.0) == doctest::Approx(2.0 * flat.critical_c0));
}

TEST_CASE("Gronwall bound with calibrated c0 and linear response") {
  const Grid g(32);
  ForcingBank bank = noisy_bank(g, 2, 3);
  for (auto& gl : bank.g_tilde) gl *= 0.2;
  for (auto& gl : bank.g) gl *= 0.2;
  bank.phi.set_mode(1, 1, Complex(0.1, 0.0));
  SimParams p;
  p.t_end = 1.0;
  const Stepper st(bank, p);
  SimState a = SimState::zero(g);
  a.q = 0.2 * random_scalar(g, 11, 4, true, 2.0);
  a.u = 0.2 * random_div_free(g, 12, 4, 2.0);
  auto perturbed = [&](double size) {
    SimState b = a;
    b.q.set_mode(2, 1, b.q.at(2, 1) + Complex(size, 0.0));
    b.u.axpy(size, random_div_free(g, 13, 2, 0.0));
    return b;
  };

  WienerDriver pilot_driver(100, 0);
  const GronwallResult pilot = gronwall_continuity(a, perturbed(1e-6), st, pilot_driver, 0.0);
  const double c0 = calibrate_c0(pilot);
  WienerDriver check_driver(101, 0);
  const GronwallResult checked = gronwall_continuity(a, perturbed(1e-6), st, check_driver, c0);
  CHECK(checked.violations == 0);

  WienerDriver d1(102, 0), d2(102, 0);
  const GronwallResult small = gronwall_continuity(a, perturbed(1e-6), st, d1, c0, 10);
  const GronwallResult twice = gronwall_continuity(a, perturbed(2e-6), st, d2, c0, 10);
  REQUIRE(small.trace.size() == twice.trace.size());
  for (std::size_t i = 0; i < small.trace.size(); ++i) {
    const double ratio = std::sqrt(twice.trace[i].h_dist_sq / small.trace[i].h_dist_sq);
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.05));
  }
}

TEST_CASE("commutator ratio") {
  const Grid g(32);
  SpectralVector shear(g, true);
  shear.comp1().set_mode(0, 1, Complex(0.0, -0.5));  // sin x2
  SpectralScalar rho(g, true);
  rho.set_mode(1, 0, Complex(0.0, -0.5));  // sin x1
  const auto r = commutator_ratio(shear, rho);
  REQUIRE(r.has_value());
  CHECK(std::isfinite(*r));
  // v.grad rho = sin x2 cos x1 and Lambda^{-1/2} rho = rho on |k| = 1, so the
  // commutator is (1 - 2^{-1/4}) sin x2 cos x1; ||Delta v|| = sqrt(2) pi, ||rho|| = sqrt(2) pi,
  // ||sin x2 cos x1|| = pi.
  CHECK(*r == doctest::Approx((1.0 - std::pow(2.0, -0.25)) / (2.0 * kPi)).epsilon(1e-12));

  CHECK_FALSE(commutator_ratio(SpectralVector(g, true), rho).has_value());
  CHECK_FALSE(commutator_ratio(shear, SpectralScalar(g, true)).has_value());

  const CommutatorCorpus c32 = commutator_corpus(Grid(32), 100, 7, 5);
  const CommutatorCorpus c64 = commutator_corpus(Grid(64), 100, 7, 5);
  REQUIRE(c32.ratios.size() == 100);
  CHECK(c64.max_ratio == doctest::Approx(c32.max_ratio).epsilon(0.1));
  for (double x : c64.ratios) CHECK(x <= 1.1 * c32.max_ratio);
}

TEST_CASE("Ladyzhenskaya ratio stays below 2") {
  const Grid g(32);
  CHECK_FALSE(ladyzhenskaya_ratio(SpectralScalar(g, true)).has_value());
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto r = ladyzhenskaya_ratio(random_band_limited(g, seed, 1 + seed % 10, double(seed % 3)));
    REQUIRE(r.has_value());
    CHECK(*r <= 2.0);
  }
}

TEST_CASE("band-limited generator is grid independent") {
  const auto a = random_band_limited(Grid(32), 9, 5);
  const auto b = random_band_limited(Grid(64), 9, 5);
  for (int k1 = -5; k1 <= 5; ++k1)
    for (int k2 = -5; k2 <= 5; ++k2) CHECK(a.at(k1, k2) == b.at(k1, k2));
  const auto v = random_band_limited_div_free(Grid(32), 9, 5);
  CHECK(v.divergence_defect() < 1e-14);
  CHECK_THROWS_AS(random_band_limited(Grid(16), 1, 8), InvalidParameter);
}

TEST_CASE("moment tracker: zero forcing and monotonicity") {
  const Grid g(16);
  SimParams p;
  p.t_end = 1.0;
  {
    const Stepper st(ForcingBank::zero(g, 1), p);
    MomentTracker tr(10);
    tr.start(SimState::zero(g));
    WienerDriver d(1, 0);
    const Observer obs = tr.observer();
    run(SimState::zero(g), st, d, std::span<const Observer>(&obs, 1));
    for (double v : tr.sups()) CHECK(v == 0.0);
    for (double v : tr.integrals()) CHECK(v == 0.0);
    const MomentReport rep = moment_report({tr}, 1.0);
    for (const auto& q : rep.integrals) CHECK(q.mean == 0.0);
  }
  const Stepper st(noisy_bank(g, 2, 3), p);
  MomentTracker tr(1);
  tr.start(SimState::zero(g));
  WienerDriver d(2, 0);
  const Observer obs = tr.observer();
  run(SimState::zero(g), st, d, std::span<const Observer>(&obs, 1));
  REQUIRE(tr.samples().size() == 101);
  for (std::size_t j = 1; j < tr.samples().size(); ++j) {
    for (int i = 0; i < MomentTracker::kSupCount; ++i)
      CHECK(tr.samples()[j].sups[i] >= tr.samples()[j - 1].sups[i]);
    for (int i = 0; i < MomentTracker::kIntegralCount; ++i)
      CHECK(tr.samples()[j].integrals[i] >= tr.samples()[j - 1].integrals[i]);
  }
}

TEST_CASE("least-squares slope") {
  CHECK(ls_slope({0, 1, 2, 3}, {1, 3, 5, 7}) == doctest::Approx(2.0));
  CHECK(ls_slope({1}, {1}) == 0.0);
}

TEST_CASE("linear OU: slope of int ||Lambda^{1/2} q||^2 matches the AR(1) variance") {
  const Grid g(16);
  // Flat spectrum on |k_i| <= 4 so that short-memory modes dominate.
  ForcingBank bank = ForcingBank::zero(g, 2);
  for (std::size_t l = 0; l < 2; ++l) bank.g_tilde[l] = random_scalar(g, 30 + l, 4, true, 0.0);
  SimParams p;
  p.dt = 0.01;
  p.t_end = 50.0;
  p.nonlinear = false;
  p.zero_potential = true;

  // Stationary E|q_k|^2 = sum_l |g_l(k)|^2 / (2 lambda + dt lambda^2), lambda = |k|.
  double expected = 0.0;
  for (int k1 = -g.n() / 2; k1 < g.n() / 2; ++k1)
    for (int k2 = -g.n() / 2; k2 < g.n() / 2; ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      const double lam = std::hypot(k1, k2);
      double s2 = 0.0;
      for (const auto& gl : bank.g_tilde) s2 += std::norm(gl.at(k1, k2));
      expected += 4.0 * kPi * kPi * lam * s2 / (2.0 * lam + p.dt * lam * lam);
    }

  // Per-path slopes are independent; compare their mean to the oracle within
  // three standard errors.
  const Stepper st(bank, p);
  const int paths = 64;
  std::vector<MomentTracker> ens;
  std::vector<double> slopes;
  for (int path = 0; path < paths; ++path) {
    MomentTracker tr(100);
    tr.start(SimState::zero(g));
    WienerDriver d(77, path);
    const Observer obs = tr.observer();
    run(SimState::zero(g), st, d, std::span<const Observer>(&obs, 1));
    slopes.push_back(moment_report({tr}, p.t_end).integrals[MomentTracker::int_q_h_half_sq].slope);
    ens.push_back(std::move(tr));
  }
  double mean = 0.0, var = 0.0;
  for (double x : slopes) mean += x / paths;
  for (double x : slopes) var += (x - mean) * (x - mean) / (paths - 1);
  const MomentReport rep = moment_report(ens, p.t_end);
  CHECK(rep.integrals[MomentTracker::int_q_h_half_sq].slope == doctest::Approx(mean));
  CHECK(std::abs(mean - expected) <= 3.0 * std::sqrt(var / paths));
  CHECK(std::abs(mean - expected) <= 0.1 * expected);
  CHECK(rep.sups_finite);
}
