#include <cmath>

#include "doctest.h"
#include "ecnv/dynamics.hpp"
#include "ecnv/norms.hpp"
#include "ecnv/operators.hpp"
#include "test_support.hpp"

using namespace ecnv;
using namespace ecnv::testing;

namespace {

SpectralScalar cos_x1(const Grid& g, double amp = 1.0) {
  SpectralScalar q(g, true);
  q.set_mode(1, 0, Complex(0.5 * amp, 0.0));
  return q;
}

double max_diff(const SimState& a, const SimState& b) {
  return std::max({max_abs_diff(a.q, b.q), max_abs_diff(a.u.comp1(), b.u.comp1()),
                   max_abs_diff(a.u.comp2(), b.u.comp2())});
}

}  // namespace

TEST_CASE("drift vanishes on the zero state with zero data") {
  const Grid g(16);
  const DriftEval d = drift(SimState::zero(g), ForcingBank::zero(g), SimParams{});
  CHECK(d.fq.max_abs() == 0.0);
  CHECK(d.fu.comp1().max_abs() == 0.0);
  CHECK(d.fu.comp2().max_abs() == 0.0);
  CHECK(d.fq.mean_zero());
  CHECK(d.fu.div_free());
}

TEST_CASE("q = -Lambda Phi, u = 0 is a steady state") {
  const Grid g(32);
  ForcingBank bank = ForcingBank::zero(g);
  bank.phi = cos_x1(g);
  SimState s = SimState::zero(g);
  s.q = -1.0 * fractional_laplacian(bank.phi, 1.0);

  SimParams p;
  p.dt = 1e-3;
  const DriftEval d = drift(s, bank, p);
  CHECK(d.fu.comp1().max_abs() < 1e-15);
  CHECK(d.fu.comp2().max_abs() < 1e-15);
  // Delta Phi - Lambda q = 0.
  CHECK(max_abs_diff(d.fq, fractional_laplacian(s.q, 1.0)) < 1e-15);

  const Stepper stepper(bank, p);
  WienerDriver driver(1, 0);
  SimState cur = s;
  for (int i = 0; i < 100; ++i) {
    SimState next = stepper.step(cur, driver);
    CHECK(max_diff(next, cur) < 1e-12);
    cur = std::move(next);
  }
}

TEST_CASE("shear flow has no self-advection") {
  const Grid g(32);
  SimState s = SimState::zero(g);
  s.u.comp1().set_mode(0, 1, Complex(0.0, -0.5));  // sin x2
  const DriftEval d = drift(s, ForcingBank::zero(g), SimParams{});
  CHECK(d.fq.max_abs() < 1e-15);
  CHECK(d.fu.comp1().max_abs() < 1e-15);
  CHECK(d.fu.comp2().max_abs() < 1e-15);
}

TEST_CASE("zero state with zero bank stays zero") {
  const Grid g(16);
  SimParams p;
  p.t_end = 0.5;
  WienerDriver driver(3, 0);
  const SimState end = run(SimState::zero(g), ForcingBank::zero(g, 2), driver, p);
  CHECK(end.q.max_abs() == 0.0);
  CHECK(end.u.comp1().max_abs() == 0.0);
  CHECK(end.t == doctest::Approx(0.5));
  CHECK(driver.step_index() == 50);
}

TEST_CASE("run: zero-length horizon, determinism, composition") {
  const Grid g(16);
  const ForcingBank bank = noisy_bank(g);
  SimParams p;
  p.dt = 0.01;
  SimState s0 = SimState::zero(g);
  s0.q = cos_x1(g);
  {
    SimParams q = p;
    q.t_end = 1.0;
    SimState at = s0;
    at.t = 1.0;
    WienerDriver d(1, 0);
    const SimState same = run(at, bank, d, q);
    CHECK(same.q == at.q);
    CHECK(same.t == 1.0);
    CHECK(d.step_index() == 0);
  }

  p.t_end = 0.1;
  WienerDriver d1(42, 0), d2(42, 0);
  const SimState a = run(s0, bank, d1, p);
  const SimState b = run(s0, bank, d2, p);
  CHECK(a.q == b.q);
  CHECK(a.u == b.u);

  const Stepper stepper(bank, p);
  WienerDriver d3(42, 0);
  SimState manual = s0;
  for (int i = 0; i < 10; ++i) manual = stepper.step(manual, d3);
  CHECK(manual.q == a.q);
  CHECK(manual.u == a.u);
}

TEST_CASE("flags hold after every step and observers see every step") {
  const Grid g(32);
  ForcingBank bank = noisy_bank(g, 3);
  bank.phi = random_scalar(g, 77, 2, true, 2.0);
  SimParams p;
  p.dt = 5e-3;
  p.t_end = 0.5;
  int calls = 0;
  double worst = 0.0;
  std::vector<Observer> obs{[&](const StepEvent& e) {
    ++calls;
    CHECK(e.next.q[0] == Complex(0.0, 0.0));
    CHECK(e.next.q.mean_zero());
    CHECK(e.next.u.div_free());
    const double scale = std::sqrt(sobolev_sq(e.next.u, 0.0)) + 1e-300;
    worst = std::max(worst, e.next.u.divergence_defect() / scale);
    CHECK(e.step == static_cast<std::uint64_t>(calls));
  }};
  WienerDriver d(5, 0);
  run(SimState::zero(g), bank, d, p, obs);
  CHECK(calls == 100);
  CHECK(worst <= 1e-12);
}

TEST_CASE("deterministic H-energy is non-increasing") {
  const Grid g(32);
  SimState s = SimState::zero(g);
  s.q = random_scalar(g, 31, 6, true, 2.0);
  s.u = random_div_free(g, 32, 6, 2.0);
  SimParams p;
  p.dt = 1e-3;
  p.t_end = 0.5;
  double prev = norms(s.q, s.u).script_h_sq;
  int violations = 0;
  std::vector<Observer> obs{[&](const StepEvent& e) {
    const double h = norms(e.next.q, e.next.u).script_h_sq;
    if (h > prev) ++violations;
    prev = h;
  }};
  WienerDriver d(1, 0);
  run(s, ForcingBank::zero(g, 1), d, p, obs);
  CHECK(violations == 0);
}

TEST_CASE("linear step is weakly first order against the exact OU step") {
  // One mode of q: dq = -lambda q dt + sigma dW. Scheme mean q/(1+lambda dt),
  // scheme variance sigma^2 dt/(1+lambda dt)^2.
  const Grid g(16);
  ForcingBank bank = ForcingBank::zero(g, 1);
  bank.g_tilde[0].set_mode(2, 1, Complex(0.3, 0.0));
  const double lambda = std::sqrt(5.0);
  const double sigma = 0.3;
  auto errors = [&](double dt) {
    SimParams p;
    p.dt = dt;
    p.nonlinear = false;
    const Stepper st(bank, p);
    SimState s = SimState::zero(g);
    s.q.set_mode(2, 1, Complex(1.0, 0.0));
    const SimState mean = st.advance(s, NoiseIncrement{{0.0}, dt});
    const SimState kick = st.advance(SimState::zero(g), NoiseIncrement{{std::sqrt(dt)}, dt});
    const double m_err = std::abs(mean.q.at(2, 1).real() - std::exp(-lambda * dt));
    const double var = std::norm(kick.q.at(2, 1));
    const double exact_var = sigma * sigma * (1 - std::exp(-2 * lambda * dt)) / (2 * lambda);
    return std::pair{m_err, std::abs(var - exact_var)};
  };
  const auto [m1, v1] = errors(0.02);
  const auto [m2, v2] = errors(0.01);
  CHECK(m1 / m2 == doctest::Approx(4.0).epsilon(0.1));
  CHECK(v1 / v2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("q -> -q symmetry with shared noise and Phi = 0") {
  const Grid g(32);
  ForcingBank bank = noisy_bank(g);
  ForcingBank flipped = bank;
  for (auto& gt : flipped.g_tilde) gt *= -1.0;
  SimState s = SimState::zero(g);
  s.q = random_scalar(g, 40, 5, true, 2.0);
  s.u = random_div_free(g, 41, 5, 2.0);
  SimState sf = s;
  sf.q *= -1.0;
  SimParams p;
  p.dt = 1e-2;
  p.t_end = 1.0;
  WienerDriver d1(9, 0), d2(9, 0);
  const SimState a = run(s, bank, d1, p);
  const SimState b = run(sf, flipped, d2, p);
  CHECK(max_abs_diff(a.q, -1.0 * b.q) < 1e-10);
  CHECK(max_abs_diff(a.u.comp1(), b.u.comp1()) < 1e-10);
  CHECK(max_abs_diff(a.u.comp2(), b.u.comp2()) < 1e-10);
}

TEST_CASE("mollified system damps high modes in both noise and dissipation") {
  const Grid g(16);
  ForcingBank bank = ForcingBank::zero(g, 1);
  bank.g_tilde[0].set_mode(3, 0, Complex(1.0, 0.0));
  SimParams p;
  p.dt = 0.01;
  p.eps = 0.1;
  p.nonlinear = false;
  const Stepper st(bank, p);
  NoiseFields noise;
  const SimState next = st.advance(SimState::zero(g), NoiseIncrement{{1.0}, 0.01}, &noise);
  CHECK(noise.q.at(3, 0).real() == doctest::Approx(std::exp(-0.9)));
  CHECK(next.q.at(3, 0).real() ==
        doctest::Approx(std::exp(-0.9) / (1.0 + 0.01 * (3.0 + 0.1 * 9.0))));
}

TEST_CASE("parameter validation and blow-up") {
  const Grid g(16);
  SimParams p;
  p.alpha = 0.9;
  CHECK_THROWS_AS(p.validate(), InvalidParameter);
  p = SimParams{};
  p.dt = 0.2;
  CHECK_THROWS_AS(p.validate(), InvalidParameter);
  p = SimParams{};
  p.eps = -1;
  CHECK_THROWS_AS(p.validate(), InvalidParameter);

  ForcingBank bank = ForcingBank::zero(g, 1);
  bank.g_tilde[0].set_mode(1, 0, Complex(1e308, 0.0));
  SimParams ok;
  const Stepper st(bank, ok);
  SimState s = SimState::zero(g);
  CHECK_THROWS_AS(st.advance(s, NoiseIncrement{{1e10}, ok.dt}), BlowUpError);
  try {
    st.advance(s, NoiseIncrement{{1e10}, ok.dt});
  } catch (const BlowUpError& e) {
    CHECK(e.category() == ErrorCategory::blow_up);
    CHECK(e.last_good().q.max_abs() == 0.0);
  }
}

TEST_CASE("coarse increments sum the fine path") {
  WienerDriver fine(4, 2), fine2(4, 2);
  const NoiseIncrement c = coarse_increment(fine, 3, 0.02, 2);
  const NoiseIncrement a = fine2.sample_increment(3, 0.01);
  const NoiseIncrement b = fine2.sample_increment(3, 0.01);
  for (int l = 0; l < 3; ++l) CHECK(c.dw[l] == a.dw[l] + b.dw[l]);
  CHECK(c.dt == 0.02);
  CHECK(steps_to_reach(0.0, 1.0, 1e-3) == 1000);
  CHECK(steps_to_reach(0.0, 0.0, 1e-3) == 0);
  CHECK(steps_to_reach(0.0, 1.0005, 1e-3) == 1001);
}
