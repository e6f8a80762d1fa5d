#include <cmath>

#include "doctest.h"
#include "ecnv/error.hpp"
#include "ecnv/forcing.hpp"
#include "ecnv/operators.hpp"
#include "ecnv/philox.hpp"
#include "test_support.hpp"

using namespace ecnv;
using namespace ecnv::testing;

TEST_CASE("philox4x32-10 known-answer vectors") {
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
        PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
  CHECK(uniform_open_closed(0, 0) > 0.0);
  CHECK(uniform_open_closed(0xffffffff, 0xffffffff) == 1.0);
}

TEST_CASE("sample_increment moments at dt = 1") {
  WienerDriver driver(12345, 0);
  const std::size_t draws = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < draws / 4; ++i) {
    const NoiseIncrement inc = driver.sample_increment(4, 1.0);
    for (double w : inc.dw) {
      sum += w;
      sum_sq += w * w;
    }
  }
  const double mean = sum / draws;
  const double var = sum_sq / draws - mean * mean;
  CHECK(std::abs(mean) < 3.0 * std::pow(10.0, -2.5));
  CHECK(std::abs(var - 1.0) < 0.03);
  CHECK(driver.step_index() == draws / 4);
}

TEST_CASE("sample_increment variance passes a chi-square test at 1%") {
  const double dt = 0.01;
  WienerDriver driver(99, 3);
  const int nu = 10000;
  double stat = 0.0;
  for (int i = 0; i < nu; ++i) {
    const double w = driver.sample_increment(1, dt).dw[0];
    stat += w * w / dt;
  }
  // chi^2_nu is within 1% two-sided band: |z| < 2.5758 under the normal limit.
  const double z = (stat - nu) / std::sqrt(2.0 * nu);
  CHECK(std::abs(z) < 2.5758);
}

TEST_CASE("determinism, independence across paths, degenerate and invalid input") {
  WienerDriver a(7, 1), b(7, 1), c(7, 2);
  double cross = 0.0, na = 0.0, nc = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto ia = a.sample_increment(3, 0.1);
    const auto ib = b.sample_increment(3, 0.1);
    const auto ic = c.sample_increment(3, 0.1);
    REQUIRE(ia.dw == ib.dw);
    cross += ia.dw[0] * ic.dw[0];
    na += ia.dw[0] * ia.dw[0];
    nc += ic.dw[0] * ic.dw[0];
  }
  CHECK(std::abs(cross / std::sqrt(na * nc)) < 0.05);

  WienerDriver d(1, 0);
  CHECK(d.sample_increment(0, 0.5).dw.empty());
  CHECK_THROWS_AS(d.sample_increment(2, 0.0), InvalidParameter);
  CHECK_THROWS_AS(d.sample_increment(2, -1.0), InvalidParameter);

  // Resuming at a given step reproduces the stream.
  WienerDriver e(7, 1, 5000);
  WienerDriver f(7, 1);
  for (int i = 0; i < 5000; ++i) f.sample_increment(3, 0.1);
  CHECK(e.sample_increment(3, 0.1).dw == f.sample_increment(3, 0.1).dw);
}

namespace {

ForcingBank two_mode_bank(const Grid& g) {
  ForcingBank bank = ForcingBank::zero(g, 2);
  bank.g_tilde[0] = random_scalar(g, 1, 4);
  bank.g_tilde[1] = random_scalar(g, 2, 4);
  bank.g[0] = random_div_free(g, 3, 4);
  bank.g[1] = random_div_free(g, 4, 4);
  return bank;
}

}  // namespace

TEST_CASE("noise_fields linearity") {
  const Grid g(16);
  ForcingBank bank = two_mode_bank(g);
  bank.validate();

  const NoiseFields zero = noise_fields(bank, NoiseIncrement{{0.0, 0.0}, 0.1});
  CHECK(zero.q.max_abs() == 0.0);
  CHECK(zero.u.comp1().max_abs() == 0.0);

  ForcingBank one = ForcingBank::zero(g, 1);
  one.g_tilde[0] = bank.g_tilde[0];
  one.g[0] = bank.g[0];
  const NoiseFields unit = noise_fields(one, NoiseIncrement{{1.0}, 1.0});
  CHECK(unit.q == bank.g_tilde[0]);
  CHECK(unit.u.comp1() == bank.g[0].comp1());
  CHECK(unit.u.comp2() == bank.g[0].comp2());

  const double a = 0.37, b = -1.21;
  const NoiseFields ab = noise_fields(bank, NoiseIncrement{{a, b}, 0.1});
  SpectralScalar expect_q = a * bank.g_tilde[0] + b * bank.g_tilde[1];
  CHECK(max_abs_diff(ab.q, expect_q) < 1e-14);
  SpectralVector expect_u = a * bank.g[0] + b * bank.g[1];
  CHECK(max_abs_diff(ab.u.comp1(), expect_u.comp1()) < 1e-14);
  CHECK(ab.q.mean_zero());
  CHECK(ab.u.div_free());

  CHECK_THROWS_AS(noise_fields(bank, NoiseIncrement{{1.0}, 0.1}), InvalidParameter);
}

TEST_CASE("bank validation rejects bad fields instead of projecting them") {
  const Grid g(16);
  ForcingBank bank = two_mode_bank(g);
  bank.g[1].comp1().set_mode(1, 0, Complex(1.0, 0.0));
  CHECK_THROWS_AS(bank.validate(), InvariantViolation);

  ForcingBank bank2 = two_mode_bank(g);
  bank2.g_tilde[0].set_mode(0, 0, Complex(1.0, 0.0));
  CHECK_THROWS_AS(bank2.validate(), InvariantViolation);

  ForcingBank bank3 = two_mode_bank(g);
  bank3.f.comp1().set_mode(0, 0, Complex(0.5, 0.0));
  CHECK_THROWS_AS(bank3.validate(), InvariantViolation);
}

TEST_CASE("mollifier") {
  const Grid g(32);
  const SpectralScalar q = random_scalar(g, 5, 10);
  CHECK(mollify(q, 0.0) == q);
  SpectralScalar c = to_spectral(sample(g, [](double x, double) { return std::cos(x); }), g);
  c.pin_mean();
  const SpectralScalar mc = mollify(c, 1.0);
  CHECK(std::abs(mc.at(1, 0) - 0.5 * std::exp(-1.0)) < 1e-16);
  for (double eps : {0.0, 1e-3, 0.1, 1.0, 10.0}) {
    CHECK(sobolev_sq(mollify(q, eps), 0.0) <= sobolev_sq(q, 0.0));
    CHECK(mollify(q, eps).mean_zero());
  }
  const SpectralVector v = random_div_free(g, 6, 10);
  CHECK(mollify(v, 0.2).div_free());
  CHECK_THROWS_AS(mollify(q, -1e-3), InvalidParameter);
}
