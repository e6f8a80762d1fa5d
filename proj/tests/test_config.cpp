#include <doctest.h>

#include <string>

#include "ecnv/config.hpp"
#include "ecnv/operators.hpp"
#include "test_support.hpp"

using namespace ecnv;
using namespace ecnv::testing;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text, "cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal config applies defaults") {
  const RunConfig c = parse_config_text("[grid]\nn = 16\n");
  CHECK(c.n == 16);
  CHECK(c.params.alpha == 1.0);
  CHECK(c.params.dt == 1e-2);
  CHECK(c.params.t_end == 1.0);
  CHECK_FALSE(c.params.zero_potential);
  CHECK(c.paths == 1);
  CHECK(c.seed == 0);
  CHECK(c.noise.empty());
  CHECK(c.out_dir == "out");
  CHECK(c.sample_every == 1);
  CHECK(c.diagnostics.l2_q);
  CHECK(c.measure.feller_offsets.size() == 3);
  CHECK(parse_config_text("").n == 32);
}

TEST_CASE("golden config parses to the pinned fingerprint") {
  const RunConfig c = parse_config(std::string(ECNV_SOURCE_DIR) + "/configs/golden.ini");
  CHECK(c.paths == 4);
  CHECK(c.seed == 42);
  CHECK(c.noise.size() == 2);
  CHECK(c.sample_every == 10);
  // FNV-1a 64 of the canonical text, cross-checked outside the library when frozen.
  CHECK(fingerprint(c) == 0xcc516c528a5c15f5ULL);
}

TEST_CASE("fingerprint ignores layout and output location, not values") {
  const std::string base = "[grid]\nn = 16\n[time]\ndt = 0.02\n";
  const auto a = fingerprint(parse_config_text(base));
  CHECK(fingerprint(parse_config_text("# comment\n[grid]\n  n=16   ; trailing\n\n[time]\ndt=0.02\n")) == a);
  CHECK(fingerprint(parse_config_text(base + "[output]\ndir = elsewhere\n")) == a);
  CHECK(fingerprint(parse_config_text("[grid]\nn = 16\n[time]\ndt = 0.0200000001\n")) != a);
  CHECK(fingerprint(parse_config_text(base + "[rng]\nseed = 1\n")) != a);
}

TEST_CASE("config errors carry source and line") {
  CHECK(error_of("[grid]\nn = 16\n[bogus]\n") == "cfg:3: unknown section [bogus]");
  CHECK(error_of("[grid]\nnn = 16\n") == "cfg:2: unknown key 'nn' in [grid]");
  CHECK(error_of("[time]\ndt = 0.01\ndt = 0.02\n").starts_with("cfg:3: duplicate key 'dt'"));
  CHECK(error_of("[time]\ndt = fast\n").starts_with("cfg:2: expected a number"));
  CHECK(error_of("[grid]\nn = 15\n").starts_with("cfg:2:"));
  CHECK(error_of("[grid]\nn = 6\n").starts_with("cfg:2:"));
  CHECK(error_of("n = 16\n").starts_with("cfg:1:"));
  CHECK(error_of("[ensemble]\npaths = 0\n").starts_with("cfg:2:"));
  CHECK(error_of("[initial]\nq = 0 0 1 0\n").starts_with("cfg:2: mode (0, 0)"));
  CHECK(error_of("[initial]\nq = 1 0 1\n").starts_with("cfg:2: mode entry"));
  CHECK(error_of("[physics]\nflag = yes\n").starts_with("cfg:2: unknown key"));
  CHECK(error_of("[physics]\nzero_potential = maybe\n").starts_with("cfg:2:"));
  CHECK(error_of("[measure]\nobservable = nonsense 1\n").starts_with("cfg:2:"));
  CHECK(error_of("[time]\ndt = 0.5\n").starts_with("cfg:"));
  CHECK(error_of("[noise.1]\ng_tilde = 1 0 1 0\n").find("[noise.0]") != std::string::npos);
  CHECK(error_of("[grid]\nn = 16\n[noise_modes]\nkmax = 6\n").starts_with("cfg:4:"));
  CHECK_THROWS_AS(parse_config("/definitely/not/here.ini"), ConfigError);
}

TEST_CASE("velocity data that is not divergence-free is rejected naming the mode") {
  const std::string msg = error_of("[grid]\nn = 16\n[noise.0]\ng_tilde = 1 1 1 0\ng1 = 2 1 0.5 0\n");
  CHECK(msg.starts_with("cfg:5:"));
  CHECK(msg.find("(2, 1)") != std::string::npos);
  CHECK(msg.find("noise.0.g") != std::string::npos);

  const std::string f = error_of("[forcing]\nf2 = 0 3 1 0\n");
  CHECK(f.starts_with("cfg:2:"));
  CHECK(f.find("(0, 3)") != std::string::npos);

  // A shear along the flow direction is divergence-free and accepted.
  CHECK(error_of("[forcing]\nf1 = 0 3 1 0\nf2 = 2 0 0 1\n").empty());
  CHECK(error_of("[initial]\nq = 20 0 1 0\n").find("dealias") != std::string::npos);
}

TEST_CASE("mode entries reconstruct the physical field") {
  const RunConfig c = parse_config_text(
      "[grid]\nn = 16\n[initial]\nq = 1 2 0.5 -0.25\nq = 3 0 0 1.5\nu_psi = 1 1 2 0\n");
  const Grid g(16);
  const SimState s = build_initial(c, g);
  const auto expected = sample(g, [](double x, double y) {
    return 0.5 * std::cos(x + 2 * y) - 0.25 * std::sin(x + 2 * y) + 1.5 * std::sin(3 * x);
  });
  const auto got = to_physical(s.q);
  CHECK(max_abs_diff(got.values(), expected) < 1e-14);
  // psi = 2 cos(x + y): u = (-d2 psi, d1 psi) = (2 sin(x + y), -2 sin(x + y))
  const auto [u1, u2] = to_physical(s.u);
  const auto su = sample(g, [](double x, double y) { return 2 * std::sin(x + y); });
  CHECK(max_abs_diff(u1.values(), su) < 1e-14);
  for (std::size_t i = 0; i < su.size(); ++i) CHECK(u2.values()[i] == doctest::Approx(-su[i]).epsilon(1e-14));
}

TEST_CASE("noise_modes section appends two shapes per mode") {
  const RunConfig c =
      parse_config_text("[grid]\nn = 16\n[noise.0]\ng_tilde = 1 0 1 0\n[noise_modes]\nkmax = 2\namp = 0.5\n");
  const ForcingBank bank = build_bank(c, Grid(16));
  CHECK(bank.n() == 1 + 24);
  CHECK(bank.g_tilde[1].at(1, 0) == Complex(0.25, 0.0));
  CHECK(bank.g_tilde[2].at(1, 0) == Complex(0.0, -0.25));
  CHECK(error_of("[noise_modes]\namp = 0.5\n").starts_with("cfg:2:"));
}
