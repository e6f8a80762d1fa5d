#include "ecnv/dynamics.hpp"

#include <cmath>
#include <string>

#include "ecnv/operators.hpp"

namespace ecnv {

void SimParams::validate() const {
  if (!(alpha >= 1.0)) throw InvalidParameter("alpha must be >= 1, got " + std::to_string(alpha));
  if (!(eps >= 0.0)) throw InvalidParameter("eps must be >= 0, got " + std::to_string(eps));
  if (!(dt > 0.0) || dt > 0.1) {
    throw InvalidParameter("dt must lie in (0, 0.1], got " + std::to_string(dt));
  }
  if (!(t_end > 0.0)) throw InvalidParameter("t_end must be > 0, got " + std::to_string(t_end));
}

SimState SimState::zero(const Grid& grid) {
  return SimState{SpectralScalar(grid, true), SpectralVector(grid, true), 0.0};
}

void SimState::validate() const {
  q.assert_mean_zero("SimState");
  u.assert_div_free("SimState");
  if (!q.all_finite() || !u.all_finite()) {
    throw InvariantViolation("SimState has non-finite coefficients at t = " + std::to_string(t));
  }
}

Stepper::Stepper(const ForcingBank& bank, const SimParams& params)
    : bank_(mollify(bank, params.eps)), params_(params) {
  params_.validate();
  bank.validate();
  const Grid& g = bank.grid();
  phi_ = params_.zero_potential ? bank.phi.zeros_like(true) : bank.phi;
  phi_.pin_mean();
  lap_phi_ = laplacian(phi_);
  const SpectralVector grad = gradient(phi_);
  grad_phi1_.resize(g.size());
  grad_phi2_.resize(g.size());
  g.inverse_pair(grad.comp1().coeffs(), grad.comp2().coeffs(), grad_phi1_, grad_phi2_, true);

  denom_q_.resize(g.size());
  denom_u_.resize(g.size());
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const double lam = params_.alpha == 1.0 ? g.k_abs(idx) : std::pow(g.k_abs(idx), params_.alpha);
    denom_q_[idx] = 1.0 + params_.dt * (lam + params_.eps * g.k_sq(idx));
    denom_u_[idx] = 1.0 + params_.dt * g.k_sq(idx);
  }
  noise_support_.resize(bank_.n());
  sparse_noise_ = true;
  for (std::size_t l = 0; l < bank_.n(); ++l)
    sparse_noise_ = sparse_noise_ && bank_.g_tilde[l].mean_zero() && bank_.g[l].div_free();
  for (std::size_t l = 0; l < bank_.n(); ++l) {
    const std::span<const Complex> src[3] = {bank_.g_tilde[l].coeffs(), bank_.g[l].comp1().coeffs(),
                                             bank_.g[l].comp2().coeffs()};
    for (int c = 0; c < 3; ++c)
      for (std::size_t idx = 0; idx < g.size(); ++idx)
        if (src[c][idx] != Complex(0.0, 0.0)) noise_support_[l][c].emplace_back(idx, src[c][idx]);
  }
}

NoiseFields Stepper::noise(const NoiseIncrement& inc) const {
  // Flags of the result follow the shapes' flags; keep the dense path for odd banks.
  if (inc.dw.size() != bank_.n() || !sparse_noise_) return noise_fields(bank_, inc);
  NoiseFields out{bank_.phi.zeros_like(true), bank_.f.zeros_like(true)};
  const std::span<Complex> dst[3] = {out.q.coeffs(), out.u.comp1().coeffs(), out.u.comp2().coeffs()};
  for (std::size_t l = 0; l < bank_.n(); ++l)
    for (int c = 0; c < 3; ++c)
      for (const auto& [idx, v] : noise_support_[l][c]) dst[c][idx] += inc.dw[l] * v;
  return out;
}

DriftEval Stepper::drift(const SimState& state) const {
  state.q.assert_mean_zero("drift");
  state.u.assert_div_free("drift");
  const Grid& g = state.q.grid();
  const std::size_t size = g.size();
  const bool potential = !params_.zero_potential;
  const bool nonlinear = params_.nonlinear;

  DriftEval out{lap_phi_, bank_.f};
  if (!nonlinear && !potential) return out;

  // Physical fields on the dealias mask. The velocity self-advection is taken
  // in rotational form: P(u.grad u) = P(omega u_perp) since the remainder
  // grad(|u|^2/2) is removed by the projection.
  std::vector<double> q(size), w(size), u1(size), u2(size);
  std::vector<double> dq1(size), dq2(size), e1(size, 0.0), e2(size, 0.0);
  SpectralScalar w_hat = state.q.zeros_like(false);
  if (nonlinear) {
    const auto& a = state.u.comp1();
    const auto& b = state.u.comp2();
    for (std::size_t idx = 1; idx < size; ++idx) {
      const Complex d = g.k1(idx) * b[idx] - g.k2(idx) * a[idx];
      w_hat[idx] = Complex(-d.imag(), d.real());
    }
  }
  g.inverse_pair(state.q.coeffs(), w_hat.coeffs(), q, w, true);
  if (nonlinear) {
    g.inverse_pair(state.u.comp1().coeffs(), state.u.comp2().coeffs(), u1, u2, true);
    const SpectralVector gq = gradient(state.q);
    g.inverse_pair(gq.comp1().coeffs(), gq.comp2().coeffs(), dq1, dq2, true);
    const SpectralVector rq = riesz(state.q);
    g.inverse_pair(rq.comp1().coeffs(), rq.comp2().coeffs(), e1, e2, true);
  }
  if (potential) {
    for (std::size_t i = 0; i < size; ++i) {
      e1[i] += grad_phi1_[i];
      e2[i] += grad_phi2_[i];
    }
  }

  std::vector<double> n1(size), n2(size);
  for (std::size_t i = 0; i < size; ++i) {
    n1[i] = w[i] * u2[i] - q[i] * e1[i];
    n2[i] = -w[i] * u1[i] - q[i] * e2[i];
  }
  SpectralVector force = state.u.zeros_like(false);
  g.forward_pair(n1, n2, force.comp1().coeffs(), force.comp2().coeffs());
  force.apply_dealias();
  force += bank_.f;
  out.fu = leray_project(force);

  if (nonlinear) {
    for (std::size_t i = 0; i < size; ++i) n1[i] = u1[i] * dq1[i] + u2[i] * dq2[i];
    SpectralScalar adv = state.q.zeros_like(false);
    g.forward(n1, adv.coeffs());
    adv.apply_dealias();
    adv.pin_mean();
    out.fq -= adv;
  }
  out.fq.pin_mean();
  return out;
}

SimState Stepper::advance(const SimState& state, const NoiseIncrement& inc,
                          NoiseFields* noise_out, DriftEval* drift_out) const {
  DriftEval d = drift(state);
  NoiseFields noise = this->noise(inc);
  const double dt = params_.dt;

  SimState next{state.q.zeros_like(true), state.u.zeros_like(true), state.t + dt};
  const std::size_t size = state.q.size();
  for (std::size_t idx = 1; idx < size; ++idx) {
    next.q[idx] = (state.q[idx] + dt * d.fq[idx] + noise.q[idx]) / denom_q_[idx];
  }
  for (int c = 0; c < 2; ++c) {
    const auto& u = state.u[c];
    const auto& f = d.fu[c];
    const auto& n = noise.u[c];
    auto& out = next.u[c];
    for (std::size_t idx = 0; idx < size; ++idx) {
      out[idx] = (u[idx] + dt * f[idx] + n[idx]) / denom_u_[idx];
    }
  }
  next.u = leray_project(next.u);
  next.q.pin_mean();

  if (!next.q.all_finite() || !next.u.all_finite()) {
    throw BlowUpError("non-finite coefficient after step at t = " + std::to_string(next.t) +
                          " (dt = " + std::to_string(dt) + " is likely too large)",
                      state);
  }
  if (noise_out) *noise_out = std::move(noise);
  if (drift_out) *drift_out = std::move(d);
  return next;
}

SimState Stepper::step(const SimState& state, WienerDriver& driver, NoiseFields* noise_out) const {
  return advance(state, driver.sample_increment(bank_.n(), params_.dt), noise_out);
}

DriftEval drift(const SimState& state, const ForcingBank& bank, const SimParams& params) {
  return Stepper(bank, params).drift(state);
}

SimState step(const SimState& state, const ForcingBank& bank, WienerDriver& driver,
              const SimParams& params) {
  return Stepper(bank, params).step(state, driver);
}

std::uint64_t steps_to_reach(double t0, double t_end, double dt) {
  if (t_end <= t0) return 0;
  const double ratio = (t_end - t0) / dt;
  auto steps = static_cast<std::uint64_t>(std::ceil(ratio - 1e-9 * ratio));
  if (steps == 0) steps = 1;
  return steps;
}

SimState run_with_source(const SimState& state0, const Stepper& stepper,
                         const IncrementSource& source, std::span<const Observer> observers) {
  state0.validate();
  const double dt = stepper.params().dt;
  const std::uint64_t steps = steps_to_reach(state0.t, stepper.params().t_end, dt);
  SimState state = state0;
  NoiseFields noise;
  DriftEval drift;
  for (std::uint64_t i = 1; i <= steps; ++i) {
    const NoiseIncrement inc = source();
    SimState next = stepper.advance(state, inc, &noise, &drift);
    next.t = state0.t + static_cast<double>(i) * dt;
    const StepEvent event{state, next, noise, drift, inc, i};
    for (const auto& obs : observers) obs(event);
    state = std::move(next);
  }
  return state;
}

SimState run(const SimState& state0, const Stepper& stepper, WienerDriver& driver,
             std::span<const Observer> observers) {
  const std::size_t n = stepper.bank().n();
  const double dt = stepper.params().dt;
  return run_with_source(
      state0, stepper, [&] { return driver.sample_increment(n, dt); }, observers);
}

SimState run(const SimState& state0, const ForcingBank& bank, WienerDriver& driver,
             const SimParams& params, std::span<const Observer> observers) {
  return run(state0, Stepper(bank, params), driver, observers);
}

NoiseIncrement coarse_increment(WienerDriver& fine_driver, std::size_t n, double dt, int factor) {
  if (factor < 1) throw InvalidParameter("coarse_increment: factor must be >= 1");
  NoiseIncrement out{std::vector<double>(n, 0.0), dt};
  for (int i = 0; i < factor; ++i) {
    const NoiseIncrement fine = fine_driver.sample_increment(n, dt / factor);
    for (std::size_t l = 0; l < n; ++l) out.dw[l] += fine.dw[l];
  }
  return out;
}

}  // namespace ecnv
