#include "ecnv/budgets.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "ecnv/norms.hpp"
#include "ecnv/operators.hpp"

namespace ecnv {

namespace {

constexpr double kTorusArea = 4.0 * std::numbers::pi * std::numbers::pi;

inline double re_dot(const Complex& a, const Complex& b) {
  return a.real() * b.real() + a.imag() * b.imag();
}

std::vector<double> dissipation_symbol(const Grid& g, const SimParams& p) {
  std::vector<double> sym(g.size());
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const double lam = p.alpha == 1.0 ? g.k_abs(idx) : std::pow(g.k_abs(idx), p.alpha);
    sym[idx] = lam + p.eps * g.k_sq(idx);
  }
  return sym;
}

BudgetRecord finish(double t, double lhs, double rhs) {
  BudgetRecord r;
  r.t = t;
  r.lhs = lhs;
  r.rhs = rhs;
  r.residual = lhs - rhs;
  return r;
}

}  // namespace

BudgetRecord l2_budget_q(const StepEvent& step, const Stepper& stepper) {
  const auto& q = step.prev.q;
  const auto& qn = step.next.q;
  const auto& n = step.noise.q;
  const auto& fq = step.drift.fq;
  const double dt = stepper.params().dt;
  const Grid& g = q.grid();
  const std::vector<double> sym = dissipation_symbol(g, stepper.params());

  double change = 0.0, dissip = 0.0, drift = 0.0, ito = 0.0, mart = 0.0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    change += std::norm(qn[idx]) - std::norm(q[idx]);
    dissip += sym[idx] * re_dot(qn[idx], 0.5 * (q[idx] + qn[idx]));
    drift += re_dot(fq[idx], q[idx]);
    ito += std::norm(n[idx]);
    mart += re_dot(n[idx], q[idx]);
  }
  const double lhs = kTorusArea * (change + 2.0 * dt * dissip);
  const double rhs = kTorusArea * (2.0 * dt * drift + ito + 2.0 * mart);
  return finish(step.next.t, lhs, rhs);
}

BudgetRecord l4_budget_q(const StepEvent& step, const Stepper& stepper) {
  const Grid& g = step.prev.q.grid();
  const std::size_t size = g.size();
  const double dt = stepper.params().dt;
  const std::vector<double> sym = dissipation_symbol(g, stepper.params());

  SpectralScalar lqn = step.next.q.zeros_like(true);
  for (std::size_t idx = 1; idx < size; ++idx) lqn[idx] = sym[idx] * step.next.q[idx];

  std::vector<double> q(size), qn(size), n(size), fq(size), lq(size), lam(size);
  g.inverse_pair(step.prev.q.coeffs(), step.next.q.coeffs(), q, qn);
  g.inverse_pair(step.noise.q.coeffs(), step.drift.fq.coeffs(), n, fq);
  const SpectralScalar lam_q = fractional_laplacian(step.next.q, 1.0);
  g.inverse_pair(lqn.coeffs(), lam_q.coeffs(), lq, lam);

  double change = 0.0, dissip = 0.0, drift = 0.0, ito = 0.0, mart = 0.0;
  double pairing = 0.0, l4_next = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    const double a = q[i], b = qn[i];
    const double a2 = a * a, b2 = b * b;
    change += b2 * b2 - a2 * a2;
    dissip += lq[i] * (b2 * b + b2 * a + b * a2 + a2 * a);
    drift += fq[i] * a2 * a;
    ito += n[i] * n[i] * a2;
    mart += n[i] * a2 * a;
    pairing += lam[i] * b2 * b;
    l4_next += b2 * b2;
  }
  const double w = g.cell_area();
  const double lhs = w * (change + dt * dissip);
  const double rhs = w * (4.0 * dt * drift + 6.0 * ito + 4.0 * mart);
  BudgetRecord r = finish(step.next.t, lhs, rhs);
  if (l4_next > 0.0) r.poincare_ratio = pairing / l4_next;
  return r;
}

BudgetRecord h1_budget_u(const StepEvent& step, const Stepper& stepper) {
  const Grid& g = step.prev.q.grid();
  const double dt = stepper.params().dt;
  double change = 0.0, dissip = 0.0, drift = 0.0, ito = 0.0, mart = 0.0;
  for (int c = 0; c < 2; ++c) {
    const auto& u = step.prev.u[c];
    const auto& un = step.next.u[c];
    const auto& f = step.drift.fu[c];
    const auto& n = step.noise.u[c];
    for (std::size_t idx = 1; idx < g.size(); ++idx) {
      const double k2 = g.k_sq(idx);
      change += k2 * (std::norm(un[idx]) - std::norm(u[idx]));
      dissip += k2 * k2 * re_dot(un[idx], 0.5 * (u[idx] + un[idx]));
      drift += k2 * re_dot(f[idx], u[idx]);
      ito += k2 * std::norm(n[idx]);
      mart += k2 * re_dot(n[idx], u[idx]);
    }
  }
  const double lhs = kTorusArea * (change + 2.0 * dt * dissip);
  const double rhs = kTorusArea * (2.0 * dt * drift + ito + 2.0 * mart);
  BudgetRecord r = finish(step.next.t, lhs, rhs);

  BudgetRecord::Drivers d;
  d.q_l4_4 = l4_pow4(step.prev.q);
  d.f_l2_sq = sobolev_sq(stepper.bank().f, 0.0);
  for (const auto& gl : stepper.bank().g) d.grad_g_sq += sobolev_sq(gl, 1.0);
  r.drivers = d;
  return r;
}

BudgetMonitor::BudgetMonitor(const Stepper& stepper, bool l2_q, bool l4_q, bool h1_u)
    : stepper_(&stepper), on_{l2_q, l4_q, h1_u}, min_ratio_(std::numeric_limits<double>::infinity()) {}

void BudgetMonitor::observe(const StepEvent& step) {
  auto update = [&](int i, BudgetRecord rec) {
    rec.cumulative_residual = last_[i].cumulative_residual + rec.residual;
    last_[i] = rec;
  };
  if (on_[0]) update(0, l2_budget_q(step, *stepper_));
  if (on_[1]) {
    update(1, l4_budget_q(step, *stepper_));
    if (last_[1].poincare_ratio) min_ratio_ = std::min(min_ratio_, *last_[1].poincare_ratio);
  }
  if (on_[2]) update(2, h1_budget_u(step, *stepper_));
}

Observer BudgetMonitor::observer() {
  return [this](const StepEvent& e) { observe(e); };
}

bool BudgetMonitor::enabled(BudgetKind kind) const noexcept { return on_[static_cast<int>(kind)]; }

const BudgetRecord& BudgetMonitor::latest(BudgetKind kind) const {
  return last_[static_cast<int>(kind)];
}

double BudgetMonitor::cumulative(BudgetKind kind) const {
  return last_[static_cast<int>(kind)].cumulative_residual;
}

}  // namespace ecnv
