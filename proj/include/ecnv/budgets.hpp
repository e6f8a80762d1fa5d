#pragma once

#include <optional>

#include "ecnv/dynamics.hpp"

namespace ecnv {

/// One step of a discrete Ito energy balance. lhs collects the change of the
/// functional plus the scheme's own implicit dissipation; rhs the continuum
/// drift, Ito correction (realised as the squared noise increment) and the
/// left-point martingale increment. residual = lhs - rhs.
struct BudgetRecord {
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double cumulative_residual = 0.0;
  /// <Lambda q, q^3> / ||q||_{L4}^4 of the new state; empty when q = 0.
  std::optional<double> poincare_ratio;
  /// Right-hand sides driving the H^1 bound: ||q||_{L4}^4, ||f||^2, sum ||grad g_l||^2.
  struct Drivers {
    double q_l4_4 = 0.0;
    double f_l2_sq = 0.0;
    double grad_g_sq = 0.0;
  };
  std::optional<Drivers> drivers;
};

/// d||q||^2 + 2 <L q, q> dt = 2 (Fq, q) dt + ||dWq||^2 + 2 (dWq, q),
/// with L = Lambda^alpha - eps Delta.
BudgetRecord l2_budget_q(const StepEvent& step, const Stepper& stepper);
/// d||q||_{L4}^4 + 4 <L q, q^3> dt = 4 (Fq, q^3) dt + 6 (dWq^2, q^2) + 4 (dWq, q^3).
BudgetRecord l4_budget_q(const StepEvent& step, const Stepper& stepper);
/// d||grad u||^2 + 2 ||Delta u||^2 dt = 2 (grad Fu, grad u) dt + ||grad dWu||^2 + 2 (grad dWu, grad u).
BudgetRecord h1_budget_u(const StepEvent& step, const Stepper& stepper);

enum class BudgetKind { l2_q, l4_q, h1_u };

/// Observer that evaluates the enabled budgets after every step and keeps
/// their running residual sums.
class BudgetMonitor {
 public:
  BudgetMonitor(const Stepper& stepper, bool l2_q, bool l4_q, bool h1_u);

  void observe(const StepEvent& step);
  Observer observer();

  bool enabled(BudgetKind kind) const noexcept;
  /// Latest record of an enabled budget.
  const BudgetRecord& latest(BudgetKind kind) const;
  double cumulative(BudgetKind kind) const;
  /// Smallest Poincare ratio seen so far (l4 budget only); +inf before any.
  double min_poincare_ratio() const noexcept { return min_ratio_; }

 private:
  const Stepper* stepper_;
  bool on_[3];
  BudgetRecord last_[3];
  double min_ratio_;
};

}  // namespace ecnv
