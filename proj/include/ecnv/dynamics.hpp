#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ecnv/error.hpp"
#include "ecnv/fields.hpp"
#include "ecnv/forcing.hpp"

namespace ecnv {

struct SimParams {
  double alpha = 1.0;          // charge dissipation order, Lambda^alpha
  double eps = 0.0;            // mollifier width and extra -eps Delta q viscosity
  double dt = 1e-2;
  double t_end = 1.0;
  bool zero_potential = false; // forces Phi = 0
  bool nonlinear = true;       // false drops u.grad q, u.grad u and q R q

  /// alpha >= 1, eps >= 0, 0 < dt <= 0.1, t_end > 0.
  void validate() const;
};

struct SimState {
  SpectralScalar q;  // mean-zero charge density
  SpectralVector u;  // divergence-free velocity
  double t = 0.0;

  static SimState zero(const Grid& grid);
  /// Throws InvariantViolation if a flag is unset or a coefficient is not finite.
  void validate() const;
};

/// Explicit part of the right-hand side; the dissipation is implicit.
struct DriftEval {
  SpectralScalar fq;  // -u.grad q + Delta Phi
  SpectralVector fu;  // P(-u.grad u - q R q - q grad Phi + f)
};

class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, SimState last_good)
      : Error(ErrorCategory::blow_up, what), last_good_(std::move(last_good)) {}
  const SimState& last_good() const noexcept { return last_good_; }

 private:
  SimState last_good_;
};

/// Drift-implicit Euler-Maruyama for the electroconvection system:
///   q' = (q + dt Fq + dWq) / (1 + dt (|k|^alpha + eps |k|^2))
///   u' = (u + dt Fu + dWu) / (1 + dt |k|^2)
/// with the noise shapes mollified by J_eps. The stepper owns the mollified
/// bank and the per-mode denominators; it is immutable and may be shared
/// across threads.
class Stepper {
 public:
  Stepper(const ForcingBank& bank, const SimParams& params);

  const SimParams& params() const noexcept { return params_; }
  /// Bank as used by the scheme (noise shapes mollified when eps > 0).
  const ForcingBank& bank() const noexcept { return bank_; }
  /// Phi as seen by the dynamics (zero in zero-potential mode).
  const SpectralScalar& phi() const noexcept { return phi_; }

  DriftEval drift(const SimState& state) const;
  /// One step with a given increment; noise_out and drift_out receive the
  /// noise fields and explicit drift used.
  SimState advance(const SimState& state, const NoiseIncrement& inc,
                   NoiseFields* noise_out = nullptr, DriftEval* drift_out = nullptr) const;
  SimState step(const SimState& state, WienerDriver& driver, NoiseFields* noise_out = nullptr) const;

 private:
  ForcingBank bank_;
  SimParams params_;
  SpectralScalar phi_;
  SpectralScalar lap_phi_;
  std::vector<double> grad_phi1_, grad_phi2_;
  std::vector<double> denom_q_, denom_u_;
  // Nonzero coefficients of each noise shape (q, u1, u2); same sums as noise_fields.
  std::vector<std::array<std::vector<std::pair<std::size_t, Complex>>, 3>> noise_support_;

  bool sparse_noise_ = false;

  NoiseFields noise(const NoiseIncrement& inc) const;
};

DriftEval drift(const SimState& state, const ForcingBank& bank, const SimParams& params);
SimState step(const SimState& state, const ForcingBank& bank, WienerDriver& driver,
              const SimParams& params);

struct StepEvent {
  const SimState& prev;
  const SimState& next;
  const NoiseFields& noise;
  const DriftEval& drift;
  const NoiseIncrement& increment;
  std::uint64_t step;  // 1-based count of steps taken in this run
};

using Observer = std::function<void(const StepEvent&)>;
using IncrementSource = std::function<NoiseIncrement()>;

/// Number of steps of size dt needed to reach t_end from t0 (first t >= t_end).
std::uint64_t steps_to_reach(double t0, double t_end, double dt);

/// Steps until the first t >= params.t_end, calling each observer after every
/// step. Times are set to t0 + i dt so they do not accumulate rounding.
SimState run(const SimState& state0, const Stepper& stepper, WienerDriver& driver,
             std::span<const Observer> observers = {});
SimState run(const SimState& state0, const ForcingBank& bank, WienerDriver& driver,
             const SimParams& params, std::span<const Observer> observers = {});
/// Same, drawing increments from an arbitrary source (e.g. coarsened fine paths).
SimState run_with_source(const SimState& state0, const Stepper& stepper,
                         const IncrementSource& source, std::span<const Observer> observers = {});

/// Sum of `factor` consecutive increments of size dt/factor from the driver:
/// the coarse increment of a path refined by `factor`.
NoiseIncrement coarse_increment(WienerDriver& fine_driver, std::size_t n, double dt, int factor);

}  // namespace ecnv
