#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ecnv/dynamics.hpp"
#include "ecnv/norms.hpp"
#include "ecnv/observables.hpp"

namespace ecnv {

/// Throws ConfigError unless the stepper runs in zero-potential mode: the
/// invariant-measure constructions are only meaningful there.
void require_measure_regime(const Stepper& stepper);

/// Running (1/T) int_{t_burn}^{t_burn + T} h(state) dt by the left rectangle
/// rule, together with the same average of ||(q, u)||_H^2 for the growth bound.
class TimeAverage {
 public:
  TimeAverage(Observable observable, double t_burn);

  /// integral += h(state) dt; elapsed += dt. Throws InvalidParameter if state.t < t_burn.
  void accumulate(const SimState& state, double dt);
  /// Accumulates the left state of every step that starts at or after t_burn.
  Observer observer();
  /// Pools another accumulator of the same observable (associative and commutative).
  void merge(const TimeAverage& other);

  double value() const;  // integral / elapsed; 0 before any accumulation
  double elapsed() const noexcept { return elapsed_; }
  double integral() const noexcept { return integral_; }
  double h_norm_average() const;
  /// max(1, M) (1 + averaged ||(q, u)||_H^2); |value()| never exceeds it.
  double growth_bound() const;
  const Observable& observable() const noexcept { return obs_; }
  double t_burn() const noexcept { return t_burn_; }

 private:
  Observable obs_;
  double t_burn_;
  double integral_ = 0.0;
  double h_integral_ = 0.0;
  double elapsed_ = 0.0;
};

enum class OuDissipation { fractional, stokes };

struct OuModeVariance {
  double continuum = 0.0;   // sum_l |g_l(k)|^2 / (2 lambda)
  double ar1_factor = 1.0;  // 1 / (1 + dt lambda / 2): the drift-implicit scheme's stationary bias
  double discrete = 0.0;    // continuum * ar1_factor
  double lambda = 0.0;
};

/// Stationary E|c_k|^2 of the linear OU mode k (sum over both velocity
/// components for stokes). lambda = |k|^alpha + eps |k|^2 for the charge and
/// |k|^2 for the velocity. The bank is used as given, so pass the stepper's
/// bank when the noise is mollified. Throws InvalidParameter for k = 0.
OuModeVariance ou_mode_variance_oracle(int k1, int k2, double alpha, double eps, OuDissipation kind,
                                       const ForcingBank& bank, double dt);

struct KbReport {
  double nu_t = 0.0, nu_2t = 0.0, nu_4t = 0.0;
  double gap1 = 0.0;  // |nu_2T - nu_T|
  double gap2 = 0.0;  // |nu_4T - nu_2T|
  bool converged = false;  // gap2 <= 0.7 gap1
};

KbReport kb_convergence(double nu_t, double nu_2t, double nu_4t);

/// Law-level gaps estimated by synchronous coupling. With m(s) = E h(X_s) from
/// zero burn-in,
///   nu_2T - nu_T  = (1/2T) int_0^T  [m(T + s) - m(s)] ds,
///   nu_4T - nu_2T = (1/4T) int_0^2T [m(2T + s) - m(s)] ds,
/// and m(s) is sampled by a copy Z restarted from state0 at time T (resp. 2T)
/// and driven by the same increments as X. Once X and Z have merged the
/// integrand vanishes. Each copy is paired with a mirror run on the negated
/// increments, which keeps the estimator unbiased and removes most of its variance.
struct KbCoupled {
  double gap1 = 0.0, gap2 = 0.0;          // absolute values of the estimated gaps
  double std_error1 = 0.0, std_error2 = 0.0;
  bool converged = false;                 // gap2 <= 0.7 gap1
  double max_merge_time = 0.0;            // longest time until a copy merged with X
  std::size_t unmerged = 0;               // pairs still apart at the end of their window
};

struct KbRun {
  /// Ensemble mean of the per-path time averages at T, 2T, 4T.
  KbReport report;
  std::array<double, 3> std_error{};
  std::vector<TimeAverage> pooled;  // T, 2T, 4T
  /// Only filled when t_burn equals state0.t (the identities above need no burn-in).
  std::optional<KbCoupled> coupled;
};

/// Runs `paths` trajectories (driver (seed, path_id)) from state0 to 4T and
/// forms the Krylov-Bogoliubov averages over [t_burn, T], [t_burn, 2T], [t_burn, 4T].
/// A copy counts as merged once its H-distance to X drops below merge_tol^2 (1 + ||X||_H^2);
/// it is then dropped and contributes zero.
KbRun kb_run(const SimState& state0, const Stepper& stepper, const Observable& h, double horizon,
             double t_burn, std::uint64_t seed, std::size_t paths, unsigned threads = 0,
             double merge_tol = 1e-13);

/// Same ensemble, several observables (one result per observable).
std::vector<KbRun> kb_run(const SimState& state0, const Stepper& stepper,
                          const std::vector<Observable>& hs, double horizon, double t_burn,
                          std::uint64_t seed, std::size_t paths, unsigned threads = 0,
                          double merge_tol = 1e-13);

struct KernelEstimate {
  double probability = 0.0;
  double ci_low = 0.0, ci_high = 0.0;  // Wilson 95%
  std::size_t hits = 0, paths = 0;
};

using StateEvent = std::function<bool(const SimState&, const NormReport&)>;

/// Wilson score interval at 95% for k successes out of n.
KernelEstimate wilson_interval(std::size_t hits, std::size_t n);

/// Final states of `paths` trajectories from state0 to time t (driver (seed, path_id)),
/// in path order.
std::vector<SimState> sample_states(const SimState& state0, const Stepper& stepper, double t,
                                    std::uint64_t seed, std::size_t paths, unsigned threads = 0);

/// Monte Carlo P_t(state0, A). Requires paths >= 2.
KernelEstimate transition_kernel_mc(const SimState& state0, const Stepper& stepper, double t,
                                    const StateEvent& event, std::uint64_t seed, std::size_t paths,
                                    unsigned threads = 0);
/// Same estimate over already-sampled states (for nested events on shared paths).
KernelEstimate kernel_estimate(const std::vector<SimState>& states, const StateEvent& event);

struct FellerRow {
  double h_distance = 0.0;   // ||(xi_n, v_n) - (xi, v)||_H
  double mean_diff = 0.0;    // |E h(n) - E h| at time t
  double std_error = 0.0;    // standard error of the paired difference
};

/// Paired runs from each perturbed initial datum and the base datum under
/// common noise; one row per perturbation, in input order.
std::vector<FellerRow> feller_probe(const SimState& base, const std::vector<SimState>& perturbed,
                                    const Stepper& stepper, const Observable& h, double t,
                                    std::uint64_t seed, std::size_t paths, unsigned threads = 0);

/// ||q||_{H^{3/2}}^2 + ||u||_{H^2}^2.
double tightness_norm_sq(const SimState& s);

struct TightnessReport {
  double radius = 0.0;
  double fraction_inside = 0.0;  // share of samples with norm^2 <= radius^2
  double time_average = 0.0;     // mean of the sampled norm^2
};

/// Records tightness_norm_sq of the state after every sample_every-th step.
class TightnessRecorder {
 public:
  explicit TightnessRecorder(const Stepper& stepper, std::uint64_t sample_every = 1);
  Observer observer();
  const std::vector<double>& samples() const noexcept { return samples_; }

 private:
  std::uint64_t every_;
  std::vector<double> samples_;
};

std::vector<TightnessReport> tightness_scan(const std::vector<double>& samples,
                                            const std::vector<double>& radii);

struct HistogramBin {
  double left = 0.0, right = 0.0, mass = 0.0;
};

/// Equal-width histogram on [lo, hi]; values outside are clamped to the edge bins.
/// Masses sum to 1 for non-empty input.
std::vector<HistogramBin> histogram(const std::vector<double>& values, std::size_t bins, double lo,
                                    double hi);

}  // namespace ecnv
