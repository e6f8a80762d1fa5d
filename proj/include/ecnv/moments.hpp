#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ecnv/dynamics.hpp"
#include "ecnv/norms.hpp"

namespace ecnv {

/// Per-path running sups and time integrals of the quantities bounded by the
/// a priori moment estimates. Integrals use the left rectangle rule.
class MomentTracker {
 public:
  enum Sup { sup_q_l2_sq, sup_q_l4_4, sup_grad_u_sq, sup_script_h_sq, kSupCount };
  enum Integral {
    int_q_h_half_sq,
    int_q_l4_4,
    int_grad_u_sq,
    int_lap_u_sq,
    int_q_h_three_half_sq,
    kIntegralCount
  };

  struct Sample {
    double t = 0.0;
    std::array<double, kSupCount> sups{};
    std::array<double, kIntegralCount> integrals{};
  };

  explicit MomentTracker(std::uint64_t sample_every = 1);

  /// Seeds the sups with the initial state and records the t0 sample.
  void start(const SimState& s0);
  void observe(const StepEvent& step);
  Observer observer();

  const std::array<double, kSupCount>& sups() const noexcept { return sups_; }
  const std::array<double, kIntegralCount>& integrals() const noexcept { return integrals_; }
  const std::vector<Sample>& samples() const noexcept { return samples_; }

  static const char* sup_name(int i);
  static const char* integral_name(int i);

 private:
  std::uint64_t sample_every_;
  bool started_ = false;
  std::array<double, kSupCount> sups_{};
  std::array<double, kIntegralCount> integrals_{};
  std::vector<Sample> samples_;
  NormReport last_;
  double last_t_ = 0.0;
};

struct MomentQuantityReport {
  double mean = 0.0;           // ensemble mean at the final common sample
  double slope = 0.0;          // least-squares slope of the ensemble mean over the second half
  double slope_q3 = 0.0;       // same over the third quarter
  double slope_q4 = 0.0;       // and the fourth
  double relative_drift = 0.0; // |slope_q4 - slope_q3| / |slope_q3| (0 when both vanish)
  bool stabilized = false;     // relative_drift < 0.2
};

struct MomentReport {
  double t = 0.0;
  std::array<double, MomentTracker::kSupCount> sup_means{};
  std::array<MomentQuantityReport, MomentTracker::kIntegralCount> integrals{};
  bool sups_finite = true;
};

/// Aggregates an ensemble of trackers sampled on a common time grid, in the
/// given order. Uses samples with time <= t.
MomentReport moment_report(const std::vector<MomentTracker>& ensemble, double t);

/// Least-squares slope of y against x; 0 for fewer than two points.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ecnv
