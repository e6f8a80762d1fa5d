#include "ecnv/moments.hpp"

#include <algorithm>
#include <cmath>

#include "ecnv/norms.hpp"

namespace ecnv {

MomentTracker::MomentTracker(std::uint64_t sample_every) : sample_every_(sample_every) {
  if (sample_every == 0) throw InvalidParameter("sample_every must be positive");
}

namespace {

std::array<double, MomentTracker::kSupCount> sup_values(const NormReport& r) {
  return {r.q_l2_sq, r.q_l4_4, r.u_h1_sq, r.script_h_sq};
}

}  // namespace

void MomentTracker::start(const SimState& s0) {
  last_ = norms(s0.q, s0.u);
  last_t_ = s0.t;
  sups_ = sup_values(last_);
  integrals_.fill(0.0);
  samples_.clear();
  samples_.push_back({s0.t, sups_, integrals_});
  started_ = true;
}

void MomentTracker::observe(const StepEvent& step) {
  if (!started_) start(step.prev);
  const double dt = step.next.t - step.prev.t;
  // Consecutive steps reuse the previous right-hand report.
  const NormReport left = step.prev.t == last_t_ ? last_ : norms(step.prev.q, step.prev.u);
  const std::array<double, kIntegralCount> rates = {left.q_h_half_sq, left.q_l4_4, left.u_h1_sq,
                                                     left.u_h2_sq, left.q_h_three_half_sq};
  for (int i = 0; i < kIntegralCount; ++i) integrals_[i] += rates[i] * dt;
  last_ = norms(step.next.q, step.next.u);
  last_t_ = step.next.t;
  const auto now = sup_values(last_);
  for (int i = 0; i < kSupCount; ++i) sups_[i] = std::max(sups_[i], now[i]);
  if (step.step % sample_every_ == 0) samples_.push_back({step.next.t, sups_, integrals_});
}

Observer MomentTracker::observer() {
  return [this](const StepEvent& e) { observe(e); };
}

const char* MomentTracker::sup_name(int i) {
  static const char* names[] = {"sup_q_l2_sq", "sup_q_l4_4", "sup_grad_u_sq", "sup_script_h_sq"};
  return names[i];
}

const char* MomentTracker::integral_name(int i) {
  static const char* names[] = {"int_q_h_half_sq", "int_q_l4_4", "int_grad_u_sq", "int_lap_u_sq",
                                "int_q_h_three_half_sq"};
  return names[i];
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

MomentReport moment_report(const std::vector<MomentTracker>& ensemble, double t) {
  MomentReport rep;
  if (ensemble.empty()) return rep;
  std::size_t count = ensemble.front().samples().size();
  for (const auto& tr : ensemble) count = std::min(count, tr.samples().size());
  const auto& ref = ensemble.front().samples();
  while (count > 0 && ref[count - 1].t > t) --count;
  if (count == 0) return rep;
  rep.t = ref[count - 1].t;

  const double inv = 1.0 / static_cast<double>(ensemble.size());
  std::vector<double> times(count);
  std::vector<std::array<double, MomentTracker::kIntegralCount>> mean(count);
  for (std::size_t j = 0; j < count; ++j) {
    times[j] = ref[j].t;
    mean[j].fill(0.0);
    for (const auto& tr : ensemble)
      for (int i = 0; i < MomentTracker::kIntegralCount; ++i)
        mean[j][i] += tr.samples()[j].integrals[i] * inv;
  }
  for (const auto& tr : ensemble)
    for (int i = 0; i < MomentTracker::kSupCount; ++i) {
      const double v = tr.samples()[count - 1].sups[i];
      rep.sup_means[i] += v * inv;
      if (!std::isfinite(v)) rep.sups_finite = false;
    }

  // Windows by time fraction of [t0, t].
  const double t0 = times.front(), span = rep.t - t0;
  auto window_slope = [&](int i, double lo, double hi) {
    std::vector<double> x, y;
    for (std::size_t j = 0; j < count; ++j) {
      const double f = span > 0.0 ? (times[j] - t0) / span : 0.0;
      if (f >= lo && f <= hi) {
        x.push_back(times[j]);
        y.push_back(mean[j][i]);
      }
    }
    return ls_slope(x, y);
  };
  for (int i = 0; i < MomentTracker::kIntegralCount; ++i) {
    MomentQuantityReport& q = rep.integrals[i];
    q.mean = mean[count - 1][i];
    q.slope = window_slope(i, 0.5, 1.0);
    q.slope_q3 = window_slope(i, 0.5, 0.75);
    q.slope_q4 = window_slope(i, 0.75, 1.0);
    const double diff = std::abs(q.slope_q4 - q.slope_q3);
    q.relative_drift = diff == 0.0 ? 0.0 : diff / std::abs(q.slope_q3);
    q.stabilized = q.relative_drift < 0.2;
  }
  return rep;
}

}  // namespace ecnv
