#include "ecnv/measure.hpp"

#include <algorithm>
#include <cmath>

#include "ecnv/continuity.hpp"
#include "ecnv/operators.hpp"
#include "ecnv/parallel.hpp"

namespace ecnv {

void require_measure_regime(const Stepper& stepper) {
  if (!stepper.params().zero_potential)
    throw ConfigError("measure operations require zero_potential = true (Phi = 0)");
}

TimeAverage::TimeAverage(Observable observable, double t_burn)
    : obs_(std::move(observable)), t_burn_(t_burn) {}

void TimeAverage::accumulate(const SimState& state, double dt) {
  if (state.t < t_burn_) throw InvalidParameter("time average accumulated before the burn-in time");
  integral_ += obs_(state) * dt;
  h_integral_ += h_norm_sq(state) * dt;
  elapsed_ += dt;
}

Observer TimeAverage::observer() {
  return [this](const StepEvent& e) {
    if (e.prev.t >= t_burn_) accumulate(e.prev, e.next.t - e.prev.t);
  };
}

void TimeAverage::merge(const TimeAverage& other) {
  if (other.obs_.name() != obs_.name()) throw InvalidParameter("merging averages of different observables");
  integral_ += other.integral_;
  h_integral_ += other.h_integral_;
  elapsed_ += other.elapsed_;
}

double TimeAverage::value() const { return elapsed_ > 0.0 ? integral_ / elapsed_ : 0.0; }

double TimeAverage::h_norm_average() const { return elapsed_ > 0.0 ? h_integral_ / elapsed_ : 0.0; }

double TimeAverage::growth_bound() const {
  return obs_.growth_constant() * (1.0 + h_norm_average());
}

OuModeVariance ou_mode_variance_oracle(int k1, int k2, double alpha, double eps, OuDissipation kind,
                                       const ForcingBank& bank, double dt) {
  if (k1 == 0 && k2 == 0) throw InvalidParameter("OU oracle is undefined for k = 0");
  const double k_sq = double(k1) * k1 + double(k2) * k2;
  OuModeVariance out;
  double sigma_sq = 0.0;
  if (kind == OuDissipation::fractional) {
    out.lambda = std::pow(k_sq, 0.5 * alpha) + eps * k_sq;
    for (const auto& g : bank.g_tilde) sigma_sq += std::norm(g.at(k1, k2));
  } else {
    out.lambda = k_sq;
    for (const auto& g : bank.g)
      sigma_sq += std::norm(g.comp1().at(k1, k2)) + std::norm(g.comp2().at(k1, k2));
  }
  out.continuum = sigma_sq / (2.0 * out.lambda);
  out.ar1_factor = 1.0 / (1.0 + 0.5 * dt * out.lambda);
  out.discrete = out.continuum * out.ar1_factor;
  return out;
}

KbReport kb_convergence(double nu_t, double nu_2t, double nu_4t) {
  KbReport r{nu_t, nu_2t, nu_4t, std::abs(nu_2t - nu_t), std::abs(nu_4t - nu_2t), false};
  r.converged = r.gap2 <= 0.7 * r.gap1;
  return r;
}

namespace {

void check_paths(std::size_t paths) {
  if (paths == 0) throw InvalidParameter("need at least one path");
}

double mean_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  return v.empty() ? 0.0 : m / static_cast<double>(v.size());
}

double std_error_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

std::vector<KbRun> kb_run(const SimState& state0, const Stepper& stepper,
                          const std::vector<Observable>& hs, double horizon, double t_burn,
                          std::uint64_t seed, std::size_t paths, unsigned threads,
                          double merge_tol) {
  require_measure_regime(stepper);
  check_paths(paths);
  if (hs.empty()) throw InvalidParameter("need at least one observable");
  if (!(horizon > 0.0) || t_burn < state0.t || t_burn >= state0.t + horizon)
    throw InvalidParameter("need state0.t <= t_burn < state0.t + T");
  const double dt = stepper.params().dt;
  const std::size_t n = stepper.bank().n();
  const std::size_t m = hs.size();
  const std::uint64_t burn = steps_to_reach(state0.t, t_burn, dt);
  std::array<std::uint64_t, 3> ends{};
  for (int j = 0; j < 3; ++j) ends[j] = steps_to_reach(state0.t, state0.t + horizon * (1 << j), dt);
  const bool couple = burn == 0;

  struct PathResult {
    std::vector<std::vector<TimeAverage>> avg;    // [observable][T, 2T, 4T]
    std::vector<std::array<double, 2>> gap_int;   // int [h(X) - h(Z)] per window, antithetic mean
    double merge_time[2] = {0.0, 0.0};
    bool merged[2] = {true, true};
  };
  // Z restarts from state0 at ends[c] and shares X's increments. The mirror
  // pair (X~, Z~) starts from (X, state0) and runs on the negated increments;
  // it has the same law and cancels the part of h(X) - h(Z) that is odd in the noise.
  struct Pair {
    std::optional<SimState> x, z;  // x empty: the main path
    bool mirrored = false;
    int window = 0;
  };
  std::vector<PathResult> per_path(paths);
  parallel_for(
      paths,
      [&](std::size_t p) {
        PathResult res;
        res.avg.resize(m);
        for (std::size_t o = 0; o < m; ++o) res.avg[o].assign(3, TimeAverage(hs[o], t_burn));
        res.gap_int.assign(m, {0.0, 0.0});
        WienerDriver driver(seed, p);
        SimState x = state0;
        std::vector<Pair> pairs;
        std::vector<double> hx(m);
        for (std::uint64_t i = 1; i <= ends[2]; ++i) {
          if (couple) {
            for (int c = 0; c < 2; ++c)
              if (i == ends[c] + 1) {
                pairs.push_back({std::nullopt, state0, false, c});
                pairs.push_back({x, state0, true, c});
              }
          }
          const NoiseIncrement inc = driver.sample_increment(n, dt);
          if (i > burn) {
            SimState left = x;
            left.t = std::max(left.t, t_burn);  // guards rounding at the burn boundary
            for (std::size_t o = 0; o < m; ++o)
              for (int j = 0; j < 3; ++j)
                if (i <= ends[j]) res.avg[o][j].accumulate(left, dt);
          }
          NoiseIncrement mirrored = inc;
          for (auto& w : mirrored.dw) w = -w;
          if (!pairs.empty())
            for (std::size_t o = 0; o < m; ++o) hx[o] = hs[o](x);
          for (auto& pr : pairs) {
            for (std::size_t o = 0; o < m; ++o) {
              const double ha = pr.x ? hs[o](*pr.x) : hx[o];
              res.gap_int[o][pr.window] += 0.5 * (ha - hs[o](*pr.z)) * dt;
            }
            const NoiseIncrement& d = pr.mirrored ? mirrored : inc;
            *pr.z = stepper.advance(*pr.z, d);
            if (pr.x) *pr.x = stepper.advance(*pr.x, d);
          }
          x = stepper.advance(x, inc);
          x.t = state0.t + static_cast<double>(i) * dt;
          std::erase_if(pairs, [&](const Pair& pr) {
            const SimState& a = pr.x ? *pr.x : x;
            const bool merged =
                h_distance_sq(a, *pr.z) <= merge_tol * merge_tol * (1.0 + h_norm_sq(a));
            if (!merged && i < 2 * ends[pr.window]) return false;
            const double elapsed = static_cast<double>(i - ends[pr.window]) * dt;
            res.merge_time[pr.window] = std::max(res.merge_time[pr.window], elapsed);
            if (!merged) res.merged[pr.window] = false;
            return true;
          });
        }
        per_path[p] = std::move(res);
      },
      threads);

  std::vector<KbRun> out(m);
  for (std::size_t o = 0; o < m; ++o) {
    KbRun& run = out[o];
    run.pooled.assign(3, TimeAverage(hs[o], t_burn));
    std::array<double, 3> nu{};
    for (int j = 0; j < 3; ++j) {
      std::vector<double> values;
      for (const auto& r : per_path) {
        run.pooled[j].merge(r.avg[o][j]);
        values.push_back(r.avg[o][j].value());
      }
      nu[j] = mean_of(values);
      run.std_error[j] = std_error_of(values);
    }
    run.report = kb_convergence(nu[0], nu[1], nu[2]);
    if (!couple) continue;
    KbCoupled c;
    std::vector<double> g1, g2;
    for (const auto& r : per_path) {
      g1.push_back(r.gap_int[o][0] / (2.0 * horizon));
      g2.push_back(r.gap_int[o][1] / (4.0 * horizon));
    }
    for (int k = 0; k < 2; ++k)
      for (const auto& r : per_path) {
        c.max_merge_time = std::max(c.max_merge_time, r.merge_time[k]);
        if (!r.merged[k]) ++c.unmerged;
      }
    c.gap1 = std::abs(mean_of(g1));
    c.gap2 = std::abs(mean_of(g2));
    c.std_error1 = std_error_of(g1);
    c.std_error2 = std_error_of(g2);
    c.converged = c.gap2 <= 0.7 * c.gap1;
    run.coupled = c;
  }
  return out;
}

KbRun kb_run(const SimState& state0, const Stepper& stepper, const Observable& h, double horizon,
             double t_burn, std::uint64_t seed, std::size_t paths, unsigned threads,
             double merge_tol) {
  return kb_run(state0, stepper, std::vector<Observable>{h}, horizon, t_burn, seed, paths, threads,
                merge_tol)
      .front();
}

KernelEstimate wilson_interval(std::size_t hits, std::size_t n) {
  KernelEstimate e;
  e.hits = hits;
  e.paths = n;
  if (n == 0) return e;
  const double z = 1.959963984540054;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double denom = 1.0 + z * z / nn;
  const double centre = (p + z * z / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
  e.probability = p;
  e.ci_low = std::max(0.0, centre - half);
  e.ci_high = std::min(1.0, centre + half);
  return e;
}

std::vector<SimState> sample_states(const SimState& state0, const Stepper& stepper, double t,
                                    std::uint64_t seed, std::size_t paths, unsigned threads) {
  check_paths(paths);
  SimParams p = stepper.params();
  p.t_end = t;
  const std::uint64_t steps = steps_to_reach(state0.t, t, p.dt);
  std::vector<SimState> out(paths);
  parallel_for(
      paths,
      [&](std::size_t i) {
        WienerDriver driver(seed, i);
        SimState s = state0;
        for (std::uint64_t k = 1; k <= steps; ++k) {
          s = stepper.step(s, driver);
          s.t = state0.t + static_cast<double>(k) * p.dt;
        }
        out[i] = std::move(s);
      },
      threads);
  return out;
}

KernelEstimate kernel_estimate(const std::vector<SimState>& states, const StateEvent& event) {
  std::size_t hits = 0;
  for (const auto& s : states)
    if (event(s, norms(s.q, s.u))) ++hits;
  return wilson_interval(hits, states.size());
}

KernelEstimate transition_kernel_mc(const SimState& state0, const Stepper& stepper, double t,
                                    const StateEvent& event, std::uint64_t seed, std::size_t paths,
                                    unsigned threads) {
  if (paths < 2) throw InvalidParameter("transition kernel estimate needs at least 2 paths");
  return kernel_estimate(sample_states(state0, stepper, t, seed, paths, threads), event);
}

std::vector<FellerRow> feller_probe(const SimState& base, const std::vector<SimState>& perturbed,
                                    const Stepper& stepper, const Observable& h, double t,
                                    std::uint64_t seed, std::size_t paths, unsigned threads) {
  check_paths(paths);
  const std::size_t m = perturbed.size();
  std::vector<std::vector<double>> diffs(m, std::vector<double>(paths));
  const std::uint64_t steps = steps_to_reach(base.t, t, stepper.params().dt);
  auto final_value = [&](const SimState& s0, std::size_t path) {
    WienerDriver driver(seed, path);
    SimState s = s0;
    for (std::uint64_t k = 0; k < steps; ++k) s = stepper.step(s, driver);
    return h(s);
  };
  parallel_for(
      paths,
      [&](std::size_t p) {
        const double h0 = final_value(base, p);
        for (std::size_t j = 0; j < m; ++j) diffs[j][p] = final_value(perturbed[j], p) - h0;
      },
      threads);
  std::vector<FellerRow> rows;
  for (std::size_t j = 0; j < m; ++j)
    rows.push_back({std::sqrt(h_distance_sq(base, perturbed[j])), std::abs(mean_of(diffs[j])),
                    std_error_of(diffs[j])});
  return rows;
}

double tightness_norm_sq(const SimState& s) { return sobolev_sq(s.q, 1.5) + sobolev_sq(s.u, 2.0); }

TightnessRecorder::TightnessRecorder(const Stepper& stepper, std::uint64_t sample_every)
    : every_(sample_every) {
  require_measure_regime(stepper);
  if (sample_every == 0) throw InvalidParameter("sample_every must be positive");
}

Observer TightnessRecorder::observer() {
  return [this](const StepEvent& e) {
    if (e.step % every_ == 0) samples_.push_back(tightness_norm_sq(e.next));
  };
}

std::vector<TightnessReport> tightness_scan(const std::vector<double>& samples,
                                            const std::vector<double>& radii) {
  const double avg = mean_of(samples);
  std::vector<TightnessReport> out;
  for (double r : radii) {
    std::size_t inside = 0;
    for (double v : samples)
      if (v <= r * r) ++inside;
    out.push_back({r, samples.empty() ? 1.0 : double(inside) / double(samples.size()), avg});
  }
  return out;
}

std::vector<HistogramBin> histogram(const std::vector<double>& values, std::size_t bins, double lo,
                                    double hi) {
  if (bins == 0 || !(hi > lo)) throw InvalidParameter("histogram needs bins > 0 and hi > lo");
  std::vector<HistogramBin> out(bins);
  const double w = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].left = lo + w * static_cast<double>(b);
    out[b].right = b + 1 == bins ? hi : lo + w * static_cast<double>(b + 1);
  }
  if (values.empty()) return out;
  const double unit = 1.0 / static_cast<double>(values.size());
  for (double v : values) {
    const double pos = std::floor((v - lo) / w);
    const std::size_t b = pos < 0 ? 0 : std::min(bins - 1, static_cast<std::size_t>(pos));
    out[b].mass += unit;
  }
  return out;
}

}  // namespace ecnv
