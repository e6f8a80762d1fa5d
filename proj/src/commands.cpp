#include "ecnv/commands.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "ecnv/budgets.hpp"
#include "ecnv/continuity.hpp"
#include "ecnv/io.hpp"
#include "ecnv/measure.hpp"
#include "ecnv/moments.hpp"
#include "ecnv/norms.hpp"
#include "ecnv/operators.hpp"
#include "ecnv/parallel.hpp"

namespace ecnv {

namespace fs = std::filesystem;

std::optional<Command> parse_command(std::string_view name) {
  if (name == "run") return Command::run;
  if (name == "ensemble") return Command::ensemble;
  if (name == "diagnose") return Command::diagnose;
  if (name == "measure") return Command::measure;
  if (name == "selftest") return Command::selftest;
  return std::nullopt;
}

int exit_code(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::config:
    case ErrorCategory::invalid_parameter:
      return 2;
    case ErrorCategory::blow_up:
      return 3;
    case ErrorCategory::selftest:
      return 4;
    case ErrorCategory::invariant:
      return 1;
  }
  return 1;
}

namespace {

constexpr const char* budget_tags[3] = {"l2q", "l4q", "h1u"};

bool budget_on(const DiagnosticsSpec& d, int b) {
  return b == 0 ? d.l2_q : b == 1 ? d.l4_q : d.h1_u;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

/// Ordered key = value lines, echoed to the stream and saved as summary.txt.
class Summary {
 public:
  void add(const std::string& key, const std::string& value) { lines_ += key + " = " + value + "\n"; }
  void add(const std::string& key, double value) { add(key, format_double(value)); }
  void add_int(const std::string& key, std::uint64_t value) { add(key, std::to_string(value)); }
  void emit(const std::string& dir, std::ostream& out) const {
    write_text((fs::path(dir) / "summary.txt").string(), lines_);
    out << lines_;
  }

 private:
  std::string lines_;
};

Summary header_summary(const char* command, const RunConfig& cfg) {
  Summary s;
  s.add("command", command);
  s.add("config_fingerprint", hex64(fingerprint(cfg)));
  s.add_int("seed", cfg.seed);
  s.add_int("paths", cfg.paths);
  s.add_int("n", static_cast<std::uint64_t>(cfg.n));
  s.add("alpha", cfg.params.alpha);
  s.add("dt", cfg.params.dt);
  s.add("t_end", cfg.params.t_end);
  return s;
}

std::string prepare_dir(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw InvalidParameter("cannot create output directory '" + cfg.out_dir + "': " + ec.message());
  return cfg.out_dir;
}

std::string path_file(const std::string& dir, const std::string& stem, std::uint64_t id, const char* ext) {
  return (fs::path(dir) / (stem + std::to_string(id) + ext)).string();
}

/// Charge perturbation of H-size delta along a fixed random direction.
SimState perturbed(const SimState& s, double delta, std::uint64_t seed) {
  const Grid& g = s.q.grid();
  const int kmax = std::min(3, g.dealias_cutoff());
  SpectralScalar w = random_band_limited(g, seed, kmax, 1.0);
  w *= delta / std::sqrt(sobolev_sq(w, -0.5));
  SimState out = s;
  out.q += w;
  return out;
}

/// Runs all paths, then rethrows the failure of the lowest path id (if any),
/// so the reported error does not depend on the schedule.
template <class Fn>
void for_each_path(std::uint64_t paths, Fn&& fn) {
  std::vector<std::exception_ptr> errors(paths);
  parallel_for(paths, [&](std::size_t p) {
    try {
      fn(p);
    } catch (...) {
      errors[p] = std::current_exception();
    }
  });
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

std::vector<std::string> diagnostics_header(const DiagnosticsSpec& spec) {
  std::vector<std::string> h{"t"};
  for (const auto& c : norm_columns()) h.push_back(c);
  for (int b = 0; b < 3; ++b)
    if (budget_on(spec, b)) {
      h.push_back(std::string(budget_tags[b]) + "_res");
      h.push_back(std::string(budget_tags[b]) + "_cum");
    }
  return h;
}

PathOutput simulate_path(const RunConfig& cfg, std::uint64_t path_id, const std::string& out_dir) {
  const Grid grid(cfg.n);
  const Stepper stepper(build_bank(cfg, grid), cfg.params);
  const SimState s0 = build_initial(cfg, grid);
  const auto& d = cfg.diagnostics;
  const std::uint64_t total = steps_to_reach(s0.t, cfg.params.t_end, cfg.params.dt);

  PathOutput out;
  BudgetMonitor budgets(stepper, d.l2_q, d.l4_q, d.h1_u);
  auto row_of = [&](const SimState& s, bool first) {
    std::vector<double> row = norm_row(s.t, norms(s.q, s.u));
    for (int b = 0; b < 3; ++b) {
      const auto kind = static_cast<BudgetKind>(b);
      if (!budget_on(d, b)) continue;
      row.push_back(first ? 0.0 : budgets.latest(kind).residual);
      row.push_back(first ? 0.0 : budgets.latest(kind).cumulative_residual);
    }
    return row;
  };
  out.rows.push_back(row_of(s0, true));

  if (cfg.snapshot_every > 0) fs::create_directories(fs::path(out_dir) / "snapshots");
  const std::vector<Observer> observers{
      budgets.observer(), [&](const StepEvent& e) {
        if (e.step % cfg.sample_every == 0 || e.step == total) out.rows.push_back(row_of(e.next, false));
        if (cfg.snapshot_every > 0 && e.step % cfg.snapshot_every == 0) {
          const std::string name = "path" + std::to_string(path_id) + "_step" + std::to_string(e.step) + ".ecnv";
          write_snapshot((fs::path(out_dir) / "snapshots" / name).string(), e.next, cfg.params.alpha, path_id);
        }
      }};
  WienerDriver driver(cfg.seed, path_id);
  try {
    out.final_state = run(s0, stepper, driver, observers);
  } catch (const BlowUpError& e) {
    write_snapshot(path_file(out_dir, "blowup_path", path_id, ".ecnv"), e.last_good(), cfg.params.alpha,
                   path_id);
    throw BlowUpError("path " + std::to_string(path_id) + ": " + e.what(), e.last_good());
  }
  for (int b = 0; b < 3; ++b)
    if (budget_on(d, b)) out.cumulative[b] = budgets.cumulative(static_cast<BudgetKind>(b));
  out.min_poincare_ratio = budgets.min_poincare_ratio();
  return out;
}

std::vector<std::vector<double>> mean_rows(const std::vector<PathOutput>& paths) {
  if (paths.empty()) return {};
  std::vector<std::vector<double>> mean = paths.front().rows;
  for (std::size_t p = 1; p < paths.size(); ++p) {
    const auto& rows = paths[p].rows;
    if (rows.size() != mean.size()) throw InvariantViolation("paths do not share a time grid");
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 1; c < rows[r].size(); ++c) mean[r][c] += rows[r][c];
  }
  const double inv = 1.0 / static_cast<double>(paths.size());
  if (paths.size() > 1)
    for (auto& row : mean)
      for (std::size_t c = 1; c < row.size(); ++c) row[c] *= inv;
  return mean;
}

namespace {

void path_summary(Summary& s, const std::vector<PathOutput>& paths, const DiagnosticsSpec& d) {
  double h_mean = 0.0, poincare = std::numeric_limits<double>::infinity();
  for (const auto& p : paths) {
    h_mean += p.rows.back()[norm_columns().size()];
    poincare = std::min(poincare, p.min_poincare_ratio);
  }
  s.add("t_final", paths.front().final_state.t);
  s.add("mean_final_script_h", h_mean / static_cast<double>(paths.size()));
  for (int b = 0; b < 3; ++b) {
    if (!budget_on(d, b)) continue;
    double ms = 0.0;
    for (const auto& p : paths) ms += p.cumulative[b] * p.cumulative[b];
    s.add(std::string(budget_tags[b]) + "_cumulative_rms", std::sqrt(ms / static_cast<double>(paths.size())));
  }
  if (d.l4_q) s.add("min_poincare_ratio", poincare);
}

}  // namespace

void cmd_run(const RunConfig& cfg, std::ostream& out) {
  const std::string dir = prepare_dir(cfg);
  std::vector<PathOutput> paths{simulate_path(cfg, 0, dir)};
  write_text((fs::path(dir) / "diagnostics.csv").string(),
             render_csv(diagnostics_header(cfg.diagnostics), paths.front().rows));
  write_snapshot(path_file(dir, "final_path", 0, ".ecnv"), paths.front().final_state, cfg.params.alpha, 0);
  Summary s = header_summary("run", cfg);
  path_summary(s, paths, cfg.diagnostics);
  s.emit(dir, out);
}

void cmd_ensemble(const RunConfig& cfg, std::ostream& out) {
  const std::string dir = prepare_dir(cfg);
  const auto header = diagnostics_header(cfg.diagnostics);
  std::vector<PathOutput> paths(cfg.paths);
  for_each_path(cfg.paths, [&](std::size_t p) {
    paths[p] = simulate_path(cfg, p, dir);
    write_text(path_file(dir, "diagnostics_path", p, ".csv"), render_csv(header, paths[p].rows));
    write_snapshot(path_file(dir, "final_path", p, ".ecnv"), paths[p].final_state, cfg.params.alpha, p);
  });
  write_text((fs::path(dir) / "diagnostics.csv").string(), render_csv(header, mean_rows(paths)));
  Summary s = header_summary("ensemble", cfg);
  path_summary(s, paths, cfg.diagnostics);
  s.emit(dir, out);
}

void cmd_diagnose(const RunConfig& cfg, std::ostream& out) {
  const std::string dir = prepare_dir(cfg);
  const Grid grid(cfg.n);
  const Stepper stepper(build_bank(cfg, grid), cfg.params);
  const SimState s0 = build_initial(cfg, grid);
  const auto& d = cfg.diagnostics;

  std::vector<PathOutput> paths{simulate_path(cfg, 0, dir)};
  write_text((fs::path(dir) / "diagnostics.csv").string(),
             render_csv(diagnostics_header(d), paths.front().rows));

  MomentTracker moments(cfg.sample_every);
  moments.start(s0);
  {
    WienerDriver driver(cfg.seed, 0);
    const std::vector<Observer> obs{moments.observer()};
    run(s0, stepper, driver, obs);
  }
  std::vector<std::string> mh{"t"};
  for (int i = 0; i < MomentTracker::kSupCount; ++i) mh.push_back(MomentTracker::sup_name(i));
  for (int i = 0; i < MomentTracker::kIntegralCount; ++i) mh.push_back(MomentTracker::integral_name(i));
  std::vector<std::vector<double>> mrows;
  for (const auto& smp : moments.samples()) {
    std::vector<double> row{smp.t};
    row.insert(row.end(), smp.sups.begin(), smp.sups.end());
    row.insert(row.end(), smp.integrals.begin(), smp.integrals.end());
    mrows.push_back(std::move(row));
  }
  write_text((fs::path(dir) / "moments.csv").string(), render_csv(mh, mrows));

  // Pilot on path 1 calibrates c0; the reported run is path 0.
  const SimState s1 = perturbed(s0, d.gronwall_perturbation, cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  WienerDriver pilot_driver(cfg.seed, 1);
  const GronwallResult pilot = gronwall_continuity(s0, s1, stepper, pilot_driver, 0.0, cfg.sample_every);
  const double c0 = calibrate_c0(pilot, d.gronwall_safety);
  WienerDriver check_driver(cfg.seed, 0);
  const GronwallResult check = gronwall_continuity(s0, s1, stepper, check_driver, c0, cfg.sample_every);
  std::vector<std::vector<double>> grows;
  for (const auto& tr : check.trace)
    grows.push_back({tr.t, tr.c_integrand, tr.r_cum, tr.h_dist_sq, tr.bound, tr.violation ? 1.0 : 0.0});
  write_text((fs::path(dir) / "gronwall.csv").string(),
             render_csv({"t", "c_integrand", "r_cum", "h_dist_sq", "bound", "violation"}, grows));

  const CommutatorCorpus corpus = commutator_corpus(grid, d.commutator_samples, cfg.seed, d.commutator_kmax);
  std::vector<std::vector<double>> crows;
  for (std::size_t i = 0; i < corpus.ratios.size(); ++i) crows.push_back({double(i), corpus.ratios[i]});
  write_text((fs::path(dir) / "commutator.csv").string(), render_csv({"index", "ratio"}, crows));

  Summary s = header_summary("diagnose", cfg);
  path_summary(s, paths, d);
  for (int i = 0; i < MomentTracker::kSupCount; ++i)
    s.add(MomentTracker::sup_name(i), moments.sups()[i]);
  s.add("gronwall_pilot_critical_c0", pilot.critical_c0);
  s.add("gronwall_c0", c0);
  s.add_int("gronwall_violations", check.violations);
  s.add("gronwall_check_critical_c0", check.critical_c0);
  s.add_int("commutator_pairs", corpus.ratios.size());
  s.add("commutator_max_ratio", corpus.max_ratio);
  s.emit(dir, out);
}

namespace {

std::string kb_csv(const std::vector<Observable>& hs, const std::vector<KbRun>& runs) {
  std::string text =
      "observable,nu_T,nu_2T,nu_4T,gap1,gap2,se_T,se_2T,se_4T,converged,"
      "coupled_gap1,coupled_se1,coupled_gap2,coupled_se2,coupled_converged,max_merge_time,unmerged\n";
  for (std::size_t o = 0; o < hs.size(); ++o) {
    const KbRun& r = runs[o];
    text += hs[o].name();
    for (double v : {r.report.nu_t, r.report.nu_2t, r.report.nu_4t, r.report.gap1, r.report.gap2,
                     r.std_error[0], r.std_error[1], r.std_error[2]})
      text += "," + format_double(v);
    text += r.report.converged ? ",1" : ",0";
    if (r.coupled) {
      const KbCoupled& c = *r.coupled;
      for (double v : {c.gap1, c.std_error1, c.gap2, c.std_error2}) text += "," + format_double(v);
      text += c.converged ? ",1" : ",0";
      text += "," + format_double(c.max_merge_time) + "," + std::to_string(c.unmerged);
    } else {
      text += ",,,,,,,";
    }
    text += "\n";
  }
  return text;
}

}  // namespace

void cmd_measure(const RunConfig& cfg, std::ostream& out) {
  const Grid grid(cfg.n);
  const Stepper stepper(build_bank(cfg, grid), cfg.params);
  require_measure_regime(stepper);
  const std::string dir = prepare_dir(cfg);
  const SimState s0 = build_initial(cfg, grid);
  const MeasureSpec& m = cfg.measure;

  std::vector<Observable> hs;
  for (const auto& spec : m.observables) hs.push_back(Observable::parse(spec));
  if (hs.empty()) hs.push_back(Observable::clipped_h_norm(100.0));
  const double horizon = m.horizon > 0.0 ? m.horizon : (cfg.params.t_end - s0.t) / 4.0;
  const double t_burn = m.t_burn >= 0.0 ? s0.t + m.t_burn : s0.t + 0.1 * horizon;

  const auto kb = kb_run(s0, stepper, hs, horizon, t_burn, cfg.seed, cfg.paths);
  write_text((fs::path(dir) / "kb.csv").string(), kb_csv(hs, kb));

  // Tightness and histograms from a separate pass over [t0, T] (driver ids offset past the KB paths).
  const std::uint64_t steps = steps_to_reach(s0.t, s0.t + horizon, cfg.params.dt);
  std::vector<std::vector<double>> norm_samples(cfg.paths);
  std::vector<std::vector<std::vector<double>>> h_samples(cfg.paths, std::vector<std::vector<double>>(hs.size()));
  for_each_path(cfg.paths, [&](std::size_t p) {
    WienerDriver driver(cfg.seed, cfg.paths + p);
    SimState s = s0;
    for (std::uint64_t i = 1; i <= steps; ++i) {
      s = stepper.step(s, driver);
      s.t = s0.t + static_cast<double>(i) * cfg.params.dt;
      if (i % cfg.sample_every != 0 || s.t < t_burn) continue;
      norm_samples[p].push_back(tightness_norm_sq(s));
      for (std::size_t o = 0; o < hs.size(); ++o) h_samples[p][o].push_back(hs[o](s));
    }
  });
  std::vector<double> all_norms;
  for (const auto& v : norm_samples) all_norms.insert(all_norms.end(), v.begin(), v.end());
  std::vector<double> radii = m.radii;
  if (radii.empty() && !all_norms.empty()) {
    double mean = 0.0;
    for (double v : all_norms) mean += v;
    const double root = std::sqrt(mean / static_cast<double>(all_norms.size()));
    for (double f : {1.0, 2.0, 5.0, 10.0}) radii.push_back(f * root);
  }
  std::vector<std::vector<double>> trows;
  for (const auto& t : tightness_scan(all_norms, radii)) trows.push_back({t.radius, t.fraction_inside, t.time_average});
  write_text((fs::path(dir) / "tightness.csv").string(),
             render_csv({"radius", "fraction_inside", "mean_norm_sq"}, trows));
  for (std::size_t o = 0; o < hs.size(); ++o) {
    std::vector<double> values;
    for (const auto& per : h_samples) values.insert(values.end(), per[o].begin(), per[o].end());
    if (values.empty()) continue;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    std::vector<std::vector<double>> rows;
    for (const auto& b : histogram(values, m.histogram_bins, *lo, *hi)) rows.push_back({b.left, b.right, b.mass});
    write_text((fs::path(dir) / ("histogram_" + hs[o].name() + ".csv")).string(),
               render_csv({"left", "right", "mass"}, rows));
  }

  Summary s = header_summary("measure", cfg);
  s.add("horizon", horizon);
  s.add("t_burn", t_burn);
  for (std::size_t o = 0; o < hs.size(); ++o) {
    const std::string pre = "kb_" + hs[o].name() + "_";
    s.add(pre + "gap1", kb[o].report.gap1);
    s.add(pre + "gap2", kb[o].report.gap2);
    s.add(pre + "converged", kb[o].report.converged ? "1" : "0");
    if (kb[o].coupled) {
      s.add(pre + "coupled_gap1", kb[o].coupled->gap1);
      s.add(pre + "coupled_gap2", kb[o].coupled->gap2);
      s.add(pre + "coupled_converged", kb[o].coupled->converged ? "1" : "0");
    }
  }

  if (cfg.paths >= 2) {
    const auto states = sample_states(s0, stepper, s0.t + m.kernel_time, cfg.seed, cfg.paths);
    const KernelEstimate k = kernel_estimate(states, [&](const SimState&, const NormReport& r) {
      return r.script_h_sq <= m.kernel_threshold;
    });
    write_text((fs::path(dir) / "kernel.csv").string(),
               render_csv({"t", "threshold", "probability", "ci_low", "ci_high", "hits", "paths"},
                          {{m.kernel_time, m.kernel_threshold, k.probability, k.ci_low, k.ci_high,
                            double(k.hits), double(k.paths)}}));
    s.add("kernel_probability", k.probability);
    s.add("kernel_ci_low", k.ci_low);
    s.add("kernel_ci_high", k.ci_high);
  } else {
    s.add("kernel_probability", "skipped (needs paths >= 2)");
  }

  std::vector<SimState> offsets;
  for (double delta : m.feller_offsets) offsets.push_back(perturbed(s0, delta, cfg.seed ^ 0x9e3779b97f4a7c15ULL));
  const auto feller = feller_probe(s0, offsets, stepper, hs.front(), s0.t + m.kernel_time, cfg.seed, cfg.paths);
  std::vector<std::vector<double>> frows;
  for (std::size_t i = 0; i < feller.size(); ++i)
    frows.push_back({m.feller_offsets[i], feller[i].h_distance, feller[i].mean_diff, feller[i].std_error});
  write_text((fs::path(dir) / "feller.csv").string(),
             render_csv({"offset", "h_distance", "mean_diff", "std_error"}, frows));
  bool monotone = true;
  for (std::size_t i = 1; i < feller.size(); ++i)
    if (m.feller_offsets[i] < m.feller_offsets[i - 1] && feller[i].mean_diff > feller[i - 1].mean_diff)
      monotone = false;
  s.add("feller_observable", hs.front().name());
  s.add("feller_monotone", monotone ? "1" : "0");
  s.emit(dir, out);
}

int execute(Command command, const CommandOptions& options, std::ostream& out, std::ostream& err) {
  auto fail = [&](ErrorCategory c, const std::string& msg) {
    err << "error: category=" << category_name(c) << " message=" << msg << '\n';
    return exit_code(c);
  };
  try {
    if (command == Command::selftest) {
      if (cmd_selftest(out)) return 0;
      return fail(ErrorCategory::selftest, "one or more selftest checks failed");
    }
    if (options.config_path.empty()) throw ConfigError("--config is required");
    RunConfig cfg = parse_config(options.config_path);
    if (options.seed) cfg.seed = *options.seed;
    if (options.out_dir) cfg.out_dir = *options.out_dir;
    switch (command) {
      case Command::run: cmd_run(cfg, out); break;
      case Command::ensemble: cmd_ensemble(cfg, out); break;
      case Command::diagnose: cmd_diagnose(cfg, out); break;
      case Command::measure: cmd_measure(cfg, out); break;
      case Command::selftest: break;
    }
    return 0;
  } catch (const Error& e) {
    return fail(e.category(), e.what());
  } catch (const std::exception& e) {
    err << "error: category=internal message=" << e.what() << '\n';
    return 1;
  }
}

}  // namespace ecnv
