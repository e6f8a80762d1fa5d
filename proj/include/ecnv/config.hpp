#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ecnv/dynamics.hpp"

namespace ecnv {

/// One term cos_amp cos(k.x) + sin_amp sin(k.x) of a real field.
struct ModeEntry {
  int k1 = 0, k2 = 0;
  double cos_amp = 0.0, sin_amp = 0.0;
  int line = 0;  // source line, for error messages
};

struct NoiseSpec {
  std::vector<ModeEntry> g_tilde;         // charge noise shape
  std::vector<ModeEntry> g1, g2, g_psi;   // velocity noise: components and/or stream function
};

struct DiagnosticsSpec {
  bool l2_q = true;
  bool l4_q = true;
  bool h1_u = true;
  double gronwall_perturbation = 1e-6;
  double gronwall_safety = 2.0;
  int commutator_samples = 100;
  int commutator_kmax = 5;
};

struct MeasureSpec {
  std::vector<std::string> observables;  // Observable::parse syntax
  double horizon = 0.0;                   // KB horizon T; 0 means t_end / 4
  double t_burn = -1.0;                   // negative means 10% of T
  std::vector<double> radii;              // tightness radii; empty means 10x the mean norm
  double kernel_time = 1.0;
  double kernel_threshold = 1.0;          // event: script_h_sq <= threshold
  std::vector<double> feller_offsets{1e-2, 1e-3, 1e-4};
  std::size_t histogram_bins = 20;
};

struct RunConfig {
  int n = 32;
  SimParams params;
  std::uint64_t paths = 1;
  std::uint64_t seed = 0;

  std::vector<ModeEntry> init_q, init_u1, init_u2, init_u_psi;
  std::vector<ModeEntry> phi, f1, f2, f_psi;
  std::vector<NoiseSpec> noise;
  int noise_modes_kmax = 0;       // > 0 appends mode_noise_bank(kmax, amp) after [noise.N]
  double noise_modes_amp = 0.0;

  std::string out_dir = "out";
  std::uint64_t sample_every = 1;
  std::uint64_t snapshot_every = 0;  // 0 = never

  DiagnosticsSpec diagnostics;
  MeasureSpec measure;

  std::string source = "config";  // file name for messages; not part of the fingerprint
};

/// Parses a sectioned key = value file. Unknown sections or keys, malformed
/// values and invariant failures raise ConfigError with "path:line: ..." context.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& source = "<config>");

/// Assembles the forcing bank and checks it (divergence-free velocity data is
/// rejected, never projected, naming the offending mode).
ForcingBank build_bank(const RunConfig& cfg, const Grid& grid);
SimState build_initial(const RunConfig& cfg, const Grid& grid);

/// Canonical one-line-per-field rendering of every parsed value except the
/// output directory and the source name.
std::string canonical_form(const RunConfig& cfg);
/// 64-bit FNV-1a of canonical_form.
std::uint64_t fingerprint(const RunConfig& cfg);

}  // namespace ecnv
