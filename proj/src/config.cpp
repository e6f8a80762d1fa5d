#include "ecnv/config.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "ecnv/observables.hpp"
#include "ecnv/operators.hpp"

namespace ecnv {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

class Parser {
 public:
  explicit Parser(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ConfigError(source_ + ":" + std::to_string(line) + ": " + msg);
  }

  double real(const std::string& v, int line) const {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out))
      fail(line, "expected a number, got '" + v + "'");
    return out;
  }

  template <class Int>
  Int integer(const std::string& v, int line) const {
    Int out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
      fail(line, "expected an integer, got '" + v + "'");
    return out;
  }

  bool boolean(const std::string& v, int line) const {
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    fail(line, "expected true or false, got '" + v + "'");
  }

  ModeEntry mode(const std::string& v, int line) const {
    const auto toks = split_ws(v);
    if (toks.size() != 4) fail(line, "mode entry must be 'k1 k2 cos_amp sin_amp'");
    ModeEntry m;
    m.k1 = integer<int>(toks[0], line);
    m.k2 = integer<int>(toks[1], line);
    m.cos_amp = real(toks[2], line);
    m.sin_amp = real(toks[3], line);
    m.line = line;
    if (m.k1 == 0 && m.k2 == 0) fail(line, "mode (0, 0) is not allowed: all fields are mean-free");
    return m;
  }

  std::vector<double> reals(const std::string& v, int line) const {
    std::vector<double> out;
    for (const auto& t : split_ws(v)) out.push_back(real(t, line));
    return out;
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

void add_modes(SpectralScalar& field, const std::vector<ModeEntry>& modes, const Grid& grid,
               const std::string& what, const std::string& source) {
  for (const auto& m : modes) {
    const double cutoff = grid.dealias_cutoff();
    if (std::abs(m.k1) > cutoff || std::abs(m.k2) > cutoff) {
      throw ConfigError(source + ":" + std::to_string(m.line) + ": " + what + " mode (" +
                        std::to_string(m.k1) + ", " + std::to_string(m.k2) +
                        ") lies outside the dealias mask for n = " + std::to_string(grid.n()));
    }
    // cos(k.x) -> (c_k + c_-k) / 2, sin(k.x) -> (c_k - c_-k) / (2i).
    const Complex c = field.at(m.k1, m.k2) + Complex(0.5 * m.cos_amp, -0.5 * m.sin_amp);
    field.set_mode(m.k1, m.k2, c);
  }
}

SpectralScalar scalar_from(const std::vector<ModeEntry>& modes, const Grid& grid,
                           const std::string& what, const std::string& source) {
  SpectralScalar f(grid, true);
  add_modes(f, modes, grid, what, source);
  return f;
}

// Components plus the perpendicular gradient of the stream-function modes;
// must be divergence-free as given.
SpectralVector vector_from(const std::vector<ModeEntry>& c1, const std::vector<ModeEntry>& c2,
                           const std::vector<ModeEntry>& psi, const Grid& grid,
                           const std::string& what, const std::string& source) {
  SpectralScalar a = scalar_from(c1, grid, what + "1", source);
  SpectralScalar b = scalar_from(c2, grid, what + "2", source);
  a.set_mean_zero_flag(false);
  b.set_mean_zero_flag(false);
  SpectralVector v(a, b, false);
  v += perp_gradient(scalar_from(psi, grid, what + "_psi", source));
  const double scale = std::max(1.0, std::max(v.comp1().max_abs(), v.comp2().max_abs()));
  for (std::size_t idx = 1; idx < grid.size(); ++idx) {
    const Complex div = grid.k1(idx) * v.comp1()[idx] + grid.k2(idx) * v.comp2()[idx];
    if (std::abs(div) > 1e-12 * scale * grid.k_abs(idx)) {
      int line = 0;
      for (const auto* list : {&c1, &c2})
        for (const auto& m : *list)
          if ((m.k1 == grid.k1_int(idx) && m.k2 == grid.k2_int(idx)) ||
              (m.k1 == -grid.k1_int(idx) && m.k2 == -grid.k2_int(idx)))
            line = line == 0 ? m.line : std::min(line, m.line);
      throw ConfigError(source + ":" + std::to_string(line) + ": " + what +
                        " is not divergence-free at mode (" + std::to_string(grid.k1_int(idx)) +
                        ", " + std::to_string(grid.k2_int(idx)) + ")");
    }
  }
  v.set_div_free_flag(true);
  return v;
}

}  // namespace

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), path);
}

RunConfig parse_config_text(const std::string& text, const std::string& source) {
  Parser p(source);
  RunConfig cfg;
  cfg.source = source;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int noise_index = -1;
  int line = 0;
  std::map<std::string, int> seen;  // single-valued keys -> first line

  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (const auto hash = s.find_first_of("#;"); hash != std::string::npos) s.erase(hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') p.fail(line, "malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      noise_index = -1;
      if (section.rfind("noise.", 0) == 0) {
        noise_index = p.integer<int>(section.substr(6), line);
        if (noise_index < 0) p.fail(line, "noise index must be non-negative");
        if (static_cast<std::size_t>(noise_index) >= cfg.noise.size()) cfg.noise.resize(noise_index + 1);
        section = "noise";
      } else if (section != "grid" && section != "physics" && section != "time" &&
                 section != "ensemble" && section != "rng" && section != "initial" &&
                 section != "forcing" && section != "output" && section != "diagnostics" &&
                 section != "measure" && section != "noise_modes") {
        p.fail(line, "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) p.fail(line, "expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (section.empty()) p.fail(line, "key '" + key + "' outside of any section");
    if (val.empty()) p.fail(line, "empty value for '" + key + "'");

    const std::string full =
        (section == "noise" ? "noise." + std::to_string(noise_index) : section) + "." + key;
    auto single = [&] {
      auto [it, inserted] = seen.emplace(full, line);
      if (!inserted) p.fail(line, "duplicate key '" + key + "' (first set on line " + std::to_string(it->second) + ")");
    };
    auto unknown = [&]() { p.fail(line, "unknown key '" + key + "' in [" + section + "]"); };

    if (section == "grid") {
      if (key != "n") unknown();
      single();
      cfg.n = p.integer<int>(val, line);
      if (cfg.n < 8 || cfg.n % 2 != 0) p.fail(line, "grid.n must be even and >= 8");
    } else if (section == "physics") {
      single();
      if (key == "alpha") cfg.params.alpha = p.real(val, line);
      else if (key == "eps") cfg.params.eps = p.real(val, line);
      else if (key == "zero_potential") cfg.params.zero_potential = p.boolean(val, line);
      else if (key == "nonlinear") cfg.params.nonlinear = p.boolean(val, line);
      else unknown();
    } else if (section == "time") {
      single();
      if (key == "dt") cfg.params.dt = p.real(val, line);
      else if (key == "t_end") cfg.params.t_end = p.real(val, line);
      else unknown();
    } else if (section == "ensemble") {
      if (key != "paths") unknown();
      single();
      cfg.paths = p.integer<std::uint64_t>(val, line);
      if (cfg.paths < 1) p.fail(line, "ensemble.paths must be >= 1");
    } else if (section == "rng") {
      if (key != "seed") unknown();
      single();
      cfg.seed = p.integer<std::uint64_t>(val, line);
    } else if (section == "initial") {
      if (key == "q") cfg.init_q.push_back(p.mode(val, line));
      else if (key == "u1") cfg.init_u1.push_back(p.mode(val, line));
      else if (key == "u2") cfg.init_u2.push_back(p.mode(val, line));
      else if (key == "u_psi") cfg.init_u_psi.push_back(p.mode(val, line));
      else unknown();
    } else if (section == "forcing") {
      if (key == "phi") cfg.phi.push_back(p.mode(val, line));
      else if (key == "f1") cfg.f1.push_back(p.mode(val, line));
      else if (key == "f2") cfg.f2.push_back(p.mode(val, line));
      else if (key == "f_psi") cfg.f_psi.push_back(p.mode(val, line));
      else unknown();
    } else if (section == "noise") {
      NoiseSpec& ns = cfg.noise[noise_index];
      if (key == "g_tilde") ns.g_tilde.push_back(p.mode(val, line));
      else if (key == "g1") ns.g1.push_back(p.mode(val, line));
      else if (key == "g2") ns.g2.push_back(p.mode(val, line));
      else if (key == "g_psi") ns.g_psi.push_back(p.mode(val, line));
      else unknown();
    } else if (section == "noise_modes") {
      single();
      if (key == "kmax") {
        cfg.noise_modes_kmax = p.integer<int>(val, line);
        if (cfg.noise_modes_kmax < 1) p.fail(line, "noise_modes.kmax must be >= 1");
      } else if (key == "amp") cfg.noise_modes_amp = p.real(val, line);
      else unknown();
    } else if (section == "output") {
      single();
      if (key == "dir") cfg.out_dir = val;
      else if (key == "sample_every") {
        cfg.sample_every = p.integer<std::uint64_t>(val, line);
        if (cfg.sample_every < 1) p.fail(line, "output.sample_every must be >= 1");
      } else if (key == "snapshot_every") cfg.snapshot_every = p.integer<std::uint64_t>(val, line);
      else unknown();
    } else if (section == "diagnostics") {
      single();
      DiagnosticsSpec& d = cfg.diagnostics;
      if (key == "l2_q") d.l2_q = p.boolean(val, line);
      else if (key == "l4_q") d.l4_q = p.boolean(val, line);
      else if (key == "h1_u") d.h1_u = p.boolean(val, line);
      else if (key == "gronwall_perturbation") d.gronwall_perturbation = p.real(val, line);
      else if (key == "gronwall_safety") d.gronwall_safety = p.real(val, line);
      else if (key == "commutator_samples") d.commutator_samples = p.integer<int>(val, line);
      else if (key == "commutator_kmax") d.commutator_kmax = p.integer<int>(val, line);
      else unknown();
      if (d.gronwall_perturbation <= 0.0 || d.gronwall_safety < 1.0 || d.commutator_samples < 1 ||
          d.commutator_kmax < 1)
        p.fail(line, "invalid value for '" + key + "'");
    } else if (section == "measure") {
      MeasureSpec& m = cfg.measure;
      if (key == "observable") {
        try {
          Observable::parse(val);
        } catch (const ConfigError& e) {
          p.fail(line, e.what());
        }
        m.observables.push_back(val);
        continue;
      }
      single();
      if (key == "horizon") m.horizon = p.real(val, line);
      else if (key == "t_burn") m.t_burn = p.real(val, line);
      else if (key == "radii") {
        m.radii = p.reals(val, line);
        for (double r : m.radii)
          if (!(r > 0.0)) p.fail(line, "tightness radii must be positive");
      } else if (key == "kernel_time") m.kernel_time = p.real(val, line);
      else if (key == "kernel_threshold") m.kernel_threshold = p.real(val, line);
      else if (key == "feller_offsets") {
        m.feller_offsets = p.reals(val, line);
        if (m.feller_offsets.empty()) p.fail(line, "feller_offsets needs at least one value");
      } else if (key == "histogram_bins") m.histogram_bins = p.integer<std::size_t>(val, line);
      else unknown();
      if (m.horizon < 0.0 || !(m.kernel_time > 0.0) || m.histogram_bins == 0)
        p.fail(line, "invalid value for '" + key + "'");
    }
  }

  for (std::size_t l = 0; l < cfg.noise.size(); ++l) {
    const NoiseSpec& ns = cfg.noise[l];
    if (ns.g_tilde.empty() && ns.g1.empty() && ns.g2.empty() && ns.g_psi.empty())
      throw ConfigError(source + ": noise section [noise." + std::to_string(l) + "] is missing or empty");
  }
  if (seen.count("noise_modes.amp") && !seen.count("noise_modes.kmax"))
    throw ConfigError(source + ":" + std::to_string(seen["noise_modes.amp"]) + ": noise_modes.amp needs noise_modes.kmax");
  if (cfg.noise_modes_kmax > 0 && 3 * cfg.noise_modes_kmax >= cfg.n)
    throw ConfigError(source + ":" + std::to_string(seen["noise_modes.kmax"]) +
                      ": noise_modes.kmax lies outside the dealias mask for n = " + std::to_string(cfg.n));
  try {
    cfg.params.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(source + ": " + e.what());
  }
  // Assembling once validates masks and divergence-free data.
  const Grid grid(cfg.n);
  build_bank(cfg, grid);
  build_initial(cfg, grid);
  return cfg;
}

ForcingBank build_bank(const RunConfig& cfg, const Grid& grid) {
  const std::string& src = cfg.source;
  ForcingBank bank = ForcingBank::zero(grid, cfg.noise.size());
  for (std::size_t l = 0; l < cfg.noise.size(); ++l) {
    const NoiseSpec& ns = cfg.noise[l];
    const std::string name = "noise." + std::to_string(l);
    bank.g_tilde[l] = scalar_from(ns.g_tilde, grid, name + ".g_tilde", src);
    bank.g[l] = vector_from(ns.g1, ns.g2, ns.g_psi, grid, name + ".g", src);
  }
  if (cfg.noise_modes_kmax > 0) {
    const ForcingBank modes = mode_noise_bank(grid, cfg.noise_modes_kmax, cfg.noise_modes_amp);
    bank.g_tilde.insert(bank.g_tilde.end(), modes.g_tilde.begin(), modes.g_tilde.end());
    bank.g.insert(bank.g.end(), modes.g.begin(), modes.g.end());
  }
  bank.phi = scalar_from(cfg.phi, grid, "forcing.phi", src);
  bank.f = vector_from(cfg.f1, cfg.f2, cfg.f_psi, grid, "forcing.f", src);
  bank.validate();
  return bank;
}

SimState build_initial(const RunConfig& cfg, const Grid& grid) {
  SimState s = SimState::zero(grid);
  s.q = scalar_from(cfg.init_q, grid, "initial.q", cfg.source);
  s.u = vector_from(cfg.init_u1, cfg.init_u2, cfg.init_u_psi, grid, "initial.u", cfg.source);
  s.validate();
  return s;
}

namespace {

void put(std::ostringstream& out, const char* key, double v) {
  out << key << '=' << std::hex << std::bit_cast<std::uint64_t>(v) << std::dec << '\n';
}

void put_modes(std::ostringstream& out, const std::string& key, const std::vector<ModeEntry>& modes) {
  for (const auto& m : modes) {
    out << key << '=' << m.k1 << ',' << m.k2 << ',' << std::hex
        << std::bit_cast<std::uint64_t>(m.cos_amp) << ',' << std::bit_cast<std::uint64_t>(m.sin_amp)
        << std::dec << '\n';
  }
}

}  // namespace

std::string canonical_form(const RunConfig& c) {
  std::ostringstream out;
  out << "n=" << c.n << '\n';
  put(out, "alpha", c.params.alpha);
  put(out, "eps", c.params.eps);
  out << "zero_potential=" << c.params.zero_potential << "\nnonlinear=" << c.params.nonlinear << '\n';
  put(out, "dt", c.params.dt);
  put(out, "t_end", c.params.t_end);
  out << "paths=" << c.paths << "\nseed=" << c.seed << '\n';
  put_modes(out, "init.q", c.init_q);
  put_modes(out, "init.u1", c.init_u1);
  put_modes(out, "init.u2", c.init_u2);
  put_modes(out, "init.u_psi", c.init_u_psi);
  put_modes(out, "phi", c.phi);
  put_modes(out, "f1", c.f1);
  put_modes(out, "f2", c.f2);
  put_modes(out, "f_psi", c.f_psi);
  for (std::size_t l = 0; l < c.noise.size(); ++l) {
    const std::string pre = "noise." + std::to_string(l) + ".";
    put_modes(out, pre + "g_tilde", c.noise[l].g_tilde);
    put_modes(out, pre + "g1", c.noise[l].g1);
    put_modes(out, pre + "g2", c.noise[l].g2);
    put_modes(out, pre + "g_psi", c.noise[l].g_psi);
  }
  out << "noise_modes_kmax=" << c.noise_modes_kmax << '\n';
  put(out, "noise_modes_amp", c.noise_modes_amp);
  out << "sample_every=" << c.sample_every
      << "\nsnapshot_every=" << c.snapshot_every << '\n';
  const auto& d = c.diagnostics;
  out << "l2_q=" << d.l2_q << "\nl4_q=" << d.l4_q << "\nh1_u=" << d.h1_u << '\n';
  put(out, "gronwall_perturbation", d.gronwall_perturbation);
  put(out, "gronwall_safety", d.gronwall_safety);
  out << "commutator_samples=" << d.commutator_samples << "\ncommutator_kmax=" << d.commutator_kmax
      << '\n';
  const auto& m = c.measure;
  for (const auto& o : m.observables) out << "observable=" << o << '\n';
  put(out, "horizon", m.horizon);
  put(out, "t_burn", m.t_burn);
  for (double r : m.radii) put(out, "radius", r);
  put(out, "kernel_time", m.kernel_time);
  put(out, "kernel_threshold", m.kernel_threshold);
  for (double f : m.feller_offsets) put(out, "feller_offset", f);
  out << "histogram_bins=" << m.histogram_bins << '\n';
  return out.str();
}

std::uint64_t fingerprint(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_form(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace ecnv
