#include "ecnv/observables.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "ecnv/operators.hpp"

namespace ecnv {

namespace {

const char* field_name(ObservableField f) {
  switch (f) {
    case ObservableField::q: return "q";
    case ObservableField::u1: return "u1";
    case ObservableField::u2: return "u2";
  }
  return "?";
}

ObservableField parse_field(const std::string& s) {
  if (s == "q") return ObservableField::q;
  if (s == "u1") return ObservableField::u1;
  if (s == "u2") return ObservableField::u2;
  throw ConfigError("unknown observable field '" + s + "' (expected q, u1 or u2)");
}

}  // namespace

double h_norm_sq(const SimState& s) { return sobolev_sq(s.q, -0.5) + sobolev_sq(s.u, 0.0); }

Observable::Observable(ObservableKind kind, ObservableField field, int k1, int k2, double clip,
                       double scale)
    : kind_(kind), field_(field), k1_(k1), k2_(k2), clip_(clip), scale_(scale) {
  std::ostringstream name;
  switch (kind) {
    case ObservableKind::clipped_h_norm:
      if (!(clip > 0.0)) throw InvalidParameter("clip must be positive");
      name << "clipped_h_" << clip;
      break;
    case ObservableKind::mode_real:
    case ObservableKind::mode_imag:
    case ObservableKind::tanh_mode: {
      if (k1 == 0 && k2 == 0) throw InvalidParameter("mode observables need k != 0");
      // |c_k| <= sqrt(|k| / (8 pi^2)) ||Lambda^{-1/2} q||, so the growth bound
      // with constant 1 holds while |k| <= 32 pi^2.
      if (std::hypot(k1, k2) > 32.0 * std::numbers::pi * std::numbers::pi)
        throw InvalidParameter("mode observable wavenumber too large for the growth bound");
      const char* prefix = kind == ObservableKind::mode_real   ? "mode_re_"
                           : kind == ObservableKind::mode_imag ? "mode_im_"
                                                               : "tanh_mode_";
      name << prefix << field_name(field) << '_' << k1 << '_' << k2;
      break;
    }
  }
  name_ = name.str();
}

Observable Observable::clipped_h_norm(double clip) {
  return Observable(ObservableKind::clipped_h_norm, ObservableField::q, 0, 0, clip, 1.0);
}
Observable Observable::mode_real(ObservableField field, int k1, int k2) {
  return Observable(ObservableKind::mode_real, field, k1, k2, 1.0, 1.0);
}
Observable Observable::mode_imag(ObservableField field, int k1, int k2) {
  return Observable(ObservableKind::mode_imag, field, k1, k2, 1.0, 1.0);
}
Observable Observable::tanh_mode(ObservableField field, int k1, int k2, double scale) {
  return Observable(ObservableKind::tanh_mode, field, k1, k2, 1.0, scale);
}

Observable Observable::parse(const std::string& spec) {
  std::istringstream in(spec);
  std::string kind;
  in >> kind;
  std::vector<std::string> rest;
  for (std::string tok; in >> tok;) rest.push_back(tok);
  auto num = [&](std::size_t i) {
    try {
      std::size_t used = 0;
      const double v = std::stod(rest.at(i), &used);
      if (used != rest[i].size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("bad observable '" + spec + "'");
    }
  };
  auto integer = [&](std::size_t i) {
    const double v = num(i);
    if (v != std::floor(v)) throw ConfigError("bad observable '" + spec + "': non-integer wavenumber");
    return static_cast<int>(v);
  };
  try {
    if (kind == "clipped_h" && rest.size() == 1) return clipped_h_norm(num(0));
    if ((kind == "mode_re" || kind == "mode_im") && rest.size() == 3) {
      const ObservableField f = parse_field(rest[0]);
      return kind == "mode_re" ? mode_real(f, integer(1), integer(2))
                               : mode_imag(f, integer(1), integer(2));
    }
    if (kind == "tanh_mode" && (rest.size() == 3 || rest.size() == 4))
      return tanh_mode(parse_field(rest[0]), integer(1), integer(2), rest.size() == 4 ? num(3) : 1.0);
  } catch (const InvalidParameter& e) {
    throw ConfigError("bad observable '" + spec + "': " + e.what());
  }
  throw ConfigError("bad observable '" + spec + "'");
}

double Observable::operator()(const SimState& s) const {
  if (kind_ == ObservableKind::clipped_h_norm) return std::min(h_norm_sq(s), clip_);
  const SpectralScalar& f = field_ == ObservableField::q    ? s.q
                            : field_ == ObservableField::u1 ? s.u.comp1()
                                                            : s.u.comp2();
  const Complex c = f.at(k1_, k2_);
  switch (kind_) {
    case ObservableKind::mode_real: return c.real();
    case ObservableKind::mode_imag: return c.imag();
    case ObservableKind::tanh_mode: return std::tanh(scale_ * c.real());
    default: return 0.0;
  }
}

double Observable::growth_constant() const noexcept {
  return kind_ == ObservableKind::clipped_h_norm ? std::max(1.0, clip_) : 1.0;
}

}  // namespace ecnv
