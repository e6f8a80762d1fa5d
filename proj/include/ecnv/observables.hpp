#pragma once

#include <string>

#include "ecnv/dynamics.hpp"

namespace ecnv {

enum class ObservableKind { clipped_h_norm, mode_real, mode_imag, tanh_mode };
enum class ObservableField { q, u1, u2 };

/// Real functional on the state space with |h(q, u)| <= max(1, M) (1 + ||(q, u)||_H^2),
/// where ||(q, u)||_H^2 = ||Lambda^{-1/2} q||^2 + ||u||^2.
class Observable {
 public:
  /// min(||(q, u)||_H^2, M).
  static Observable clipped_h_norm(double clip);
  static Observable mode_real(ObservableField field, int k1, int k2);
  static Observable mode_imag(ObservableField field, int k1, int k2);
  /// tanh(scale * Re c_k).
  static Observable tanh_mode(ObservableField field, int k1, int k2, double scale = 1.0);
  /// Parses "clipped_h M", "mode_re F k1 k2", "mode_im F k1 k2" or
  /// "tanh_mode F k1 k2 [scale]" with F in {q, u1, u2}. Throws ConfigError.
  static Observable parse(const std::string& spec);

  double operator()(const SimState& s) const;

  const std::string& name() const noexcept { return name_; }
  ObservableKind kind() const noexcept { return kind_; }
  bool bounded() const noexcept {
    return kind_ == ObservableKind::clipped_h_norm || kind_ == ObservableKind::tanh_mode;
  }
  double clip() const noexcept { return clip_; }
  /// max(1, M): the constant of the growth bound.
  double growth_constant() const noexcept;

 private:
  Observable(ObservableKind kind, ObservableField field, int k1, int k2, double clip, double scale);

  std::string name_;
  ObservableKind kind_;
  ObservableField field_ = ObservableField::q;
  int k1_ = 0, k2_ = 0;
  double clip_ = 1.0;
  double scale_ = 1.0;
};

/// ||Lambda^{-1/2} q||^2 + ||u||^2.
double h_norm_sq(const SimState& s);

}  // namespace ecnv
