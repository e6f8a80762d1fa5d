#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "ecnv/grid.hpp"

namespace ecnv {

/// Real values on the N x N collocation grid, row-major over (x1, x2) with
/// x_i = 2pi j_i / N.
class PhysicalField {
 public:
  PhysicalField() = default;
  explicit PhysicalField(const Grid& grid);
  PhysicalField(std::shared_ptr<const Grid> grid);
  PhysicalField(const Grid& grid, std::vector<double> values);

  const Grid& grid() const { return *grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  /// Grid quadrature (rectangle rule, exact for trigonometric polynomials of
  /// degree < N).
  double integral() const;
  double max_abs() const;

 private:
  std::shared_ptr<const Grid> grid_;
  std::vector<double> values_;
};

/// Real periodic scalar field stored as its full N x N Fourier coefficient
/// array. The Hermitian pairing c(-k) = conj(c(k)) is maintained by every
/// operation in this library; mean_zero pins c(0,0) to exactly zero.
class SpectralScalar {
 public:
  SpectralScalar() = default;
  explicit SpectralScalar(const Grid& grid, bool mean_zero = true);

  /// Zero field on the same grid (shares the grid handle, no allocation of a
  /// new grid).
  SpectralScalar zeros_like(bool mean_zero = true) const;

  const Grid& grid() const { return *grid_; }
  const std::shared_ptr<const Grid>& grid_handle() const noexcept { return grid_; }
  bool valid() const noexcept { return grid_ != nullptr; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  Complex& operator[](std::size_t idx) noexcept { return coeffs_[idx]; }
  const Complex& operator[](std::size_t idx) const noexcept { return coeffs_[idx]; }
  Complex at(int k1, int k2) const;
  /// Sets c(k) and c(-k) together.
  void set_mode(int k1, int k2, Complex value);

  std::span<Complex> coeffs() noexcept { return coeffs_; }
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }

  bool mean_zero() const noexcept { return mean_zero_; }
  /// Zeros c(0,0) and sets the flag.
  void pin_mean();
  /// Sets the flag after verifying c(0,0) == 0; throws InvariantViolation otherwise.
  void assert_mean_zero(const char* context) const;
  void set_mean_zero_flag(bool flag) noexcept { mean_zero_ = flag; }

  /// max_k |c(k) - conj(c(-k))|.
  double hermitian_defect() const;
  void enforce_hermitian();
  /// Zeros every mode outside the 2/3 dealias mask.
  void apply_dealias();
  bool all_finite() const;
  double max_abs() const;

  SpectralScalar& operator+=(const SpectralScalar& other);
  SpectralScalar& operator-=(const SpectralScalar& other);
  SpectralScalar& operator*=(double s);
  /// this += s * other
  void axpy(double s, const SpectralScalar& other);

  friend bool operator==(const SpectralScalar& a, const SpectralScalar& b) {
    return a.coeffs_ == b.coeffs_ && a.mean_zero_ == b.mean_zero_;
  }

 private:
  void check_compatible(const SpectralScalar& other) const;

  std::shared_ptr<const Grid> grid_;
  std::vector<Complex> coeffs_;
  bool mean_zero_ = true;
};

SpectralScalar operator+(SpectralScalar a, const SpectralScalar& b);
SpectralScalar operator-(SpectralScalar a, const SpectralScalar& b);
SpectralScalar operator*(double s, SpectralScalar a);

/// Two-component periodic vector field. div_free asserts k.c(k) = 0 for all k.
class SpectralVector {
 public:
  SpectralVector() = default;
  explicit SpectralVector(const Grid& grid, bool div_free = true);
  SpectralVector(SpectralScalar c1, SpectralScalar c2, bool div_free);

  SpectralVector zeros_like(bool div_free = true) const;

  const Grid& grid() const { return c1_.grid(); }
  bool valid() const noexcept { return c1_.valid(); }

  SpectralScalar& comp1() noexcept { return c1_; }
  SpectralScalar& comp2() noexcept { return c2_; }
  const SpectralScalar& comp1() const noexcept { return c1_; }
  const SpectralScalar& comp2() const noexcept { return c2_; }
  SpectralScalar& operator[](int i) noexcept { return i == 0 ? c1_ : c2_; }
  const SpectralScalar& operator[](int i) const noexcept { return i == 0 ? c1_ : c2_; }

  bool div_free() const noexcept { return div_free_; }
  void set_div_free_flag(bool flag) noexcept { div_free_ = flag; }
  /// max_k |k1 c1(k) + k2 c2(k)|.
  double divergence_defect() const;
  void assert_div_free(const char* context) const;

  bool all_finite() const { return c1_.all_finite() && c2_.all_finite(); }
  void apply_dealias();
  double hermitian_defect() const;

  SpectralVector& operator+=(const SpectralVector& other);
  SpectralVector& operator-=(const SpectralVector& other);
  SpectralVector& operator*=(double s);
  void axpy(double s, const SpectralVector& other);

  friend bool operator==(const SpectralVector& a, const SpectralVector& b) {
    return a.c1_ == b.c1_ && a.c2_ == b.c2_ && a.div_free_ == b.div_free_;
  }

 private:
  SpectralScalar c1_;
  SpectralScalar c2_;
  bool div_free_ = true;
};

SpectralVector operator+(SpectralVector a, const SpectralVector& b);
SpectralVector operator-(SpectralVector a, const SpectralVector& b);
SpectralVector operator*(double s, SpectralVector a);

}  // namespace ecnv
