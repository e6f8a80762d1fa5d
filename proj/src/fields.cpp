#include "ecnv/fields.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ecnv/error.hpp"

namespace ecnv {

PhysicalField::PhysicalField(const Grid& grid)
    : grid_(std::make_shared<const Grid>(grid)), values_(grid.size(), 0.0) {}

PhysicalField::PhysicalField(std::shared_ptr<const Grid> grid)
    : grid_(std::move(grid)), values_(grid_->size(), 0.0) {}

PhysicalField::PhysicalField(const Grid& grid, std::vector<double> values)
    : grid_(std::make_shared<const Grid>(grid)), values_(std::move(values)) {
  if (values_.size() != grid.size()) {
    throw ConfigError("physical field has " + std::to_string(values_.size()) +
                      " values, grid expects " + std::to_string(grid.size()));
  }
}

double PhysicalField::integral() const {
  double sum = 0.0;
  for (double v : values_) sum += v;
  return sum * grid_->cell_area();
}

double PhysicalField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

SpectralScalar::SpectralScalar(const Grid& grid, bool mean_zero)
    : grid_(std::make_shared<const Grid>(grid)),
      coeffs_(grid.size(), Complex(0.0, 0.0)),
      mean_zero_(mean_zero) {}

SpectralScalar SpectralScalar::zeros_like(bool mean_zero) const {
  SpectralScalar out;
  out.grid_ = grid_;
  out.coeffs_.assign(coeffs_.size(), Complex(0.0, 0.0));
  out.mean_zero_ = mean_zero;
  return out;
}

Complex SpectralScalar::at(int k1, int k2) const { return coeffs_[grid_->flat(k1, k2)]; }

void SpectralScalar::set_mode(int k1, int k2, Complex value) {
  const std::size_t idx = grid_->flat(k1, k2);
  const std::size_t mir = grid_->mirror(idx);
  if (idx == mir) value = Complex(value.real(), 0.0);
  coeffs_[idx] = value;
  coeffs_[mir] = std::conj(value);
}

void SpectralScalar::pin_mean() {
  coeffs_[0] = Complex(0.0, 0.0);
  mean_zero_ = true;
}

void SpectralScalar::assert_mean_zero(const char* context) const {
  if (!mean_zero_ || coeffs_[0] != Complex(0.0, 0.0)) {
    throw InvariantViolation(std::string(context) + ": scalar field is not mean-zero");
  }
}

double SpectralScalar::hermitian_defect() const {
  double d = 0.0;
  for (std::size_t idx = 0; idx < coeffs_.size(); ++idx) {
    d = std::max(d, std::abs(coeffs_[idx] - std::conj(coeffs_[grid_->mirror(idx)])));
  }
  return d;
}

void SpectralScalar::enforce_hermitian() {
  for (std::size_t idx = 0; idx < coeffs_.size(); ++idx) {
    const std::size_t mir = grid_->mirror(idx);
    if (mir < idx) continue;
    if (mir == idx) {
      coeffs_[idx] = Complex(coeffs_[idx].real(), 0.0);
      continue;
    }
    const Complex avg = 0.5 * (coeffs_[idx] + std::conj(coeffs_[mir]));
    coeffs_[idx] = avg;
    coeffs_[mir] = std::conj(avg);
  }
}

void SpectralScalar::apply_dealias() {
  for (std::size_t idx = 0; idx < coeffs_.size(); ++idx) {
    if (!grid_->dealiased(idx)) coeffs_[idx] = Complex(0.0, 0.0);
  }
}

bool SpectralScalar::all_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Complex& c) {
    return std::isfinite(c.real()) && std::isfinite(c.imag());
  });
}

double SpectralScalar::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

void SpectralScalar::check_compatible(const SpectralScalar& other) const {
  if (!valid() || !other.valid() || coeffs_.size() != other.coeffs_.size()) {
    throw InvariantViolation("spectral fields live on different grids");
  }
}

SpectralScalar& SpectralScalar::operator+=(const SpectralScalar& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  mean_zero_ = mean_zero_ && other.mean_zero_;
  return *this;
}

SpectralScalar& SpectralScalar::operator-=(const SpectralScalar& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  mean_zero_ = mean_zero_ && other.mean_zero_;
  return *this;
}

SpectralScalar& SpectralScalar::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

void SpectralScalar::axpy(double s, const SpectralScalar& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += s * other.coeffs_[i];
  mean_zero_ = mean_zero_ && other.mean_zero_;
}

SpectralScalar operator+(SpectralScalar a, const SpectralScalar& b) { return a += b; }
SpectralScalar operator-(SpectralScalar a, const SpectralScalar& b) { return a -= b; }
SpectralScalar operator*(double s, SpectralScalar a) { return a *= s; }

SpectralVector::SpectralVector(const Grid& grid, bool div_free)
    : c1_(grid, false), c2_(c1_.zeros_like(false)), div_free_(div_free) {}

SpectralVector::SpectralVector(SpectralScalar c1, SpectralScalar c2, bool div_free)
    : c1_(std::move(c1)), c2_(std::move(c2)), div_free_(div_free) {
  if (!c1_.valid() || !c2_.valid() || c1_.size() != c2_.size()) {
    throw InvariantViolation("vector components live on different grids");
  }
  c1_.set_mean_zero_flag(false);
  c2_.set_mean_zero_flag(false);
}

SpectralVector SpectralVector::zeros_like(bool div_free) const {
  return SpectralVector(c1_.zeros_like(false), c1_.zeros_like(false), div_free);
}

double SpectralVector::divergence_defect() const {
  const Grid& g = grid();
  double d = 0.0;
  for (std::size_t idx = 0; idx < c1_.size(); ++idx) {
    d = std::max(d, std::abs(g.k1(idx) * c1_[idx] + g.k2(idx) * c2_[idx]));
  }
  return d;
}

void SpectralVector::assert_div_free(const char* context) const {
  if (!div_free_) {
    throw InvariantViolation(std::string(context) + ": vector field is not flagged divergence-free");
  }
}

void SpectralVector::apply_dealias() {
  c1_.apply_dealias();
  c2_.apply_dealias();
}

double SpectralVector::hermitian_defect() const {
  return std::max(c1_.hermitian_defect(), c2_.hermitian_defect());
}

SpectralVector& SpectralVector::operator+=(const SpectralVector& other) {
  c1_ += other.c1_;
  c2_ += other.c2_;
  div_free_ = div_free_ && other.div_free_;
  return *this;
}

SpectralVector& SpectralVector::operator-=(const SpectralVector& other) {
  c1_ -= other.c1_;
  c2_ -= other.c2_;
  div_free_ = div_free_ && other.div_free_;
  return *this;
}

SpectralVector& SpectralVector::operator*=(double s) {
  c1_ *= s;
  c2_ *= s;
  return *this;
}

void SpectralVector::axpy(double s, const SpectralVector& other) {
  c1_.axpy(s, other.c1_);
  c2_.axpy(s, other.c2_);
  div_free_ = div_free_ && other.div_free_;
}

SpectralVector operator+(SpectralVector a, const SpectralVector& b) { return a += b; }
SpectralVector operator-(SpectralVector a, const SpectralVector& b) { return a -= b; }
SpectralVector operator*(double s, SpectralVector a) { return a *= s; }

}  // namespace ecnv
