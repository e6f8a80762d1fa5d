#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace ecnv {

using Complex = std::complex<double>;

namespace detail {
struct GridData;
}

/// Periodic N x N collocation grid on [0, 2pi)^2 together with its Fourier
/// lattice. Spectral storage is row-major over (k1, k2), each axis in FFT
/// order 0, 1, ..., N/2-1, -N/2, ..., -1. Copies share the wavenumber tables
/// and transform plans.
class Grid {
 public:
  explicit Grid(int n_modes);

  int n() const noexcept;
  std::size_t size() const noexcept;  // N^2

  /// Signed wavenumber of array index i along one axis.
  int wavenumber(int index) const noexcept;
  /// Array index of signed wavenumber k (taken mod N).
  int index_of(int k) const noexcept;
  std::size_t flat(int k1, int k2) const noexcept;
  /// Flat index of -k.
  std::size_t mirror(std::size_t idx) const noexcept;

  double k1(std::size_t idx) const noexcept;
  double k2(std::size_t idx) const noexcept;
  double k_abs(std::size_t idx) const noexcept;
  double k_sq(std::size_t idx) const noexcept;
  int k1_int(std::size_t idx) const noexcept;
  int k2_int(std::size_t idx) const noexcept;
  /// 2/3-rule: true iff 3|k1| < N and 3|k2| < N.
  bool dealiased(std::size_t idx) const noexcept;
  /// Largest retained |k_i| under the dealias mask.
  int dealias_cutoff() const noexcept;

  double spacing() const noexcept;    // 2pi/N
  double cell_area() const noexcept;  // (2pi/N)^2

  /// Physical values -> coefficients, c_k = N^-2 sum_x f(x) e^{-ik.x}.
  /// The output is symmetrised so that c(-k) = conj(c(k)) holds exactly.
  void forward(std::span<const double> phys, std::span<Complex> spec) const;
  /// Coefficients (assumed Hermitian) -> physical values. With dealias set,
  /// modes outside the 2/3 mask are dropped on the way.
  void inverse(std::span<const Complex> spec, std::span<double> phys,
               bool dealias = false) const;
  /// Two real fields through one complex transform each way.
  void forward_pair(std::span<const double> a, std::span<const double> b,
                    std::span<Complex> a_hat, std::span<Complex> b_hat) const;
  void inverse_pair(std::span<const Complex> a_hat, std::span<const Complex> b_hat,
                    std::span<double> a, std::span<double> b, bool dealias = false) const;

  bool operator==(const Grid& other) const noexcept { return n() == other.n(); }

 private:
  std::shared_ptr<const detail::GridData> data_;
};

}  // namespace ecnv
