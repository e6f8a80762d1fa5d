#include "ecnv/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "ecnv/error.hpp"

namespace ecnv {

std::string_view category_name(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::config:
      return "config";
    case ErrorCategory::invalid_parameter:
      return "invalid_parameter";
    case ErrorCategory::invariant:
      return "invariant";
    case ErrorCategory::blow_up:
      return "blow_up";
    case ErrorCategory::selftest:
      return "selftest";
  }
  return "unknown";
}

namespace detail {

struct GridData {
  int n = 0;
  int cutoff = 0;
  std::vector<int> k1i, k2i;
  std::vector<double> k1, k2, k_abs, k_sq;
  std::vector<std::size_t> mirror;
  std::vector<char> mask;
  fftw_plan forward_plan = nullptr;
  fftw_plan backward_plan = nullptr;

  ~GridData() {
    std::lock_guard lock(planner_mutex());
    if (forward_plan) fftw_destroy_plan(forward_plan);
    if (backward_plan) fftw_destroy_plan(backward_plan);
  }

  // The FFTW planner is not re-entrant; execution with new arrays is.
  static std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
  }
};

namespace {

std::shared_ptr<const GridData> build(int n) {
  auto data = std::make_shared<GridData>();
  data->n = n;
  data->cutoff = (n - 1) / 3;
  const std::size_t size = static_cast<std::size_t>(n) * n;
  data->k1i.resize(size);
  data->k2i.resize(size);
  data->k1.resize(size);
  data->k2.resize(size);
  data->k_abs.resize(size);
  data->k_sq.resize(size);
  data->mirror.resize(size);
  data->mask.resize(size);
  auto wave = [n](int i) { return i < n / 2 ? i : i - n; };
  for (int i1 = 0; i1 < n; ++i1) {
    for (int i2 = 0; i2 < n; ++i2) {
      const std::size_t idx = static_cast<std::size_t>(i1) * n + i2;
      const int a = wave(i1);
      const int b = wave(i2);
      data->k1i[idx] = a;
      data->k2i[idx] = b;
      data->k1[idx] = a;
      data->k2[idx] = b;
      data->k_sq[idx] = double(a) * a + double(b) * b;
      data->k_abs[idx] = std::sqrt(data->k_sq[idx]);
      const int m1 = (n - i1) % n;
      const int m2 = (n - i2) % n;
      data->mirror[idx] = static_cast<std::size_t>(m1) * n + m2;
      data->mask[idx] = (3 * std::abs(a) < n) && (3 * std::abs(b) < n);
    }
  }
  std::vector<Complex> probe(size);
  auto* buf = reinterpret_cast<fftw_complex*>(probe.data());
  std::lock_guard lock(GridData::planner_mutex());
  data->forward_plan =
      fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  data->backward_plan =
      fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!data->forward_plan || !data->backward_plan) {
    throw ConfigError("FFTW planning failed for N = " + std::to_string(n));
  }
  return data;
}

std::shared_ptr<const GridData> lookup(int n) {
  static std::mutex cache_mutex;
  static std::map<int, std::shared_ptr<const GridData>> cache;
  std::lock_guard lock(cache_mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto data = build(n);
  cache.emplace(n, data);
  return data;
}

std::vector<Complex>& scratch(std::size_t size) {
  thread_local std::vector<Complex> buffer;
  if (buffer.size() < size) buffer.resize(size);
  return buffer;
}

void check_size(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    throw ConfigError(std::string(what) + ": expected " + std::to_string(expected) +
                      " values, got " + std::to_string(got));
  }
}

}  // namespace
}  // namespace detail

Grid::Grid(int n_modes) {
  if (n_modes <= 0 || n_modes % 2 != 0) {
    throw ConfigError("grid size must be a positive even integer, got " +
                      std::to_string(n_modes));
  }
  data_ = detail::lookup(n_modes);
}

int Grid::n() const noexcept { return data_->n; }
std::size_t Grid::size() const noexcept { return data_->k1.size(); }
int Grid::wavenumber(int index) const noexcept {
  return index < n() / 2 ? index : index - n();
}
int Grid::index_of(int k) const noexcept { return ((k % n()) + n()) % n(); }
std::size_t Grid::flat(int k1, int k2) const noexcept {
  return static_cast<std::size_t>(index_of(k1)) * n() + index_of(k2);
}
std::size_t Grid::mirror(std::size_t idx) const noexcept { return data_->mirror[idx]; }
double Grid::k1(std::size_t idx) const noexcept { return data_->k1[idx]; }
double Grid::k2(std::size_t idx) const noexcept { return data_->k2[idx]; }
double Grid::k_abs(std::size_t idx) const noexcept { return data_->k_abs[idx]; }
double Grid::k_sq(std::size_t idx) const noexcept { return data_->k_sq[idx]; }
int Grid::k1_int(std::size_t idx) const noexcept { return data_->k1i[idx]; }
int Grid::k2_int(std::size_t idx) const noexcept { return data_->k2i[idx]; }
bool Grid::dealiased(std::size_t idx) const noexcept { return data_->mask[idx] != 0; }
int Grid::dealias_cutoff() const noexcept { return data_->cutoff; }
double Grid::spacing() const noexcept { return 2.0 * std::numbers::pi / n(); }
double Grid::cell_area() const noexcept { return spacing() * spacing(); }

namespace {

// a_hat = (Z(k) + conj Z(-k)) / 2, b_hat = (Z(k) - conj Z(-k)) / (2i).
// Written so that the Hermitian pairing holds bit-for-bit.
void split_hermitian(const Grid& grid, const std::vector<Complex>& z,
                     std::span<Complex> a_hat, Complex* b_hat) {
  const std::size_t size = grid.size();
  for (std::size_t idx = 0; idx < size; ++idx) {
    const Complex zk = z[idx];
    const Complex zm = std::conj(z[grid.mirror(idx)]);
    a_hat[idx] = 0.5 * (zk + zm);
    if (b_hat) {
      const Complex d = zk - zm;
      b_hat[idx] = Complex(0.5 * d.imag(), -0.5 * d.real());
    }
  }
}

}  // namespace

void Grid::forward(std::span<const double> phys, std::span<Complex> spec) const {
  detail::check_size(size(), phys.size(), "forward transform input");
  detail::check_size(size(), spec.size(), "forward transform output");
  auto& buf = detail::scratch(size());
  const double norm = 1.0 / static_cast<double>(size());
  for (std::size_t i = 0; i < size(); ++i) buf[i] = Complex(phys[i] * norm, 0.0);
  auto* p = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_execute_dft(data_->forward_plan, p, p);
  split_hermitian(*this, buf, spec, nullptr);
}

void Grid::inverse(std::span<const Complex> spec, std::span<double> phys,
                   bool dealias) const {
  detail::check_size(size(), spec.size(), "inverse transform input");
  detail::check_size(size(), phys.size(), "inverse transform output");
  auto& buf = detail::scratch(size());
  for (std::size_t i = 0; i < size(); ++i) {
    buf[i] = (dealias && !dealiased(i)) ? Complex(0.0, 0.0) : spec[i];
  }
  auto* p = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_execute_dft(data_->backward_plan, p, p);
  for (std::size_t i = 0; i < size(); ++i) phys[i] = buf[i].real();
}

void Grid::forward_pair(std::span<const double> a, std::span<const double> b,
                        std::span<Complex> a_hat, std::span<Complex> b_hat) const {
  detail::check_size(size(), a.size(), "forward transform input");
  detail::check_size(size(), b.size(), "forward transform input");
  detail::check_size(size(), a_hat.size(), "forward transform output");
  detail::check_size(size(), b_hat.size(), "forward transform output");
  auto& buf = detail::scratch(size());
  const double norm = 1.0 / static_cast<double>(size());
  for (std::size_t i = 0; i < size(); ++i) buf[i] = Complex(a[i] * norm, b[i] * norm);
  auto* p = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_execute_dft(data_->forward_plan, p, p);
  split_hermitian(*this, buf, a_hat, b_hat.data());
}

void Grid::inverse_pair(std::span<const Complex> a_hat, std::span<const Complex> b_hat,
                        std::span<double> a, std::span<double> b, bool dealias) const {
  detail::check_size(size(), a_hat.size(), "inverse transform input");
  detail::check_size(size(), b_hat.size(), "inverse transform input");
  detail::check_size(size(), a.size(), "inverse transform output");
  detail::check_size(size(), b.size(), "inverse transform output");
  auto& buf = detail::scratch(size());
  for (std::size_t i = 0; i < size(); ++i) {
    buf[i] = (dealias && !dealiased(i))
                 ? Complex(0.0, 0.0)
                 : Complex(a_hat[i].real() - b_hat[i].imag(), a_hat[i].imag() + b_hat[i].real());
  }
  auto* p = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_execute_dft(data_->backward_plan, p, p);
  for (std::size_t i = 0; i < size(); ++i) {
    a[i] = buf[i].real();
    b[i] = buf[i].imag();
  }
}

}  // namespace ecnv
