#include "ecnv/operators.hpp"

#include <cmath>
#include <numbers>

#include "ecnv/error.hpp"

namespace ecnv {

namespace {

constexpr double kTorusArea = 4.0 * std::numbers::pi * std::numbers::pi;

template <class Symbol>
SpectralScalar apply_symbol(const SpectralScalar& q, bool mean_zero, Symbol symbol) {
  SpectralScalar out = q.zeros_like(mean_zero);
  const Grid& g = q.grid();
  for (std::size_t idx = 1; idx < q.size(); ++idx) out[idx] = symbol(idx, g) * q[idx];
  return out;
}

// i * k * c without rounding: (re, im) -> (-k im, k re).
inline Complex times_ik(double k, const Complex& c) { return Complex(-k * c.imag(), k * c.real()); }

}  // namespace

PhysicalField to_physical(const SpectralScalar& field) {
  PhysicalField out(field.grid_handle());
  field.grid().inverse(field.coeffs(), out.values());
  return out;
}

std::pair<PhysicalField, PhysicalField> to_physical(const SpectralVector& field) {
  PhysicalField a(field.comp1().grid_handle());
  PhysicalField b(field.comp1().grid_handle());
  field.grid().inverse_pair(field.comp1().coeffs(), field.comp2().coeffs(), a.values(),
                            b.values());
  return {std::move(a), std::move(b)};
}

SpectralScalar to_spectral(std::span<const double> values, const Grid& grid) {
  if (values.size() != grid.size()) {
    throw ConfigError("to_spectral: array has " + std::to_string(values.size()) +
                      " values, grid is " + std::to_string(grid.n()) + "x" +
                      std::to_string(grid.n()));
  }
  SpectralScalar out(grid, false);
  grid.forward(values, out.coeffs());
  return out;
}

SpectralScalar to_spectral(const PhysicalField& field) {
  SpectralScalar out(field.grid(), false);
  field.grid().forward(field.values(), out.coeffs());
  return out;
}

SpectralScalar fractional_laplacian(const SpectralScalar& q, double alpha) {
  if (!(alpha >= 0.0)) {
    throw InvalidParameter("fractional_laplacian: alpha must be >= 0, got " + std::to_string(alpha));
  }
  if (alpha == 1.0) {
    return apply_symbol(q, true, [](std::size_t i, const Grid& g) { return g.k_abs(i); });
  }
  if (alpha == 2.0) {
    return apply_symbol(q, true, [](std::size_t i, const Grid& g) { return g.k_sq(i); });
  }
  return apply_symbol(q, true,
                      [alpha](std::size_t i, const Grid& g) { return std::pow(g.k_abs(i), alpha); });
}

SpectralScalar lambda_power(const SpectralScalar& q, double s) {
  if (s >= 0.0) return fractional_laplacian(q, s);
  q.assert_mean_zero("lambda_power");
  if (s == -1.0) {
    return apply_symbol(q, true, [](std::size_t i, const Grid& g) { return 1.0 / g.k_abs(i); });
  }
  return apply_symbol(q, true,
                      [s](std::size_t i, const Grid& g) { return std::pow(g.k_abs(i), s); });
}

SpectralScalar inv_lambda(const SpectralScalar& q) {
  q.assert_mean_zero("inv_lambda");
  return lambda_power(q, -1.0);
}

SpectralVector riesz(const SpectralScalar& q) {
  q.assert_mean_zero("riesz");
  const Grid& g = q.grid();
  SpectralScalar r1 = q.zeros_like(false);
  SpectralScalar r2 = q.zeros_like(false);
  for (std::size_t idx = 1; idx < q.size(); ++idx) {
    const double inv = 1.0 / g.k_abs(idx);
    r1[idx] = times_ik(g.k1(idx) * inv, q[idx]);
    r2[idx] = times_ik(g.k2(idx) * inv, q[idx]);
  }
  return SpectralVector(std::move(r1), std::move(r2), false);
}

SpectralVector leray_project(const SpectralVector& v) {
  const Grid& g = v.grid();
  SpectralVector out = v;
  out.set_div_free_flag(true);
  const auto& a = v.comp1();
  const auto& b = v.comp2();
  auto& oa = out.comp1();
  auto& ob = out.comp2();
  for (std::size_t idx = 1; idx < a.size(); ++idx) {
    const double k1 = g.k1(idx);
    const double k2 = g.k2(idx);
    const Complex kdotv = (k1 * a[idx] + k2 * b[idx]) / g.k_sq(idx);
    oa[idx] = a[idx] - k1 * kdotv;
    ob[idx] = b[idx] - k2 * kdotv;
  }
  return out;
}

SpectralVector gradient(const SpectralScalar& q) {
  const Grid& g = q.grid();
  SpectralScalar d1 = q.zeros_like(false);
  SpectralScalar d2 = q.zeros_like(false);
  for (std::size_t idx = 1; idx < q.size(); ++idx) {
    d1[idx] = times_ik(g.k1(idx), q[idx]);
    d2[idx] = times_ik(g.k2(idx), q[idx]);
  }
  return SpectralVector(std::move(d1), std::move(d2), false);
}

SpectralVector perp_gradient(const SpectralScalar& psi) {
  const Grid& g = psi.grid();
  SpectralScalar c1 = psi.zeros_like(false);
  SpectralScalar c2 = psi.zeros_like(false);
  for (std::size_t idx = 1; idx < psi.size(); ++idx) {
    c1[idx] = times_ik(-g.k2(idx), psi[idx]);
    c2[idx] = times_ik(g.k1(idx), psi[idx]);
  }
  return SpectralVector(std::move(c1), std::move(c2), true);
}

SpectralScalar divergence(const SpectralVector& v) {
  const Grid& g = v.grid();
  SpectralScalar out = v.comp1().zeros_like(true);
  for (std::size_t idx = 1; idx < out.size(); ++idx) {
    out[idx] = times_ik(g.k1(idx), v.comp1()[idx]) + times_ik(g.k2(idx), v.comp2()[idx]);
  }
  return out;
}

SpectralScalar laplacian(const SpectralScalar& q) {
  SpectralScalar out = apply_symbol(q, true, [](std::size_t i, const Grid& g) { return -g.k_sq(i); });
  out.set_mean_zero_flag(true);
  return out;
}

SpectralVector laplacian(const SpectralVector& v) {
  SpectralScalar a = laplacian(v.comp1());
  SpectralScalar b = laplacian(v.comp2());
  return SpectralVector(std::move(a), std::move(b), v.div_free());
}

SpectralScalar dealiased_product(const PhysicalField& a, const PhysicalField& b) {
  if (a.size() != b.size()) throw InvariantViolation("dealiased_product: grid mismatch");
  PhysicalField prod(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) prod[i] = a[i] * b[i];
  SpectralScalar out = to_spectral(prod);
  out.apply_dealias();
  return out;
}

SpectralScalar advect_scalar(const SpectralVector& u, const SpectralScalar& q) {
  u.assert_div_free("advect_scalar");
  q.assert_mean_zero("advect_scalar");
  const Grid& g = q.grid();
  const std::size_t size = g.size();
  std::vector<double> u1(size), u2(size), d1(size), d2(size);
  g.inverse_pair(u.comp1().coeffs(), u.comp2().coeffs(), u1, u2, true);
  const SpectralVector grad = gradient(q);
  g.inverse_pair(grad.comp1().coeffs(), grad.comp2().coeffs(), d1, d2, true);
  for (std::size_t i = 0; i < size; ++i) u1[i] = u1[i] * d1[i] + u2[i] * d2[i];
  SpectralScalar out = q.zeros_like(false);
  g.forward(u1, out.coeffs());
  out.apply_dealias();
  out.pin_mean();
  return out;
}

SpectralVector advect_vector(const SpectralVector& u) {
  u.assert_div_free("advect_vector");
  const Grid& g = u.grid();
  const std::size_t size = g.size();
  std::vector<double> u1(size), u2(size), a(size), b(size), c(size), d(size);
  g.inverse_pair(u.comp1().coeffs(), u.comp2().coeffs(), u1, u2, true);
  const SpectralVector g1 = gradient(u.comp1());
  const SpectralVector g2 = gradient(u.comp2());
  g.inverse_pair(g1.comp1().coeffs(), g1.comp2().coeffs(), a, b, true);
  g.inverse_pair(g2.comp1().coeffs(), g2.comp2().coeffs(), c, d, true);
  for (std::size_t i = 0; i < size; ++i) {
    const double n1 = u1[i] * a[i] + u2[i] * b[i];
    const double n2 = u1[i] * c[i] + u2[i] * d[i];
    a[i] = n1;
    b[i] = n2;
  }
  SpectralVector out = u.zeros_like(false);
  g.forward_pair(a, b, out.comp1().coeffs(), out.comp2().coeffs());
  out.apply_dealias();
  return out;
}

double inner(const SpectralScalar& a, const SpectralScalar& b) {
  if (a.size() != b.size()) throw InvariantViolation("inner: grid mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
  }
  return kTorusArea * sum;
}

double inner(const SpectralVector& a, const SpectralVector& b) {
  return inner(a.comp1(), b.comp1()) + inner(a.comp2(), b.comp2());
}

double sobolev_sq(const SpectralScalar& q, double s) {
  const Grid& g = q.grid();
  double sum = s == 0.0 ? std::norm(q[0]) : 0.0;
  for (std::size_t idx = 1; idx < q.size(); ++idx) {
    double w;
    if (s == 0.0) {
      w = 1.0;
    } else if (s == 1.0) {
      w = g.k_sq(idx);
    } else if (s == 2.0) {
      w = g.k_sq(idx) * g.k_sq(idx);
    } else {
      w = std::pow(g.k_sq(idx), s);
    }
    sum += w * std::norm(q[idx]);
  }
  return kTorusArea * sum;
}

double sobolev_sq(const SpectralVector& v, double s) {
  return sobolev_sq(v.comp1(), s) + sobolev_sq(v.comp2(), s);
}

}  // namespace ecnv
