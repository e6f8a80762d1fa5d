#pragma once

#include <span>
#include <utility>

#include "ecnv/fields.hpp"

namespace ecnv {

PhysicalField to_physical(const SpectralScalar& field);
std::pair<PhysicalField, PhysicalField> to_physical(const SpectralVector& field);
/// Throws ConfigError when the value count does not match the grid.
SpectralScalar to_spectral(std::span<const double> values, const Grid& grid);
SpectralScalar to_spectral(const PhysicalField& field);

/// Lambda^alpha, symbol |k|^alpha; the zero mode of the result is 0.
SpectralScalar fractional_laplacian(const SpectralScalar& q, double alpha);
/// Lambda^s for any real s; negative powers require a mean-zero input.
SpectralScalar lambda_power(const SpectralScalar& q, double s);
SpectralScalar inv_lambda(const SpectralScalar& q);

/// R = grad Lambda^{-1}, symbol i k_j / |k|. The result is a gradient field.
SpectralVector riesz(const SpectralScalar& q);
/// Per-mode I - k k^T / |k|^2; the k = 0 mode passes through.
SpectralVector leray_project(const SpectralVector& v);

SpectralVector gradient(const SpectralScalar& q);
SpectralScalar divergence(const SpectralVector& v);
SpectralScalar laplacian(const SpectralScalar& q);
SpectralVector laplacian(const SpectralVector& v);
/// Perpendicular gradient (-d2 psi, d1 psi); divergence-free by construction.
SpectralVector perp_gradient(const SpectralScalar& psi);

/// Product of two grid functions, transformed back and truncated to the
/// dealias mask.
SpectralScalar dealiased_product(const PhysicalField& a, const PhysicalField& b);

/// u . grad q from dealiased physical fields; requires div-free u and mean-zero q.
SpectralScalar advect_scalar(const SpectralVector& u, const SpectralScalar& q);
/// (u . grad) u from dealiased physical fields; requires div-free u.
SpectralVector advect_vector(const SpectralVector& u);

/// L^2 inner products, int_T2 a b dx, evaluated spectrally (Parseval).
double inner(const SpectralScalar& a, const SpectralScalar& b);
double inner(const SpectralVector& a, const SpectralVector& b);
/// sum_k |k|^{2s} |c_k|^2 scaled to the torus; s = 0 gives the L^2 norm squared.
double sobolev_sq(const SpectralScalar& q, double s);
double sobolev_sq(const SpectralVector& v, double s);

}  // namespace ecnv
