#pragma once

#include <cmath>

#include "nchf/field.hpp"

namespace nchf {

/// x^(twice_exponent / 2) for twice_exponent >= 0, by repeated
/// multiplication and at most one square root. Every density power in the
/// flow (sigma = e_2^{n/2-1}, q = e_2^{n/2}) goes through here so that all
/// code paths agree bit for bit.
inline double half_power(double x, int twice_exponent) noexcept {
  double r = 1.0;
  for (int k = 0; k < twice_exponent / 2; ++k) r *= x;
  if (twice_exponent % 2 != 0) r *= std::sqrt(x);
  return r;
}

/// Forward differences on faces: (f(c+e_i) - f(c)) / h, periodic.
GradientField gradient(const MapField& f);

/// |D_i f|^2 on every face.
FaceField face_normal_sq(const MapField& f);

/// Cell-centred |df|^2: per axis, the mean of the two adjacent face values.
ScalarField cell_gradient_sq(const FaceField& face_sq);

/// e_2(f) = eps + |df|^2 per cell. Requires eps in (0, 1].
ScalarField energy_density(const MapField& f, double eps);

/// Face weights sigma(c, i) = (sigma_c + sigma_{c+e_i}) / 2 with the cell
/// weight sigma_c = e_2(c)^{n/2 - 1}. The face average of cell weights is
/// what makes the weighted Laplacian the exact gradient of the discrete
/// energy (1/n) sum_c h^n e_2(c)^{n/2}.
FaceField face_weights(const ScalarField& e2, int n);

/// Conservative divergence of sigma * V:
/// result(c) = sum_i (sigma(c,i) V(c,i) - sigma(c-e_i,i) V(c-e_i,i)) / h.
/// Adjoint to `gradient` under the h^n-weighted inner product.
MapField divergence_weighted(const FaceField& sigma, const GradientField& v);

/// Unweighted discrete Laplacian (2n+1 point stencil).
MapField laplacian(const MapField& f);

/// Regularized n-Laplacian div((eps + |df|^2)^{n/2-1} df) in flux form.
MapField n_laplacian_reg(const MapField& f, double eps, int n);

/// Sum over i, j, alpha of the squared centred second differences.
ScalarField hessian_norm_sq(const MapField& f);

/// Cell-centred |grad s|^2 for a scalar field, same face-averaging
/// convention as cell_gradient_sq.
ScalarField gradient_norm_sq(const ScalarField& s);

namespace detail {

/// Everything the flow needs from one evaluation of the density at f.
struct DensityBuffers {
  FaceField face_sq;
  ScalarField e2;
  ScalarField sigma;  // e_2^{n/2-1}
  ScalarField q;      // e_2^{n/2}

  DensityBuffers(const GridSpec& grid) : face_sq(grid), e2(grid), sigma(grid), q(grid) {}
};

void compute_density(const MapField& f, double eps, int n, DensityBuffers& out);

/// tension = div(sigma_face D f) + a(c) f with the discrete second
/// fundamental form coefficient
///   a(c) = sum_i (sigma(c,i) |D_i f(c)|^2 + sigma(c-e_i,i) |D_i f(c-e_i)|^2) / 2.
/// For |f| = 1 this equals -<lap, f>, so the result is tangential.
void compute_tension(const MapField& f, const DensityBuffers& density, MapField& tension);

}  // namespace detail
}  // namespace nchf
