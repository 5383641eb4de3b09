#pragma once

#include <span>
#include <vector>

#include "nchf/field.hpp"

namespace nchf {

/// The round unit sphere S^{L-1} in R^L. For the unit sphere the second
/// fundamental form and its derivative are bounded by 1, so the default
/// curvature bound C_N is 1; callers may override it.
struct SphereTarget {
  int ambient_dim = 3;
  double curvature_bound = 1.0;
  double constraint_tol = 1e-12;

  void validate() const;
};

/// Parameters of the coupled flow. The flow is only defined for
/// C_b = n b / 2 - C_N - 2 C_N^2 > 0.
struct FlowConstants {
  int n = 2;
  double a = 1.0;
  double b = 4.0;
  double eps = 0.1;
  double curvature_bound = 1.0;

  double c_b() const noexcept {
    return n * b / 2.0 - curvature_bound - 2.0 * curvature_bound * curvature_bound;
  }
  /// Throws kConfig when eps is outside (0, 1], a or b is not positive, or
  /// C_b <= 0.
  void validate() const;
};

/// Projections closer to the origin than this are treated as having left the
/// tubular neighbourhood of the sphere.
inline constexpr double kTubularGuard = 0.1;

/// Nearest-point projection y / |y|. Throws kStepTooLarge when |y| <= 0.1.
void project(std::span<const double> y, std::span<double> out);
std::vector<double> project(std::span<const double> y);

/// v - <v, f> f.
std::vector<double> tangential_project(std::span<const double> v, std::span<const double> f);

/// max over cells of | |f| - 1 |.
double constraint_residual(const MapField& f);

/// max |<tau, f>| / max(max |tau|, scale), or 0 when both vanish. `scale`
/// keeps near-equilibria (tau at rounding level) from reading as normal;
/// the monitor passes sup e_2^{n/2}, the size of either operator piece.
double tangency_residual(const MapField& tau, const MapField& f, double scale = 0.0);

/// Second fundamental form contribution e_2^{n/2-1} A(f)(df, df) for the unit
/// sphere, which is +sigma |df|^2 f. The density is taken in the same
/// face-weighted form as the n-Laplacian:
///   a(c) = sum_i (sigma(c,i) |D_i f(c)|^2 + sigma(c-e_i,i) |D_i f(c-e_i)|^2) / 2
/// so that a(c) = -<n_laplacian_reg(f)(c), f(c)> whenever |f(c)| = 1.
MapField second_fundamental_form_term(const MapField& f, const FaceField& sigma,
                                      const FaceField& face_sq);

/// Tension tau = n_laplacian_reg(f) + second_fundamental_form_term(f).
/// Requires |f| = 1 to within `constraint_tol`.
MapField tension(const MapField& f, const FlowConstants& constants,
                 double constraint_tol = 1e-12);

}  // namespace nchf
