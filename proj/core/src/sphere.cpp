#include "nchf/sphere.hpp"

#include <cmath>
#include <sstream>

#include "nchf/error.hpp"
#include "nchf/operators.hpp"

namespace nchf {

void SphereTarget::validate() const {
  if (ambient_dim < 2) throw Error(ErrorKind::kConfig, "target.L must be at least 2");
  if (!(constraint_tol > 0.0)) throw Error(ErrorKind::kConfig, "target.constraint_tol must be positive");
  if (!(curvature_bound > 0.0)) throw Error(ErrorKind::kConfig, "target.C_N must be positive");
}

void FlowConstants::validate() const {
  if (n < 2 || n > 4) throw Error(ErrorKind::kConfig, "flow dimension n must be 2, 3 or 4");
  if (!(eps > 0.0 && eps <= 1.0)) throw Error(ErrorKind::kConfig, "flow.eps must lie in (0, 1]");
  if (!(a > 0.0)) throw Error(ErrorKind::kConfig, "flow.a must be positive");
  if (!(b > 0.0)) throw Error(ErrorKind::kConfig, "flow.b must be positive");
  if (!(c_b() > 0.0)) {
    std::ostringstream os;
    os << "flow.b too small: C_b = n b / 2 - C_N - 2 C_N^2 = " << c_b()
       << " <= 0 (need b > " << 2.0 * (curvature_bound + 2.0 * curvature_bound * curvature_bound) / n
       << ")";
    throw Error(ErrorKind::kConfig, os.str());
  }
}

void project(std::span<const double> y, std::span<double> out) {
  double sq = 0.0;
  for (double v : y) sq += v * v;
  const double norm = std::sqrt(sq);
  if (!std::isfinite(norm)) {
    throw Error(ErrorKind::kOperatorOverflow, "operator overflow: non-finite point before projection");
  }
  if (!(norm > kTubularGuard)) {
    throw Error(ErrorKind::kStepTooLarge,
                "left tubular neighborhood: |y| = " + std::to_string(norm) + " (step too large)");
  }
  for (std::size_t a = 0; a < y.size(); ++a) out[a] = y[a] / norm;
}

std::vector<double> project(std::span<const double> y) {
  std::vector<double> out(y.size());
  project(y, out);
  return out;
}

std::vector<double> tangential_project(std::span<const double> v, std::span<const double> f) {
  double dot = 0.0;
  for (std::size_t a = 0; a < v.size(); ++a) dot += v[a] * f[a];
  std::vector<double> out(v.size());
  for (std::size_t a = 0; a < v.size(); ++a) out[a] = v[a] - dot * f[a];
  return out;
}

double constraint_residual(const MapField& f) {
  double worst = 0.0;
  for (std::size_t c = 0; c < f.cell_count(); ++c) {
    double sq = 0.0;
    for (double v : f.at(c)) sq += v * v;
    worst = std::max(worst, std::abs(std::sqrt(sq) - 1.0));
  }
  return worst;
}

double tangency_residual(const MapField& tau, const MapField& f, double scale) {
  double worst_dot = 0.0;
  double worst_norm = 0.0;
  for (std::size_t c = 0; c < f.cell_count(); ++c) {
    const auto t = tau.at(c);
    const auto g = f.at(c);
    double dot = 0.0;
    double sq = 0.0;
    for (std::size_t a = 0; a < t.size(); ++a) {
      dot += t[a] * g[a];
      sq += t[a] * t[a];
    }
    worst_dot = std::max(worst_dot, std::abs(dot));
    worst_norm = std::max(worst_norm, std::sqrt(sq));
  }
  const double denom = std::max(worst_norm, scale);
  return denom > 0.0 ? worst_dot / denom : 0.0;
}

MapField second_fundamental_form_term(const MapField& f, const FaceField& sigma,
                                      const FaceField& face_sq) {
  const GridSpec& grid = f.grid();
  const int dim = grid.dim();
  const auto L = static_cast<std::size_t>(f.ambient_dim());
  MapField out(grid, f.ambient_dim());
  for_each_cell(grid, [&](std::size_t c, const Neighbors& nb) {
    double coeff = 0.0;
    for (int i = 0; i < dim; ++i) {
      const std::size_t m = nb.minus[static_cast<std::size_t>(i)];
      coeff += 0.5 * (sigma.at(c, i) * face_sq.at(c, i) + sigma.at(m, i) * face_sq.at(m, i));
    }
    const auto fc = f.at(c);
    auto r = out.at(c);
    for (std::size_t a = 0; a < L; ++a) r[a] = coeff * fc[a];
  });
  return out;
}

MapField tension(const MapField& f, const FlowConstants& constants, double constraint_tol) {
  const double residual = constraint_residual(f);
  if (residual > constraint_tol) {
    throw Error(ErrorKind::kInvalidArgument,
                "tension: map violates the sphere constraint (max ||f| - 1| = " +
                    std::to_string(residual) + ")");
  }
  const ScalarField e2 = energy_density(f, constants.eps);
  const FaceField sigma = face_weights(e2, constants.n);
  MapField tau = divergence_weighted(sigma, gradient(f));
  const MapField normal = second_fundamental_form_term(f, sigma, face_normal_sq(f));
  auto t = tau.values();
  const auto nv = normal.values();
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = t[k] + nv[k];
  return tau;
}

}  // namespace nchf
