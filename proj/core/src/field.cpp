#include "nchf/field.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nchf/error.hpp"
#include "nchf/reduce.hpp"

namespace nchf {

ScalarField::ScalarField(GridSpec grid, double fill)
    : grid_(grid), values_(grid.cell_count(), fill) {}

ScalarField::ScalarField(GridSpec grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.cell_count()) {
    throw Error(ErrorKind::kInvalidArgument, "scalar field length does not match the grid");
  }
}

MapField::MapField(GridSpec grid, int ambient_dim)
    : grid_(grid), ambient_dim_(ambient_dim),
      values_(grid.cell_count() * static_cast<std::size_t>(ambient_dim > 0 ? ambient_dim : 0), 0.0) {
  if (ambient_dim < 2) {
    throw Error(ErrorKind::kInvalidArgument, "ambient dimension must be at least 2");
  }
}

MapField::MapField(GridSpec grid, int ambient_dim, std::vector<double> values)
    : grid_(grid), ambient_dim_(ambient_dim), values_(std::move(values)) {
  if (ambient_dim < 2) {
    throw Error(ErrorKind::kInvalidArgument, "ambient dimension must be at least 2");
  }
  if (values_.size() != grid_.cell_count() * static_cast<std::size_t>(ambient_dim)) {
    throw Error(ErrorKind::kInvalidArgument, "map field length does not match grid x ambient dimension");
  }
}

FaceField::FaceField(GridSpec grid, double fill)
    : grid_(grid), values_(grid.cell_count() * static_cast<std::size_t>(grid.dim()), fill) {}

GradientField::GradientField(GridSpec grid, int ambient_dim)
    : grid_(grid), ambient_dim_(ambient_dim),
      values_(grid.cell_count() * static_cast<std::size_t>(grid.dim()) *
                  static_cast<std::size_t>(ambient_dim),
              0.0) {}

double integrate(const GridSpec& grid, std::span<const double> values) {
  for (std::size_t c = 0; c < values.size(); ++c) {
    if (!std::isfinite(values[c])) {
      throw Error(ErrorKind::kInvalidArgument,
                  "non-finite value in integrand at cell " + std::to_string(c));
    }
  }
  return grid.cell_volume() * pairwise_sum(values);
}

double integrate(const ScalarField& field) { return integrate(field.grid(), field.values()); }

CutoffField make_cutoff(const GridSpec& grid, const Point& center, double radius) {
  if (!(radius > 2.0 * grid.spacing())) {
    throw Error(ErrorKind::kInvalidArgument,
                "cutoff unresolved: radius " + std::to_string(radius) +
                    " must exceed twice the grid spacing " + std::to_string(2.0 * grid.spacing()));
  }
  if (radius > 0.5 * grid.side()) {
    throw Error(ErrorKind::kInvalidArgument, "cutoff radius exceeds half the domain side");
  }
  ScalarField phi(grid);
  const double k = std::numbers::pi / (2.0 * radius);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const double d = periodic_distance(grid, grid.position(c), center);
    if (d < radius) {
      const double cs = std::cos(k * d);
      phi[c] = cs * cs;
    }
  }
  return CutoffField{std::move(phi), center, radius};
}

ScalarField ball_indicator(const GridSpec& grid, const Point& center, double radius) {
  ScalarField chi(grid);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    if (periodic_distance(grid, grid.position(c), center) < radius) chi[c] = 1.0;
  }
  return chi;
}

}  // namespace nchf
