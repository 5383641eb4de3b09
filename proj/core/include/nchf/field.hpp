#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "nchf/grid.hpp"

namespace nchf {

/// One real per cell.
class ScalarField {
 public:
  explicit ScalarField(GridSpec grid, double fill = 0.0);
  ScalarField(GridSpec grid, std::vector<double> values);

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& operator[](std::size_t cell) noexcept { return values_[cell]; }
  double operator[](std::size_t cell) const noexcept { return values_[cell]; }

  std::span<double> values() & noexcept { return values_; }
  std::span<const double> values() const& noexcept { return values_; }
  // Temporaries hand over their storage so range-for over them stays valid.
  std::vector<double> values() && noexcept { return std::move(values_); }

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

/// One vector in R^L per cell, stored cell-major. Used for maps into the
/// sphere as well as for their velocities and tension fields.
class MapField {
 public:
  MapField(GridSpec grid, int ambient_dim);
  MapField(GridSpec grid, int ambient_dim, std::vector<double> values);

  const GridSpec& grid() const noexcept { return grid_; }
  int ambient_dim() const noexcept { return ambient_dim_; }
  std::size_t cell_count() const noexcept { return grid_.cell_count(); }

  std::span<double> at(std::size_t cell) noexcept {
    return {values_.data() + cell * stride(), stride()};
  }
  std::span<const double> at(std::size_t cell) const noexcept {
    return {values_.data() + cell * stride(), stride()};
  }

  std::span<double> values() & noexcept { return values_; }
  std::span<const double> values() const& noexcept { return values_; }
  std::vector<double> values() && noexcept { return std::move(values_); }

  friend bool operator==(const MapField&, const MapField&) = default;

 private:
  std::size_t stride() const noexcept { return static_cast<std::size_t>(ambient_dim_); }

  GridSpec grid_;
  int ambient_dim_;
  std::vector<double> values_;
};

/// One real per face. Face (c, i) sits between cell c and its +i neighbour.
class FaceField {
 public:
  explicit FaceField(GridSpec grid, double fill = 0.0);

  const GridSpec& grid() const noexcept { return grid_; }
  double& at(std::size_t cell, int axis) noexcept { return values_[index(cell, axis)]; }
  double at(std::size_t cell, int axis) const noexcept { return values_[index(cell, axis)]; }

  std::span<double> values() & noexcept { return values_; }
  std::span<const double> values() const& noexcept { return values_; }
  std::vector<double> values() && noexcept { return std::move(values_); }

  friend bool operator==(const FaceField&, const FaceField&) = default;

 private:
  std::size_t index(std::size_t cell, int axis) const noexcept {
    return cell * static_cast<std::size_t>(grid_.dim()) + static_cast<std::size_t>(axis);
  }

  GridSpec grid_;
  std::vector<double> values_;
};

/// Face-centred partials: for face (c, i), the L-vector (f(c+e_i) - f(c)) / h.
class GradientField {
 public:
  GradientField(GridSpec grid, int ambient_dim);

  const GridSpec& grid() const noexcept { return grid_; }
  int ambient_dim() const noexcept { return ambient_dim_; }

  std::span<double> at(std::size_t cell, int axis) noexcept {
    return {values_.data() + offset(cell, axis), static_cast<std::size_t>(ambient_dim_)};
  }
  std::span<const double> at(std::size_t cell, int axis) const noexcept {
    return {values_.data() + offset(cell, axis), static_cast<std::size_t>(ambient_dim_)};
  }

  std::span<double> values() & noexcept { return values_; }
  std::span<const double> values() const& noexcept { return values_; }
  std::vector<double> values() && noexcept { return std::move(values_); }

 private:
  std::size_t offset(std::size_t cell, int axis) const noexcept {
    return (cell * static_cast<std::size_t>(grid_.dim()) + static_cast<std::size_t>(axis)) *
           static_cast<std::size_t>(ambient_dim_);
  }

  GridSpec grid_;
  int ambient_dim_;
  std::vector<double> values_;
};

/// h^n times the pairwise sum of the cell values. Throws on the first
/// non-finite value, naming its cell.
double integrate(const ScalarField& field);
double integrate(const GridSpec& grid, std::span<const double> values);

/// Smooth bump supported in the periodic ball B_r(center):
/// phi = cos^2(pi d / (2 r)) for d < r, else 0.
struct CutoffField {
  ScalarField values;
  Point center;
  double radius;
};

/// Requires 2h < r <= side / 2.
CutoffField make_cutoff(const GridSpec& grid, const Point& center, double radius);

/// Indicator of the open periodic ball d(x, center) < radius.
ScalarField ball_indicator(const GridSpec& grid, const Point& center, double radius);

}  // namespace nchf
