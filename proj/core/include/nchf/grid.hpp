#pragma once

#include <array>
#include <cstddef>
#include <numbers>

#include "nchf/parallel.hpp"

namespace nchf {

inline constexpr int kMaxDim = 4;

/// A point of the torus in domain length units. Coordinates beyond the grid
/// dimension are ignored.
struct Point {
  std::array<double, kMaxDim> x{};
};

/// Uniform periodic grid on the flat torus [0, side)^dim. Cell c sits at
/// index * spacing on each axis; cells are numbered in row-major order (the
/// last axis varies fastest). The background metric is the identity, so the
/// quadrature weight of every cell is spacing^dim.
class GridSpec {
 public:
  static constexpr double kDefaultSide = 2.0 * std::numbers::pi;

  GridSpec(int dim, int res, double side = kDefaultSide);

  int dim() const noexcept { return dim_; }
  int res() const noexcept { return res_; }
  double side() const noexcept { return side_; }
  double spacing() const noexcept { return spacing_; }
  std::size_t cell_count() const noexcept { return cell_count_; }
  double cell_volume() const noexcept { return cell_volume_; }
  double domain_volume() const noexcept;

  std::size_t stride(int axis) const noexcept { return strides_[static_cast<std::size_t>(axis)]; }

  std::array<int, kMaxDim> coords(std::size_t cell) const noexcept;
  /// Index of the cell with the given coordinates, wrapped periodically.
  std::size_t cell_at(std::array<int, kMaxDim> coords) const noexcept;
  /// Neighbour `offset` cells away along `axis`, wrapped periodically.
  std::size_t shifted(std::size_t cell, int axis, int offset) const noexcept;
  Point position(std::size_t cell) const noexcept;
  std::size_t nearest_cell(const Point& p) const noexcept;

  friend bool operator==(const GridSpec& a, const GridSpec& b) noexcept {
    return a.dim_ == b.dim_ && a.res_ == b.res_ && a.side_ == b.side_;
  }

 private:
  int dim_;
  int res_;
  double side_;
  double spacing_;
  std::size_t cell_count_;
  double cell_volume_;
  std::array<std::size_t, kMaxDim> strides_{};
};

/// Torus distance: per axis min(|d|, side - |d|), then the Euclidean norm.
double periodic_distance(const GridSpec& grid, const Point& a, const Point& b) noexcept;

/// Periodic neighbours of one cell along every axis.
struct Neighbors {
  std::array<std::size_t, kMaxDim> plus{};
  std::array<std::size_t, kMaxDim> minus{};
};

/// Visits every cell with its neighbour table, in parallel chunks. `fn` must
/// only write state owned by the visited cell.
template <class Fn>
void for_each_cell(const GridSpec& grid, Fn&& fn) {
  const int dim = grid.dim();
  const int res = grid.res();
  parallel_for(grid.cell_count(), [&](std::size_t begin, std::size_t end) {
    if (begin >= end) return;
    auto coords = grid.coords(begin);
    Neighbors nb;
    for (std::size_t c = begin; c < end; ++c) {
      for (int a = 0; a < dim; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        const std::size_t s = grid.stride(a);
        const auto wrap = static_cast<std::size_t>(res - 1) * s;
        nb.plus[ua] = coords[ua] == res - 1 ? c - wrap : c + s;
        nb.minus[ua] = coords[ua] == 0 ? c + wrap : c - s;
      }
      fn(c, static_cast<const Neighbors&>(nb));
      for (int a = dim - 1; a >= 0; --a) {
        const auto ua = static_cast<std::size_t>(a);
        if (++coords[ua] < res) break;
        coords[ua] = 0;
      }
    }
  });
}

}  // namespace nchf
