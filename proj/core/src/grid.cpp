#include "nchf/grid.hpp"

#include <cmath>
#include <string>

#include "nchf/error.hpp"

namespace nchf {

GridSpec::GridSpec(int dim, int res, double side)
    : dim_(dim), res_(res), side_(side), spacing_(0.0), cell_count_(0), cell_volume_(0.0) {
  if (dim < 2 || dim > kMaxDim) {
    throw Error(ErrorKind::kInvalidArgument,
                "grid dimension must be 2, 3 or 4 (got " + std::to_string(dim) + ")");
  }
  if (res < 8) {
    throw Error(ErrorKind::kInvalidArgument,
                "grid resolution must be at least 8 (got " + std::to_string(res) + ")");
  }
  if (!(side > 0.0) || !std::isfinite(side)) {
    throw Error(ErrorKind::kInvalidArgument, "grid side length must be positive and finite");
  }
  spacing_ = side / res;
  std::size_t count = 1;
  for (int a = dim - 1; a >= 0; --a) {
    strides_[static_cast<std::size_t>(a)] = count;
    count *= static_cast<std::size_t>(res);
  }
  cell_count_ = count;
  cell_volume_ = std::pow(spacing_, dim);
}

double GridSpec::domain_volume() const noexcept { return std::pow(side_, dim_); }

std::array<int, kMaxDim> GridSpec::coords(std::size_t cell) const noexcept {
  std::array<int, kMaxDim> out{};
  for (int a = 0; a < dim_; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    out[ua] = static_cast<int>((cell / strides_[ua]) % static_cast<std::size_t>(res_));
  }
  return out;
}

std::size_t GridSpec::cell_at(std::array<int, kMaxDim> coords) const noexcept {
  std::size_t cell = 0;
  for (int a = 0; a < dim_; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    int i = coords[ua] % res_;
    if (i < 0) i += res_;
    cell += static_cast<std::size_t>(i) * strides_[ua];
  }
  return cell;
}

std::size_t GridSpec::shifted(std::size_t cell, int axis, int offset) const noexcept {
  auto c = coords(cell);
  c[static_cast<std::size_t>(axis)] += offset;
  return cell_at(c);
}

Point GridSpec::position(std::size_t cell) const noexcept {
  const auto c = coords(cell);
  Point p;
  for (int a = 0; a < dim_; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    p.x[ua] = c[ua] * spacing_;
  }
  return p;
}

std::size_t GridSpec::nearest_cell(const Point& p) const noexcept {
  std::array<int, kMaxDim> c{};
  for (int a = 0; a < dim_; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    c[ua] = static_cast<int>(std::lround(p.x[ua] / spacing_));
  }
  return cell_at(c);
}

double periodic_distance(const GridSpec& grid, const Point& a, const Point& b) noexcept {
  const double side = grid.side();
  double sq = 0.0;
  for (int k = 0; k < grid.dim(); ++k) {
    const auto uk = static_cast<std::size_t>(k);
    double d = std::fmod(std::abs(a.x[uk] - b.x[uk]), side);
    d = std::min(d, side - d);
    sq += d * d;
  }
  return std::sqrt(sq);
}

}  // namespace nchf
