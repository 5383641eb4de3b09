#pragma once

// Hand-rolled generators for the property tests.

#include <cmath>
#include <cstdint>
#include <vector>

#include "nchf/field.hpp"
#include "nchf/fixtures.hpp"
#include "nchf/sphere.hpp"

namespace nchf::testing {

/// Unit-norm map with independent Gaussian values per cell (rough on
/// purpose; identities must hold for any field, not only smooth ones).
inline MapField rough_map(const GridSpec& grid, int L, std::uint64_t seed) {
  PortableRng rng(seed);
  MapField f(grid, L);
  std::vector<double> y(static_cast<std::size_t>(L));
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    double s = 0.0;
    do {
      s = 0.0;
      for (double& x : y) {
        x = rng.normal();
        s += x * x;
      }
    } while (s < 0.1);
    project(y, f.at(c));
  }
  return f;
}

/// Unconstrained vector field, entries in [-1, 1).
inline MapField rough_vectors(const GridSpec& grid, int L, std::uint64_t seed) {
  PortableRng rng(seed);
  MapField v(grid, L);
  for (double& x : v.values()) x = 2.0 * rng.uniform() - 1.0;
  return v;
}

inline ScalarField rough_scalar(const GridSpec& grid, std::uint64_t seed, double lo, double hi) {
  PortableRng rng(seed);
  ScalarField s(grid);
  for (double& x : s.values()) x = lo + (hi - lo) * rng.uniform();
  return s;
}

inline FaceField rough_faces(const GridSpec& grid, std::uint64_t seed, double lo, double hi) {
  PortableRng rng(seed);
  FaceField s(grid);
  for (double& x : s.values()) x = lo + (hi - lo) * rng.uniform();
  return s;
}

/// A few grids covering every dimension, kept small.
inline std::vector<GridSpec> small_grids() {
  return {GridSpec(2, 8), GridSpec(2, 12, 3.0), GridSpec(3, 8), GridSpec(4, 8, 5.0)};
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline Point point(double x0, double x1, double x2 = 0.0, double x3 = 0.0) {
  return Point{{x0, x1, x2, x3}};
}

}  // namespace nchf::testing
