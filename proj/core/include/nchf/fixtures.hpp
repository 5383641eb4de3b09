#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "nchf/field.hpp"

namespace nchf {

enum class FixtureKind { kConstant, kGreatCircle, kBump, kRandomBandlimited, kEquatorWrap };

std::string to_string(FixtureKind kind);
FixtureKind parse_fixture_kind(const std::string& name);

/// Initial data. Unused parameters are ignored by the other fixture kinds.
struct FixtureSpec {
  FixtureKind kind = FixtureKind::kConstant;
  std::optional<Point> center;  // bump; defaults to the domain centre
  double radius = 1.5;          // bump support radius
  double amplitude = 1.0;       // bump: 1 wraps the sphere once
  std::uint64_t seed = 1;       // random_bandlimited
  int max_freq = 2;             // random_bandlimited
  int degree = 1;               // equator_wrap

  /// bump and equator_wrap have no canonical counterpart in the analysis;
  /// they exist to drive concentration.
  bool engineering_stand_in() const noexcept {
    return kind == FixtureKind::kBump || kind == FixtureKind::kEquatorWrap;
  }
};

/// Smallest usable target dimension for the fixture on this grid.
int min_ambient_dim(const FixtureSpec& spec, int dim);

/// Unit-norm map on the grid. Throws kInvalidArgument when the fixture does
/// not fit (ambient dimension too small, frequency above res/4, ...).
MapField make_fixture(const GridSpec& grid, int ambient_dim, const FixtureSpec& spec);

/// Deviates built by hand on top of std::mt19937_64, whose output sequence
/// is fixed by the standard (the std distributions are not).
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}
  double uniform();  // [0, 1)
  double normal();
  int uniform_int(int lo, int hi);  // inclusive

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// y = v0 + sum_m a_m cos(k_m . x + phase_m) with integer wave vectors
/// |k_m|_inf <= max_freq, sum |a_m| = 0.8, then y / |y|. The sample is a
/// function on the continuum torus: every resolution sees the same map.
MapField random_bandlimited(const GridSpec& grid, int ambient_dim, std::uint64_t seed, int max_freq);

/// Smooth tangent field along f with max norm 1.
MapField random_tangent_field(const MapField& f, std::uint64_t seed, int max_freq);

}  // namespace nchf
