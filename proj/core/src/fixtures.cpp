#include "nchf/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "nchf/error.hpp"
#include "nchf/sphere.hpp"

namespace nchf {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Angle coordinate along `axis`, rescaled so one period spans the domain.
double angle(const GridSpec& grid, std::size_t c, int axis) {
  return kTwoPi * grid.position(c).x[static_cast<std::size_t>(axis)] / grid.side();
}

void require_ambient(int ambient_dim, int needed, const char* what) {
  if (ambient_dim < needed) {
    throw Error(ErrorKind::kInvalidArgument, std::string(what) + " fixture needs target dimension >= " +
                                                 std::to_string(needed));
  }
}

struct Mode {
  std::array<int, kMaxDim> k{};
  double phase = 0.0;
  std::vector<double> amp;
};

// Modes with a total amplitude budget of `total`.
std::vector<Mode> draw_modes(PortableRng& rng, int dim, int ambient_dim, int max_freq, double total) {
  std::vector<Mode> modes;
  if (max_freq <= 0) return modes;
  constexpr int kModes = 4;
  double norm_sum = 0.0;
  for (int m = 0; m < kModes; ++m) {
    Mode mode;
    bool zero = true;
    while (zero) {
      for (int a = 0; a < dim; ++a) {
        mode.k[static_cast<std::size_t>(a)] = rng.uniform_int(-max_freq, max_freq);
        zero = zero && mode.k[static_cast<std::size_t>(a)] == 0;
      }
    }
    mode.phase = kTwoPi * rng.uniform();
    double s = 0.0;
    for (int l = 0; l < ambient_dim; ++l) {
      mode.amp.push_back(rng.normal());
      s += mode.amp.back() * mode.amp.back();
    }
    norm_sum += std::sqrt(s);
    modes.push_back(std::move(mode));
  }
  for (auto& mode : modes) {
    for (double& x : mode.amp) x *= total / norm_sum;
  }
  return modes;
}

void add_modes(const GridSpec& grid, std::size_t c, const std::vector<Mode>& modes, std::span<double> y) {
  const Point p = grid.position(c);
  for (const auto& mode : modes) {
    double arg = mode.phase;
    for (int a = 0; a < grid.dim(); ++a) {
      const auto ua = static_cast<std::size_t>(a);
      arg += mode.k[ua] * kTwoPi * p.x[ua] / grid.side();
    }
    const double cs = std::cos(arg);
    for (std::size_t l = 0; l < y.size(); ++l) y[l] += mode.amp[l] * cs;
  }
}

void check_freq(const GridSpec& grid, int max_freq) {
  if (max_freq < 0 || 4 * max_freq > grid.res()) {
    throw Error(ErrorKind::kInvalidArgument, "max_freq " + std::to_string(max_freq) +
                                                 " must lie in [0, res/4] for res " +
                                                 std::to_string(grid.res()));
  }
}

}  // namespace

std::string to_string(FixtureKind kind) {
  switch (kind) {
    case FixtureKind::kConstant: return "constant";
    case FixtureKind::kGreatCircle: return "great_circle";
    case FixtureKind::kBump: return "bump";
    case FixtureKind::kRandomBandlimited: return "random_bandlimited";
    case FixtureKind::kEquatorWrap: return "equator_wrap";
  }
  return "?";
}

FixtureKind parse_fixture_kind(const std::string& name) {
  for (auto k : {FixtureKind::kConstant, FixtureKind::kGreatCircle, FixtureKind::kBump,
                 FixtureKind::kRandomBandlimited, FixtureKind::kEquatorWrap}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorKind::kConfig, "unknown fixture '" + name + "'");
}

double PortableRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double PortableRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(kTwoPi * u2);
  has_spare_ = true;
  return r * std::cos(kTwoPi * u2);
}

int PortableRng::uniform_int(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(engine_() % span);
}

int min_ambient_dim(const FixtureSpec& spec, int dim) {
  switch (spec.kind) {
    case FixtureKind::kBump: return dim + 1;
    case FixtureKind::kEquatorWrap: return 3;
    default: return 2;
  }
}

MapField random_bandlimited(const GridSpec& grid, int ambient_dim, std::uint64_t seed, int max_freq) {
  check_freq(grid, max_freq);
  PortableRng rng(seed);
  std::vector<double> v0(static_cast<std::size_t>(ambient_dim));
  double s = 0.0;
  for (double& x : v0) {
    x = rng.normal();
    s += x * x;
  }
  s = std::sqrt(s);
  for (double& x : v0) x /= s;
  const auto modes = draw_modes(rng, grid.dim(), ambient_dim, max_freq, 0.8);
  MapField f(grid, ambient_dim);
  std::vector<double> y(v0.size());
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    y = v0;
    add_modes(grid, c, modes, y);
    project(y, f.at(c));
  }
  return f;
}

MapField random_tangent_field(const MapField& f, std::uint64_t seed, int max_freq) {
  const GridSpec& grid = f.grid();
  check_freq(grid, max_freq);
  PortableRng rng(seed);
  const auto modes = draw_modes(rng, grid.dim(), f.ambient_dim(), std::max(1, max_freq), 1.0);
  MapField v(grid, f.ambient_dim());
  std::vector<double> y(static_cast<std::size_t>(f.ambient_dim()));
  double vmax = 0.0;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    std::fill(y.begin(), y.end(), 0.0);
    add_modes(grid, c, modes, y);
    const auto t = tangential_project(y, f.at(c));
    double s = 0.0;
    for (std::size_t l = 0; l < t.size(); ++l) {
      v.at(c)[l] = t[l];
      s += t[l] * t[l];
    }
    vmax = std::max(vmax, std::sqrt(s));
  }
  if (vmax > 0.0) {
    for (double& x : v.values()) x /= vmax;
  }
  return v;
}

MapField make_fixture(const GridSpec& grid, int ambient_dim, const FixtureSpec& spec) {
  const int dim = grid.dim();
  require_ambient(ambient_dim, min_ambient_dim(spec, dim), to_string(spec.kind).c_str());
  MapField f(grid, ambient_dim);
  const auto last = static_cast<std::size_t>(ambient_dim - 1);
  switch (spec.kind) {
    case FixtureKind::kConstant:
      for (std::size_t c = 0; c < grid.cell_count(); ++c) f.at(c)[last] = 1.0;
      break;
    case FixtureKind::kGreatCircle:
      for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        const double x = angle(grid, c, 0);
        f.at(c)[0] = std::cos(x);
        f.at(c)[1] = std::sin(x);
      }
      break;
    case FixtureKind::kEquatorWrap:
      for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        const double x1 = angle(grid, c, 0);
        const double psi = 0.5 * std::numbers::pi * (1.0 - std::cos(angle(grid, c, 1)));
        f.at(c)[0] = std::sin(psi) * std::cos(spec.degree * x1);
        f.at(c)[1] = std::sin(psi) * std::sin(spec.degree * x1);
        f.at(c)[2] = std::cos(psi);
      }
      break;
    case FixtureKind::kRandomBandlimited:
      return random_bandlimited(grid, ambient_dim, spec.seed, spec.max_freq);
    case FixtureKind::kBump: {
      Point center;
      for (int a = 0; a < dim; ++a) center.x[static_cast<std::size_t>(a)] = 0.5 * grid.side();
      if (spec.center) center = *spec.center;
      const double r = spec.radius;
      if (!(r > 2.0 * grid.spacing()) || r > 0.5 * grid.side()) {
        throw Error(ErrorKind::kInvalidArgument, "bump radius must lie in (2h, side/2]");
      }
      for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        const Point p = grid.position(c);
        std::array<double, kMaxDim> dx{};
        double d2 = 0.0;
        for (int a = 0; a < dim; ++a) {
          const auto ua = static_cast<std::size_t>(a);
          double v = p.x[ua] - center.x[ua];
          v -= grid.side() * std::round(v / grid.side());
          dx[ua] = v;
          d2 += v * v;
        }
        const double d = std::sqrt(d2);
        auto out = f.at(c);
        if (d >= r) {
          out[static_cast<std::size_t>(dim)] = 1.0;
          continue;
        }
        const double cs = std::cos(0.5 * std::numbers::pi * d / r);
        const double theta = std::numbers::pi * spec.amplitude * cs * cs;
        if (d > 0.0) {
          for (int a = 0; a < dim; ++a) {
            out[static_cast<std::size_t>(a)] = std::sin(theta) * dx[static_cast<std::size_t>(a)] / d;
          }
        } else {
          out[0] = std::sin(theta);
        }
        out[static_cast<std::size_t>(dim)] = std::cos(theta);
      }
      break;
    }
  }
  return f;
}

}  // namespace nchf
