#include "nchf/operators.hpp"

#include <cmath>

#include "nchf/error.hpp"

namespace nchf {
namespace {

void require_eps(double eps) {
  if (!(eps > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "regularization required: eps must be positive (the eps = 0 flow is not supported)");
  }
  if (!(eps <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "eps must lie in (0, 1]");
  }
}

void require_n(int n) {
  if (n < 2 || n > kMaxDim) {
    throw Error(ErrorKind::kInvalidArgument, "n must be 2, 3 or 4");
  }
}

}  // namespace

GradientField gradient(const MapField& f) {
  const GridSpec& grid = f.grid();
  const int dim = grid.dim();
  const auto L = static_cast<std::size_t>(f.ambient_dim());
  const double inv_h = 1.0 / grid.spacing();
  GradientField out(grid, f.ambient_dim());
  for_each_cell(grid, [&](std::size_t c, const Neighbors& nb) {
    const auto fc = f.at(c);
    for (int i = 0; i < dim; ++i) {
      const auto fp = f.at(nb.plus[static_cast<std::size_t>(i)]);
      auto d = out.at(c, i);
      for (std::size_t a = 0; a < L; ++a) d[a] = (fp[a] - fc[a]) * inv_h;
    }
  });
  return out;
}

FaceField face_normal_sq(const MapField& f) {
  const GridSpec& grid = f.grid();
  const int dim = grid.dim();
  const auto L = static_cast<std::size_t>(f.ambient_dim());
  const double inv_h = 1.0 / grid.spacing();
  FaceField out(grid);
  for_each_cell(grid, [&](std::size_t c, const Neighbors& nb) {
    const auto fc = f.at(c);
    for (int i = 0; i < dim; ++i) {
      const auto fp = f.at(nb.plus[static_cast<std::size_t>(i)]);
      double s = 0.0;
      for (std::size_t a = 0; a < L; ++a) {
        const double d = (fp[a] - fc[a]) * inv_h;
        s += d * d;
      }
      out.at(c, i) = s;
    }
  });
  return out;
}

ScalarField cell_gradient_sq(const FaceField& face_sq) {
  const GridSpec& grid = face_sq.grid();
  const int dim = grid.dim();
  ScalarField out(grid);
  for_each_cell(grid, [&](std::size_t c, const Neighbors& nb) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
      s += 0.5 * (face_sq.at(c, i) + face_sq.at(nb.minus[static_cast<std::size_t>(i)], i));
    }
    out[c] = s;
  });
  return out;
}

ScalarField energy_density(const MapField& f, double eps) {
  require_eps(eps);
  ScalarField e2 = cell_gradient_sq(face_normal_sq(f));
  for (double& v : e2.values()) v = eps + v;
  return e2;
}

FaceField face_weights(const ScalarField& e2, int n) {
  require_n(n);
  const GridSpec& grid = e2.grid();
  const int dim = grid.dim();
  ScalarField sigma(grid);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) sigma[c] = half_power(e2[c], n - 2);
  FaceField out(grid);
  for_each_cell(grid, [&](std::size_t c, const Neighbors& nb) {
    for (int i = 0; i < dim; ++i) {
      out.at(c, i) = 0.5 * (sigma[c] + sigma[nb.plus[static_cast<std::size_t>(i)]]);
    }
  });
  return out;
}

MapField divergence_weighted(const FaceField& sigma, const GradientField& v) {
  const GridSpec& grid = v.grid();
  if (!(sigma.grid() == grid)) {
    throw Error(ErrorKind::kInvalidArgument, "divergence: face weights and vector field live on different grids");
  }
  const int dim = grid.dim();
  const auto L = static_cast<std::size_t>(v.ambient_dim());
  const double inv_h = 1.0 / grid.spacing();
  MapField out(grid, v.ambient_dim());
  for_each_cell(grid, [&](std::size_t c, const Neighbors& nb) {
    auto r = out.at(c);
    for (int i = 0; i < dim; ++i) {
      const std::size_t m = nb.minus[static_cast<std::size_t>(i)];
      const double sp = sigma.at(c, i);
      const double sm = sigma.at(m, i);
      const auto vp = v.at(c, i);
      const auto vm = v.at(m, i);
      for (std::size_t a = 0; a < L; ++a) r[a] += (sp * vp[a] - sm * vm[a]) * inv_h;
    }
  });
  return out;
}

MapField laplacian(const MapField& f) {
  const GridSpec& grid = f.grid();
  const int dim = grid.dim();
  const auto L = static_cast<std::size_t>(f.ambient_dim());
  const double inv_h = 1.0 / grid.spacing();
  MapField out(grid, f.ambient_dim());
  for_each_cell(grid, [&](std::size_t c, const Neighbors& nb) {
    const auto fc = f.at(c);
    auto r = out.at(c);
    for (int i = 0; i < dim; ++i) {
      const auto fp = f.at(nb.plus[static_cast<std::size_t>(i)]);
      const auto fm = f.at(nb.minus[static_cast<std::size_t>(i)]);
      for (std::size_t a = 0; a < L; ++a) {
        const double dp = (fp[a] - fc[a]) * inv_h;
        const double dm = (fc[a] - fm[a]) * inv_h;
        r[a] += (dp - dm) * inv_h;
      }
    }
  });
  return out;
}

MapField n_laplacian_reg(const MapField& f, double eps, int n) {
  return divergence_weighted(face_weights(energy_density(f, eps), n), gradient(f));
}

ScalarField hessian_norm_sq(const MapField& f) {
  const GridSpec& grid = f.grid();
  const int dim = grid.dim();
  const auto L = static_cast<std::size_t>(f.ambient_dim());
  const double h = grid.spacing();
  const double inv_h2 = 1.0 / (h * h);
  const double inv_4h2 = 0.25 * inv_h2;
  ScalarField out(grid);
  parallel_for(grid.cell_count(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      const auto base = grid.coords(c);
      const auto at = [&](int i, int di, int j, int dj) {
        auto k = base;
        k[static_cast<std::size_t>(i)] += di;
        k[static_cast<std::size_t>(j)] += dj;
        return f.at(grid.cell_at(k));
      };
      const auto fc = f.at(c);
      double total = 0.0;
      for (int i = 0; i < dim; ++i) {
        const auto fp = at(i, 1, i, 0);
        const auto fm = at(i, -1, i, 0);
        for (std::size_t a = 0; a < L; ++a) {
          const double d = (fp[a] - 2.0 * fc[a] + fm[a]) * inv_h2;
          total += d * d;
        }
        for (int j = i + 1; j < dim; ++j) {
          const auto fpp = at(i, 1, j, 1);
          const auto fpm = at(i, 1, j, -1);
          const auto fmp = at(i, -1, j, 1);
          const auto fmm = at(i, -1, j, -1);
          for (std::size_t a = 0; a < L; ++a) {
            const double d = (fpp[a] - fpm[a] - fmp[a] + fmm[a]) * inv_4h2;
            total += 2.0 * d * d;
          }
        }
      }
      out[c] = total;
    }
  });
  return out;
}

ScalarField gradient_norm_sq(const ScalarField& s) {
  const GridSpec& grid = s.grid();
  const int dim = grid.dim();
  const double inv_h = 1.0 / grid.spacing();
  ScalarField out(grid);
  for_each_cell(grid, [&](std::size_t c, const Neighbors& nb) {
    double total = 0.0;
    for (int i = 0; i < dim; ++i) {
      const double dp = (s[nb.plus[static_cast<std::size_t>(i)]] - s[c]) * inv_h;
      const double dm = (s[c] - s[nb.minus[static_cast<std::size_t>(i)]]) * inv_h;
      total += 0.5 * (dp * dp + dm * dm);
    }
    out[c] = total;
  });
  return out;
}

namespace detail {

void compute_density(const MapField& f, double eps, int n, DensityBuffers& out) {
  const GridSpec& grid = f.grid();
  const int dim = grid.dim();
  const auto L = static_cast<std::size_t>(f.ambient_dim());
  const double inv_h = 1.0 / grid.spacing();
  for_each_cell(grid, [&](std::size_t c, const Neighbors& nb) {
    const auto fc = f.at(c);
    for (int i = 0; i < dim; ++i) {
      const auto fp = f.at(nb.plus[static_cast<std::size_t>(i)]);
      double s = 0.0;
      for (std::size_t a = 0; a < L; ++a) {
        const double d = (fp[a] - fc[a]) * inv_h;
        s += d * d;
      }
      out.face_sq.at(c, i) = s;
    }
  });
  for_each_cell(grid, [&](std::size_t c, const Neighbors& nb) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
      s += 0.5 * (out.face_sq.at(c, i) + out.face_sq.at(nb.minus[static_cast<std::size_t>(i)], i));
    }
    const double e2 = eps + s;
    out.e2[c] = e2;
    out.sigma[c] = half_power(e2, n - 2);
    out.q[c] = half_power(e2, n);
  });
}

void compute_tension(const MapField& f, const DensityBuffers& density, MapField& tension) {
  const GridSpec& grid = f.grid();
  const int dim = grid.dim();
  const auto L = static_cast<std::size_t>(f.ambient_dim());
  const double inv_h = 1.0 / grid.spacing();
  const auto& sigma = density.sigma;
  const auto& face_sq = density.face_sq;
  for_each_cell(grid, [&](std::size_t c, const Neighbors& nb) {
    const auto fc = f.at(c);
    auto t = tension.at(c);
    for (std::size_t a = 0; a < L; ++a) t[a] = 0.0;
    double coeff = 0.0;
    for (int i = 0; i < dim; ++i) {
      const std::size_t p = nb.plus[static_cast<std::size_t>(i)];
      const std::size_t m = nb.minus[static_cast<std::size_t>(i)];
      const double sp = 0.5 * (sigma[c] + sigma[p]);
      const double sm = 0.5 * (sigma[m] + sigma[c]);
      const auto fp = f.at(p);
      const auto fm = f.at(m);
      for (std::size_t a = 0; a < L; ++a) {
        const double dp = (fp[a] - fc[a]) * inv_h;
        const double dm = (fc[a] - fm[a]) * inv_h;
        t[a] += (sp * dp - sm * dm) * inv_h;
      }
      coeff += 0.5 * (sp * face_sq.at(c, i) + sm * face_sq.at(m, i));
    }
    for (std::size_t a = 0; a < L; ++a) t[a] = t[a] + coeff * fc[a];
  });
}

}  // namespace detail
}  // namespace nchf
