#include "nchf/inequality_lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "nchf/error.hpp"
#include "nchf/fixtures.hpp"
#include "nchf/operators.hpp"

namespace nchf {
namespace {

std::uint64_t sample_seed(std::uint64_t seed, int k) {
  // splitmix64 finaliser
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(k + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Pointwise quantities shared by all six displays.
struct Fields {
  std::vector<double> e2, hess, lap_sq, phi, grad_phi_sq, ball;
};

Fields pointwise(const InequalityCase& c) {
  const GridSpec& grid = c.field.grid();
  const std::size_t cells = grid.cell_count();
  Fields p;
  const ScalarField e2 = energy_density(c.field, c.eps);
  const ScalarField hess = hessian_norm_sq(c.field);
  const MapField lap = n_laplacian_reg(c.field, c.eps, c.n);
  const ScalarField gphi = gradient_norm_sq(c.cutoff.values);
  const ScalarField ball = ball_indicator(grid, c.cutoff.center, c.cutoff.radius);
  p.e2.assign(e2.values().begin(), e2.values().end());
  p.hess.assign(hess.values().begin(), hess.values().end());
  p.phi.assign(c.cutoff.values.values().begin(), c.cutoff.values.values().end());
  p.grad_phi_sq.assign(gphi.values().begin(), gphi.values().end());
  p.ball.assign(ball.values().begin(), ball.values().end());
  p.lap_sq.resize(cells);
  for (std::size_t k = 0; k < cells; ++k) {
    double s = 0.0;
    for (double x : lap.at(k)) s += x * x;
    p.lap_sq[k] = s;
  }
  return p;
}

template <class Fn>
double integral(const GridSpec& grid, std::size_t cells, Fn&& fn) {
  std::vector<double> v(cells);
  for (std::size_t k = 0; k < cells; ++k) v[k] = fn(k);
  return integrate(grid, v);
}

}  // namespace

std::string to_string(InequalityId id) {
  switch (id) {
    case InequalityId::kL2n: return "L2n";
    case InequalityId::kW22r: return "W22r";
    case InequalityId::kW22: return "W22";
    case InequalityId::kL3n: return "L3n";
    case InequalityId::kLGNr: return "LGNr";
    case InequalityId::kLGN: return "LGN";
  }
  return "?";
}

InequalityId parse_inequality_id(const std::string& name) {
  for (auto id : kAllInequalities) {
    if (to_string(id) == name) return id;
  }
  throw Error(ErrorKind::kConfig, "unknown inequality id '" + name + "'");
}

double RatioReport::rhs_total() const {
  double s = 0.0;
  for (const auto& t : rhs_terms) s += t.second;
  return s;
}

double w22_coefficient(int n, double beta) {
  if (n == 2) {
    if (beta != 0.0) {
      throw Error(ErrorKind::kInvalidArgument, "W22 coefficient undefined for n = 2 and beta > 0");
    }
    return 4.0;
  }
  return 4.0 + 2.0 * beta / (n - 2);
}

double lgn_exponent(int n) { return n == 2 ? 2.0 : static_cast<double>(n) / (n - 2); }

RatioReport eval_inequality(const InequalityCase& c) {
  const GridSpec& grid = c.field.grid();
  if (!(c.cutoff.values.grid() == grid)) {
    throw Error(ErrorKind::kInvalidArgument, "cutoff and field live on different grids");
  }
  if (!(c.eps > 0.0 && c.eps <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "regularization required: eps must lie in (0, 1]");
  }
  if (c.beta < 0.0 || c.beta > c.n) {
    throw Error(ErrorKind::kInvalidArgument, "beta must lie in [0, n]");
  }
  const auto phi_values = c.cutoff.values.values();
  if (std::none_of(phi_values.begin(), phi_values.end(), [](double v) { return v > 0.0; })) {
    throw Error(ErrorKind::kInvalidArgument, "degenerate cutoff: identically zero");
  }

  const std::size_t cells = grid.cell_count();
  const Fields p = pointwise(c);
  const double n = c.n;
  const double b = c.beta;
  auto I = [&](auto&& fn) { return integral(grid, cells, fn); };
  auto pw = [](double x, double e) { return std::pow(x, e); };

  const double ball_energy = I([&](std::size_t k) { return p.ball[k] * pw(p.e2[k], n / 2); });
  const double hess_term = I([&](std::size_t k) {
    return p.hess[k] * pw(p.e2[k], n - 2 + b) * pw(p.phi[k], n);
  });
  const double grad_phi_n = I([&](std::size_t k) {
    return pw(p.e2[k], n / 2 + b) * pw(p.grad_phi_sq[k], n / 2);
  });

  RatioReport r{c.id, 0.0, {}, 0.0, grid.res()};
  switch (c.id) {
    case InequalityId::kL2n:
      r.lhs = I([&](std::size_t k) { return pw(p.e2[k], n + b) * pw(p.phi[k], n); });
      r.rhs_terms = {{"energy^(2/n)*hessian", pw(ball_energy, 2.0 / n) * hess_term},
                     {"energy*cutoff_gradient", ball_energy * grad_phi_n}};
      break;
    case InequalityId::kW22r:
    case InequalityId::kW22: {
      r.lhs = hess_term;
      const double coef = w22_coefficient(c.n, b);
      const double lap = I([&](std::size_t k) { return p.lap_sq[k] * pw(p.e2[k], b) * pw(p.phi[k], n); });
      r.rhs_terms.push_back({"coef*n_laplacian", coef * lap});
      if (c.id == InequalityId::kW22r) {
        r.rhs_terms.push_back({"cutoff_lower_order", I([&](std::size_t k) {
                                 return pw(p.e2[k], n - 1 + b) * pw(p.phi[k], n - 2) *
                                        (p.phi[k] * p.phi[k] + p.grad_phi_sq[k]);
                               })});
      } else {
        r.rhs_terms.push_back({"energy_power", I([&](std::size_t k) {
                                 return pw(p.e2[k], n + b) * pw(p.phi[k], n);
                               })});
        r.rhs_terms.push_back({"cutoff_young", I([&](std::size_t k) {
                                 return pw(p.e2[k], n / 2 + b) *
                                        (pw(p.phi[k], n) + pw(p.grad_phi_sq[k], n / 2));
                               })});
      }
      break;
    }
    case InequalityId::kL3n: {
      r.lhs = I([&](std::size_t k) { return pw(p.e2[k], 1.5 * n) * pw(p.phi[k], 2 * n); });
      const double h0 = I([&](std::size_t k) {
        return p.hess[k] * pw(p.e2[k], n - 2) * pw(p.phi[k], n);
      });
      const double g0 = I([&](std::size_t k) {
        return pw(p.e2[k], n / 2) * pw(p.grad_phi_sq[k], n / 2);
      });
      const double pre = pw(ball_energy, 1.0 / (n - 1));
      const double ex = n / (n - 1);
      r.rhs_terms = {{"energy*hessian", pre * pw(h0, ex)}, {"energy*cutoff_gradient", pre * pw(g0, ex)}};
      break;
    }
    case InequalityId::kLGNr:
    case InequalityId::kLGN: {
      const double kappa = lgn_exponent(c.n);
      r.lhs = pw(I([&](std::size_t k) {
                   return pw(p.e2[k], (n - 1 + b) * kappa) * pw(p.phi[k], n * kappa);
                 }),
                 1.0 / kappa);
      r.rhs_terms.push_back({"hessian", hess_term});
      if (c.id == InequalityId::kLGNr) {
        r.rhs_terms.push_back({"cutoff_gradient_sq", I([&](std::size_t k) {
                                 return pw(p.e2[k], n - 1 + b) * p.grad_phi_sq[k] * pw(p.phi[k], n - 2);
                               })});
      } else {
        r.rhs_terms.push_back({"cutoff_gradient_n", grad_phi_n});
      }
      break;
    }
  }
  const double total = r.rhs_total();
  if (!(total > 0.0) || !std::isfinite(total) || !std::isfinite(r.lhs)) {
    throw Error(ErrorKind::kInvariant, to_string(c.id) + ": degenerate right-hand side");
  }
  r.ratio = r.lhs / total;
  return r;
}

double l2n_constant_map_ratio(const CutoffField& cutoff, int n) {
  const GridSpec& grid = cutoff.values.grid();
  const ScalarField g = gradient_norm_sq(cutoff.values);
  const ScalarField ball = ball_indicator(grid, cutoff.center, cutoff.radius);
  std::vector<double> a(grid.cell_count()), b(grid.cell_count());
  for (std::size_t k = 0; k < a.size(); ++k) {
    a[k] = std::pow(cutoff.values[k], n);
    b[k] = std::pow(g[k], 0.5 * n);
  }
  return integrate(grid, a) / (integrate(ball) * integrate(grid, b));
}

MapField corpus_sample(const CorpusSpec& spec, int res, int k) {
  const GridSpec grid(spec.n, res, spec.side);
  return random_bandlimited(grid, spec.ambient_dim, sample_seed(spec.seed, k), spec.max_freq);
}

CorpusSummary corpus_scan(const CorpusSpec& spec) {
  if (spec.samples < 1) throw Error(ErrorKind::kConfig, "corpus needs at least one sample");
  CorpusSummary out;
  std::vector<std::vector<double>> max_by_res;  // [res index][id index]
  for (int res : spec.resolutions) {
    const GridSpec grid(spec.n, res, spec.side);
    Point center;
    for (int a = 0; a < spec.n; ++a) center.x[static_cast<std::size_t>(a)] = 0.5 * spec.side;
    const double radius = spec.radius > 0.0 ? spec.radius : 0.25 * spec.side;
    const CutoffField cutoff = make_cutoff(grid, center, radius);
    std::vector<std::vector<double>> ratios(spec.ids.size());
    for (int k = 0; k < spec.samples; ++k) {
      const MapField f = corpus_sample(spec, res, k);
      for (std::size_t j = 0; j < spec.ids.size(); ++j) {
        const RatioReport rep =
            eval_inequality(InequalityCase{spec.ids[j], spec.beta, f, cutoff, spec.eps, spec.n});
        ratios[j].push_back(rep.ratio);
      }
    }
    std::vector<double> maxes;
    for (std::size_t j = 0; j < spec.ids.size(); ++j) {
      const double mx = *std::max_element(ratios[j].begin(), ratios[j].end());
      maxes.push_back(mx);
      out.rows.push_back({spec.ids[j], res, mx, median(ratios[j]), spec.samples, spec.seed});
      const bool sane = std::all_of(ratios[j].begin(), ratios[j].end(),
                                    [](double r) { return r >= 0.0 && std::isfinite(r); });
      if (!sane) out.failures.push_back(spec.ids[j]);
    }
    max_by_res.push_back(std::move(maxes));
  }
  for (std::size_t r = 1; r < max_by_res.size(); ++r) {
    for (std::size_t j = 0; j < spec.ids.size(); ++j) {
      if (max_by_res[r][j] > 2.0 * max_by_res[r - 1][j] &&
          std::find(out.failures.begin(), out.failures.end(), spec.ids[j]) == out.failures.end()) {
        out.failures.push_back(spec.ids[j]);
      }
    }
  }
  return out;
}

void write_corpus_csv(std::ostream& out, const CorpusSummary& summary) {
  out << "id,res,max,median,samples,seed\n";
  char buf[128];
  for (const auto& r : summary.rows) {
    std::snprintf(buf, sizeof buf, ",%d,%.17g,%.17g,%d,%llu\n", r.res, r.max_ratio, r.median_ratio,
                  r.samples, static_cast<unsigned long long>(r.seed));
    out << to_string(r.id) << buf;
  }
  if (!out) throw Error(ErrorKind::kIo, "failed to write corpus summary");
}

}  // namespace nchf
