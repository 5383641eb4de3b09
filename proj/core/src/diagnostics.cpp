#include "nchf/diagnostics.hpp"

#include <algorithm>
#include <cinttypes>
#include <array>
#include <cmath>
#include <limits>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

#include "nchf/error.hpp"
#include "nchf/reduce.hpp"

namespace nchf {
namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double max_of(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  return m;
}

double min_of(std::span<const double> v) {
  double m = std::numeric_limits<double>::infinity();
  for (double x : v) m = std::min(m, x);
  return m;
}

double int_power(double x, int p) {
  double r = 1.0;
  for (int k = 0; k < p; ++k) r *= x;
  return r;
}

// Cells whose coordinate along one axis can lie within `radius` of `x`.
std::vector<int> axis_window(const GridSpec& grid, double x, double radius) {
  const int res = grid.res();
  const int k = static_cast<int>(std::ceil(radius / grid.spacing())) + 1;
  std::vector<int> out;
  if (2 * k + 1 >= res) {
    for (int i = 0; i < res; ++i) out.push_back(i);
    return out;
  }
  const int base = static_cast<int>(std::lround(x / grid.spacing()));
  for (int i = base - k; i <= base + k; ++i) out.push_back(((i % res) + res) % res);
  return out;
}

}  // namespace

void ProbeSet::validate(const GridSpec& grid) const {
  if (!(threshold > 0.0)) throw Error(ErrorKind::kConfig, "probe threshold must be positive");
  for (const auto& p : probes) {
    if (!(p.radius > 2.0 * grid.spacing()) || p.radius > 0.5 * grid.side()) {
      throw Error(ErrorKind::kConfig,
                  "probe radius " + fmt17(p.radius) + " outside (2h, side/2] with h = " +
                      fmt17(grid.spacing()));
    }
  }
}

ProbeSet default_probes(const GridSpec& grid) {
  Probe p;
  for (int a = 0; a < grid.dim(); ++a) p.center.x[static_cast<std::size_t>(a)] = 0.5 * grid.side();
  p.radius = std::min(0.5 * grid.side(), std::max(0.25 * grid.side(), 3.0 * grid.spacing()));
  return ProbeSet{{p}, kDefaultConcentrationThreshold};
}

std::vector<Probe> parse_probes(const std::string& spec, int dim) {
  std::vector<Probe> out;
  std::stringstream all(spec);
  std::string item;
  while (std::getline(all, item, ';')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorKind::kConfig, "probe '" + item + "' lacks ':radius'");
    }
    Probe p;
    std::stringstream coords(item.substr(0, colon));
    std::string tok;
    int a = 0;
    try {
      while (std::getline(coords, tok, ',')) {
        if (a >= dim) throw Error(ErrorKind::kConfig, "probe '" + item + "' has too many coordinates");
        p.center.x[static_cast<std::size_t>(a++)] = std::stod(tok);
      }
      p.radius = std::stod(item.substr(colon + 1));
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::kConfig, "probe '" + item + "' is not numeric");
    }
    if (a != dim) throw Error(ErrorKind::kConfig, "probe '" + item + "' needs " + std::to_string(dim) + " coordinates");
    out.push_back(p);
  }
  return out;
}

std::string format_probes(const std::vector<Probe>& probes, int dim) {
  std::string s;
  for (std::size_t k = 0; k < probes.size(); ++k) {
    if (k) s += ';';
    for (int a = 0; a < dim; ++a) {
      if (a) s += ',';
      s += fmt17(probes[k].center.x[static_cast<std::size_t>(a)]);
    }
    s += ':' + fmt17(probes[k].radius);
  }
  return s;
}

double ProbeWeights::apply(const GridSpec& grid, std::span<const double> density) const {
  std::vector<double> terms(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) terms[k] = density[cells[k]] * weights[k];
  return grid.cell_volume() * pairwise_sum(terms);
}

ProbeWeights probe_weights(const GridSpec& grid, const Probe& probe, int power) {
  const int dim = grid.dim();
  std::array<std::vector<int>, kMaxDim> win;
  for (int a = 0; a < dim; ++a) {
    win[static_cast<std::size_t>(a)] = axis_window(grid, probe.center.x[static_cast<std::size_t>(a)], probe.radius);
  }
  ProbeWeights out;
  const double k = std::numbers::pi / (2.0 * probe.radius);
  std::array<std::size_t, kMaxDim> pos{};
  while (true) {
    std::array<int, kMaxDim> coords{};
    for (int a = 0; a < dim; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      coords[ua] = win[ua][pos[ua]];
    }
    const std::size_t c = grid.cell_at(coords);
    const double d = periodic_distance(grid, grid.position(c), probe.center);
    if (d < probe.radius) {
      const double cs = std::cos(k * d);
      const double phi = cs * cs;
      out.cells.push_back(c);
      out.phi.push_back(phi);
      out.weights.push_back(int_power(phi, power));
    }
    int a = dim - 1;
    for (; a >= 0; --a) {
      const auto ua = static_cast<std::size_t>(a);
      if (++pos[ua] < win[ua].size()) break;
      pos[ua] = 0;
    }
    if (a < 0) break;
  }
  return out;
}

double total_energy(const MapField& f, double eps, int n) {
  const ScalarField e2 = energy_density(f, eps);
  std::vector<double> q(e2.size());
  for (std::size_t c = 0; c < q.size(); ++c) q[c] = half_power(e2[c], n);
  return integrate(f.grid(), q) / n;
}

double local_energy(const MapField& f, const Probe& probe, double eps, int n) {
  const CutoffField phi = make_cutoff(f.grid(), probe.center, probe.radius);
  const ScalarField e2 = energy_density(f, eps);
  std::vector<double> v(e2.size());
  for (std::size_t c = 0; c < v.size(); ++c) v[c] = half_power(e2[c], n) * int_power(phi.values[c], n);
  return integrate(f.grid(), v);
}

double kinetic_moment(const MapField& velocity, const ConformalField& w, double p) {
  const std::size_t cells = velocity.cell_count();
  std::vector<double> v(cells);
  const double e = 0.5 * (p + 2.0);
  for (std::size_t c = 0; c < cells; ++c) {
    double s = 0.0;
    for (double x : velocity.at(c)) s += x * x;
    v[c] = w.w[c] * std::pow(s, e);
  }
  return integrate(velocity.grid(), v);
}

std::vector<double> default_moment_exponents(int n) {
  return {0.0, 1.0, 2.0, n - 2.0 + 0.125};
}

std::size_t ConcentrationReport::flagged_count() const {
  return static_cast<std::size_t>(std::count(flagged.begin(), flagged.end(), true));
}

ConcentrationReport concentration_scan(const MapField& f, const ProbeSet& probes, double eps, int n) {
  const GridSpec& grid = f.grid();
  probes.validate(grid);
  detail::DensityBuffers density(grid);
  detail::compute_density(f, eps, n, density);
  const auto q = density.q.values();

  ConcentrationReport rep;
  for (const auto& p : probes.probes) {
    const double theta = probe_weights(grid, p, n).apply(grid, q);
    rep.theta.push_back(theta);
    rep.flagged.push_back(theta > probes.threshold);
  }

  const double radius = probes.probes.empty() ? default_probes(grid).probes[0].radius
                                              : probes.probes[0].radius;
  // Stencil around the origin cell, reused for every lattice centre.
  const ProbeWeights stencil = probe_weights(grid, Probe{grid.position(0), radius}, n);
  std::vector<std::array<int, kMaxDim>> offsets;
  offsets.reserve(stencil.cells.size());
  for (std::size_t c : stencil.cells) offsets.push_back(grid.coords(c));

  const int step = std::max(1, grid.res() / 8);
  const int per_axis = (grid.res() + step - 1) / step;
  std::size_t centers = 1;
  for (int a = 0; a < grid.dim(); ++a) centers *= static_cast<std::size_t>(per_axis);
  std::vector<double> theta(centers);
  std::vector<std::size_t> center_cell(centers);
  parallel_for(centers, [&](std::size_t begin, std::size_t end) {
    std::vector<double> terms(offsets.size());
    for (std::size_t k = begin; k < end; ++k) {
      std::array<int, kMaxDim> base{};
      std::size_t r = k;
      for (int a = grid.dim() - 1; a >= 0; --a) {
        base[static_cast<std::size_t>(a)] = static_cast<int>(r % static_cast<std::size_t>(per_axis)) * step;
        r /= static_cast<std::size_t>(per_axis);
      }
      center_cell[k] = grid.cell_at(base);
      for (std::size_t j = 0; j < offsets.size(); ++j) {
        std::array<int, kMaxDim> cc{};
        for (int a = 0; a < grid.dim(); ++a) {
          const auto ua = static_cast<std::size_t>(a);
          cc[ua] = base[ua] + offsets[j][ua];
        }
        terms[j] = q[grid.cell_at(cc)] * stencil.weights[j];
      }
      theta[k] = grid.cell_volume() * pairwise_sum(terms);
    }
  });
  const auto it = std::max_element(theta.begin(), theta.end());
  rep.max_theta = *it;
  rep.max_center = grid.position(center_cell[static_cast<std::size_t>(it - theta.begin())]);
  return rep;
}

HolderReport theta_holder_check(std::span<const ThetaSample> samples, double floor) {
  if (samples.size() < 3) {
    throw Error(ErrorKind::kInvalidArgument, "holder check needs at least three samples");
  }
  HolderReport rep;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      const double dt = samples[j].t - samples[i].t;
      if (!(dt > 0.0)) continue;
      const double dk = std::max(0.0, samples[j].kinetic - samples[i].kinetic);
      const double ratio =
          std::abs(samples[j].theta - samples[i].theta) / (std::sqrt(dt) * std::sqrt(dk) + floor);
      ++rep.pairs;
      if (ratio > rep.max_ratio) {
        rep.max_ratio = ratio;
        rep.worst_s = samples[i].t;
        rep.worst_t = samples[j].t;
      }
    }
  }
  return rep;
}

DiagnosticsCsv::DiagnosticsCsv(std::ostream& out, std::span<const double> moment_exponents)
    : out_(&out) {
  *out_ << header(moment_exponents) << '\n';
}

void DiagnosticsCsv::write(const DiagnosticsRecord& record) {
  *out_ << row(record) << '\n';
  if (!*out_) throw Error(ErrorKind::kIo, "failed to write diagnostics row");
}

std::string DiagnosticsCsv::header(std::span<const double> moment_exponents) {
  std::string s =
      "t,E_eps,dissipation,volume,sup_e2,min_w,constraint_residual,tangency_residual,dt_used,"
      "local_energy_max,max_diffusivity";
  for (double p : moment_exponents) {
    char buf[40];
    std::snprintf(buf, sizeof buf, ",kinetic_p%g", p);
    s += buf;
  }
  return s;
}

std::string DiagnosticsCsv::row(const DiagnosticsRecord& r) {
  std::string s;
  for (double v : {r.t, r.E_eps, r.dissipation, r.volume, r.sup_e2, r.min_w, r.constraint_residual,
                   r.tangency_residual, r.dt_used, r.local_energy_max, r.max_diffusivity}) {
    if (!s.empty()) s += ',';
    s += fmt17(v);
  }
  for (double v : r.kinetic) s += ',' + fmt17(v);
  return s;
}

FlowMonitor::FlowMonitor(const FlowState& initial, const FlowConstants& constants, FlowMode mode,
                         ProbeSet probes, std::vector<std::size_t> w_probe_cells,
                         InvariantTolerances tol)
    : constants_(constants),
      mode_(mode),
      probes_(std::move(probes)),
      tol_(tol),
      grid_(initial.f.grid()),
      moments_(default_moment_exponents(constants.n)),
      w_cells_(std::move(w_probe_cells)) {
  probes_.validate(grid_);
  if (probes_.probes.empty()) probes_.probes = default_probes(grid_).probes;
  for (const auto& p : probes_.probes) probe_theta_.push_back(probe_weights(grid_, p, constants_.n));
  lemma_weights_ = probe_theta_.front();
  ball_weights_ = probe_weights(grid_, probes_.probes.front(), 0);
  for (std::size_t c : w_cells_) {
    if (c >= grid_.cell_count()) throw Error(ErrorKind::kInvalidArgument, "w probe cell out of range");
  }

  detail::DensityBuffers density(grid_);
  detail::compute_density(initial.f, constants_.eps, constants_.n, density);
  MapField tau(grid_, initial.f.ambient_dim());
  detail::compute_tension(initial.f, density, tau);
  const double tangency = tangency_residual(tau, initial.f, max_of(density.q.values()));
  const double d0 = cfl_bound(density.sigma, initial.w, constants_.n, 1.0).max_diffusivity;
  initial_ = make_record(initial.t, 0.0, initial.f, initial.velocity, initial.w, initial.w, density,
                         d0, tangency);
  t0_ = initial.t;
  e0_ = e_last_ = initial_.E_eps;
  v0_ = initial_.volume;
  min_w0_ = initial_.min_w;
  max_sup_e2_ = initial_.sup_e2;
  max_constraint_ = initial_.constraint_residual;
  max_tangency_ = tangency;
  min_dt_ = std::numeric_limits<double>::infinity();

  std::vector<double> w2(grid_.cell_count());
  for (std::size_t c = 0; c < w2.size(); ++c) w2[c] = initial.w.w[c] * initial.w.w[c];
  lemma_w2_0_ = lemma_weights_.apply(grid_, w2);

  hist_t_.push_back(initial.t);
  std::vector<double> qs;
  for (std::size_t c : w_cells_) qs.push_back(density.q[c]);
  hist_q_.push_back(std::move(qs));
  theta_.push_back({initial.t, probe_theta_.front().apply(grid_, density.q.values()), 0.0});
}

void FlowMonitor::fail(const std::string& what, std::uint64_t step, double t) const {
  char buf[96];
  std::snprintf(buf, sizeof buf, " at step %" PRIu64 ", t = %.17g", step, t);
  throw Error(ErrorKind::kInvariant, "invariant violated: " + what + buf);
}

void FlowMonitor::observe(const StepEvent& ev) {
  const int n = constants_.n;
  const auto q = ev.density.q.values();
  const std::size_t cells = grid_.cell_count();

  const double e = integrate(grid_, q) / n;
  if (e > e_last_ + tol_.energy_rel * e0_) {
    fail("energy increased from " + fmt17(e_last_) + " to " + fmt17(e), ev.step, ev.t);
  }
  e_last_ = e;

  const double cres = constraint_residual(ev.f);
  max_constraint_ = std::max(max_constraint_, cres);
  if (cres > tol_.constraint) fail("sphere constraint residual " + fmt17(cres), ev.step, ev.t);

  const double tang = tangency_residual(ev.tension, ev.f_prev, max_of(q));
  max_tangency_ = std::max(max_tangency_, tang);
  if (tang > tol_.tangency) fail("tension not tangential, residual " + fmt17(tang), ev.step, ev.t);

  std::vector<double> tmp(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    double s = 0.0;
    for (double x : ev.velocity.at(c)) s += x * x;
    tmp[c] = ev.w_prev.w[c] * s;
  }
  dissipated_ += ev.dt * integrate(grid_, tmp);

  if (mode_ == FlowMode::kChf) {
    const double decay = std::exp(-n * constants_.a * (ev.t - t0_));
    const double vol = integrate(ev.w.w);
    const double vol_bound = decay * v0_ + n * constants_.b / constants_.a * e0_;
    if (vol > vol_bound + tol_.volume_abs) {
      fail("volume " + fmt17(vol) + " above bound " + fmt17(vol_bound), ev.step, ev.t);
    }
    const double mw = min_of(ev.w.w.values());
    if (mw < decay * min_w0_ - tol_.min_w_abs) {
      fail("min w " + fmt17(mw) + " below " + fmt17(decay * min_w0_), ev.step, ev.t);
    }
    // int w^2 phi^n grows at most by n b^2 / (2a) int q^2 phi^n per unit time.
    for (std::size_t c = 0; c < cells; ++c) tmp[c] = q[c] * q[c];
    lemma_budget_ += ev.dt * n * constants_.b * constants_.b / (2.0 * constants_.a) *
                     lemma_weights_.apply(grid_, tmp);
    for (std::size_t c = 0; c < cells; ++c) tmp[c] = ev.w.w[c] * ev.w.w[c];
    const double w2 = lemma_weights_.apply(grid_, tmp);
    if (w2 > lemma_w2_0_ + lemma_budget_ + tol_.lemma_abs) {
      fail("local w^2 bound: " + fmt17(w2) + " > " + fmt17(lemma_w2_0_ + lemma_budget_), ev.step,
           ev.t);
    }
  }

  min_dt_ = std::min(min_dt_, ev.dt);
  max_sup_e2_ = std::max(max_sup_e2_, max_of(ev.density.e2.values()));
  max_diffusivity_ = std::max(max_diffusivity_, ev.max_diffusivity);

  hist_t_.push_back(ev.t);
  std::vector<double> qs;
  for (std::size_t c : w_cells_) qs.push_back(q[c]);
  hist_q_.push_back(std::move(qs));

  for (std::size_t c = 0; c < cells; ++c) {
    double s = 0.0;
    for (double x : ev.velocity.at(c)) s += x * x;
    tmp[c] = q[c] * s;
  }
  kinetic_ball_ += ev.dt * ball_weights_.apply(grid_, tmp);
  ++theta_seen_;
  if (theta_seen_ % theta_stride_ == 0) {
    theta_.push_back({ev.t, probe_theta_.front().apply(grid_, q), kinetic_ball_});
    if (theta_.size() > kMaxThetaSamples) {
      std::vector<ThetaSample> kept;
      for (std::size_t k = 0; k < theta_.size(); k += 2) kept.push_back(theta_[k]);
      theta_ = std::move(kept);
      theta_stride_ *= 2;
    }
  }
}

DiagnosticsRecord FlowMonitor::record(const StepEvent& ev) const {
  return make_record(ev.t, ev.dt, ev.f, ev.velocity, ev.w, ev.w_prev, ev.density,
                     ev.max_diffusivity,
                     tangency_residual(ev.tension, ev.f_prev, max_of(ev.density.q.values())));
}

DiagnosticsRecord FlowMonitor::make_record(double t, double dt, const MapField& f,
                                           const MapField& velocity, const ConformalField& w,
                                           const ConformalField& w_prev,
                                           const detail::DensityBuffers& density,
                                           double max_diffusivity, double tangency) const {
  const std::size_t cells = grid_.cell_count();
  DiagnosticsRecord r;
  r.t = t;
  r.dt_used = dt;
  r.E_eps = integrate(grid_, density.q.values()) / constants_.n;
  std::vector<double> tmp(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    double s = 0.0;
    for (double x : velocity.at(c)) s += x * x;
    tmp[c] = w_prev.w[c] * s;
  }
  r.dissipation = integrate(grid_, tmp);
  r.volume = integrate(w.w);
  r.sup_e2 = max_of(density.e2.values());
  r.min_w = min_of(w.w.values());
  r.constraint_residual = constraint_residual(f);
  r.tangency_residual = tangency;
  r.local_energy_max = 0.0;
  for (const auto& pw : probe_theta_) {
    r.local_energy_max = std::max(r.local_energy_max, pw.apply(grid_, density.q.values()));
  }
  r.max_diffusivity = max_diffusivity;
  for (double p : moments_) r.kinetic.push_back(kinetic_moment(velocity, w, p));
  return r;
}

}  // namespace nchf
