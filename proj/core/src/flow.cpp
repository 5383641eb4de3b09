#include "nchf/flow.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "nchf/error.hpp"

namespace nchf {
namespace {

// Shared by step_f and advance so that both produce identical bits.
void explicit_projected_step(const MapField& f, const MapField& tau, const ScalarField& w,
                             double dt, MapField& f_new, MapField& velocity) {
  const auto L = static_cast<std::size_t>(f.ambient_dim());
  const std::size_t cells = f.cell_count();
  const double inv_dt = 1.0 / dt;
  parallel_for(cells, [&](std::size_t begin, std::size_t end) {
    std::vector<double> y(L);
    for (std::size_t c = begin; c < end; ++c) {
      const auto fc = f.at(c);
      const auto tc = tau.at(c);
      const double scale = dt / w[c];
      for (std::size_t a = 0; a < L; ++a) {
        if (!std::isfinite(tc[a])) {
          throw Error(ErrorKind::kOperatorOverflow,
                      "operator overflow: non-finite tension at cell " + std::to_string(c));
        }
        y[a] = fc[a] + scale * tc[a];
      }
      auto out = f_new.at(c);
      project(y, out);
      auto v = velocity.at(c);
      for (std::size_t a = 0; a < L; ++a) v[a] = (out[a] - fc[a]) * inv_dt;
    }
  });
}

void exact_w_update(const ScalarField& w, const ScalarField& q, const FlowConstants& k, double dt,
                    ScalarField& out) {
  const double decay = std::exp(-k.n * k.a * dt);
  const double ratio = k.b / k.a;
  const std::size_t cells = w.size();
  parallel_for(cells, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      const double eq = ratio * q[c];
      out[c] = eq + (w[c] - eq) * decay;
    }
  });
}

}  // namespace

FlowState FlowState::initial(MapField f0) {
  const GridSpec grid = f0.grid();
  const int L = f0.ambient_dim();
  return FlowState{0.0, std::move(f0), ConformalField::ones(grid), MapField(grid, L), 0};
}

void StepControl::validate() const {
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) {
    throw Error(ErrorKind::kConfig, "control.cfl_safety must lie in (0, 1]");
  }
  if (!(dt_min > 0.0)) throw Error(ErrorKind::kConfig, "control.dt_min must be positive");
  if (!(dt_max >= dt_min)) throw Error(ErrorKind::kConfig, "control.dt_max must be >= control.dt_min");
}

FStepResult step_f(const FlowState& state, const FlowConstants& constants, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::kInvalidArgument, "step_f: dt must be positive");
  const MapField tau = tension(state.f, constants);
  FStepResult out{MapField(state.f.grid(), state.f.ambient_dim()),
                  MapField(state.f.grid(), state.f.ambient_dim())};
  explicit_projected_step(state.f, tau, state.w.w, dt, out.f, out.velocity);
  return out;
}

ConformalField step_w(const ConformalField& w, const ScalarField& e2, const FlowConstants& constants,
                      double dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::kInvalidArgument, "step_w: dt must be positive");
  ScalarField q(e2.grid());
  for (std::size_t c = 0; c < q.size(); ++c) q[c] = half_power(e2[c], constants.n);
  ConformalField out{ScalarField(e2.grid())};
  exact_w_update(w.w, q, constants, dt, out.w);
  return out;
}

DiffusivityBound cfl_bound(const ScalarField& sigma, const ConformalField& w, int n,
                           double cfl_safety) {
  double worst = 0.0;
  std::size_t cell = 0;
  for (std::size_t c = 0; c < sigma.size(); ++c) {
    const double d = sigma[c] / w.w[c];
    if (d > worst) {
      worst = d;
      cell = c;
    }
  }
  const double h = sigma.grid().spacing();
  const double dt = worst > 0.0 ? cfl_safety * h * h / (2.0 * n * worst)
                                : std::numeric_limits<double>::infinity();
  return {worst, cell, dt};
}

void advance(FlowState& state, const StepControl& control, const FlowConstants& constants,
             double t_end, const StepSink& sink) {
  control.validate();
  if (!(t_end > state.t)) {
    throw Error(ErrorKind::kInvalidArgument, "advance: t_end must exceed the current time");
  }
  const GridSpec grid = state.f.grid();
  const int L = state.f.ambient_dim();
  const int n = constants.n;
  if (grid.dim() != n) {
    throw Error(ErrorKind::kInvalidArgument, "advance: flow dimension n differs from the grid dimension");
  }

  detail::DensityBuffers density(grid);
  detail::DensityBuffers next_density(grid);
  detail::compute_density(state.f, constants.eps, n, density);
  MapField tau(grid, L);
  MapField f_new(grid, L);
  MapField velocity(grid, L);
  ConformalField w_new{ScalarField(grid)};

  while (state.t < t_end) {
    const DiffusivityBound bound = cfl_bound(density.sigma, state.w, n, control.cfl_safety);
    double dt = std::min(bound.dt, control.dt_max);
    if (dt < control.dt_min) {
      std::ostringstream os;
      os << "CFL collapse at t = " << state.t << ": stable step " << dt << " < dt_min "
         << control.dt_min << "; max diffusivity " << bound.max_diffusivity << " at cell "
         << bound.cell;
      throw CflCollapse(os.str(), state.t, dt, bound.cell, bound.max_diffusivity);
    }
    bool last = false;
    if (state.t + dt >= t_end) {
      dt = t_end - state.t;
      last = true;
    }

    detail::compute_tension(state.f, density, tau);
    explicit_projected_step(state.f, tau, state.w.w, dt, f_new, velocity);
    detail::compute_density(f_new, constants.eps, n, next_density);
    if (control.mode == FlowMode::kChf) {
      exact_w_update(state.w.w, next_density.q, constants, dt, w_new.w);
    } else {
      w_new.w = state.w.w;
    }

    const double t_prev = state.t;
    const double t_next = last ? t_end : state.t + dt;
    std::swap(state.f, f_new);  // f_new now holds f_prev
    std::swap(state.w, w_new);  // w_new now holds w_prev
    std::swap(density, next_density);
    std::swap(state.velocity, velocity);
    state.t = t_next;
    ++state.step_count;

    if (sink) {
      sink(StepEvent{state.step_count, t_prev, t_next, dt, f_new, state.f, state.velocity, tau,
                     w_new, state.w, density, bound.max_diffusivity, bound.cell});
    }
  }
}

double closed_form_w(std::span<const double> times, std::span<const double> q,
                     const FlowConstants& k, double t, HistoryQuadrature quadrature) {
  if (times.empty() || times.size() != q.size()) {
    throw Error(ErrorKind::kInvalidArgument, "closed_form_w: incomplete history");
  }
  if (times.front() != 0.0 || times.back() != t) {
    throw Error(ErrorKind::kInvalidArgument,
                "closed_form_w: incomplete history (must cover [0, t])");
  }
  const double na = k.n * k.a;
  double acc = std::exp(-na * t);
  if (quadrature == HistoryQuadrature::kStepConsistent) {
    // n b q_k int_{t_{k-1}}^{t_k} e^{-na (t - s)} ds = (b/a) q_k (e^{-na (t - t_k)} - e^{-na (t - t_{k-1})})
    const double ratio = k.b / k.a;
    for (std::size_t j = 1; j < times.size(); ++j) {
      acc += ratio * q[j] * (std::exp(-na * (t - times[j])) - std::exp(-na * (t - times[j - 1])));
    }
  } else {
    const double nb = k.n * k.b;
    for (std::size_t j = 1; j < times.size(); ++j) {
      const double g0 = std::exp(-na * (t - times[j - 1])) * q[j - 1];
      const double g1 = std::exp(-na * (t - times[j])) * q[j];
      acc += nb * 0.5 * (times[j] - times[j - 1]) * (g0 + g1);
    }
  }
  return acc;
}

}  // namespace nchf
