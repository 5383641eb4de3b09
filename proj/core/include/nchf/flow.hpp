#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "nchf/field.hpp"
#include "nchf/operators.hpp"
#include "nchf/sphere.hpp"

namespace nchf {

/// Conformal factor stored as w = e^{n u}. Positive everywhere.
struct ConformalField {
  ScalarField w;

  static ConformalField ones(const GridSpec& grid) { return {ScalarField(grid, 1.0)}; }
  /// u = log(w) / n, for output only.
  double u(std::size_t cell, int n) const { return std::log(w[cell]) / n; }
};

enum class FlowMode {
  kChf,      // coupled map / conformal factor flow
  kFrozenU,  // w held at 1: the plain regularized n-harmonic map flow
};

struct FlowState {
  double t = 0.0;
  MapField f;
  ConformalField w;
  MapField velocity;  // most recent (f_new - f) / dt
  std::uint64_t step_count = 0;

  /// t = 0, w = 1 (u = 0), zero velocity.
  static FlowState initial(MapField f0);
};

struct StepControl {
  double cfl_safety = 0.4;
  double dt_min = 1e-9;
  double dt_max = 1e-2;
  FlowMode mode = FlowMode::kChf;

  void validate() const;
};

struct FStepResult {
  MapField f;
  MapField velocity;
};

/// f_new(c) = project(f(c) + dt tau(c) / w(c)). Throws kStepTooLarge if the
/// unprojected point leaves the tubular neighbourhood and kOperatorOverflow
/// on a non-finite tension.
FStepResult step_f(const FlowState& state, const FlowConstants& constants, double dt);

/// Exact solution of w_t = n b q - n a w over dt with q = e_2^{n/2} frozen:
///   w_new = (b/a) q + (w - (b/a) q) exp(-n a dt).
ConformalField step_w(const ConformalField& w, const ScalarField& e2,
                      const FlowConstants& constants, double dt);

/// Largest stable explicit step, cfl_safety h^2 / (2 n max_c D) with the
/// diffusivity D = e_2^{n/2-1} / w, ignoring dt_min / dt_max.
struct DiffusivityBound {
  double max_diffusivity;
  std::size_t cell;
  double dt;
};
DiffusivityBound cfl_bound(const ScalarField& sigma, const ConformalField& w, int n,
                           double cfl_safety);

/// What the driver hands to its observer after every completed step.
struct StepEvent {
  std::uint64_t step;
  double t_prev;
  double t;
  double dt;
  const MapField& f_prev;
  const MapField& f;
  const MapField& velocity;
  const MapField& tension;            // evaluated at f_prev
  const ConformalField& w_prev;       // the weight used by the f-step
  const ConformalField& w;            // after the w-substep
  const detail::DensityBuffers& density;  // evaluated at f
  double max_diffusivity;             // at the start of the step
  std::size_t max_diffusivity_cell;
};

using StepSink = std::function<void(const StepEvent&)>;

/// Lie-split time stepping from state.t to t_end: density at f, dt from the
/// CFL bound, f-step, density at the new f, exact w-step (skipped in
/// kFrozenU mode), then the sink. `state` always holds the last completed
/// step, also when a CflCollapse or step error is thrown.
void advance(FlowState& state, const StepControl& control, const FlowConstants& constants,
             double t_end, const StepSink& sink = {});

/// How closed_form_w integrates the recorded density history.
enum class HistoryQuadrature {
  /// q_k held constant over (t_{k-1}, t_k], exponential weight integrated
  /// exactly. This is the density the w-substep sees, so the reconstruction
  /// matches the stepped w up to rounding.
  kStepConsistent,
  /// Trapezoidal rule on s -> e^{-n a (t - s)} q(s). Agrees with the stepped
  /// w only to first order in dt.
  kTrapezoidal,
};

/// Closed form w(t) = e^{-n a t} (1 + n b int_0^t e^{n a s} e_2^{n/2}(s) ds)
/// evaluated from samples q[k] at times[k], with times[0] = 0 and
/// times.back() = t. Assumes u(0) = 0.
double closed_form_w(std::span<const double> times, std::span<const double> q,
                     const FlowConstants& constants, double t,
                     HistoryQuadrature quadrature = HistoryQuadrature::kStepConsistent);

}  // namespace nchf
