#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nchf/field.hpp"
#include "nchf/flow.hpp"

namespace nchf {

struct Probe {
  Point center;
  double radius = 1.0;
};

/// Concentration threshold used when none is configured: half of Theta at the
/// moment the reference bump's frozen_u leg trips the CFL floor (n = 3,
/// res 32, radius 2, dt_min 4e-4; Theta = 40.335 at t = 0.1855). See README.
inline constexpr double kDefaultConcentrationThreshold = 20.17;

/// Ceiling for theta_holder_check ratios: twice the largest ratio seen over
/// the calibration corpus (9.31, the reference bump under frozen_u).
inline constexpr double kHolderRatioBound = 20.0;

struct ProbeSet {
  std::vector<Probe> probes;
  double threshold = kDefaultConcentrationThreshold;

  void validate(const GridSpec& grid) const;
};

/// Default probe: the domain centre with radius max(side / 4, 3h).
ProbeSet default_probes(const GridSpec& grid);

/// Parses "x1,x2[,..]:r;x1,x2:r". Coordinates in domain length units.
std::vector<Probe> parse_probes(const std::string& spec, int dim);
std::string format_probes(const std::vector<Probe>& probes, int dim);

/// Cells in the support of a probe with their cutoff weights phi^power.
/// Visits only the bounding box of the ball, so it is cheap for small radii.
struct ProbeWeights {
  std::vector<std::size_t> cells;
  std::vector<double> weights;
  std::vector<double> phi;

  /// h^n * sum_k density[cells[k]] * weights[k], pairwise summed.
  double apply(const GridSpec& grid, std::span<const double> density) const;
};
ProbeWeights probe_weights(const GridSpec& grid, const Probe& probe, int power);

/// E^eps(f) = (1/n) int (eps + |df|^2)^{n/2}. Depends on f only, never on w.
double total_energy(const MapField& f, double eps, int n);

/// Theta_r = int e_2^{n/2} phi^n with phi = make_cutoff(center, r).
double local_energy(const MapField& f, const Probe& probe, double eps, int n);

/// int w |f_t|^{p+2}.
double kinetic_moment(const MapField& velocity, const ConformalField& w, double p);

/// Moment exponents {0, 1, 2, n - 2 + 1/8}.
std::vector<double> default_moment_exponents(int n);

struct ConcentrationReport {
  std::vector<double> theta;
  std::vector<bool> flagged;
  Point max_center;
  double max_theta = 0.0;
  std::size_t flagged_count() const;
};

/// Theta_r at every probe with a flag Theta_r > threshold, plus the largest
/// Theta over centres on the coarse sublattice (every res/8 cells) at the
/// radius of the first probe.
ConcentrationReport concentration_scan(const MapField& f, const ProbeSet& probes, double eps, int n);

/// One recorded point of the local energy trajectory. `kinetic` is the
/// cumulative int_0^t int_{B_r} e_2^{n/2} |f_t|^2.
struct ThetaSample {
  double t;
  double theta;
  double kinetic;
};

struct HolderReport {
  double max_ratio = 0.0;
  std::size_t pairs = 0;
  double worst_s = 0.0;
  double worst_t = 0.0;

  bool bounded(double bound = kHolderRatioBound) const { return max_ratio <= bound; }
};

/// max over pairs s < t of
///   |Theta(t) - Theta(s)| / ((t - s)^{1/2} (K(t) - K(s))^{1/2} + floor).
/// Pairs with s = t are skipped. Needs at least three samples.
HolderReport theta_holder_check(std::span<const ThetaSample> samples, double floor = 1e-12);

struct DiagnosticsRecord {
  double t = 0.0;
  double E_eps = 0.0;
  double dissipation = 0.0;
  double volume = 0.0;
  double sup_e2 = 0.0;
  double min_w = 0.0;
  double constraint_residual = 0.0;
  double tangency_residual = 0.0;
  double dt_used = 0.0;
  double local_energy_max = 0.0;
  double max_diffusivity = 0.0;
  std::vector<double> kinetic;
};

/// CSV sink: one header row, then one row per record, every value printed
/// with 17 significant digits.
class DiagnosticsCsv {
 public:
  DiagnosticsCsv(std::ostream& out, std::span<const double> moment_exponents);
  void write(const DiagnosticsRecord& record);

  static std::string header(std::span<const double> moment_exponents);
  static std::string row(const DiagnosticsRecord& record);

 private:
  std::ostream* out_;
};

/// Tolerances of the runtime invariant checks.
struct InvariantTolerances {
  double energy_rel = 1e-12;
  double volume_abs = 1e-9;
  double min_w_abs = 1e-12;
  double constraint = 1e-12;
  double tangency = 1e-8;
  double lemma_abs = 1e-9;
};

/// Builds DiagnosticsRecords from flow steps and checks every runtime
/// invariant after each step, throwing ErrorKind::kInvariant naming the
/// invariant and step on the first violation.
class FlowMonitor {
 public:
  FlowMonitor(const FlowState& initial, const FlowConstants& constants, FlowMode mode,
              ProbeSet probes, std::vector<std::size_t> w_probe_cells = {},
              InvariantTolerances tol = {});

  DiagnosticsRecord initial_record() const { return initial_; }

  /// Checks every invariant after one step and updates the running ledgers.
  void observe(const StepEvent& event);
  /// Full record for the step just observed (kinetic moments included).
  DiagnosticsRecord record(const StepEvent& event) const;

  double initial_energy() const noexcept { return e0_; }
  double initial_volume() const noexcept { return v0_; }
  /// Sum over steps of dt * int w_prev |f_t|^2.
  double dissipated() const noexcept { return dissipated_; }
  double last_energy() const noexcept { return e_last_; }
  double max_tangency() const noexcept { return max_tangency_; }
  double max_constraint() const noexcept { return max_constraint_; }
  double min_dt() const noexcept { return min_dt_; }
  double max_sup_e2() const noexcept { return max_sup_e2_; }
  double max_diffusivity() const noexcept { return max_diffusivity_; }

  /// Times and q = e_2^{n/2} samples at the configured probe cells, starting
  /// with t = 0. history_q()[k][j] belongs to cell j at time history_t()[k].
  const std::vector<double>& history_t() const noexcept { return hist_t_; }
  const std::vector<std::vector<double>>& history_q() const noexcept { return hist_q_; }
  const std::vector<std::size_t>& w_probe_cells() const noexcept { return w_cells_; }

  /// Local energy trajectory at the first probe. Thinned to every other
  /// sample whenever it grows past kMaxThetaSamples.
  static constexpr std::size_t kMaxThetaSamples = 4096;
  const std::vector<ThetaSample>& theta_samples() const noexcept { return theta_; }
  const std::vector<double>& moment_exponents() const noexcept { return moments_; }

 private:
  DiagnosticsRecord make_record(double t, double dt, const MapField& f, const MapField& velocity,
                                const ConformalField& w, const ConformalField& w_prev,
                                const detail::DensityBuffers& density, double max_diffusivity,
                                double tangency) const;
  [[noreturn]] void fail(const std::string& what, std::uint64_t step, double t) const;

  FlowConstants constants_;
  FlowMode mode_;
  ProbeSet probes_;
  InvariantTolerances tol_;
  GridSpec grid_;
  std::vector<ProbeWeights> probe_theta_;  // phi^n weights per probe
  ProbeWeights lemma_weights_;             // phi^n on the first probe
  ProbeWeights ball_weights_;              // indicator of the first probe ball
  std::size_t theta_stride_ = 1;
  std::uint64_t theta_seen_ = 0;
  std::vector<double> moments_;
  std::vector<std::size_t> w_cells_;
  DiagnosticsRecord initial_;

  double t0_ = 0.0;
  double e0_ = 0.0;
  double v0_ = 0.0;
  double min_w0_ = 0.0;
  double e_last_ = 0.0;
  double dissipated_ = 0.0;
  double lemma_w2_0_ = 0.0;
  double lemma_budget_ = 0.0;
  double kinetic_ball_ = 0.0;
  double max_tangency_ = 0.0;
  double max_constraint_ = 0.0;
  double min_dt_ = 0.0;
  double max_sup_e2_ = 0.0;
  double max_diffusivity_ = 0.0;
  std::vector<double> hist_t_;
  std::vector<std::vector<double>> hist_q_;
  std::vector<ThetaSample> theta_;
};

}  // namespace nchf
