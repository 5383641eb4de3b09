#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nchf/config.hpp"
#include "nchf/diagnostics.hpp"
#include "nchf/error.hpp"
#include "nchf/flow.hpp"

namespace nchf {

/// Process exit statuses.
enum ExitCode : int {
  kExitOk = 0,
  kExitUserError = 1,   // config, arguments, I/O
  kExitCflCollapse = 2,
  kExitFailure = 3,     // invariant or tolerance failure
};

/// Maps an error to its exit status.
int exit_code_for(const Error& e);

/// Where a leg writes. An empty `dir` keeps everything in memory.
struct LegIo {
  std::filesystem::path dir;
  std::ostream* log = nullptr;
  bool keep_records = true;
};

struct LegResult {
  std::string leg;
  int exit_code = kExitOk;
  std::string message;
  bool completed = false;
  double t_reached = 0.0;
  std::optional<double> collapse_time;
  std::optional<std::size_t> collapse_cell;

  double initial_E = 0.0;
  double final_E = 0.0;
  double dissipated = 0.0;  // sum of dt * int w |f_t|^2
  double max_sup_e2 = 0.0;
  double initial_D = 0.0;
  double max_D = 0.0;
  double min_dt = 0.0;
  double max_tangency = 0.0;
  double max_constraint = 0.0;
  std::uint64_t steps = 0;

  std::vector<DiagnosticsRecord> records;  // t = 0 first, then every cadence step
  std::vector<double> moment_exponents;
  std::vector<ThetaSample> theta;
  std::optional<HolderReport> holder;    // when at least three theta samples exist
  std::optional<ConcentrationReport> final_concentration;
  std::vector<std::size_t> w_probe_cells;
  std::vector<double> history_t;
  std::vector<std::vector<double>> history_q;
  std::optional<FlowState> final_state;
};

/// Runs one flow leg in `mode` from the configured fixture, or from `resume`
/// when given. Never throws on flow outcomes; they land in exit_code and
/// message. Configuration errors still throw.
LegResult run_leg(const RunConfig& config, FlowMode mode, const LegIo& io,
                  const FlowState* resume = nullptr);

/// The initial state the config describes (fixture, w = 1).
FlowState initial_state(const RunConfig& config);

struct GradcheckRow {
  double analytic;
  double numeric;
  bool pass;
};

struct GradcheckReport {
  std::vector<GradcheckRow> rows;
  std::size_t worst = 0;
  double worst_excess = 0.0;  // |a - b| minus the allowance, worst direction
  double floor = 0.0;
  bool pass = true;
};

/// Directional derivatives of the discrete energy along random smooth
/// tangent directions v: -<tension, v> against the central difference of
/// E(project(f +- s v)). A direction passes iff
///   |a - b| <= 1e-5 max(|a|, |b|) + floor,
/// floor = max(1e-12, 64 DBL_EPSILON E / s), the roundoff level of the
/// difference quotient.
GradcheckReport gradcheck(const MapField& f, const FlowConstants& constants, int directions,
                          double step, std::uint64_t seed);

/// Column layout: leg,max_sup_e2,max_D,min_dt,collapse_time,final_E,completed,t_reached
void write_verdict_csv(std::ostream& out, const std::vector<LegResult>& legs);

/// Command entry points. Each returns an exit status and reports to `out`
/// (results) and `err` (failures).
int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err,
            const std::optional<std::filesystem::path>& resume = std::nullopt);
int cmd_compare(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_gradcheck(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_inspect(const std::filesystem::path& checkpoint, std::ostream& out, std::ostream& err);

}  // namespace nchf
