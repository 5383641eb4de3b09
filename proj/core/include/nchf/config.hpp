#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nchf/diagnostics.hpp"
#include "nchf/fixtures.hpp"
#include "nchf/flow.hpp"
#include "nchf/inequality_lab.hpp"
#include "nchf/sphere.hpp"

namespace nchf {

/// Everything one invocation needs. Text form: one `key = value` per line,
/// dotted keys, `#` starts a comment, unknown keys are errors. See README.
struct RunConfig {
  int dim = 2;
  int res = 32;
  double side = GridSpec::kDefaultSide;

  int L = 3;
  std::optional<double> curvature_bound;  // C_N override; 1 for the round sphere
  double constraint_tol = 1e-12;

  double eps = 0.1;
  double a = 1.0;
  double b = 4.0;
  FlowMode mode = FlowMode::kChf;
  double t_end = 0.5;

  double cfl_safety = 0.4;
  double dt_min = 1e-9;
  double dt_max = 1e-2;

  FixtureSpec initial;

  std::string probes;  // parse_probes syntax; empty means the default probe
  double probe_threshold = kDefaultConcentrationThreshold;

  std::string out_dir = "nchf_out";
  int cadence = 1;
  int checkpoint_every = 0;  // steps; 0 writes only the final checkpoint
  std::uint64_t seed = 1;

  std::vector<int> lab_resolutions{32, 64};
  int lab_samples = 100;
  double lab_beta = 0.0;
  int lab_max_freq = 1;
  double lab_radius = 0.0;

  int gradcheck_directions = 20;
  double gradcheck_step = 1e-5;

  GridSpec grid() const;
  SphereTarget target() const;
  FlowConstants constants() const;
  StepControl control() const;
  ProbeSet probe_set() const;
  CorpusSpec corpus() const;

  /// Throws kConfig naming the offending key.
  void validate() const;
};

/// Throws kConfig with "<source>:<line>: ..." on malformed input.
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig parse_config_string(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Every key, doubles with 17 significant digits, so that parsing the output
/// gives back an identical RunConfig.
std::string serialize_config(const RunConfig& config);

bool operator==(const RunConfig& x, const RunConfig& y);

}  // namespace nchf
