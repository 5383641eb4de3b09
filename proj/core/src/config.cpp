#include "nchf/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>

#include "nchf/error.hpp"

namespace nchf {
namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::logic_error&) {
    throw std::invalid_argument("expected a number, got '" + v + "'");
  }
  if (pos != v.size()) throw std::invalid_argument("expected a number, got '" + v + "'");
  return x;
}

template <class Int>
Int to_int(const std::string& v) {
  Int x{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw std::invalid_argument("expected an integer, got '" + v + "'");
  }
  return x;
}

std::vector<double> to_doubles(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(to_double(trim(tok)));
  return out;
}

struct Key {
  const char* name;
  std::function<std::optional<std::string>(const RunConfig&)> get;  // nullopt: omit
  std::function<void(RunConfig&, const std::string&)> set;
};

#define NCHF_DOUBLE(name, field)                                                   \
  Key {                                                                            \
    name, [](const RunConfig& c) -> std::optional<std::string> { return fmt(c.field); }, \
        [](RunConfig& c, const std::string& v) { c.field = to_double(v); }         \
  }
#define NCHF_INT(name, field, type)                                                \
  Key {                                                                            \
    name, [](const RunConfig& c) -> std::optional<std::string> { return std::to_string(c.field); }, \
        [](RunConfig& c, const std::string& v) { c.field = to_int<type>(v); }      \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> k = {
      NCHF_INT("grid.dim", dim, int),
      NCHF_INT("grid.res", res, int),
      NCHF_DOUBLE("grid.side", side),
      NCHF_INT("target.L", L, int),
      Key{"target.C_N",
          [](const RunConfig& c) -> std::optional<std::string> {
            if (!c.curvature_bound) return std::nullopt;
            return fmt(*c.curvature_bound);
          },
          [](RunConfig& c, const std::string& v) { c.curvature_bound = to_double(v); }},
      NCHF_DOUBLE("target.constraint_tol", constraint_tol),
      NCHF_DOUBLE("flow.eps", eps),
      NCHF_DOUBLE("flow.a", a),
      NCHF_DOUBLE("flow.b", b),
      Key{"flow.mode",
          [](const RunConfig& c) -> std::optional<std::string> {
            return c.mode == FlowMode::kChf ? "chf" : "frozen_u";
          },
          [](RunConfig& c, const std::string& v) {
            if (v == "chf") c.mode = FlowMode::kChf;
            else if (v == "frozen_u") c.mode = FlowMode::kFrozenU;
            else throw std::invalid_argument("expected chf or frozen_u, got '" + v + "'");
          }},
      NCHF_DOUBLE("flow.t_end", t_end),
      NCHF_DOUBLE("control.cfl_safety", cfl_safety),
      NCHF_DOUBLE("control.dt_min", dt_min),
      NCHF_DOUBLE("control.dt_max", dt_max),
      Key{"initial.fixture",
          [](const RunConfig& c) -> std::optional<std::string> { return to_string(c.initial.kind); },
          [](RunConfig& c, const std::string& v) {
            try {
              c.initial.kind = parse_fixture_kind(v);
            } catch (const Error& e) {
              throw std::invalid_argument(e.what());
            }
          }},
      Key{"initial.center",
          [](const RunConfig& c) -> std::optional<std::string> {
            if (!c.initial.center) return std::nullopt;
            std::string s;
            for (int a = 0; a < c.dim; ++a) {
              if (a) s += ',';
              s += fmt(c.initial.center->x[static_cast<std::size_t>(a)]);
            }
            return s;
          },
          [](RunConfig& c, const std::string& v) {
            const auto xs = to_doubles(v);
            if (xs.empty() || xs.size() > static_cast<std::size_t>(kMaxDim)) {
              throw std::invalid_argument("expected 2 to 4 comma separated coordinates");
            }
            Point p;
            for (std::size_t a = 0; a < xs.size(); ++a) p.x[a] = xs[a];
            c.initial.center = p;
          }},
      NCHF_DOUBLE("initial.radius", initial.radius),
      NCHF_DOUBLE("initial.amplitude", initial.amplitude),
      NCHF_INT("initial.seed", initial.seed, std::uint64_t),
      NCHF_INT("initial.max_freq", initial.max_freq, int),
      NCHF_INT("initial.degree", initial.degree, int),
      Key{"probes.spec",
          [](const RunConfig& c) -> std::optional<std::string> {
            if (c.probes.empty()) return std::nullopt;
            return c.probes;
          },
          [](RunConfig& c, const std::string& v) { c.probes = v; }},
      NCHF_DOUBLE("probes.threshold", probe_threshold),
      Key{"output.dir", [](const RunConfig& c) -> std::optional<std::string> { return c.out_dir; },
          [](RunConfig& c, const std::string& v) { c.out_dir = v; }},
      NCHF_INT("output.cadence", cadence, int),
      NCHF_INT("output.checkpoint_every", checkpoint_every, int),
      NCHF_INT("seed", seed, std::uint64_t),
      Key{"lab.resolutions",
          [](const RunConfig& c) -> std::optional<std::string> {
            std::string s;
            for (std::size_t k = 0; k < c.lab_resolutions.size(); ++k) {
              if (k) s += ',';
              s += std::to_string(c.lab_resolutions[k]);
            }
            return s;
          },
          [](RunConfig& c, const std::string& v) {
            c.lab_resolutions.clear();
            std::stringstream ss(v);
            std::string tok;
            while (std::getline(ss, tok, ',')) c.lab_resolutions.push_back(to_int<int>(trim(tok)));
          }},
      NCHF_INT("lab.samples", lab_samples, int),
      NCHF_DOUBLE("lab.beta", lab_beta),
      NCHF_INT("lab.max_freq", lab_max_freq, int),
      NCHF_DOUBLE("lab.radius", lab_radius),
      NCHF_INT("gradcheck.directions", gradcheck_directions, int),
      NCHF_DOUBLE("gradcheck.step", gradcheck_step),
  };
  return k;
}

#undef NCHF_DOUBLE
#undef NCHF_INT

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw Error(ErrorKind::kConfig, key + ": " + why);
}

}  // namespace

GridSpec RunConfig::grid() const { return GridSpec(dim, res, side); }

SphereTarget RunConfig::target() const {
  return SphereTarget{L, curvature_bound.value_or(1.0), constraint_tol};
}

FlowConstants RunConfig::constants() const {
  return FlowConstants{dim, a, b, eps, curvature_bound.value_or(1.0)};
}

StepControl RunConfig::control() const { return StepControl{cfl_safety, dt_min, dt_max, mode}; }

ProbeSet RunConfig::probe_set() const {
  ProbeSet p = probes.empty() ? default_probes(grid()) : ProbeSet{parse_probes(probes, dim), 0.0};
  if (p.probes.empty()) throw Error(ErrorKind::kConfig, "probes.spec: no probes given");
  p.threshold = probe_threshold;
  return p;
}

CorpusSpec RunConfig::corpus() const {
  CorpusSpec c;
  c.n = dim;
  c.ambient_dim = L;
  c.side = side;
  c.resolutions = lab_resolutions;
  c.samples = lab_samples;
  c.max_freq = lab_max_freq;
  c.beta = lab_beta;
  c.eps = eps;
  c.radius = lab_radius;
  c.seed = seed;
  return c;
}

void RunConfig::validate() const {
  try {
    (void)grid();
  } catch (const Error& e) {
    bad("grid", e.what());
  }
  try {
    target().validate();
  } catch (const Error& e) {
    bad("target", e.what());
  }
  constants().validate();
  control().validate();
  if (!(t_end > 0.0)) bad("flow.t_end", "must be positive");
  if (L < min_ambient_dim(initial, dim)) {
    bad("target.L", to_string(initial.kind) + " needs L >= " +
                        std::to_string(min_ambient_dim(initial, dim)));
  }
  if (initial.kind == FixtureKind::kRandomBandlimited &&
      (initial.max_freq < 0 || 4 * initial.max_freq > res)) {
    bad("initial.max_freq", "must lie in [0, res/4]");
  }
  if (cadence < 1) bad("output.cadence", "must be >= 1");
  if (checkpoint_every < 0) bad("output.checkpoint_every", "must be >= 0");
  try {
    probe_set().validate(grid());
  } catch (const Error& e) {
    bad("probes.spec", e.what());
  }
  if (lab_resolutions.empty()) bad("lab.resolutions", "needs at least one resolution");
  for (int r : lab_resolutions) {
    if (r < 8) bad("lab.resolutions", "every resolution must be >= 8");
    if (4 * lab_max_freq > r) bad("lab.max_freq", "must be <= res/4 for every lab resolution");
  }
  if (lab_samples < 1) bad("lab.samples", "must be >= 1");
  if (lab_beta < 0.0 || lab_beta > dim) bad("lab.beta", "must lie in [0, n]");
  if (gradcheck_directions < 1) bad("gradcheck.directions", "must be >= 1");
  if (!(gradcheck_step > 0.0)) bad("gradcheck.step", "must be positive");
}

RunConfig parse_config(std::istream& in, const std::string& source) {
  std::map<std::string, const Key*> table;
  for (const auto& k : keys()) table[k.name] = &k;
  RunConfig c;
  std::map<std::string, int> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::kConfig, where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = table.find(key);
    if (it == table.end()) throw Error(ErrorKind::kConfig, where + "unknown key '" + key + "'");
    if (seen.count(key)) {
      throw Error(ErrorKind::kConfig, where + "duplicate key '" + key + "' (first on line " +
                                          std::to_string(seen[key]) + ")");
    }
    seen[key] = lineno;
    try {
      it->second->set(c, value);
    } catch (const std::invalid_argument& e) {
      throw Error(ErrorKind::kConfig, where + key + ": " + e.what());
    }
  }
  return c;
}

RunConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfig, "cannot open config '" + path.string() + "'");
  return parse_config(in, path.string());
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  for (const auto& k : keys()) {
    if (auto v = k.get(config)) out += std::string(k.name) + " = " + *v + "\n";
  }
  return out;
}

bool operator==(const RunConfig& x, const RunConfig& y) {
  return serialize_config(x) == serialize_config(y);
}

}  // namespace nchf
