#include "nchf/runner.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "nchf/checkpoint.hpp"
#include "nchf/error.hpp"
#include "nchf/fixtures.hpp"
#include "nchf/inequality_lab.hpp"
#include "nchf/operators.hpp"
#include "nchf/sphere.hpp"

namespace nchf {
namespace fs = std::filesystem;
namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* mode_name(FlowMode m) { return m == FlowMode::kChf ? "chf" : "frozen_u"; }

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + p.string() + "'");
  return out;
}

// Five cells for the closed-form w audit: the first probe centre, where the
// density is usually largest, and four cells spread over the grid.
std::vector<std::size_t> audit_cells(const GridSpec& grid, const ProbeSet& probes) {
  const std::size_t N = grid.cell_count();
  std::vector<std::size_t> cells{grid.nearest_cell(probes.probes.front().center)};
  for (std::size_t k = 0; cells.size() < 5; ++k) {
    const std::size_t c = (k * (N / 4 + 1) + N / 8) % N;
    if (std::find(cells.begin(), cells.end(), c) == cells.end()) cells.push_back(c);
  }
  return cells;
}

void write_series(const fs::path& dir, const LegResult& r) {
  fs::create_directories(dir / "series");
  struct S {
    const char* name;
    double (*get)(const DiagnosticsRecord&);
  };
  static const S series[] = {
      {"E_eps", [](const DiagnosticsRecord& d) { return d.E_eps; }},
      {"dissipation", [](const DiagnosticsRecord& d) { return d.dissipation; }},
      {"volume", [](const DiagnosticsRecord& d) { return d.volume; }},
      {"sup_e2", [](const DiagnosticsRecord& d) { return d.sup_e2; }},
      {"min_w", [](const DiagnosticsRecord& d) { return d.min_w; }},
      {"dt_used", [](const DiagnosticsRecord& d) { return d.dt_used; }},
      {"local_energy_max", [](const DiagnosticsRecord& d) { return d.local_energy_max; }},
      {"max_diffusivity", [](const DiagnosticsRecord& d) { return d.max_diffusivity; }},
  };
  for (const auto& s : series) {
    auto out = open_out(dir / "series" / (std::string(s.name) + ".dat"));
    out << "# t " << s.name << '\n';
    for (const auto& rec : r.records) out << fmt(rec.t) << ' ' << fmt(s.get(rec)) << '\n';
  }
  {
    auto out = open_out(dir / "series" / "theta.dat");
    out << "# t theta kinetic_ball\n";
    for (const auto& s : r.theta) out << fmt(s.t) << ' ' << fmt(s.theta) << ' ' << fmt(s.kinetic) << '\n';
  }
  for (std::size_t k = 0; k < r.moment_exponents.size(); ++k) {
    char name[48];
    std::snprintf(name, sizeof name, "kinetic_p%g", r.moment_exponents[k]);
    auto out = open_out(dir / "series" / (std::string(name) + ".dat"));
    out << "# t " << name << '\n';
    for (const auto& rec : r.records) out << fmt(rec.t) << ' ' << fmt(rec.kinetic[k]) << '\n';
  }
}

void write_metadata(const fs::path& dir, const RunConfig& config, const LegResult& r) {
  auto out = open_out(dir / "metadata.txt");
  out << "# leg " << r.leg << "\n";
  out << "# fixture " << to_string(config.initial.kind);
  if (config.initial.engineering_stand_in()) {
    out << " (engineering stand-in: a concentration driver, not a canonical singular datum)";
  }
  out << "\n# exit " << r.exit_code << "\n";
  out << "# completed " << (r.completed ? "true" : "false") << "\n";
  out << "# t_reached " << fmt(r.t_reached) << "\n";
  out << "# steps " << r.steps << "\n";
  if (!r.message.empty()) out << "# message " << r.message << "\n";
  if (r.holder) {
    out << "# theta_holder_ratio " << fmt(r.holder->max_ratio) << " (bound " << fmt(kHolderRatioBound)
        << (r.holder->bounded() ? ", within" : ", EXCEEDED") << ")\n";
  }
  if (r.final_concentration) {
    out << "# flagged_probes " << r.final_concentration->flagged_count() << " of "
        << r.final_concentration->flagged.size() << " (threshold " << fmt(config.probe_threshold)
        << "), max theta on lattice " << fmt(r.final_concentration->max_theta) << "\n";
  }
  out << serialize_config(config);
}

}  // namespace

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kConfig:
    case ErrorKind::kIo:
      return kExitUserError;
    case ErrorKind::kCflCollapse:
      return kExitCflCollapse;
    case ErrorKind::kStepTooLarge:
    case ErrorKind::kOperatorOverflow:
    case ErrorKind::kInvariant:
      return kExitFailure;
  }
  return kExitFailure;
}

FlowState initial_state(const RunConfig& config) {
  return FlowState::initial(make_fixture(config.grid(), config.L, config.initial));
}

LegResult run_leg(const RunConfig& config, FlowMode mode, const LegIo& io, const FlowState* resume) {
  config.validate();
  RunConfig cfg = config;
  cfg.mode = mode;
  const GridSpec grid = cfg.grid();
  const FlowConstants constants = cfg.constants();
  const StepControl control = cfg.control();

  FlowState state = resume ? *resume : initial_state(cfg);
  if (!(state.f.grid() == grid) || state.f.ambient_dim() != cfg.L) {
    throw Error(ErrorKind::kConfig, "checkpoint grid or target dimension differs from the config");
  }
  if (!(cfg.t_end > state.t)) {
    throw Error(ErrorKind::kConfig, "flow.t_end must exceed the start time " + fmt(state.t));
  }

  const ProbeSet probes = cfg.probe_set();
  InvariantTolerances tol;
  tol.constraint = cfg.constraint_tol;
  FlowMonitor monitor(state, constants, mode, probes, audit_cells(grid, probes), tol);

  LegResult r;
  r.leg = mode_name(mode);
  r.moment_exponents = monitor.moment_exponents();
  {
    detail::DensityBuffers d(grid);
    detail::compute_density(state.f, constants.eps, constants.n, d);
    r.initial_D = cfl_bound(d.sigma, state.w, constants.n, control.cfl_safety).max_diffusivity;
  }

  std::ofstream csv_file;
  std::optional<DiagnosticsCsv> csv;
  if (!io.dir.empty()) {
    fs::create_directories(io.dir);
    csv_file = open_out(io.dir / "diagnostics.csv");
    csv.emplace(csv_file, r.moment_exponents);
  }
  auto emit = [&](const DiagnosticsRecord& rec) {
    if (csv) csv->write(rec);
    if (io.keep_records) r.records.push_back(rec);
  };
  emit(monitor.initial_record());

  const auto cadence = static_cast<std::uint64_t>(cfg.cadence);
  const auto every = static_cast<std::uint64_t>(cfg.checkpoint_every);
  auto sink = [&](const StepEvent& ev) {
    monitor.observe(ev);
    if (ev.step % cadence == 0 || ev.t >= cfg.t_end) emit(monitor.record(ev));
    if (every > 0 && !io.dir.empty() && ev.step % every == 0) {
      char name[64];
      std::snprintf(name, sizeof name, "checkpoint_%06llu.bin", static_cast<unsigned long long>(ev.step));
      write_checkpoint(io.dir / name, FlowState{ev.t, ev.f, ev.w, ev.velocity, ev.step});
    }
  };

  try {
    advance(state, control, constants, cfg.t_end, sink);
    r.completed = true;
  } catch (const CflCollapse& e) {
    r.exit_code = kExitCflCollapse;
    r.message = e.what();
    r.collapse_time = e.time();
    r.collapse_cell = e.cell();
  } catch (const Error& e) {
    r.exit_code = exit_code_for(e);
    r.message = e.what();
  }

  r.t_reached = state.t;
  r.steps = state.step_count;
  r.initial_E = monitor.initial_energy();
  r.final_E = monitor.last_energy();
  r.dissipated = monitor.dissipated();
  r.max_sup_e2 = monitor.max_sup_e2();
  r.max_D = std::max(r.initial_D, monitor.max_diffusivity());
  r.min_dt = monitor.min_dt();
  r.max_tangency = monitor.max_tangency();
  r.max_constraint = monitor.max_constraint();
  r.theta = monitor.theta_samples();
  if (r.theta.size() >= 3) r.holder = theta_holder_check(r.theta);
  r.final_concentration = concentration_scan(state.f, probes, constants.eps, constants.n);
  r.w_probe_cells = monitor.w_probe_cells();
  r.history_t = monitor.history_t();
  r.history_q = monitor.history_q();

  if (!io.dir.empty()) {
    write_checkpoint(io.dir / (r.completed ? "checkpoint_final.bin" : "checkpoint_last.bin"), state);
    write_series(io.dir, r);
    write_metadata(io.dir, cfg, r);
  }
  if (io.log) {
    *io.log << r.leg << ": " << (r.completed ? "completed" : "stopped") << " at t = " << fmt(r.t_reached)
            << " after " << r.steps << " steps, E = " << fmt(r.final_E) << '\n';
  }
  r.final_state = std::move(state);
  return r;
}

GradcheckReport gradcheck(const MapField& f, const FlowConstants& constants, int directions,
                          double step, std::uint64_t seed) {
  const GridSpec& grid = f.grid();
  const int n = constants.n;
  const MapField tau = tension(f, constants);
  const double e = total_energy(f, constants.eps, n);
  GradcheckReport rep;
  rep.floor = std::max(1e-12, 64.0 * DBL_EPSILON * e / step);
  const int max_freq = std::max(1, std::min(2, grid.res() / 4));
  MapField fp(grid, f.ambient_dim());
  MapField fm(grid, f.ambient_dim());
  std::vector<double> y(static_cast<std::size_t>(f.ambient_dim()));
  std::vector<double> dot(grid.cell_count());
  for (int k = 0; k < directions; ++k) {
    const MapField v = random_tangent_field(f, seed + static_cast<std::uint64_t>(k), max_freq);
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
      double s = 0.0;
      for (std::size_t l = 0; l < y.size(); ++l) {
        s += tau.at(c)[l] * v.at(c)[l];
        y[l] = f.at(c)[l] + step * v.at(c)[l];
      }
      dot[c] = s;
      project(y, fp.at(c));
      for (std::size_t l = 0; l < y.size(); ++l) y[l] = f.at(c)[l] - step * v.at(c)[l];
      project(y, fm.at(c));
    }
    const double analytic = -integrate(grid, dot);
    const double numeric =
        (total_energy(fp, constants.eps, n) - total_energy(fm, constants.eps, n)) / (2.0 * step);
    const double allowance = 1e-5 * std::max(std::abs(analytic), std::abs(numeric)) + rep.floor;
    const double excess = std::abs(analytic - numeric) - allowance;
    const bool pass = excess <= 0.0;
    rep.rows.push_back({analytic, numeric, pass});
    if (k == 0 || excess > rep.worst_excess) {
      rep.worst = static_cast<std::size_t>(k);
      rep.worst_excess = excess;
    }
    rep.pass = rep.pass && pass;
  }
  return rep;
}

void write_verdict_csv(std::ostream& out, const std::vector<LegResult>& legs) {
  out << "leg,max_sup_e2,max_D,min_dt,collapse_time,final_E,completed,t_reached\n";
  for (const auto& r : legs) {
    out << r.leg << ',' << fmt(r.max_sup_e2) << ',' << fmt(r.max_D) << ',' << fmt(r.min_dt) << ','
        << (r.collapse_time ? fmt(*r.collapse_time) : std::string("none")) << ',' << fmt(r.final_E)
        << ',' << (r.completed ? "true" : "false") << ',' << fmt(r.t_reached) << '\n';
  }
  if (!out) throw Error(ErrorKind::kIo, "failed to write verdict table");
}

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err,
            const std::optional<fs::path>& resume) {
  try {
    std::optional<FlowState> start;
    if (resume) start = read_checkpoint(*resume);
    const LegResult r = run_leg(config, config.mode, LegIo{config.out_dir, &out, true},
                                start ? &*start : nullptr);
    if (r.exit_code != kExitOk) err << "run failed: " << r.message << '\n';
    return r.exit_code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

int cmd_compare(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const fs::path dir = config.out_dir;
    std::vector<LegResult> legs;
    for (FlowMode m : {FlowMode::kFrozenU, FlowMode::kChf}) {
      legs.push_back(run_leg(config, m, LegIo{dir / mode_name(m), &out, true}));
      if (legs.back().exit_code != kExitOk) err << legs.back().leg << ": " << legs.back().message << '\n';
    }
    fs::create_directories(dir);
    auto vf = open_out(dir / "verdict.csv");
    write_verdict_csv(vf, legs);
    write_verdict_csv(out, legs);
    for (const auto& l : legs) {
      if (l.exit_code == kExitFailure || l.exit_code == kExitUserError) return l.exit_code;
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

int cmd_gradcheck(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
    const MapField f = make_fixture(config.grid(), config.L, config.initial);
    const GradcheckReport rep = gradcheck(f, config.constants(), config.gradcheck_directions,
                                          config.gradcheck_step, config.seed);
    out << "direction,analytic,numeric,pass\n";
    for (std::size_t k = 0; k < rep.rows.size(); ++k) {
      out << k << ',' << fmt(rep.rows[k].analytic) << ',' << fmt(rep.rows[k].numeric) << ','
          << (rep.rows[k].pass ? "true" : "false") << '\n';
    }
    if (!rep.pass) {
      const auto& w = rep.rows[rep.worst];
      err << "gradcheck failed: worst direction " << rep.worst << " analytic " << fmt(w.analytic)
          << " numeric " << fmt(w.numeric) << '\n';
      return kExitFailure;
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
    const CorpusSummary s = corpus_scan(config.corpus());
    const fs::path dir = config.out_dir;
    fs::create_directories(dir);
    auto f = open_out(dir / "lab_summary.csv");
    write_corpus_csv(f, s);
    write_corpus_csv(out, s);
    if (!s.ok()) {
      err << "unstable inequalities:";
      for (auto id : s.failures) err << ' ' << to_string(id);
      err << '\n';
      return kExitFailure;
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

int cmd_inspect(const fs::path& checkpoint, std::ostream& out, std::ostream& err) {
  try {
    const FlowState s = read_checkpoint(checkpoint);
    const GridSpec& g = s.f.grid();
    const auto w = s.w.w.values();
    out << "dim " << g.dim() << "\nres " << g.res() << "\nside " << fmt(g.side()) << "\nL "
        << s.f.ambient_dim() << "\nt " << fmt(s.t) << "\nconstraint_residual "
        << fmt(constraint_residual(s.f)) << "\nmin_w " << fmt(*std::min_element(w.begin(), w.end()))
        << "\nmax_w " << fmt(*std::max_element(w.begin(), w.end())) << "\nvolume "
        << fmt(integrate(s.w.w)) << '\n';
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace nchf
