// nchf: run, compare, gradcheck, validate and inspect.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "nchf/config.hpp"
#include "nchf/error.hpp"
#include "nchf/runner.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> out;
  std::optional<int> cadence;
  std::optional<std::string> probes;
  std::optional<std::uint64_t> seed;
};

void add_flags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "key = value config file")->required();
  app->add_option("--out", f.out, "output directory");
  app->add_option("--cadence", f.cadence, "diagnostics every N steps");
  app->add_option("--probes", f.probes, "probe list x1,x2[,..]:r;...");
  app->add_option("--seed", f.seed, "seed for random fixtures, directions and corpus");
}

nchf::RunConfig load(const Flags& f) {
  nchf::RunConfig c = nchf::load_config(f.config);
  if (f.out) c.out_dir = *f.out;
  if (f.cadence) c.cadence = *f.cadence;
  if (f.probes) c.probes = *f.probes;
  if (f.seed) {
    c.seed = *f.seed;
    c.initial.seed = *f.seed;
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularized n-harmonic / conformal heat flow simulator"};
  app.require_subcommand(1);

  Flags run_flags, compare_flags, grad_flags, validate_flags;
  std::optional<std::string> resume;
  auto* run = app.add_subcommand("run", "run the coupled flow");
  add_flags(run, run_flags);
  run->add_option("--resume", resume, "continue from a checkpoint");
  auto* compare = app.add_subcommand("compare", "frozen_u and chf legs on the same data");
  add_flags(compare, compare_flags);
  auto* grad = app.add_subcommand("gradcheck", "tension against finite-difference energy gradient");
  add_flags(grad, grad_flags);
  auto* validate = app.add_subcommand("validate", "inequality corpus scan");
  add_flags(validate, validate_flags);
  std::string checkpoint;
  auto* inspect = app.add_subcommand("inspect", "summarize a checkpoint");
  inspect->add_option("checkpoint", checkpoint, "checkpoint file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nchf::kExitUserError;
  }

  try {
    if (*inspect) return nchf::cmd_inspect(checkpoint, std::cout, std::cerr);
    if (*run) {
      return nchf::cmd_run(load(run_flags), std::cout, std::cerr,
                           resume ? std::optional<std::filesystem::path>(*resume) : std::nullopt);
    }
    if (*compare) return nchf::cmd_compare(load(compare_flags), std::cout, std::cerr);
    if (*grad) return nchf::cmd_gradcheck(load(grad_flags), std::cout, std::cerr);
    if (*validate) return nchf::cmd_validate(load(validate_flags), std::cout, std::cerr);
  } catch (const nchf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return nchf::exit_code_for(e);
  }
  return nchf::kExitUserError;
}
