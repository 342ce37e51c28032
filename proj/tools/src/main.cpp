#include <iostream>

#include "CLI11.hpp"
#include "artifacts.hpp"
#include "commands.hpp"
#include "fcmarket/errors.hpp"

namespace {

// Bad input of any kind exits 2; errors that point at a bug exit 1.
int exit_code(fcmarket::ErrorCode code) {
  using fcmarket::ErrorCode;
  switch (code) {
    case ErrorCode::shape:
    case ErrorCode::numeric:
    case ErrorCode::domain:
    case ErrorCode::precondition:
      return 1;
    default:
      return 2;
  }
}

void add_common(CLI::App* cmd, fcmarket::cli::Options& o) {
  auto* cfg = cmd->add_option("--config", o.config_path, "JSON config file");
  auto* pre = cmd->add_option("--preset", o.preset, "named preset");
  cfg->excludes(pre);
  cmd->add_option("--seed", o.seed, "root seed (overrides the config)");
  cmd->add_option("--out", o.out, "output directory")->capture_default_str();
  cmd->add_option("--jobs", o.jobs, "worker threads; FCMARKET_JOBS overrides");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fcmarket: budget-constrained collaborative forecasting market simulator"};
  app.require_subcommand(1);
  fcmarket::cli::Options o;

  auto* synth = app.add_subcommand("synth", "generate a dataset and its truth file");
  add_common(synth, o);
  auto* run = app.add_subcommand("run-session", "run market sessions and write settlement reports");
  add_common(run, o);
  run->add_flag("--re-estimate", o.re_estimate, "refit models in every session");
  auto* tune = app.add_subcommand("tune", "grid search over degree, knots and lambda");
  add_common(tune, o);
  auto* bench = app.add_subcommand("benchmark", "compare market forecasts with a local reference");
  add_common(bench, o);
  bench->add_flag("--re-estimate", o.re_estimate, "refit models in every session");
  bench->add_option("--external", o.external, "forecast CSV replacing the market column");
  std::string manifest;
  auto* verify = app.add_subcommand("verify", "recompute the checksums listed in a manifest");
  verify->add_option("manifest", manifest, "manifest.json")->required();
  for (auto* c : {synth, run, tune, bench, verify}) c->footer("exit codes: 0 ok, 2 configuration or input error, 1 internal");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*synth) fcmarket::cli::cmd_synth(o);
    if (*run) fcmarket::cli::cmd_run_session(o);
    if (*tune) fcmarket::cli::cmd_tune(o);
    if (*bench) fcmarket::cli::cmd_benchmark(o);
    if (*verify) {
      const auto r = fcmarket::cli::verify_manifest(manifest);
      for (const auto& m : r.mismatched) std::cerr << "mismatch: " << m << '\n';
      std::cout << r.checked - r.mismatched.size() << "/" << r.checked << " artifacts match\n";
      return r.mismatched.empty() ? 0 : 1;
    }
  } catch (const fcmarket::Error& e) {
    std::cerr << "fcmarket: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "fcmarket: internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
