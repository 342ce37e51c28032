#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "fcmarket/config.hpp"

namespace fcmarket::cli {

struct Options {
  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = "out";
  std::optional<int> jobs;
  bool re_estimate = false;
  std::string external;  // benchmark only
};

// Config from --config or --preset with the command-line overrides applied.
// FCMARKET_JOBS, when set, wins over --jobs.
Config resolve_config(const Options& options, std::string* label);

void cmd_synth(const Options& options);
void cmd_run_session(const Options& options);
void cmd_tune(const Options& options);
void cmd_benchmark(const Options& options);

}  // namespace fcmarket::cli
