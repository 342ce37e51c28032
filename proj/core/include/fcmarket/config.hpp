#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fcmarket/baselines.hpp"
#include "fcmarket/dataset.hpp"
#include "fcmarket/session.hpp"

namespace fcmarket {

enum class DataKind { synthetic, zones, csv };

struct DataSource {
  DataKind kind = DataKind::synthetic;
  SyntheticSpec synthetic;
  std::size_t rows = 2000;
  ZoneSynthSpec zones;
  std::filesystem::path csv;         // relative paths resolve against the config file
  std::vector<AgentSchema> schema;   // empty: inferred from the file
};

enum class LocalReference { session, lasso, spline_lasso };

struct BenchmarkSettings {
  LocalReference local = LocalReference::session;
  BaselineConfig baseline;
  std::filesystem::path external;  // optional forecast file replacing the market column
  bool lrm = true;                 // seller-priced LASSO market on cross-sectional data
};

struct TuneSettings {
  TuningGrid grid;
  int buyer = 0;       // 0: first buyer
  double bid = -1.0;   // negative: total seller price
};

struct Config {
  std::string name = "custom";
  std::uint64_t seed = 0;
  DataSource data;
  SessionConfig session;
  RunOptions run;
  TuneSettings tune;
  BenchmarkSettings benchmark;

  void validate() const;
};

// JSON document; unknown keys are configuration errors. Fields left out keep
// the defaults of the named "preset" if one is given, else of Config{}.
Config parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
Config load_config(const std::filesystem::path& path);
std::string dump_config(const Config& config);

// Data generator seeds derived from the root seed.
void apply_seed(Config& config, std::uint64_t seed);

std::vector<std::string> preset_names();
Config preset(const std::string& name);

}  // namespace fcmarket
