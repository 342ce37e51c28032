#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fcmarket/dataset.hpp"

namespace fcmarket {

struct LoadReport {
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;  // rows outside the timestamp range shared by every zone
};

// Zone-format CSV: zone_id,timestamp,target,u10,v10,u100,v100 (header
// required, column order free). Targets are divided by the zone capacity.
// An empty schema infers one agent per zone with capacity 1.
MarketFrame load_csv(const std::filesystem::path& path, std::span<const AgentSchema> schema,
                     LoadReport* report = nullptr);
MarketFrame parse_zone_csv(std::istream& in, std::span<const AgentSchema> schema,
                           LoadReport* report = nullptr);
// Writes raw units (targets multiplied back by capacity).
void write_zone_csv(std::ostream& out, const MarketFrame& frame);

// Generic wide layout: timestamp, then "a<id>.target" and "a<id>.<feature>"
// columns per agent. Used for synthetic datasets.
void write_wide_csv(std::ostream& out, const MarketFrame& frame);
MarketFrame read_wide_csv(std::istream& in);

std::vector<std::string> split_csv_line(std::string_view line);
std::string format_double(double value);

}  // namespace fcmarket
