#include "fcmarket/csv.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "fcmarket/errors.hpp"

namespace fcmarket {

namespace {

constexpr std::array<const char*, 4> kZoneFeatures{"u10", "v10", "u100", "v100"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '"' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view field, std::size_t line) {
  field = trim(field);
  require(!field.empty(), ErrorCode::integrity, "missing value on line " + std::to_string(line));
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  require(ec == std::errc() && ptr == field.data() + field.size() && std::isfinite(v), ErrorCode::integrity,
          "bad number '" + std::string(field) + "' on line " + std::to_string(line));
  return v;
}

Timestamp parse_time(std::string_view field, std::size_t line) {
  auto t = parse_iso8601(trim(field));
  require(t.has_value(), ErrorCode::integrity,
          "bad timestamp '" + std::string(field) + "' on line " + std::to_string(line));
  return *t;
}

struct ZoneRow {
  Timestamp time;
  double target;
  std::array<double, 4> features;
};

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    auto field = trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    out.emplace_back(field);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

MarketFrame parse_zone_csv(std::istream& in, std::span<const AgentSchema> schema, LoadReport* report) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::schema, "empty CSV input");
  const auto header = split_csv_line(line);
  auto column = [&](const char* name) {
    auto it = std::find(header.begin(), header.end(), name);
    require(it != header.end(), ErrorCode::schema, std::string("missing column ") + name);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_zone = column("zone_id"), c_time = column("timestamp"), c_target = column("target");
  std::array<std::size_t, 4> c_feat{};
  for (std::size_t k = 0; k < 4; ++k) c_feat[k] = column(kZoneFeatures[k]);

  std::map<int, std::vector<ZoneRow>> zones;
  std::size_t line_no = 1, rows_read = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    require(f.size() == header.size(), ErrorCode::schema,
            "line " + std::to_string(line_no) + " has " + std::to_string(f.size()) + " fields, expected " +
                std::to_string(header.size()));
    ZoneRow row{parse_time(f[c_time], line_no), parse_number(f[c_target], line_no), {}};
    for (std::size_t k = 0; k < 4; ++k) row.features[k] = parse_number(f[c_feat[k]], line_no);
    const double zone = parse_number(f[c_zone], line_no);
    require(zone == std::floor(zone), ErrorCode::integrity, "zone_id must be an integer");
    zones[static_cast<int>(zone)].push_back(row);
    ++rows_read;
  }
  require(!zones.empty(), ErrorCode::schema, "CSV has no data rows");

  std::vector<AgentSchema> agents;
  if (schema.empty()) {
    for (const auto& [id, rows] : zones)
      agents.push_back(AgentSchema{id, 4, {kZoneFeatures.begin(), kZoneFeatures.end()}, 1.0});
  } else {
    agents.assign(schema.begin(), schema.end());
    for (const auto& a : agents) {
      a.validate();
      require(a.n_features == 4, ErrorCode::schema,
              "zone " + std::to_string(a.agent_id) + " must declare the four wind features");
      require(zones.count(a.agent_id) == 1, ErrorCode::schema,
              "zone " + std::to_string(a.agent_id) + " missing from file");
    }
    for (const auto& [id, rows] : zones)
      require(std::any_of(agents.begin(), agents.end(), [id = id](const auto& a) { return a.agent_id == id; }),
              ErrorCode::schema, "zone " + std::to_string(id) + " not declared in schema");
  }

  Timestamp begin = Timestamp::min(), end = Timestamp::max();
  for (auto& [id, rows] : zones) {
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.time < b.time; });
    for (std::size_t t = 1; t < rows.size(); ++t) {
      require(rows[t].time != rows[t - 1].time, ErrorCode::integrity,
              "duplicate timestamp " + format_iso8601(rows[t].time) + " in zone " + std::to_string(id));
      require(rows[t].time - rows[t - 1].time == std::chrono::hours(1), ErrorCode::integrity,
              "gap after " + format_iso8601(rows[t - 1].time) + " in zone " + std::to_string(id));
    }
    begin = std::max(begin, rows.front().time);
    end = std::min(end, rows.back().time);
  }
  require(begin <= end, ErrorCode::integrity, "zones share no common timestamps");
  const auto T = static_cast<Eigen::Index>((end - begin) / std::chrono::hours(1)) + 1;

  std::vector<AgentSeries> series;
  for (const auto& a : agents) {
    const auto& rows = zones.at(a.agent_id);
    AgentSeries s;
    s.target.resize(T);
    s.exogenous.resize(T, 4);
    for (const auto& r : rows) {
      if (r.time < begin || r.time > end) continue;
      require(r.target >= 0.0 && r.target <= a.capacity, ErrorCode::range,
              "target " + format_double(r.target) + " outside [0, capacity] in zone " + std::to_string(a.agent_id));
      const auto t = static_cast<Eigen::Index>((r.time - begin) / std::chrono::hours(1));
      s.target(t) = r.target / a.capacity;
      for (std::size_t k = 0; k < 4; ++k) s.exogenous(t, static_cast<Eigen::Index>(k)) = r.features[k];
    }
    series.push_back(std::move(s));
  }

  std::vector<Timestamp> ts;
  for (Eigen::Index t = 0; t < T; ++t) ts.push_back(begin + std::chrono::hours(t));
  if (report) {
    report->rows_read = rows_read;
    report->rows_dropped = rows_read - static_cast<std::size_t>(T) * agents.size();
  }
  return MarketFrame(std::move(ts), std::move(agents), std::move(series), true);
}

MarketFrame load_csv(const std::filesystem::path& path, std::span<const AgentSchema> schema, LoadReport* report) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::io, "cannot open " + path.string());
  return parse_zone_csv(in, schema, report);
}

void write_zone_csv(std::ostream& out, const MarketFrame& frame) {
  out << "zone_id,timestamp,target,u10,v10,u100,v100\n";
  for (std::size_t a = 0; a < frame.agent_count(); ++a) {
    const auto& agent = frame.agent(a);
    const auto& s = frame.series(a);
    require(s.has_target() && agent.n_features == 4, ErrorCode::schema,
            "zone CSV needs a target and four features per agent");
    for (std::size_t t = 0; t < frame.length(); ++t) {
      const auto i = static_cast<Eigen::Index>(t);
      out << agent.agent_id << ',' << format_iso8601(frame.timestamps()[t]) << ','
          << format_double(s.target(i) * agent.capacity);
      for (Eigen::Index k = 0; k < 4; ++k) out << ',' << format_double(s.exogenous(i, k));
      out << '\n';
    }
  }
}

void write_wide_csv(std::ostream& out, const MarketFrame& frame) {
  out << "timestamp";
  for (std::size_t a = 0; a < frame.agent_count(); ++a) {
    const auto& agent = frame.agent(a);
    const std::string prefix = "a" + std::to_string(agent.agent_id) + ".";
    if (frame.series(a).has_target()) out << ',' << prefix << "target";
    for (const auto& name : agent.feature_names) out << ',' << prefix << name;
  }
  out << '\n';
  for (std::size_t t = 0; t < frame.length(); ++t) {
    const auto i = static_cast<Eigen::Index>(t);
    out << format_iso8601(frame.timestamps()[t]);
    for (std::size_t a = 0; a < frame.agent_count(); ++a) {
      const auto& s = frame.series(a);
      if (s.has_target()) out << ',' << format_double(s.target(i));
      for (Eigen::Index k = 0; k < s.exogenous.cols(); ++k) out << ',' << format_double(s.exogenous(i, k));
    }
    out << '\n';
  }
}

MarketFrame read_wide_csv(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::schema, "empty CSV input");
  const auto header = split_csv_line(line);
  require(!header.empty() && header[0] == "timestamp", ErrorCode::schema, "first column must be timestamp");

  struct Col {
    std::size_t agent;
    int feature;  // -1 for target
  };
  std::vector<AgentSchema> agents;
  std::vector<bool> has_target;
  std::vector<Col> cols;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const auto& h = header[c];
    const auto dot = h.find('.');
    require(h.size() > 2 && h[0] == 'a' && dot != std::string::npos && dot > 1, ErrorCode::schema,
            "bad column name " + h);
    int id = 0;
    auto [p, ec] = std::from_chars(h.data() + 1, h.data() + dot, id);
    require(ec == std::errc() && p == h.data() + dot, ErrorCode::schema, "bad column name " + h);
    const std::string name = h.substr(dot + 1);
    auto it = std::find_if(agents.begin(), agents.end(), [&](const auto& a) { return a.agent_id == id; });
    if (it == agents.end()) {
      agents.push_back(AgentSchema{id, 0, {}, 1.0});
      has_target.push_back(false);
      it = agents.end() - 1;
    }
    const auto pos = static_cast<std::size_t>(it - agents.begin());
    if (name == "target") {
      require(!has_target[pos], ErrorCode::schema, "duplicate target column for agent " + std::to_string(id));
      has_target[pos] = true;
      cols.push_back({pos, -1});
    } else {
      cols.push_back({pos, it->n_features++});
      it->feature_names.push_back(name);
    }
  }

  std::vector<Timestamp> ts;
  std::vector<std::vector<double>> values;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    require(f.size() == header.size(), ErrorCode::schema, "line " + std::to_string(line_no) + " has wrong field count");
    ts.push_back(parse_time(f[0], line_no));
    std::vector<double> row(cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) row[c] = parse_number(f[c + 1], line_no);
    values.push_back(std::move(row));
  }

  const auto T = static_cast<Eigen::Index>(ts.size());
  std::vector<AgentSeries> series(agents.size());
  for (std::size_t a = 0; a < agents.size(); ++a) {
    if (has_target[a]) series[a].target.resize(T);
    series[a].exogenous.resize(T, agents[a].n_features);
  }
  for (Eigen::Index t = 0; t < T; ++t)
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const double v = values[static_cast<std::size_t>(t)][c];
      if (cols[c].feature < 0)
        series[cols[c].agent].target(t) = v;
      else
        series[cols[c].agent].exogenous(t, cols[c].feature) = v;
    }
  return MarketFrame(std::move(ts), std::move(agents), std::move(series), false);
}

}  // namespace fcmarket
