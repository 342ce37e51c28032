#include "fcmarket/baselines.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "fcmarket/csv.hpp"
#include "fcmarket/errors.hpp"

namespace fcmarket {

void BaselineConfig::validate() const {
  TuningGrid g = grid;
  g.use_splines = kind == BaselineKind::spline_lasso;
  g.validate();
  solver.validate();
}

Eigen::VectorXd LocalModel::predict(const Eigen::MatrixXd& X, bool clip) const {
  return design.predict(X, theta, LossKind::squared, clip);
}

std::vector<Eigen::Index> local_columns(const BuyerTask& task) {
  std::vector<Eigen::Index> out;
  for (std::size_t c = 0; c < task.features.size(); ++c)
    if (task.features[c].local) out.push_back(static_cast<Eigen::Index>(c));
  return out;
}

LocalModel fit_local(const BuyerTask& task, const BaselineConfig& config, std::span<const std::size_t> rows,
                     int jobs) {
  config.validate();
  std::vector<std::size_t> use(rows.begin(), rows.end());
  if (use.empty()) {
    use.resize(static_cast<std::size_t>(task.y.size()));
    std::iota(use.begin(), use.end(), std::size_t{0});
  }
  const auto cols = local_columns(task);
  require(!cols.empty(), ErrorCode::shape, "buyer " + std::to_string(task.buyer) + " owns no features");

  TuningTask tt;
  tt.X.resize(static_cast<Eigen::Index>(use.size()), static_cast<Eigen::Index>(cols.size()));
  tt.y = take(task.y, use);
  for (std::size_t r = 0; r < use.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c)
      tt.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          task.X(static_cast<Eigen::Index>(use[r]), cols[c]);
    tt.times.push_back(task.times[use[r]]);
  }
  for (auto c : cols) tt.features.push_back(task.features[static_cast<std::size_t>(c)]);
  require((tt.y.array() != tt.y(0)).any(), ErrorCode::degenerate,
          "buyer " + std::to_string(task.buyer) + " has a constant target");

  TuningGrid grid = config.grid;
  grid.use_splines = config.kind == BaselineKind::spline_lasso;
  double budget = 0.0;
  for (const auto& f : tt.features) budget += f.price;
  const auto tr = tune(tt, budget, grid, config.solver, jobs);

  ModelSpec spec;
  spec.use_splines = grid.use_splines;
  if (spec.use_splines) spec.spline = {tr.degree, tr.knots, KnotRule::quantile};
  spec.alpha = grid.alpha;
  LocalModel out{PreparedDesign::fit(tt.X, tt.y, tt.features, spec), {}, tr.degree, tr.knots, tr.lambda, tr.loss,
                 tr.table};
  SolverConfig cfg = config.solver;
  cfg.lambda = tr.lambda;
  cfg.budget = budget;
  out.theta = BudgetLassoProblem(out.design.train(), tt.y, LossKind::squared).fit(cfg).theta;
  return out;
}

double improvement(double rmse_local, double rmse_market) {
  require(rmse_local > 0.0, ErrorCode::domain, "local RMSE must be positive");
  return 100.0 * (1.0 - rmse_market / rmse_local);
}

Comparison compare(std::span<const ForecastRow> rows) {
  require(!rows.empty(), ErrorCode::range, "empty test set");
  struct Acc {
    std::size_t n = 0;
    double sl = 0.0, sm = 0.0;
  };
  std::map<int, std::map<int, Acc>> acc;
  for (const auto& r : rows) {
    for (int h : {-1, r.horizon}) {
      auto& a = acc[r.zone][h];
      ++a.n;
      a.sl += (r.actual - r.local) * (r.actual - r.local);
      a.sm += (r.actual - r.market) * (r.actual - r.market);
    }
  }
  Comparison out;
  double sum = 0.0;
  for (const auto& [zone, by_h] : acc) {
    for (const auto& [h, a] : by_h) {
      ComparisonRow row{zone, h, a.n, std::sqrt(a.sl / a.n), std::sqrt(a.sm / a.n), 0.0};
      if (row.rmse_local > 0.0) row.improvement = improvement(row.rmse_local, row.rmse_market);
      if (h == -1) sum += row.improvement;
      out.rows.push_back(row);
    }
  }
  out.mean_improvement = sum / static_cast<double>(acc.size());
  return out;
}

std::vector<ForecastRow> forecast_rows(std::span<const SettlementReport> reports) {
  std::vector<ForecastRow> out;
  for (const auto& rep : reports) {
    if (rep.rejected) continue;
    for (std::size_t i = 0; i < rep.actuals.size(); ++i)
      out.push_back({rep.buyer, rep.delivery_times[i], rep.delivery_horizons[i], rep.actuals[i],
                     rep.local_forecasts[i], rep.forecasts[i]});
  }
  return out;
}

ExternalForecasts read_external_forecasts(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::schema, "external forecast file is empty");
  const auto header = split_csv_line(line);
  int iz = -1, it = -1, ih = -1, iv = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "zone") iz = static_cast<int>(c);
    if (header[c] == "timestamp") it = static_cast<int>(c);
    if (header[c] == "horizon") ih = static_cast<int>(c);
    if (header[c] == "forecast") iv = static_cast<int>(c);
  }
  require(iz >= 0 && it >= 0 && ih >= 0 && iv >= 0, ErrorCode::schema,
          "external forecasts need columns zone,timestamp,horizon,forecast");
  ExternalForecasts out;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    require(f.size() == header.size(), ErrorCode::schema, "line " + std::to_string(n) + ": wrong field count");
    const auto ts = parse_iso8601(f[static_cast<std::size_t>(it)]);
    require(ts.has_value(), ErrorCode::schema, "line " + std::to_string(n) + ": bad timestamp");
    try {
      const int zone = std::stoi(f[static_cast<std::size_t>(iz)]);
      const int h = std::stoi(f[static_cast<std::size_t>(ih)]);
      const double v = std::stod(f[static_cast<std::size_t>(iv)]);
      require(std::isfinite(v), ErrorCode::range, "line " + std::to_string(n) + ": non-finite forecast");
      const bool fresh = out.emplace(std::make_tuple(zone, *ts, h), v).second;
      require(fresh, ErrorCode::integrity, "line " + std::to_string(n) + ": duplicate forecast");
    } catch (const std::logic_error&) {
      fail(ErrorCode::schema, "line " + std::to_string(n) + ": unparsable number");
    }
  }
  return out;
}

ExternalForecasts load_external_forecasts(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::io, "cannot open " + path.string());
  return read_external_forecasts(in);
}

void write_external_forecasts(std::ostream& out, std::span<const ForecastRow> rows) {
  out << "zone,timestamp,horizon,forecast\n";
  for (const auto& r : rows)
    out << r.zone << ',' << format_iso8601(r.time) << ',' << r.horizon << ',' << format_double(r.market) << '\n';
}

std::vector<ForecastRow> with_external(std::span<const ForecastRow> rows, const ExternalForecasts& external,
                                       std::size_t* missing) {
  std::vector<ForecastRow> out;
  std::size_t miss = 0;
  for (const auto& r : rows) {
    auto it = external.find({r.zone, r.time, r.horizon});
    if (it == external.end()) {
      ++miss;
      continue;
    }
    ForecastRow x = r;
    x.market = it->second;
    out.push_back(x);
  }
  if (missing) *missing = miss;
  return out;
}

}  // namespace fcmarket
