#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "fcmarket/model.hpp"
#include "fcmarket/session.hpp"
#include "fcmarket/tuning.hpp"

namespace fcmarket {

enum class BaselineKind { lasso, spline_lasso };

struct BaselineConfig {
  BaselineKind kind = BaselineKind::spline_lasso;
  // D and K are read only for spline_lasso. The metric is always RMSE.
  TuningGrid grid;
  SolverConfig solver;

  void validate() const;
};

struct LocalModel {
  PreparedDesign design;
  CoefficientSet theta;
  int degree = 0;
  int knots = 0;
  double lambda = 0.0;
  double cv_rmse = 0.0;
  std::vector<TuningRow> table;

  // X holds the local columns only, in the order of local_columns().
  Eigen::VectorXd predict(const Eigen::MatrixXd& X, bool clip = false) const;
};

// Buyer-owned columns of a task.
std::vector<Eigen::Index> local_columns(const BuyerTask& task);

// Tunes and refits a model on the buyer's own features over task rows
// `rows` (all rows when empty).
LocalModel fit_local(const BuyerTask& task, const BaselineConfig& config, std::span<const std::size_t> rows = {},
                     int jobs = 1);

// One forecast of one zone at one time.
struct ForecastRow {
  int zone = 0;
  Timestamp time{};
  int horizon = 0;
  double actual = 0.0;
  double local = 0.0;
  double market = 0.0;
};

struct ComparisonRow {
  int zone = 0;
  int horizon = -1;  // -1: all horizons of the zone
  std::size_t count = 0;
  double rmse_local = 0.0;
  double rmse_market = 0.0;
  double improvement = 0.0;  // 100 (1 - market/local), unclamped
};

struct Comparison {
  std::vector<ComparisonRow> rows;  // per zone, the all-horizon row first
  double mean_improvement = 0.0;    // mean over zones of the all-horizon rows
};

double improvement(double rmse_local, double rmse_market);

Comparison compare(std::span<const ForecastRow> rows);

// Rows of every non-rejected report.
std::vector<ForecastRow> forecast_rows(std::span<const SettlementReport> reports);

// External forecast file: zone,timestamp,horizon,forecast
using ExternalForecasts = std::map<std::tuple<int, Timestamp, int>, double>;
ExternalForecasts read_external_forecasts(std::istream& in);
ExternalForecasts load_external_forecasts(const std::filesystem::path& path);
void write_external_forecasts(std::ostream& out, std::span<const ForecastRow> rows);

// Replaces the market column by the external forecasts; rows without an
// external value are dropped and counted in *missing.
std::vector<ForecastRow> with_external(std::span<const ForecastRow> rows, const ExternalForecasts& external,
                                       std::size_t* missing = nullptr);

}  // namespace fcmarket
