#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fcmarket/dataset.hpp"
#include "fcmarket/design.hpp"
#include "fcmarket/market.hpp"
#include "fcmarket/model.hpp"
#include "fcmarket/solver.hpp"
#include "fcmarket/tuning.hpp"
#include "fcmarket/value_function.hpp"

namespace fcmarket {

enum class GainEstimator { automatic, validation_split, k_similar };
enum class Stationarity { heuristic, assume_stationary, assume_nonstationary };

struct SessionConfig {
  std::vector<int> buyers;  // empty: every agent with a target
  std::map<int, ValueFunction> value_functions;
  ValueFunction default_value_function = ValueFunction::linear(1.0);
  // Per agent: exogenous feature prices, then lag prices.
  std::map<int, std::vector<double>> seller_prices;
  double default_price = 1.0;
  bool self_price_zero = true;

  BidGrid grid;
  GainEstimator estimator = GainEstimator::automatic;
  int k = 10;
  Stationarity stationarity = Stationarity::heuristic;

  // horizon 0 treats rows as independent samples (no lags, holdout
  // validation, forecasts delivered on the validation rows).
  int horizon = 24;
  int launch_hour = 0;
  int lag_count = 6;
  double validation_fraction = 0.2;

  ModelSpec model;
  SolverConfig solver;
  std::optional<TuningGrid> tuning;
  bool tune_per_bid = true;
  bool clip = true;  // clip squared-loss forecasts to [0, 1] on normalized frames
  int jobs = 1;

  void validate() const;
  const ValueFunction& value_function(int buyer) const;
};

// Regression task of one buyer over the whole frame. In time-series mode a
// row t belongs to the launch t0 = t - h(t) with h(t) in 1..H hours after
// the launch hour, and lag l of agent j is Y_j(t0 - l).
struct BuyerTask {
  int buyer = 0;
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<FeatureInfo> features;
  std::vector<std::size_t> rows;  // frame index of each task row
  std::vector<int> horizon;       // h(t), 0 in cross-sectional mode
  std::vector<Timestamp> times;
};

BuyerTask build_task(const MarketFrame& frame, int buyer, const SessionConfig& config);

// Both halves of the series have mean and variance within 10% of each other.
bool looks_stationary(const Eigen::VectorXd& y);

struct HorizonSettlement {
  int horizon = 0;
  PriceDecision price;
  std::vector<SellerRevenue> revenues;
  double payment = 0.0;
};

struct SettlementReport {
  int session = 0;
  int buyer = 0;
  bool rejected = false;
  std::string diagnostic;
  bool stationary = true;
  Timestamp launch{};

  double payment = 0.0;
  std::vector<SellerRevenue> revenues;
  bool market_delivered = false;

  std::vector<double> chosen_bids;       // one per table
  std::vector<double> estimated_gains;   // one per table
  std::optional<double> observed_gain;   // unclamped, on the delivered rows

  std::vector<Timestamp> delivery_times;
  std::vector<int> delivery_horizons;
  std::vector<bool> delivered;  // market forecast delivered for the row
  std::vector<double> forecasts;  // market forecast where delivered, local otherwise
  std::vector<double> local_forecasts;
  std::vector<double> actuals;

  std::vector<HorizonSettlement> horizons;  // non-stationary branch only
  std::vector<BidGainTable> tables;
  std::vector<std::string> warnings;
};

struct RunOptions {
  int sessions = 1;
  bool re_estimate = false;
};

// Runs consecutive daily sessions ending at the last launch whose delivery
// hours lie inside the frame. Models are estimated in the first session and
// refreshed in later ones only when re_estimate is set.
std::vector<SettlementReport> run_sessions(const MarketFrame& frame, const SessionConfig& config,
                                           const RunOptions& options = {});

SettlementReport run_session(const MarketFrame& frame, const SessionConfig& config);

}  // namespace fcmarket
