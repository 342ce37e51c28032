#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "fcmarket/timeutil.hpp"

namespace fcmarket {

struct AgentSchema {
  int agent_id = 0;
  int n_features = 0;
  std::vector<std::string> feature_names;
  double capacity = 1.0;  // normalization divisor for the target

  void validate() const;
};

struct AgentSeries {
  Eigen::VectorXd target;     // empty for agents that only sell features
  Eigen::MatrixXd exogenous;  // length x n_features

  bool has_target() const { return target.size() > 0; }
};

// Aligned multi-agent hourly dataset. Immutable once constructed; the
// constructor enforces every invariant.
class MarketFrame {
 public:
  MarketFrame(std::vector<Timestamp> timestamps, std::vector<AgentSchema> agents,
              std::vector<AgentSeries> series, bool normalized, int lag_count = 0);

  std::size_t length() const { return timestamps_.size(); }
  std::size_t agent_count() const { return agents_.size(); }
  const std::vector<Timestamp>& timestamps() const { return timestamps_; }
  const std::vector<AgentSchema>& agents() const { return agents_; }
  const AgentSchema& agent(std::size_t pos) const { return agents_.at(pos); }
  const AgentSeries& series(std::size_t pos) const { return series_.at(pos); }
  bool normalized() const { return normalized_; }
  int lag_count() const { return lag_count_; }

  std::optional<std::size_t> position_of(int agent_id) const;
  const AgentSeries& series_of(int agent_id) const;

  // Rows [begin, end) as a new frame.
  MarketFrame slice(std::size_t begin, std::size_t end) const;

  // Copy with one agent's exogenous matrix replaced (same shape).
  MarketFrame with_exogenous(int agent_id, Eigen::MatrixXd exogenous) const;

 private:
  std::vector<Timestamp> timestamps_;
  std::vector<AgentSchema> agents_;
  std::vector<AgentSeries> series_;
  bool normalized_ = false;
  int lag_count_ = 0;
};

// Lag offsets (relative to the target hour) available per horizon.
struct LagSchedule {
  int horizon = 24;
  std::vector<std::vector<int>> lags;  // lags[h - 1]

  // Day-ahead launch: a lag l of a target h hours after launch is usable
  // only when l >= h, so the usable set shrinks until it empties past
  // horizon max_lag.
  static LagSchedule day_ahead(int max_lag, int horizon);
  int max_lag() const;
  void validate() const;
};

enum class FeatureKind { exogenous, lag };

struct FeatureSource {
  int agent_id = 0;
  FeatureKind kind = FeatureKind::exogenous;
  int index = 0;  // feature position for exogenous, lag offset for lags
  std::string name;
};

struct LaggedTable {
  int horizon = 0;
  std::vector<std::size_t> rows;         // frame index of each target hour
  std::vector<Eigen::VectorXd> targets;  // per agent position, empty if no target
  Eigen::MatrixXd features;
  std::vector<FeatureSource> columns;
  std::size_t dropped_rows = 0;  // launches whose lags or target fall outside the frame
};

std::vector<LaggedTable> build_lagged(const MarketFrame& frame, const LagSchedule& schedule,
                                      int launch_hour);

struct HoldoutPolicy {
  double validation_fraction = 0.2;
};
struct SlidingWindowPolicy {
  int train_months = 12;
  int test_months = 1;
};
struct KFoldPolicy {
  int folds = 12;
};
using SplitPolicy = std::variant<HoldoutPolicy, SlidingWindowPolicy, KFoldPolicy>;

struct FoldIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

// Index pairs over rows with (sorted) timestamps `times`.
std::vector<FoldIndices> split(std::span<const Timestamp> times, const SplitPolicy& policy);

enum class Link { linear, exponential };

struct SyntheticSpec {
  int n_features = 100;
  std::vector<int> buyer_feature_ids;  // 1-based feature ids
  std::vector<int> active_ids;
  std::vector<std::pair<int, int>> redundant_pairs;  // (source, copy)
  Link link = Link::linear;
  double noise_sd = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticTruth {
  std::vector<int> active_ids;
  std::vector<double> beta;  // beta[id - 1]
  std::vector<std::pair<int, int>> redundant_pairs;
  std::vector<int> buyer_feature_ids;
};

struct SyntheticData {
  MarketFrame frame;
  SyntheticTruth truth;
  std::vector<std::string> warnings;
};

// Agent 0 is the buyer and owns buyer_feature_ids; every other feature id k
// is sold by its own agent with agent_id k.
SyntheticData synthesize(const SyntheticSpec& spec, std::size_t rows);

// Wind-shaped prosumer zones driven by a shared latent wind field.
struct ZoneSynthSpec {
  int zones = 3;
  int months = 4;
  double shared_weight = 0.95;   // share of each zone's wind speed explained by the field
  double forecast_noise = 2.0;   // sd of each zone's own forecast error (m/s)
  double power_noise = 0.03;
  std::uint64_t seed = 0;
};

MarketFrame synthesize_zones(const ZoneSynthSpec& spec);

}  // namespace fcmarket
