#include "fcmarket/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "fcmarket/errors.hpp"
#include "fcmarket/random.hpp"

namespace fcmarket {

void AgentSchema::validate() const {
  require(n_features >= 0, ErrorCode::schema,
          "agent " + std::to_string(agent_id) + " has negative feature count");
  require(static_cast<int>(feature_names.size()) == n_features, ErrorCode::schema,
          "agent " + std::to_string(agent_id) + " declares " + std::to_string(n_features) +
              " features but names " + std::to_string(feature_names.size()));
  require(capacity > 0 && std::isfinite(capacity), ErrorCode::schema,
          "agent " + std::to_string(agent_id) + " capacity must be positive");
}

MarketFrame::MarketFrame(std::vector<Timestamp> timestamps, std::vector<AgentSchema> agents,
                         std::vector<AgentSeries> series, bool normalized, int lag_count)
    : timestamps_(std::move(timestamps)),
      agents_(std::move(agents)),
      series_(std::move(series)),
      normalized_(normalized),
      lag_count_(lag_count) {
  require(agents_.size() == series_.size(), ErrorCode::schema,
          "agent schema count does not match series count");
  require(lag_count_ >= 0, ErrorCode::config, "lag count must be non-negative");
  for (std::size_t t = 1; t < timestamps_.size(); ++t) {
    require(timestamps_[t - 1] < timestamps_[t], ErrorCode::integrity,
            "timestamps must be strictly increasing");
  }
  const auto T = static_cast<Eigen::Index>(timestamps_.size());
  std::set<int> ids;
  for (std::size_t a = 0; a < agents_.size(); ++a) {
    const auto& schema = agents_[a];
    const auto& s = series_[a];
    schema.validate();
    require(ids.insert(schema.agent_id).second, ErrorCode::schema,
            "duplicate agent id " + std::to_string(schema.agent_id));
    require(s.exogenous.rows() == T && s.exogenous.cols() == schema.n_features, ErrorCode::schema,
            "agent " + std::to_string(schema.agent_id) + " exogenous matrix has wrong shape");
    require(s.target.size() == 0 || s.target.size() == T, ErrorCode::schema,
            "agent " + std::to_string(schema.agent_id) + " target has wrong length");
    require(s.exogenous.allFinite(), ErrorCode::integrity,
            "agent " + std::to_string(schema.agent_id) + " has non-finite exogenous values");
    require(s.target.allFinite(), ErrorCode::integrity,
            "agent " + std::to_string(schema.agent_id) + " has non-finite target values");
    if (normalized_ && s.has_target()) {
      require(s.target.minCoeff() >= 0.0 && s.target.maxCoeff() <= 1.0, ErrorCode::range,
              "agent " + std::to_string(schema.agent_id) + " normalized target outside [0,1]");
    }
  }
}

std::optional<std::size_t> MarketFrame::position_of(int agent_id) const {
  for (std::size_t a = 0; a < agents_.size(); ++a)
    if (agents_[a].agent_id == agent_id) return a;
  return std::nullopt;
}

const AgentSeries& MarketFrame::series_of(int agent_id) const {
  auto pos = position_of(agent_id);
  require(pos.has_value(), ErrorCode::schema, "unknown agent " + std::to_string(agent_id));
  return series_[*pos];
}

MarketFrame MarketFrame::slice(std::size_t begin, std::size_t end) const {
  require(begin <= end && end <= length(), ErrorCode::range, "slice outside frame");
  const auto b = static_cast<Eigen::Index>(begin);
  const auto n = static_cast<Eigen::Index>(end - begin);
  std::vector<Timestamp> ts(timestamps_.begin() + static_cast<std::ptrdiff_t>(begin),
                            timestamps_.begin() + static_cast<std::ptrdiff_t>(end));
  std::vector<AgentSeries> s;
  s.reserve(series_.size());
  for (const auto& src : series_) {
    AgentSeries out;
    if (src.has_target()) out.target = src.target.segment(b, n);
    out.exogenous = src.exogenous.middleRows(b, n);
    s.push_back(std::move(out));
  }
  return MarketFrame(std::move(ts), agents_, std::move(s), normalized_, lag_count_);
}

MarketFrame MarketFrame::with_exogenous(int agent_id, Eigen::MatrixXd exogenous) const {
  auto pos = position_of(agent_id);
  require(pos.has_value(), ErrorCode::schema, "unknown agent " + std::to_string(agent_id));
  auto s = series_;
  s[*pos].exogenous = std::move(exogenous);
  return MarketFrame(timestamps_, agents_, std::move(s), normalized_, lag_count_);
}

LagSchedule LagSchedule::day_ahead(int max_lag, int horizon) {
  require(max_lag >= 0, ErrorCode::config, "max lag must be non-negative");
  require(horizon >= 1, ErrorCode::config, "horizon must be positive");
  LagSchedule s;
  s.horizon = horizon;
  s.lags.resize(static_cast<std::size_t>(horizon));
  for (int h = 1; h <= horizon; ++h)
    for (int l = h; l <= max_lag; ++l) s.lags[static_cast<std::size_t>(h - 1)].push_back(l);
  return s;
}

int LagSchedule::max_lag() const {
  int m = 0;
  for (const auto& row : lags)
    for (int l : row) m = std::max(m, l);
  return m;
}

void LagSchedule::validate() const {
  require(horizon >= 1, ErrorCode::config, "horizon must be positive");
  require(static_cast<int>(lags.size()) == horizon, ErrorCode::config,
          "lag schedule must list lags for every horizon");
  for (int h = 1; h <= horizon; ++h)
    for (int l : lags[static_cast<std::size_t>(h - 1)])
      require(l >= h, ErrorCode::config,
              "lag " + std::to_string(l) + " is not yet observed at launch for horizon " +
                  std::to_string(h));
}

std::vector<LaggedTable> build_lagged(const MarketFrame& frame, const LagSchedule& schedule,
                                      int launch_hour) {
  schedule.validate();
  require(launch_hour >= 0 && launch_hour < 24, ErrorCode::range, "launch hour must be in [0,24)");
  const std::size_t T = frame.length();
  require(static_cast<std::size_t>(schedule.horizon) < T, ErrorCode::range,
          "schedule horizon exceeds frame length");

  std::vector<std::size_t> launches;
  for (std::size_t s = 0; s < T; ++s)
    if (hour_of_day(frame.timestamps()[s]) == launch_hour) launches.push_back(s);

  std::vector<LaggedTable> tables;
  for (int h = 1; h <= schedule.horizon; ++h) {
    const auto& lags = schedule.lags[static_cast<std::size_t>(h - 1)];
    const int deepest = lags.empty() ? 0 : *std::max_element(lags.begin(), lags.end());

    LaggedTable table;
    table.horizon = h;
    for (const auto& agent : frame.agents()) {
      const auto& s = frame.series_of(agent.agent_id);
      for (int k = 0; k < agent.n_features; ++k)
        table.columns.push_back({agent.agent_id, FeatureKind::exogenous, k,
                                 "a" + std::to_string(agent.agent_id) + "." +
                                     agent.feature_names[static_cast<std::size_t>(k)]});
      if (s.has_target())
        for (int l : lags)
          table.columns.push_back({agent.agent_id, FeatureKind::lag, l,
                                   "a" + std::to_string(agent.agent_id) + ".lag" + std::to_string(l)});
    }

    for (std::size_t s : launches) {
      const std::size_t t = s + static_cast<std::size_t>(h);
      if (t >= T || t < static_cast<std::size_t>(deepest)) {
        ++table.dropped_rows;
        continue;
      }
      table.rows.push_back(t);
    }

    const auto n = static_cast<Eigen::Index>(table.rows.size());
    table.features.resize(n, static_cast<Eigen::Index>(table.columns.size()));
    table.targets.resize(frame.agent_count());
    for (std::size_t a = 0; a < frame.agent_count(); ++a)
      if (frame.series(a).has_target()) table.targets[a].resize(n);

    for (Eigen::Index r = 0; r < n; ++r) {
      const auto t = static_cast<Eigen::Index>(table.rows[static_cast<std::size_t>(r)]);
      for (std::size_t c = 0; c < table.columns.size(); ++c) {
        const auto& col = table.columns[c];
        const auto& s = frame.series_of(col.agent_id);
        table.features(r, static_cast<Eigen::Index>(c)) =
            col.kind == FeatureKind::exogenous ? s.exogenous(t, col.index) : s.target(t - col.index);
      }
      for (std::size_t a = 0; a < frame.agent_count(); ++a)
        if (frame.series(a).has_target()) table.targets[a](r) = frame.series(a).target(t);
    }
    tables.push_back(std::move(table));
  }
  return tables;
}

namespace {

std::vector<std::size_t> iota_range(std::size_t begin, std::size_t end) {
  std::vector<std::size_t> v;
  v.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) v.push_back(i);
  return v;
}

}  // namespace

std::vector<FoldIndices> split(std::span<const Timestamp> times, const SplitPolicy& policy) {
  const std::size_t n = times.size();
  for (std::size_t i = 1; i < n; ++i)
    require(times[i - 1] < times[i], ErrorCode::integrity, "split requires increasing timestamps");

  if (const auto* h = std::get_if<HoldoutPolicy>(&policy)) {
    require(h->validation_fraction > 0.0 && h->validation_fraction < 1.0, ErrorCode::config,
            "holdout fraction must lie in (0,1)");
    const auto n_val = static_cast<std::size_t>(std::llround(h->validation_fraction * static_cast<double>(n)));
    require(n_val > 0 && n_val < n, ErrorCode::range,
            "holdout leaves an empty training or validation set");
    return {FoldIndices{iota_range(0, n - n_val), iota_range(n - n_val, n)}};
  }

  if (const auto* k = std::get_if<KFoldPolicy>(&policy)) {
    require(k->folds >= 2, ErrorCode::config, "k-fold needs at least two folds");
    const auto folds = static_cast<std::size_t>(k->folds);
    require(n >= folds, ErrorCode::range, "fewer rows than folds");
    std::vector<FoldIndices> out;
    const std::size_t base = n / folds, extra = n % folds;
    std::size_t begin = 0;
    for (std::size_t f = 0; f < folds; ++f) {
      const std::size_t size = base + (f < extra ? 1 : 0);
      FoldIndices fold;
      fold.validation = iota_range(begin, begin + size);
      fold.train = iota_range(0, begin);
      auto tail = iota_range(begin + size, n);
      fold.train.insert(fold.train.end(), tail.begin(), tail.end());
      out.push_back(std::move(fold));
      begin += size;
    }
    return out;
  }

  const auto& w = std::get<SlidingWindowPolicy>(policy);
  require(w.train_months >= 1 && w.test_months >= 1, ErrorCode::config,
          "sliding window needs positive train and test lengths");
  // month boundaries in row space
  std::vector<int> months;
  std::vector<std::size_t> month_start;
  for (std::size_t i = 0; i < n; ++i) {
    const int m = month_index(times[i]);
    if (months.empty() || months.back() != m) {
      months.push_back(m);
      month_start.push_back(i);
    }
  }
  month_start.push_back(n);
  const auto n_months = static_cast<int>(months.size());
  require(n_months >= w.train_months + w.test_months, ErrorCode::range,
          "not enough months for the requested sliding window");
  std::vector<FoldIndices> out;
  for (int start = 0; start + w.train_months + w.test_months <= n_months; start += w.test_months) {
    const auto tr_b = month_start[static_cast<std::size_t>(start)];
    const auto tr_e = month_start[static_cast<std::size_t>(start + w.train_months)];
    const auto te_e = month_start[static_cast<std::size_t>(start + w.train_months + w.test_months)];
    out.push_back(FoldIndices{iota_range(tr_b, tr_e), iota_range(tr_e, te_e)});
  }
  return out;
}

void SyntheticSpec::validate() const {
  require(n_features >= 1, ErrorCode::config, "synthetic spec needs at least one feature");
  auto in_range = [&](int id) { return id >= 1 && id <= n_features; };
  std::set<int> buyer;
  for (int id : buyer_feature_ids) {
    require(in_range(id), ErrorCode::config, "buyer feature id " + std::to_string(id) + " out of range");
    require(buyer.insert(id).second, ErrorCode::config, "duplicate buyer feature id");
  }
  require(!active_ids.empty(), ErrorCode::config, "synthetic spec has an empty active set");
  for (int id : active_ids)
    require(in_range(id), ErrorCode::config, "active id " + std::to_string(id) + " out of range");
  for (auto [src, copy] : redundant_pairs) {
    require(in_range(src) && in_range(copy), ErrorCode::config, "redundant pair references unknown id");
    require(src != copy, ErrorCode::config, "redundant pair must reference two ids");
  }
  require(noise_sd >= 0.0 && std::isfinite(noise_sd), ErrorCode::config, "noise sd must be non-negative");
}

SyntheticData synthesize(const SyntheticSpec& spec, std::size_t rows) {
  spec.validate();
  require(rows >= 2, ErrorCode::config, "synthetic frame needs at least two rows");
  std::vector<std::string> warnings;
  if (rows < 2 * static_cast<std::size_t>(spec.n_features))
    warnings.push_back("fewer than 2 x n_features rows requested");

  const SeedTree seeds(spec.seed);
  const auto T = static_cast<Eigen::Index>(rows);
  const int p = spec.n_features;

  Eigen::MatrixXd X(T, p);
  {
    auto eng = seeds.child("covariates").engine();
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int j = 0; j < p; ++j)
      for (Eigen::Index t = 0; t < T; ++t) X(t, j) = normal(eng);
  }
  for (auto [src, copy] : spec.redundant_pairs) X.col(copy - 1) = X.col(src - 1);

  std::vector<int> active(spec.active_ids);
  std::sort(active.begin(), active.end());
  active.erase(std::unique(active.begin(), active.end()), active.end());
  std::vector<double> beta(static_cast<std::size_t>(p), 0.0);
  {
    auto eng = seeds.child("beta").engine();
    std::uniform_real_distribution<double> uniform(0.5, 2.0);
    for (int id : active) beta[static_cast<std::size_t>(id - 1)] = uniform(eng);
  }

  Eigen::VectorXd signal = X * Eigen::Map<const Eigen::VectorXd>(beta.data(), p);
  Eigen::VectorXd y = spec.link == Link::linear ? signal : (0.05 * signal).array().exp().matrix();
  if (spec.noise_sd > 0.0) {
    auto eng = seeds.child("noise").engine();
    std::normal_distribution<double> normal(0.0, spec.noise_sd);
    for (Eigen::Index t = 0; t < T; ++t) y(t) += normal(eng);
  }

  std::vector<Timestamp> ts;
  ts.reserve(rows);
  const Timestamp origin = make_timestamp(2012, 1, 1, 0);
  for (std::size_t t = 0; t < rows; ++t) ts.push_back(origin + std::chrono::hours(static_cast<long>(t)));

  std::vector<int> buyer_ids(spec.buyer_feature_ids);
  std::sort(buyer_ids.begin(), buyer_ids.end());
  std::set<int> buyer_set(buyer_ids.begin(), buyer_ids.end());

  std::vector<AgentSchema> agents;
  std::vector<AgentSeries> series;
  {
    AgentSchema buyer{0, static_cast<int>(buyer_ids.size()), {}, 1.0};
    AgentSeries s;
    s.target = y;
    s.exogenous.resize(T, static_cast<Eigen::Index>(buyer_ids.size()));
    for (std::size_t k = 0; k < buyer_ids.size(); ++k) {
      buyer.feature_names.push_back("x" + std::to_string(buyer_ids[k]));
      s.exogenous.col(static_cast<Eigen::Index>(k)) = X.col(buyer_ids[k] - 1);
    }
    agents.push_back(std::move(buyer));
    series.push_back(std::move(s));
  }
  for (int id = 1; id <= p; ++id) {
    if (buyer_set.count(id)) continue;
    agents.push_back(AgentSchema{id, 1, {"x" + std::to_string(id)}, 1.0});
    AgentSeries s;
    s.exogenous = X.col(id - 1);
    series.push_back(std::move(s));
  }

  SyntheticTruth truth{active, beta, spec.redundant_pairs, buyer_ids};
  return SyntheticData{MarketFrame(std::move(ts), std::move(agents), std::move(series), false),
                       std::move(truth), std::move(warnings)};
}

MarketFrame synthesize_zones(const ZoneSynthSpec& spec) {
  require(spec.zones >= 1, ErrorCode::config, "need at least one zone");
  require(spec.months >= 1, ErrorCode::config, "need at least one month");
  require(spec.shared_weight >= 0.0 && spec.shared_weight <= 1.0, ErrorCode::config,
          "shared weight must lie in [0,1]");
  using namespace std::chrono;
  const Timestamp start = make_timestamp(2012, 1, 1, 0);
  const sys_days end_day{year_month_day{year{2012} / January / 1} + months{spec.months}};
  const auto T = static_cast<Eigen::Index>(duration_cast<hours>(sys_seconds{end_day} - start).count());

  const SeedTree seeds(spec.seed);
  auto eng = seeds.child("zones").engine();
  std::normal_distribution<double> normal(0.0, 1.0);

  // shared wind field and direction
  const double phi = 0.98;
  Eigen::VectorXd field(T), direction(T);
  // direction wanders around a prevailing heading
  const double prevailing = 2.0 * std::numbers::pi * std::uniform_real_distribution<double>(0, 1)(eng);
  double swing = 0.0;
  for (Eigen::Index t = 0; t < T; ++t) {
    field(t) = t == 0 ? normal(eng) : phi * field(t - 1) + std::sqrt(1 - phi * phi) * normal(eng);
    swing = 0.99 * swing + std::sqrt(1 - 0.99 * 0.99) * 0.5 * normal(eng);
    direction(t) = prevailing + swing;
  }

  std::vector<AgentSchema> agents;
  std::vector<AgentSeries> series;
  const double w = spec.shared_weight;
  for (int z = 0; z < spec.zones; ++z) {
    auto zeng = seeds.child(static_cast<std::uint64_t>(z)).engine();
    const Eigen::Index delay = 2 * z;
    double local = normal(zeng), err = normal(zeng) * spec.forecast_noise;
    AgentSeries s;
    s.target.resize(T);
    s.exogenous.resize(T, 4);
    for (Eigen::Index t = 0; t < T; ++t) {
      local = 0.9 * local + std::sqrt(1 - 0.81) * normal(zeng);
      err = 0.8 * err + std::sqrt(1 - 0.64) * spec.forecast_noise * normal(zeng);
      const double diurnal = 0.5 * std::sin(2.0 * std::numbers::pi * static_cast<double>(t % 24) / 24.0);
      const double shared = field(std::max<Eigen::Index>(0, t - delay));
      const double speed = std::max(0.0, 7.5 + 3.0 * (std::sqrt(w) * shared + std::sqrt(1 - w) * local) + diurnal);
      const double power = 1.0 / (1.0 + std::exp(-(speed - 8.0) / 1.5)) + spec.power_noise * normal(zeng);
      s.target(t) = std::clamp(power, 0.0, 1.0);
      const double forecast = std::max(0.0, speed + err);
      const double c = std::cos(direction(t)), sn = std::sin(direction(t));
      s.exogenous(t, 0) = 0.75 * forecast * c + 0.1 * normal(zeng);
      s.exogenous(t, 1) = 0.75 * forecast * sn + 0.1 * normal(zeng);
      s.exogenous(t, 2) = forecast * c;
      s.exogenous(t, 3) = forecast * sn;
    }
    agents.push_back(AgentSchema{z + 1, 4, {"u10", "v10", "u100", "v100"}, 1.0});
    series.push_back(std::move(s));
  }

  std::vector<Timestamp> ts;
  ts.reserve(static_cast<std::size_t>(T));
  for (Eigen::Index t = 0; t < T; ++t) ts.push_back(start + hours(t));
  return MarketFrame(std::move(ts), std::move(agents), std::move(series), true);
}

}  // namespace fcmarket
