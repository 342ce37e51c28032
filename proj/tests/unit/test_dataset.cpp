#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "fcmarket/csv.hpp"
#include "fcmarket/dataset.hpp"
#include "fcmarket/errors.hpp"

using namespace fcmarket;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::io;
}

std::string zone_csv(int zones, int hours, int skip_zone = -1, int skip_hour = -1) {
  std::ostringstream out;
  out << "zone_id,timestamp,target,u10,v10,u100,v100\n";
  for (int z = 1; z <= zones; ++z)
    for (int h = 0; h < hours; ++h) {
      if (z == skip_zone && h == skip_hour) continue;
      out << z << ',' << format_iso8601(make_timestamp(2012, 1, 1, 0) + std::chrono::hours(h)) << ','
          << 0.01 * ((h * 7 + z) % 100) << ',' << h << ',' << -h << ',' << 2 * h << ',' << z << '\n';
    }
  return out.str();
}

SyntheticSpec case_spec(std::uint64_t seed) {
  SyntheticSpec s;
  s.n_features = 100;
  for (int i = 1; i <= 10; ++i) s.buyer_feature_ids.push_back(i);
  s.active_ids = {3, 7, 12, 21, 31, 37, 48, 51, 63, 90};
  s.redundant_pairs = {{3, 73}, {37, 74}};
  s.seed = seed;
  return s;
}

}  // namespace

TEST(Csv, TwoZonesFortyEightHours) {
  std::istringstream in(zone_csv(2, 48));
  LoadReport report;
  auto f = parse_zone_csv(in, {}, &report);
  EXPECT_EQ(f.length(), 48u);
  EXPECT_EQ(f.agent_count(), 2u);
  EXPECT_EQ(report.rows_read, 96u);
  EXPECT_TRUE(f.normalized());
}

TEST(Csv, MissingHourIsIntegrityError) {
  EXPECT_EQ(code_of([] {
              std::istringstream in(zone_csv(2, 48, 2, 10));
              parse_zone_csv(in, {});
            }),
            ErrorCode::integrity);
}

TEST(Csv, DuplicateRowIsIntegrityError) {
  std::string text = zone_csv(1, 5);
  text += text.substr(text.find('\n') + 1, text.find('\n', text.find('\n') + 1) - text.find('\n'));
  EXPECT_EQ(code_of([&] {
              std::istringstream in(text);
              parse_zone_csv(in, {});
            }),
            ErrorCode::integrity);
}

TEST(Csv, MissingColumnIsSchemaError) {
  EXPECT_EQ(code_of([] {
              std::istringstream in("zone_id,timestamp,target,u10,v10,u100\n1,2012-01-01T00:00:00,0.1,1,2,3\n");
              parse_zone_csv(in, {});
            }),
            ErrorCode::schema);
}

TEST(Csv, CapacityNormalizesAndBoundsTargets) {
  std::vector<AgentSchema> schema{{1, 4, {"u10", "v10", "u100", "v100"}, 2.0}};
  std::istringstream in(zone_csv(1, 24));
  auto f = parse_zone_csv(in, schema);
  EXPECT_NEAR(f.series(0).target(3), 0.01 * 22 / 2.0, 1e-15);

  std::vector<AgentSchema> tight{{1, 4, {"u10", "v10", "u100", "v100"}, 0.5}};
  EXPECT_EQ(code_of([&] {
              std::istringstream in2(zone_csv(1, 100));
              parse_zone_csv(in2, tight);
            }),
            ErrorCode::range);
}

TEST(Csv, TenZoneFileShape) {
  std::istringstream in(zone_csv(10, 30));
  auto f = parse_zone_csv(in, {});
  EXPECT_EQ(f.agent_count(), 10u);
  for (const auto& a : f.agents()) EXPECT_EQ(a.n_features, 4);
}

TEST(Csv, ZoneAndWideRoundTrip) {
  ZoneSynthSpec spec;
  spec.months = 1;
  auto frame = synthesize_zones(spec);
  std::stringstream zs;
  write_zone_csv(zs, frame);
  auto back = parse_zone_csv(zs, {});
  EXPECT_EQ(back.length(), frame.length());
  EXPECT_EQ((back.series(1).exogenous - frame.series(1).exogenous).norm(), 0.0);

  std::stringstream ws;
  write_wide_csv(ws, frame);
  auto wide = read_wide_csv(ws);
  EXPECT_EQ((wide.series(2).target - frame.series(2).target).norm(), 0.0);
}

TEST(Synthesize, RedundantCopyAndZeroNoise) {
  auto spec = case_spec(1);
  spec.noise_sd = 0.0;
  auto data = synthesize(spec, 1000);
  const auto& f = data.frame;
  const auto& x3 = f.series_of(0).exogenous.col(2);  // buyer owns 1..10
  const auto& x73 = f.series_of(73).exogenous.col(0);
  EXPECT_EQ((x3 - x73).norm(), 0.0);
  EXPECT_EQ((f.series_of(37).exogenous - f.series_of(74).exogenous).norm(), 0.0);

  Eigen::VectorXd expected = Eigen::VectorXd::Zero(1000);
  for (int id : data.truth.active_ids) {
    const auto& col = id <= 10 ? f.series_of(0).exogenous.col(id - 1) : f.series_of(id).exogenous.col(0);
    expected += data.truth.beta[static_cast<std::size_t>(id - 1)] * col;
  }
  EXPECT_LT((expected - f.series_of(0).target).cwiseAbs().maxCoeff(), 1e-12);
  for (int id : data.truth.active_ids) {
    EXPECT_GE(data.truth.beta[static_cast<std::size_t>(id - 1)], 0.5);
    EXPECT_LE(data.truth.beta[static_cast<std::size_t>(id - 1)], 2.0);
  }
}

TEST(Synthesize, DeterministicAndWarnsOnShortFrames) {
  auto a = synthesize(case_spec(5), 150);
  auto b = synthesize(case_spec(5), 150);
  EXPECT_EQ((a.frame.series_of(0).target - b.frame.series_of(0).target).norm(), 0.0);
  EXPECT_FALSE(a.warnings.empty());
  auto c = synthesize(case_spec(6), 150);
  EXPECT_NE((a.frame.series_of(0).target - c.frame.series_of(0).target).norm(), 0.0);
}

TEST(Synthesize, EmptyActiveSetIsConfigError) {
  auto spec = case_spec(1);
  spec.active_ids.clear();
  EXPECT_EQ(code_of([&] { synthesize(spec, 300); }), ErrorCode::config);
}

TEST(Synthesize, ExponentialLink) {
  auto spec = case_spec(2);
  spec.link = Link::exponential;
  spec.noise_sd = 0.0;
  auto data = synthesize(spec, 200);
  EXPECT_GT(data.frame.series_of(0).target.minCoeff(), 0.0);
}

TEST(Lagged, TableFourSchedule) {
  ZoneSynthSpec spec;
  spec.months = 1;
  auto frame = synthesize_zones(spec);
  auto tables = build_lagged(frame, LagSchedule::day_ahead(6, 24), 0);
  ASSERT_EQ(tables.size(), 24u);

  const auto& h1 = tables[0];
  std::set<int> lags;
  for (const auto& c : h1.columns)
    if (c.kind == FeatureKind::lag && c.agent_id == 1) lags.insert(c.index);
  EXPECT_EQ(lags, (std::set<int>{1, 2, 3, 4, 5, 6}));
  // row at 01:00 uses the measurements from 00:00 back to 19:00 of the previous day
  for (std::size_t r = 0; r < h1.rows.size(); ++r) {
    const auto t = h1.rows[r];
    EXPECT_EQ(hour_of_day(frame.timestamps()[t]), 1);
    for (std::size_t c = 0; c < h1.columns.size(); ++c)
      if (h1.columns[c].kind == FeatureKind::lag && h1.columns[c].agent_id == 2) {
        const auto src = t - static_cast<std::size_t>(h1.columns[c].index);
        EXPECT_EQ(h1.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)),
                  frame.series_of(2).target(static_cast<Eigen::Index>(src)));
      }
  }
  EXPECT_EQ(h1.dropped_rows, 1u);  // first launch lacks lags 2..6

  for (const auto& c : tables[6].columns) EXPECT_EQ(c.kind, FeatureKind::exogenous);
  for (const auto& table : build_lagged(frame, LagSchedule::day_ahead(0, 24), 0))
    for (const auto& c : table.columns) EXPECT_EQ(c.kind, FeatureKind::exogenous);
}

TEST(Lagged, HorizonLongerThanFrameIsRangeError) {
  ZoneSynthSpec spec;
  spec.months = 1;
  auto frame = synthesize_zones(spec).slice(0, 10);
  EXPECT_EQ(code_of([&] { build_lagged(frame, LagSchedule::day_ahead(2, 24), 0); }), ErrorCode::range);
}

TEST(Split, SlidingWindowElevenFolds) {
  std::vector<Timestamp> ts;
  const auto start = make_timestamp(2012, 1, 1);
  const auto end = make_timestamp(2013, 12, 1);
  for (auto t = start; t < end; t += std::chrono::hours(1)) ts.push_back(t);
  auto folds = split(ts, SlidingWindowPolicy{12, 1});
  ASSERT_EQ(folds.size(), 11u);
  for (const auto& f : folds) {
    EXPECT_LT(f.train.back(), f.validation.front());
    EXPECT_EQ(month_index(ts[f.validation.front()]), month_index(ts[f.validation.back()]));
  }
}

TEST(Split, HoldoutZeroRejectedAndKFoldSizes) {
  std::vector<Timestamp> ts;
  for (int i = 0; i < 1200; ++i) ts.push_back(make_timestamp(2012, 1, 1) + std::chrono::hours(i));
  EXPECT_THROW(split(ts, HoldoutPolicy{0.0}), Error);
  auto folds = split(ts, KFoldPolicy{12});
  ASSERT_EQ(folds.size(), 12u);
  for (const auto& f : folds) {
    EXPECT_EQ(f.validation.size(), 100u);
    EXPECT_EQ(f.train.size(), 1100u);
  }
  auto hold = split(ts, HoldoutPolicy{0.2});
  EXPECT_EQ(hold[0].validation.size(), 240u);
  EXPECT_EQ(code_of([&] { split(std::span(ts).first(100), SlidingWindowPolicy{12, 1}); }), ErrorCode::range);
}

TEST(Frame, RejectsMisalignedSeries) {
  std::vector<Timestamp> ts{make_timestamp(2012, 1, 1, 0), make_timestamp(2012, 1, 1, 1)};
  AgentSeries s;
  s.target = Eigen::VectorXd::Zero(3);
  s.exogenous = Eigen::MatrixXd::Zero(2, 0);
  EXPECT_EQ(code_of([&] { MarketFrame(ts, {AgentSchema{1, 0, {}, 1.0}}, {s}, true); }), ErrorCode::schema);
  s.target = Eigen::VectorXd::Constant(2, 1.5);
  EXPECT_EQ(code_of([&] { MarketFrame(ts, {AgentSchema{1, 0, {}, 1.0}}, {s}, true); }), ErrorCode::range);
}
