#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fcmarket/errors.hpp"
#include "fcmarket/tuning.hpp"

using namespace fcmarket;

namespace {

TuningTask make_task(std::uint64_t seed, Eigen::Index rows = 240, double signal = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  TuningTask t;
  t.X.resize(rows, 3);
  t.y.resize(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) t.X(i, j) = n(rng);
    t.y(i) = signal * (std::sin(t.X(i, 0)) + 0.5 * t.X(i, 1)) + 0.1 * n(rng);
    t.times.push_back(make_timestamp(2012, 1, 1) + std::chrono::hours(i));
  }
  t.features = {{0, "own", 0.0, true}, {1, "b", 1.0, false}, {2, "c", 1.0, false}};
  return t;
}

TuningGrid small_grid() {
  TuningGrid g;
  g.degrees = {1, 2};
  g.knot_counts = {3, 4};
  g.lambdas = {0.001, 0.01, 0.1};
  g.alpha = 1.0;
  g.cv = KFoldPolicy{3};
  return g;
}

}  // namespace

TEST(LogSpace, EndpointsAndCount) {
  auto v = log_space(1e-3, 100.0, 10);
  ASSERT_EQ(v.size(), 10u);
  EXPECT_NEAR(v.front(), 1e-3, 1e-15);
  EXPECT_NEAR(v.back(), 100.0, 1e-12);
  EXPECT_EQ(log_space(2.0, 5.0, 1), (std::vector<double>{2.0}));
  EXPECT_THROW(log_space(0.0, 1.0, 3), Error);
}

TEST(TuningGrid, DefaultRanges) {
  TuningGrid g;
  EXPECT_EQ(g.degrees.front(), 1);
  EXPECT_EQ(g.degrees.back(), 7);
  EXPECT_EQ(g.knot_counts.front(), 3);
  EXPECT_EQ(g.knot_counts.back(), 30);
  EXPECT_EQ(g.size(), 7u * 28u * 10u);
}

TEST(Tune, SingletonGridGivesOneRow) {
  auto task = make_task(1);
  TuningGrid g;
  g.degrees = {2};
  g.knot_counts = {4};
  g.lambdas = {0.01};
  g.cv = KFoldPolicy{3};
  auto r = tune(task, 2.0, g, SolverConfig{});
  ASSERT_EQ(r.table.size(), 1u);
  EXPECT_EQ(r.degree, 2);
  EXPECT_EQ(r.knots, 4);
  EXPECT_EQ(r.lambda, 0.01);
  EXPECT_EQ(r.table[0].folds, 3);
}

TEST(Tune, TableHasOneRowPerCellAndSharedPreparation) {
  auto task = make_task(2);
  auto g = small_grid();
  auto r = tune(task, 2.0, g, SolverConfig{});
  EXPECT_EQ(r.table.size(), g.size());
  EXPECT_EQ(r.folds.size(), g.size() * 3);
  EXPECT_EQ(r.stats.transformer_fits, 2u * 2u * 3u);
  EXPECT_EQ(r.stats.filter_fits, 0u);
  EXPECT_EQ(r.stats.solves, 2u * 2u * 3u * 3u);
  double best = 1e300;
  for (const auto& row : r.table) best = std::min(best, row.loss);
  EXPECT_EQ(r.loss, best);
}

TEST(Tune, FilterCountedWhenEnabled) {
  auto task = make_task(3);
  auto g = small_grid();
  g.alpha = 0.05;
  auto r = tune(task, 2.0, g, SolverConfig{});
  EXPECT_EQ(r.stats.filter_fits, r.stats.transformer_fits);
}

TEST(Tune, TiesGoToSmallDegreeKnotsAndLargeLambda) {
  auto task = make_task(4, 240, 0.0);
  TuningGrid g = small_grid();
  g.lambdas = {50.0, 100.0};  // both shrink every coefficient to zero
  auto r = tune(task, 2.0, g, SolverConfig{});
  EXPECT_EQ(r.degree, 1);
  EXPECT_EQ(r.knots, 3);
  EXPECT_EQ(r.lambda, 100.0);
}

TEST(Tune, PlainLassoGridIgnoresSplineAxes) {
  auto task = make_task(5);
  auto g = small_grid();
  g.use_splines = false;
  auto r = tune(task, 2.0, g, SolverConfig{});
  EXPECT_EQ(r.table.size(), 3u);
  EXPECT_EQ(r.degree, 0);
  EXPECT_EQ(r.stats.transformer_fits, 0u);
}

TEST(Tune, NegativeLambdaIsConfigError) {
  auto task = make_task(6);
  auto g = small_grid();
  g.lambdas = {-1.0};
  try {
    tune(task, 2.0, g, SolverConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::config);
  }
}

TEST(Tune, ParallelRunMatchesSerial) {
  auto task = make_task(7);
  auto g = small_grid();
  auto a = tune(task, 1.0, g, SolverConfig{}, 1);
  auto b = tune(task, 1.0, g, SolverConfig{}, 3);
  ASSERT_EQ(a.table.size(), b.table.size());
  for (std::size_t i = 0; i < a.table.size(); ++i) EXPECT_EQ(a.table[i].loss, b.table[i].loss);
  EXPECT_EQ(a.lambda, b.lambda);
}

TEST(Tune, SlidingWindowOverTwentyThreeMonthsHasElevenFolds) {
  TuningTask t;
  const auto start = make_timestamp(2012, 1, 1);
  const auto end = make_timestamp(2013, 12, 1);
  for (auto ts = start; ts < end; ts += std::chrono::hours(24)) t.times.push_back(ts);
  auto folds = split(t.times, SlidingWindowPolicy{12, 1});
  EXPECT_EQ(folds.size(), 11u);
}
