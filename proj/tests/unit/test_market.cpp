#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fcmarket/errors.hpp"
#include "fcmarket/market.hpp"

using namespace fcmarket;

TEST(Gain, IdenticalLossesGiveZero) { EXPECT_EQ(gain(10.0, 10.0), 0.0); }

TEST(Gain, WorseMarketIsClamped) { EXPECT_EQ(gain(10.0, 12.0), 0.0); }

TEST(Gain, TenPercentBetter) { EXPECT_DOUBLE_EQ(gain(10.0, 9.0), 10.0); }

TEST(Gain, NonPositiveLocalLossIsDomainError) {
  try {
    gain(0.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::domain);
  }
}

TEST(Gain, RandomPairsMatchFormula) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.01, 10.0);
  for (int i = 0; i < 200; ++i) {
    const double l = u(rng), m = u(rng);
    EXPECT_DOUBLE_EQ(gain(l, m), 100.0 * std::max(l - m, 0.0) / l);
    EXPECT_GE(gain(l, m), 0.0);
  }
}

TEST(BidGrid, DefaultCoversZeroToTotal) {
  BidGrid g;
  auto v = g.values(5.0);
  ASSERT_EQ(v.size(), 6u);
  EXPECT_EQ(v.front(), 0.0);
  EXPECT_EQ(v.back(), 5.0);
}

TEST(BidGrid, AddsTopWhenStepMisses) {
  BidGrid g{0.0, 2.0, 5.0};
  auto v = g.values(100.0);
  EXPECT_EQ(v, (std::vector<double>{0, 2, 4, 5}));
}

TEST(BidGrid, BadStepIsConfigError) {
  BidGrid g{0.0, 0.0, 5.0};
  EXPECT_THROW(g.values(5.0), Error);
}

TEST(BidGainTable, EnvelopeKeepsBestAffordableModel) {
  auto t = make_table({0, 1, 2, 3}, {0.0, 5.0, 3.0, 7.0});
  EXPECT_EQ(t.gains, (std::vector<double>{0, 5, 5, 7}));
  EXPECT_EQ(t.raw_gains, (std::vector<double>{0, 5, 3, 7}));
  EXPECT_EQ(t.model_ref, (std::vector<std::size_t>{0, 1, 1, 3}));
}

TEST(BidGainTable, GainsNonDecreasingOnRandomTables) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> bids, raw;
    for (int b = 0; b < 30; ++b) {
      bids.push_back(b);
      raw.push_back(u(rng));
    }
    auto t = make_table(bids, raw);
    for (std::size_t r = 1; r < t.gains.size(); ++r) EXPECT_GE(t.gains[r], t.gains[r - 1]);
    for (std::size_t r = 0; r < t.gains.size(); ++r) EXPECT_LE(t.model_ref[r], r);
  }
}

TEST(BidGainTable, RejectsUnsortedBids) { EXPECT_THROW(make_table({0, 2, 1}, {0, 1, 2}), Error); }

// gain-curve fixtures
TEST(SetPrice, CrossingValueFunctionGivesCrossingBid) {
  std::vector<double> bids, raw;
  for (int b = 0; b <= 60; ++b) {
    bids.push_back(b);
    raw.push_back(100.0 * (1.0 - std::exp(-b / 30.0)));
  }
  auto t = make_table(bids, raw);
  // b <= k g(b) holds exactly up to 31 since b/g(b) increases
  const double k = 31.01 / raw[31];
  auto p = set_price(t, ValueFunction::linear(k));
  ASSERT_TRUE(p.sale);
  EXPECT_EQ(p.bid, 31.0);
  EXPECT_DOUBLE_EQ(p.gain, raw[31]);
}

TEST(SetPrice, TwoFeasibleRegionsPickLargestGain) {
  std::vector<double> bids, raw;
  for (int b = 0; b <= 60; ++b) {
    bids.push_back(b);
    if (b <= 10)
      raw.push_back(b + 5.0);
    else if (b < 40)
      raw.push_back(10.5);
    else
      raw.push_back(52.0);
  }
  auto t = make_table(bids, raw);
  auto vf = ValueFunction::linear(1.0);
  for (int b = 0; b <= 60; ++b) {
    const bool feasible = b <= vf(t.gains[static_cast<std::size_t>(b)]);
    // the envelope carries 15 across the dip, so the first region ends at 15
    EXPECT_EQ(feasible, b <= 15 || (b >= 40 && b <= 52)) << b;
  }
  auto p = set_price(t, vf);
  ASSERT_TRUE(p.sale);
  EXPECT_EQ(p.bid, 40.0);
  EXPECT_EQ(p.gain, 52.0);
}

TEST(SetPrice, NowhereFeasibleIsNoSale) {
  auto t = make_table({5, 6, 7}, {10, 20, 30});
  auto p = set_price(t, ValueFunction::constant(0.0));
  EXPECT_FALSE(p.sale);
  EXPECT_EQ(p.bid, 0.0);
  EXPECT_EQ(p.gain, 0.0);
}

TEST(SetPrice, ConstantGainsPickMinimalBid) {
  auto t = make_table({2, 3, 4}, {8, 8, 8});
  auto p = set_price(t, ValueFunction::constant(100.0));
  ASSERT_TRUE(p.sale);
  EXPECT_EQ(p.bid, 2.0);
}

TEST(SetPrice, EnlargingGridNeverLowersGain) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 40.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> bids, raw;
    for (int b = 0; b < 40; ++b) {
      bids.push_back(b);
      raw.push_back(u(rng));
    }
    auto vf = ValueFunction::linear(1.0);
    auto small = set_price(make_table({bids.begin(), bids.begin() + 20}, {raw.begin(), raw.begin() + 20}), vf);
    auto large = set_price(make_table(bids, raw), vf);
    EXPECT_GE(large.gain, small.gain);
  }
}

namespace {

std::vector<GroupInfo> groups3() {
  return {{0, 0, "own", 0.0, 0, 2, true, true},
          {1, 5, "a5.x", 10.0, 2, 4, true, false},
          {2, 6, "a6.x", 11.0, 4, 6, true, false},
          {3, 5, "a5.y", 3.0, 6, 7, true, false}};
}

}  // namespace

TEST(Revenues, ZeroCoefficientsPayNothing) {
  CoefficientSet t;
  t.values = Eigen::VectorXd::Zero(7);
  auto r = revenues(t, groups3());
  ASSERT_EQ(r.size(), 2u);
  for (const auto& x : r) EXPECT_EQ(x.amount, 0.0);
  EXPECT_EQ(total_payment(r), 0.0);
}

TEST(Revenues, AnyNonzeroColumnChargesTheGroupOnce) {
  CoefficientSet t;
  t.values = Eigen::VectorXd::Zero(7);
  t.values(0) = 4.0;  // local, free
  t.values(3) = -0.2;
  t.values(6) = 1e-9;
  auto r = revenues(t, groups3());
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].seller, 5);
  EXPECT_EQ(r[0].amount, 13.0);
  EXPECT_EQ(r[0].groups, (std::vector<int>{1, 3}));
  EXPECT_EQ(r[1].seller, 6);
  EXPECT_EQ(r[1].amount, 0.0);
  EXPECT_EQ(total_payment(r), 13.0);
}
