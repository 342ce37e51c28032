#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fcmarket/solver.hpp"
#include "fcmarket/value_function.hpp"

namespace fcmarket {

// Percentage loss improvement, clamped at zero.
double gain(double local_loss, double market_loss);

struct BidGrid {
  double min = 0.0;
  double step = 1.0;
  double max = -1.0;  // negative: total price of everything on sale

  void validate() const;
  std::vector<double> values(double total_price) const;
};

struct BidGainTable {
  int horizon = 0;  // 0 for a single table covering every horizon
  std::vector<double> bids;
  // Best estimated gain among models affordable at each bid, and the model
  // delivering it. raw_gains holds the gain of the model fitted at the bid.
  std::vector<double> gains;
  std::vector<double> raw_gains;
  std::vector<std::size_t> model_ref;

  void validate() const;
};

// Builds a table from per-bid raw gains. Row r may reuse any model fitted
// at a bid <= bids[r].
BidGainTable make_table(std::vector<double> bids, std::vector<double> raw_gains, int horizon = 0);

struct PriceDecision {
  bool sale = false;
  double bid = 0.0;  // 0 on no-sale
  double gain = 0.0;
  std::size_t row = 0;
};

// Feasible bids satisfy b <= VF(g(b)); the price is the smallest feasible
// bid among those with the largest gain.
PriceDecision set_price(const BidGainTable& table, const ValueFunction& vf);

struct SellerRevenue {
  int seller = 0;
  double amount = 0.0;
  std::vector<int> groups;  // group ids paid for
};

// Posted price of every used non-local group, summed per owner. Sorted by
// seller id.
std::vector<SellerRevenue> revenues(const CoefficientSet& theta, std::span<const GroupInfo> groups);
double total_payment(std::span<const SellerRevenue> r);

struct BidModel {
  double bid = 0.0;
  CoefficientSet theta;
  int iterations = 0;
  bool converged = false;
};

// One solve per bid in ascending order, each warm-started from the previous
// solution.
std::vector<BidModel> fit_bid_chain(const BudgetLassoProblem& problem, std::span<const double> bids,
                                    const SolverConfig& config, const CoefficientSet* start = nullptr);

}  // namespace fcmarket
