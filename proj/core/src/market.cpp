#include "fcmarket/market.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fcmarket/errors.hpp"

namespace fcmarket {

double gain(double local_loss, double market_loss) {
  require(local_loss > 0.0, ErrorCode::domain, "gain needs a positive local loss");
  return 100.0 * std::max(local_loss - market_loss, 0.0) / local_loss;
}

void BidGrid::validate() const {
  require(std::isfinite(min) && min >= 0.0, ErrorCode::config, "bid grid minimum must be non-negative");
  require(std::isfinite(step) && step > 0.0, ErrorCode::config, "bid grid step must be positive");
  require(max < 0.0 || max >= min, ErrorCode::config, "bid grid maximum below its minimum");
}

std::vector<double> BidGrid::values(double total_price) const {
  validate();
  const double top = max < 0.0 ? std::max(total_price, min) : max;
  std::vector<double> out;
  const auto n = static_cast<long long>(std::floor((top - min) / step + 1e-9));
  require(n < 10000000, ErrorCode::config, "bid grid too large");
  for (long long k = 0; k <= n; ++k) out.push_back(min + static_cast<double>(k) * step);
  // include the exact top when the step does not land on it
  if (out.back() < top - 1e-9 * std::max(1.0, top)) out.push_back(top);
  return out;
}

void BidGainTable::validate() const {
  require(!bids.empty(), ErrorCode::config, "empty bid-gain table");
  require(gains.size() == bids.size() && raw_gains.size() == bids.size() && model_ref.size() == bids.size(),
          ErrorCode::shape, "bid-gain table columns differ in length");
  for (std::size_t r = 0; r < bids.size(); ++r) {
    if (r > 0) require(bids[r] > bids[r - 1], ErrorCode::config, "bids must be strictly increasing");
    require(std::isfinite(gains[r]) && gains[r] >= 0.0, ErrorCode::numeric, "gains must be finite and >= 0");
  }
}

BidGainTable make_table(std::vector<double> bids, std::vector<double> raw_gains, int horizon) {
  require(bids.size() == raw_gains.size(), ErrorCode::shape, "bids and gains differ in length");
  BidGainTable t;
  t.horizon = horizon;
  t.bids = std::move(bids);
  t.raw_gains = std::move(raw_gains);
  double best = -1.0;
  std::size_t ref = 0;
  for (std::size_t r = 0; r < t.bids.size(); ++r) {
    if (t.raw_gains[r] > best) {
      best = t.raw_gains[r];
      ref = r;
    }
    t.gains.push_back(best);
    t.model_ref.push_back(ref);
  }
  t.validate();
  return t;
}

PriceDecision set_price(const BidGainTable& table, const ValueFunction& vf) {
  table.validate();
  PriceDecision d;
  for (std::size_t r = 0; r < table.bids.size(); ++r) {
    const double b = table.bids[r], g = table.gains[r];
    if (!(b <= vf(g))) continue;
    if (!d.sale || g > d.gain) {
      d.sale = true;
      d.bid = b;
      d.gain = g;
      d.row = r;
    }
  }
  return d;
}

std::vector<SellerRevenue> revenues(const CoefficientSet& theta, std::span<const GroupInfo> groups) {
  std::map<int, SellerRevenue> by_seller;
  for (const auto& g : groups) {
    if (g.local) continue;
    auto& r = by_seller[g.owner_agent];
    r.seller = g.owner_agent;
    if (theta.group_used(g)) {
      r.amount += g.price;
      r.groups.push_back(g.group_id);
    }
  }
  std::vector<SellerRevenue> out;
  for (auto& [id, r] : by_seller) out.push_back(std::move(r));
  return out;
}

double total_payment(std::span<const SellerRevenue> r) {
  double p = 0.0;
  for (const auto& x : r) p += x.amount;
  return p;
}

std::vector<BidModel> fit_bid_chain(const BudgetLassoProblem& problem, std::span<const double> bids,
                                    const SolverConfig& config, const CoefficientSet* start) {
  std::vector<BidModel> out;
  out.reserve(bids.size());
  const CoefficientSet* warm = start;
  for (std::size_t k = 0; k < bids.size(); ++k) {
    require(k == 0 || bids[k] > bids[k - 1], ErrorCode::config, "bids must be strictly increasing");
    SolverConfig cfg = config;
    cfg.budget = bids[k];
    auto fit = problem.fit(cfg, warm);
    out.push_back({bids[k], std::move(fit.theta), fit.iterations, fit.converged});
    warm = &out.back().theta;
  }
  return out;
}

}  // namespace fcmarket
