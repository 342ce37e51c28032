#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fcmarket/design.hpp"
#include "fcmarket/market.hpp"
#include "fcmarket/weighted.hpp"

namespace fcmarket {

struct LrmResult {
  CoefficientSet beta;  // on the raw features, intercept unpenalized
  double payment = 0.0;
  std::vector<SellerRevenue> revenues;  // amount = sum_k |u_k beta_k|, groups = paid columns
  int iterations = 0;
  bool converged = false;
};

// Seller-priced LASSO market: min (1/T)|y - b - X beta|^2 + sum |u_k beta_k|
// where u_k is the feature price of every non-local feature and 0 for the
// buyer's own features. Solved by cyclic coordinate descent; config.max_iter
// counts sweeps.
LrmResult lrm_benchmark(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        const std::vector<FeatureInfo>& features, const WeightedLassoConfig& config = {});

}  // namespace fcmarket
