#pragma once

#include <Eigen/Dense>

#include "fcmarket/design.hpp"
#include "fcmarket/solver.hpp"

namespace fcmarket {

struct WeightedLassoConfig {
  double tolerance = 1e-12;  // on the largest coefficient change
  int max_iter = 100000;
};

struct WeightedLassoResult {
  CoefficientSet theta;
  int iterations = 0;
  bool converged = false;
};

// min (1/2T)|y - b - Z theta|^2 + sum_j w_j |theta_j| with an unpenalized
// intercept. Infinite weights pin a column at zero. Accelerated proximal
// gradient with restart.
WeightedLassoResult fit_weighted_lasso(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                                       const WeightedLassoConfig& config = {},
                                       const CoefficientSet* start = nullptr);

struct CoefficientWeightedResult {
  CoefficientSet theta;
  double multiplier = 0.0;  // nu on the budget constraint
  double cost = 0.0;        // sum_g price_g sum_m |theta_gm|
  int solves = 0;
};

// min L + lambda|theta|_1 s.t. sum_g price_g sum_m |theta_gm| <= budget, by
// bisection on nu in the weighted problem with weights lambda + nu*price_g.
CoefficientWeightedResult fit_coefficient_weighted(const GroupedDesign& design, const Eigen::VectorXd& y,
                                                   double lambda, double budget,
                                                   const WeightedLassoConfig& config = {});

}  // namespace fcmarket
