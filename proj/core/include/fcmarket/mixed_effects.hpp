#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fcmarket {

// Product of raw features; a repeated index is a power (x1*x1 = x1^2).
struct ProductTerm {
  std::vector<int> features;
  std::string name;
};

struct MixedEffectsProblem {
  Eigen::MatrixXd X;  // raw features, one column per priced feature
  std::vector<ProductTerm> terms;
  Eigen::VectorXd y;
  std::vector<double> prices;  // per feature
  double budget = 0.0;
};

struct MixedEffectsResult {
  std::vector<bool> features_used;
  std::vector<bool> terms_used;
  Eigen::VectorXd coefficients;  // per term, zero when unused
  double intercept = 0.0;
  double loss = 0.0;  // (1/2T)|r|^2
  double cost = 0.0;  // each used feature charged once
  std::size_t subsets_evaluated = 0;
};

Eigen::MatrixXd term_matrix(const Eigen::MatrixXd& X, const std::vector<ProductTerm>& terms);

// Exhaustive search over affordable feature subsets (at most 20 features).
// A term is available when all its features are bought. Ties in loss go to
// the cheaper subset.
MixedEffectsResult fit_mixed_effects(const MixedEffectsProblem& problem);

}  // namespace fcmarket
