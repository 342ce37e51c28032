#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fcmarket/dataset.hpp"
#include "fcmarket/design.hpp"
#include "fcmarket/model.hpp"
#include "fcmarket/solver.hpp"

namespace fcmarket {

std::vector<double> log_space(double lo, double hi, int n);

struct TuningGrid {
  std::vector<int> degrees{1, 2, 3, 4, 5, 6, 7};
  std::vector<int> knot_counts;  // default 3..30
  std::vector<double> lambdas = log_space(1e-3, 100.0, 10);
  double alpha = 0.05;
  SplitPolicy cv = KFoldPolicy{12};
  bool use_splines = true;  // false: plain LASSO on the raw columns, D and K ignored

  TuningGrid();
  void validate() const;
  std::size_t size() const {
    return use_splines ? degrees.size() * knot_counts.size() * lambdas.size() : lambdas.size();
  }
};

// One regression task: raw feature matrix with its feature metadata.
struct TuningTask {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<FeatureInfo> features;
  std::vector<Timestamp> times;  // one per row, used by the split policy
};

// degree and knots are 0 in rows of a plain LASSO grid
struct TuningRow {
  int degree = 0;
  int knots = 0;
  double lambda = 0.0;
  double loss = 0.0;  // validation RMSE averaged over usable folds
  int folds = 0;
};

struct FoldRow {
  int degree = 0;
  int knots = 0;
  double lambda = 0.0;
  int fold = 0;
  double loss = 0.0;
};

struct TuningStats {
  std::size_t transformer_fits = 0;
  std::size_t filter_fits = 0;
  std::size_t solves = 0;
};

struct TuningResult {
  int degree = 0;
  int knots = 0;
  double lambda = 0.0;
  double loss = 0.0;
  std::vector<TuningRow> table;
  std::vector<FoldRow> folds;
  TuningStats stats;
  std::vector<std::string> warnings;
};

// Grid search over (D, K, lambda) at a fixed bid. Spline fit and filter run
// once per (D, K, fold) and are shared by every lambda. Ties go to smaller
// D, then smaller K, then larger lambda.
TuningResult tune(const TuningTask& task, double bid, const TuningGrid& grid, const SolverConfig& base,
                  int jobs = 1);

}  // namespace fcmarket
