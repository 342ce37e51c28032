#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fcmarket/design.hpp"

namespace fcmarket {

enum class LossKind { squared, logistic };

struct SolverConfig {
  double lambda = 0.01;
  double budget = 0.0;
  double tolerance = 1e-7;
  int max_iter = 2000;
  int price_resolution = 100;  // knapsack weight units per currency unit
  LossKind loss = LossKind::squared;

  void validate() const;
};

// Coefficients aligned with the design columns (inactive columns hold 0).
struct CoefficientSet {
  Eigen::VectorXd values;
  double intercept = 0.0;

  bool group_used(const GroupInfo& g) const;
  std::vector<int> used_groups(std::span<const GroupInfo> groups) const;
  // Sum of prices over used groups.
  double cost(std::span<const GroupInfo> groups) const;
};

struct FitResult {
  CoefficientSet theta;
  // Objective L + lambda*|theta|_1 after each iteration; entry 0 is the
  // starting point.
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
  double step_constant = 0.0;
};

std::int64_t price_weight(double price, int resolution);
std::int64_t budget_capacity(double budget, int resolution);

struct ProxResult {
  Eigen::VectorXd theta;
  std::vector<bool> selected;  // per group
  std::vector<double> mu;      // per group
};

// argmin 1/2|theta - a|^2 + lambda |theta|_1 subject to the priced groups
// carrying nonzeros fitting in the budget. Inactive groups stay at zero, and
// so do priced groups with mu <= min_value.
ProxResult prox_knapsack(const Eigen::VectorXd& a, double lambda, std::span<const GroupInfo> groups,
                         double budget, int resolution, double min_value = 0.0);
double prox_objective(const Eigen::VectorXd& theta, const Eigen::VectorXd& a, double lambda);

// Squared: lambda_max(Z'Z/T) + 0.1. Logistic: lambda_max([1 Z]'[1 Z])/4 + 0.1.
double step_constant(const Eigen::MatrixXd& Z, LossKind loss);
double largest_eigenvalue(const Eigen::MatrixXd& symmetric);

// Squared loss is (1/2T)|y - b - Z theta|^2; logistic loss is
// sum log(1 + exp(-y (b + z theta))) with labels in {-1, +1}.
double loss_value(const Eigen::VectorXd& theta, double intercept, const Eigen::MatrixXd& Z,
                  const Eigen::VectorXd& y, LossKind loss);
// a = theta - (1/C) dL/dtheta.
Eigen::VectorXd gradient_step_vector(const Eigen::VectorXd& theta, double intercept, const Eigen::MatrixXd& Z,
                                     const Eigen::VectorXd& y, LossKind loss, double C);

// Budget-constrained spline LASSO on a fixed design and target. Holds the
// cached products so that many budgets and warm starts share them.
class BudgetLassoProblem {
 public:
  BudgetLassoProblem(GroupedDesign design, Eigen::VectorXd y, LossKind loss = LossKind::squared);

  const GroupedDesign& design() const { return design_; }
  const Eigen::VectorXd& target() const { return y_; }
  LossKind loss() const { return loss_; }
  double step_constant() const { return C_; }

  // Throws precondition error when the start is not budget feasible.
  FitResult fit(const SolverConfig& config, const CoefficientSet* start = nullptr) const;

  double loss(const CoefficientSet& theta) const;

  // Squared loss only: closed-form intercept and dL/dtheta.
  double best_intercept(const Eigen::VectorXd& theta) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& theta, double intercept, double* loss_out) const;

 private:

  GroupedDesign design_;
  Eigen::VectorXd y_;
  LossKind loss_;
  double C_ = 0.0;
  bool gram_ = false;
  Eigen::MatrixXd G_;      // Z'Z/T
  Eigen::VectorXd zty_;    // Z'y/T
  Eigen::VectorXd zbar_;   // column means
  double ybar_ = 0.0;
  double yy_ = 0.0;        // y'y/T
};

FitResult fit_budget_constrained(const GroupedDesign& design, const Eigen::VectorXd& y, const SolverConfig& config,
                                 const CoefficientSet* start = nullptr);

// Squared: b + Z theta, optionally clipped to [0,1]. Logistic: sigmoid.
Eigen::VectorXd predict(const Eigen::MatrixXd& Z, const CoefficientSet& theta, LossKind loss, bool clip_unit = false);

}  // namespace fcmarket
