#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fcmarket/design.hpp"

namespace fcmarket {

enum class KnotRule { quantile, uniform };

struct SplineConfig {
  int degree = 3;
  int knots = 5;  // interior knots
  KnotRule rule = KnotRule::quantile;

  int basis_size() const { return degree + knots + 1; }
  void validate() const;
};

struct FittedSpline {
  int degree = 0;
  std::vector<double> knots;  // clamped: degree+1 copies of each boundary
  double lower = 0.0;
  double upper = 0.0;
  bool degenerate = false;        // constant training column
  bool uniform_fallback = false;  // quantile knots collided

  int basis_size() const { return static_cast<int>(knots.size()) - degree - 1; }
  // Basis values at x (clamped to [lower, upper]) written to out[0..M).
  void evaluate(double x, double* out) const;
};

class SplineTransformer {
 public:
  SplineTransformer() = default;

  static SplineTransformer fit(const Eigen::MatrixXd& X, const SplineConfig& config);

  // Rows of X expanded to features() * M columns.
  Eigen::MatrixXd transform(const Eigen::MatrixXd& X) const;

  const SplineConfig& config() const { return config_; }
  const std::vector<FittedSpline>& features() const { return features_; }
  int basis_size() const { return config_.basis_size(); }

  // Text format: header line "splines <n> <degree> <knots>", then per
  // feature "<lower> <upper> <degenerate> <fallback> <knot>...".
  void write(std::ostream& out) const;
  static SplineTransformer read(std::istream& in);

 private:
  SplineConfig config_;
  std::vector<FittedSpline> features_;
};

// Expands every column of X into one group of M basis columns carrying the
// feature's owner and price. Constant columns yield inactive groups.
GroupedDesign fit_transform(const Eigen::MatrixXd& X, const std::vector<FeatureInfo>& features,
                            const SplineConfig& config, SplineTransformer* fitted = nullptr);

// Applies a fitted transformer and the group layout of a reference design.
GroupedDesign apply_transform(const Eigen::MatrixXd& X, const SplineTransformer& transformer,
                              const GroupedDesign& layout);

// Partial-correlation screening. Columns listed in `controls` are kept and
// conditioned on; every other active column is tested against the target
// and deactivated when its two-sided p-value is >= alpha.
GroupedDesign filter_select(const GroupedDesign& design, const Eigen::VectorXd& target,
                            std::span<const Eigen::Index> controls, double alpha,
                            std::vector<double>* p_values = nullptr);

// Columns of every group flagged local.
std::vector<Eigen::Index> local_columns(const GroupedDesign& design);

}  // namespace fcmarket
