#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fcmarket/design.hpp"
#include "fcmarket/solver.hpp"
#include "fcmarket/splines.hpp"

namespace fcmarket {

struct ModelSpec {
  SplineConfig spline;
  bool use_splines = true;
  double alpha = 0.05;  // filter significance, >= 1 disables the filter

  void validate() const;
};

// Training-side pipeline of the market model: spline expansion, filter
// selection with the local columns as controls, then column
// standardization. The same steps are replayed on new rows by transform().
class PreparedDesign {
 public:
  PreparedDesign() = default;

  static PreparedDesign fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<FeatureInfo>& features,
                            const ModelSpec& spec);

  GroupedDesign transform(const Eigen::MatrixXd& X) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& X, const CoefficientSet& theta, LossKind loss, bool clip) const;

  // Same pipeline with every group failing `keep` switched off.
  PreparedDesign restricted(const std::function<bool(const GroupInfo&)>& keep) const;

  const GroupedDesign& train() const { return train_; }
  const std::vector<FeatureInfo>& features() const { return features_; }
  const ModelSpec& spec() const { return spec_; }
  const SplineTransformer& transformer() const { return transformer_; }
  // All-zero start, feasible for any budget.
  CoefficientSet zero() const;

 private:
  void finish(GroupedDesign& d) const;

  ModelSpec spec_;
  std::vector<FeatureInfo> features_;
  SplineTransformer transformer_;
  GroupedDesign train_;
  Eigen::VectorXd mean_;
  Eigen::VectorXd scale_;
};

double rmse(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat);

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X, std::span<const std::size_t> rows);
Eigen::VectorXd take(const Eigen::VectorXd& y, std::span<const std::size_t> rows);

}  // namespace fcmarket
