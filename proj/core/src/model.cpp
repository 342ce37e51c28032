#include "fcmarket/model.hpp"

#include <cmath>

#include "fcmarket/errors.hpp"

namespace fcmarket {

void ModelSpec::validate() const {
  if (use_splines) spline.validate();
  require(alpha > 0.0, ErrorCode::config, "filter alpha must be positive");
}

PreparedDesign PreparedDesign::fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                   const std::vector<FeatureInfo>& features, const ModelSpec& spec) {
  spec.validate();
  require(X.rows() == y.size(), ErrorCode::shape, "design rows and target length differ");
  require(static_cast<Eigen::Index>(features.size()) == X.cols(), ErrorCode::shape,
          "feature list does not match matrix width");
  PreparedDesign p;
  p.spec_ = spec;
  p.features_ = features;
  GroupedDesign d = spec.use_splines ? fit_transform(X, features, spec.spline, &p.transformer_)
                                     : identity_design(X, features);
  if (spec.alpha < 1.0) {
    std::vector<Eigen::Index> controls;
    for (auto c : local_columns(d))
      if (d.column_active[static_cast<std::size_t>(c)]) controls.push_back(c);
    d = filter_select(d, y, controls, spec.alpha);
  }

  const auto T = static_cast<double>(d.rows());
  p.mean_ = d.matrix.colwise().mean().transpose();
  p.scale_ = Eigen::VectorXd::Ones(d.cols());
  for (Eigen::Index c = 0; c < d.cols(); ++c) {
    const double var = (d.matrix.col(c).array() - p.mean_(c)).square().sum() / T;
    const double sd = std::sqrt(var);
    if (sd < 1e-12)
      d.column_active[static_cast<std::size_t>(c)] = false;
    else
      p.scale_(c) = sd;
  }
  d.sync_masks();
  p.train_.groups = d.groups;
  p.train_.column_active = d.column_active;
  p.finish(d);
  p.train_ = std::move(d);
  return p;
}

void PreparedDesign::finish(GroupedDesign& d) const {
  d.groups = train_.groups;
  d.column_active = train_.column_active;
  for (Eigen::Index c = 0; c < d.cols(); ++c) {
    if (d.column_active[static_cast<std::size_t>(c)])
      d.matrix.col(c) = (d.matrix.col(c).array() - mean_(c)) / scale_(c);
    else
      d.matrix.col(c).setZero();
  }
}

GroupedDesign PreparedDesign::transform(const Eigen::MatrixXd& X) const {
  require(static_cast<std::size_t>(X.cols()) == features_.size(), ErrorCode::shape,
          "rows have " + std::to_string(X.cols()) + " columns, model expects " + std::to_string(features_.size()));
  GroupedDesign d;
  d.matrix = spec_.use_splines ? transformer_.transform(X) : X;
  finish(d);
  return d;
}

Eigen::VectorXd PreparedDesign::predict(const Eigen::MatrixXd& X, const CoefficientSet& theta, LossKind loss,
                                        bool clip) const {
  return fcmarket::predict(transform(X).matrix, theta, loss, clip);
}

PreparedDesign PreparedDesign::restricted(const std::function<bool(const GroupInfo&)>& keep) const {
  PreparedDesign out = *this;
  for (auto& g : out.train_.groups)
    if (!keep(g)) {
      g.active = false;
      for (Eigen::Index c = g.begin; c < g.end; ++c) {
        out.train_.column_active[static_cast<std::size_t>(c)] = false;
        out.train_.matrix.col(c).setZero();
      }
    }
  return out;
}

CoefficientSet PreparedDesign::zero() const {
  CoefficientSet z;
  z.values = Eigen::VectorXd::Zero(train_.cols());
  return z;
}

double rmse(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat) {
  require(y.size() == yhat.size(), ErrorCode::shape, "rmse inputs differ in length");
  require(y.size() > 0, ErrorCode::range, "rmse of an empty set");
  return std::sqrt((y - yhat).squaredNorm() / static_cast<double>(y.size()));
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X, std::span<const std::size_t> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t r = 0; r < rows.size(); ++r)
    out.row(static_cast<Eigen::Index>(r)) = X.row(static_cast<Eigen::Index>(rows[r]));
  return out;
}

Eigen::VectorXd take(const Eigen::VectorXd& y, std::span<const std::size_t> rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) out(static_cast<Eigen::Index>(r)) = y(static_cast<Eigen::Index>(rows[r]));
  return out;
}

}  // namespace fcmarket
