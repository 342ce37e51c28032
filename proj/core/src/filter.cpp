#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

#include "fcmarket/errors.hpp"
#include "fcmarket/splines.hpp"

namespace fcmarket {

GroupedDesign filter_select(const GroupedDesign& design, const Eigen::VectorXd& target,
                            std::span<const Eigen::Index> controls, double alpha,
                            std::vector<double>* p_values) {
  design.validate();
  require(alpha > 0.0, ErrorCode::config, "filter alpha must be positive");
  const Eigen::Index T = design.rows();
  require(target.size() == T, ErrorCode::shape, "target length does not match design rows");
  require(target.allFinite() && design.matrix.allFinite(), ErrorCode::numeric, "filter input not finite");

  const double y_mean = target.mean();
  const double y_var = (target.array() - y_mean).square().sum();
  require(y_var > 1e-12 * std::max(1.0, target.squaredNorm()), ErrorCode::filter,
          "target is constant; partial correlations are undefined");

  std::vector<bool> is_control(static_cast<std::size_t>(design.cols()), false);
  for (auto c : controls) {
    require(c >= 0 && c < design.cols(), ErrorCode::shape, "control column outside the design");
    is_control[static_cast<std::size_t>(c)] = true;
  }

  Eigen::MatrixXd Q(T, 1 + static_cast<Eigen::Index>(controls.size()));
  Q.col(0).setOnes();
  for (std::size_t k = 0; k < controls.size(); ++k) Q.col(static_cast<Eigen::Index>(k) + 1) = design.matrix.col(controls[k]);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Q);
  qr.setThreshold(1e-10);
  const auto c = static_cast<double>(qr.rank() - 1);
  const double df = static_cast<double>(T) - 2.0 - c;
  require(df >= 1.0, ErrorCode::filter, "too few rows for the partial-correlation test");

  std::vector<Eigen::Index> tested;
  for (Eigen::Index j = 0; j < design.cols(); ++j)
    if (!is_control[static_cast<std::size_t>(j)] && design.column_active[static_cast<std::size_t>(j)]) tested.push_back(j);

  Eigen::MatrixXd Zt(T, static_cast<Eigen::Index>(tested.size()));
  for (std::size_t k = 0; k < tested.size(); ++k) Zt.col(static_cast<Eigen::Index>(k)) = design.matrix.col(tested[k]);
  const Eigen::VectorXd ry = target - Q * qr.solve(target);
  const Eigen::MatrixXd Rz = Zt - Q * qr.solve(Zt);

  const double ry_norm = ry.norm();
  const bool target_explained = ry_norm <= 1e-10 * std::sqrt(y_var);
  boost::math::students_t dist(df);

  GroupedDesign out = design;
  std::vector<double> p(static_cast<std::size_t>(design.cols()), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < tested.size(); ++k) {
    const auto col = Rz.col(static_cast<Eigen::Index>(k));
    const double z_norm = col.norm();
    const double raw_norm = (Zt.col(static_cast<Eigen::Index>(k)).array() - Zt.col(static_cast<Eigen::Index>(k)).mean()).matrix().norm();
    double pv = 1.0;
    if (!target_explained && z_norm > 1e-10 * std::max(1.0, raw_norm)) {
      const double r = std::clamp(ry.dot(col) / (ry_norm * z_norm), -1.0, 1.0);
      if (1.0 - r * r <= 0.0) {
        pv = 0.0;
      } else {
        const double t = std::abs(r) * std::sqrt(df / (1.0 - r * r));
        pv = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, t)));
      }
    }
    p[static_cast<std::size_t>(tested[k])] = pv;
    if (alpha < 1.0 && pv >= alpha) out.column_active[static_cast<std::size_t>(tested[k])] = false;
  }
  out.sync_masks();
  if (p_values) *p_values = std::move(p);
  return out;
}

}  // namespace fcmarket
