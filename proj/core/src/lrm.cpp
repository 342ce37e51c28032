#include "fcmarket/lrm.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fcmarket/errors.hpp"

namespace fcmarket {

namespace {

// a duplicate of a fitted column sees |a| == t up to rounding; keep it at zero
double soft(double a, double t) {
  const double excess = std::abs(a) - t;
  return excess > 1e-12 * std::max(1.0, std::abs(a)) ? std::copysign(excess, a) : 0.0;
}

}  // namespace

LrmResult lrm_benchmark(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        const std::vector<FeatureInfo>& features, const WeightedLassoConfig& config) {
  require(X.rows() == y.size(), ErrorCode::shape, "design rows and target length differ");
  require(static_cast<Eigen::Index>(features.size()) == X.cols(), ErrorCode::shape,
          "feature list does not match matrix width");
  require(X.rows() > 0, ErrorCode::shape, "LRM needs rows");
  const Eigen::Index p = X.cols();
  const auto T = static_cast<double>(X.rows());
  Eigen::VectorXd w(p);
  for (Eigen::Index c = 0; c < p; ++c) {
    const auto& f = features[static_cast<std::size_t>(c)];
    require(f.price >= 0.0 && std::isfinite(f.price), ErrorCode::precondition, "reservation prices must be >= 0");
    // halved: the sweep below works on (1/2T)|r|^2
    w(c) = f.local ? 0.0 : 0.5 * f.price;
  }

  // cyclic coordinate descent on the centred problem; among exact
  // duplicates the first column takes the weight
  const Eigen::VectorXd xbar = X.colwise().mean().transpose();
  const Eigen::MatrixXd Xc = X.rowwise() - xbar.transpose();
  const double ybar = y.mean();
  Eigen::VectorXd r = y.array() - ybar;
  Eigen::VectorXd sq(p);
  for (Eigen::Index c = 0; c < p; ++c) sq(c) = Xc.col(c).squaredNorm() / T;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);

  LrmResult out;
  for (int sweep = 1; sweep <= config.max_iter; ++sweep) {
    double change = 0.0;
    for (Eigen::Index c = 0; c < p; ++c) {
      if (sq(c) <= 0.0) continue;
      const double rho = Xc.col(c).dot(r) / T + sq(c) * beta(c);
      const double next = soft(rho, w(c)) / sq(c);
      const double d = next - beta(c);
      if (d != 0.0) {
        r -= d * Xc.col(c);
        beta(c) = next;
        change = std::max(change, std::abs(d));
      }
    }
    out.iterations = sweep;
    if (change <= config.tolerance) {
      out.converged = true;
      break;
    }
  }
  out.beta.values = beta;
  out.beta.intercept = ybar - xbar.dot(beta);

  std::map<int, SellerRevenue> by_seller;
  for (Eigen::Index c = 0; c < p; ++c) {
    const auto& f = features[static_cast<std::size_t>(c)];
    if (f.local) continue;
    auto& s = by_seller[f.owner_agent];
    s.seller = f.owner_agent;
    const double v = std::abs(f.price * beta(c));
    if (v > 0.0) {
      s.amount += v;
      s.groups.push_back(static_cast<int>(c));
    }
  }
  for (auto& [id, s] : by_seller) out.revenues.push_back(std::move(s));
  out.payment = total_payment(out.revenues);
  return out;
}

}  // namespace fcmarket
