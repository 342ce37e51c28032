#include "fcmarket/weighted.hpp"

#include <cmath>
#include <limits>

#include "fcmarket/errors.hpp"

namespace fcmarket {

namespace {

double soft(double a, double t) {
  if (std::isinf(t)) return 0.0;
  const double e = std::abs(a) - t;
  return e > 0.0 ? std::copysign(e, a) : 0.0;
}

}  // namespace

WeightedLassoResult fit_weighted_lasso(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                                       const WeightedLassoConfig& config, const CoefficientSet* start) {
  require(Z.rows() == y.size() && Z.cols() == w.size(), ErrorCode::shape, "weighted lasso inputs disagree in shape");
  require(Z.rows() > 0, ErrorCode::shape, "weighted lasso needs rows");
  require(Z.allFinite() && y.allFinite(), ErrorCode::numeric, "non-finite weighted lasso input");
  for (Eigen::Index j = 0; j < w.size(); ++j)
    require(w(j) >= 0.0, ErrorCode::config, "weights must be non-negative");
  const auto T = static_cast<double>(Z.rows());
  const Eigen::Index p = Z.cols();

  // centred problem: the intercept is ybar - zbar'theta
  const Eigen::VectorXd zbar = Z.colwise().mean().transpose();
  const double ybar = y.mean();
  const Eigen::MatrixXd Zc = Z.rowwise() - zbar.transpose();
  const Eigen::MatrixXd G = Zc.transpose() * Zc / T;
  const Eigen::VectorXd c = Zc.transpose() * (y.array() - ybar).matrix() / T;
  const double C = (p == 0 ? 0.0 : largest_eigenvalue(G)) + 0.1;

  WeightedLassoResult out;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
  if (start) {
    require(start->values.size() == p, ErrorCode::shape, "start has the wrong length");
    theta = start->values;
    for (Eigen::Index j = 0; j < p; ++j)
      if (std::isinf(w(j))) theta(j) = 0.0;
  }
  auto objective = [&](const Eigen::VectorXd& t) {
    double pen = 0.0;
    for (Eigen::Index j = 0; j < p; ++j)
      if (t(j) != 0.0) pen += w(j) * std::abs(t(j));
    return 0.5 * t.dot(G * t) - c.dot(t) + pen;
  };

  Eigen::VectorXd v = theta;
  double tk = 1.0, F = objective(theta);
  for (int k = 1; k <= config.max_iter; ++k) {
    const Eigen::VectorXd a = v - (G * v - c) / C;
    Eigen::VectorXd next(p);
    for (Eigen::Index j = 0; j < p; ++j) next(j) = soft(a(j), w(j) / C);
    const double Fn = objective(next);
    if (Fn > F && tk > 1.0) {
      // restart momentum
      tk = 1.0;
      v = theta;
      continue;
    }
    const double tn = (1.0 + std::sqrt(1.0 + 4.0 * tk * tk)) / 2.0;
    v = next + ((tk - 1.0) / tn) * (next - theta);
    const double change = (next - theta).cwiseAbs().maxCoeff();
    theta = next;
    tk = tn;
    F = Fn;
    out.iterations = k;
    if (p == 0 || change <= config.tolerance) {
      out.converged = true;
      break;
    }
  }
  out.theta.values = theta;
  out.theta.intercept = ybar - zbar.dot(theta);
  return out;
}

CoefficientWeightedResult fit_coefficient_weighted(const GroupedDesign& design, const Eigen::VectorXd& y,
                                                   double lambda, double budget, const WeightedLassoConfig& config) {
  design.validate();
  require(lambda >= 0.0, ErrorCode::config, "lambda must be non-negative");
  require(budget >= 0.0, ErrorCode::config, "budget must be non-negative");
  const Eigen::Index p = design.cols();
  Eigen::VectorXd price = Eigen::VectorXd::Zero(p);
  std::vector<bool> off(static_cast<std::size_t>(p), false);
  for (const auto& g : design.groups) {
    require(g.price >= 0.0, ErrorCode::config, "prices must be non-negative");
    for (Eigen::Index c = g.begin; c < g.end; ++c) {
      price(c) = g.price;
      off[static_cast<std::size_t>(c)] = !g.active || !design.column_active[static_cast<std::size_t>(c)];
    }
  }
  const double inf = std::numeric_limits<double>::infinity();
  auto cost_of = [&](const Eigen::VectorXd& t) { return price.dot(t.cwiseAbs()); };

  CoefficientWeightedResult out;
  auto solve = [&](double nu, const CoefficientSet* start) {
    Eigen::VectorXd w(p);
    for (Eigen::Index j = 0; j < p; ++j) {
      if (off[static_cast<std::size_t>(j)])
        w(j) = inf;
      else if (std::isinf(nu))
        w(j) = price(j) > 0.0 ? inf : lambda;
      else
        w(j) = lambda + nu * price(j);
    }
    ++out.solves;
    return fit_weighted_lasso(design.matrix, y, w, config, start).theta;
  };

  CoefficientSet hi_sol = solve(0.0, nullptr);
  if (cost_of(hi_sol.values) <= budget) {
    out.theta = hi_sol;
    out.cost = cost_of(hi_sol.values);
    return out;
  }
  if (budget == 0.0) {
    out.theta = solve(inf, nullptr);
    out.multiplier = inf;
    return out;
  }
  double lo = 0.0, hi = 1.0;
  hi_sol = solve(hi, nullptr);
  while (cost_of(hi_sol.values) > budget) {
    lo = hi;
    hi *= 2.0;
    require(hi < 1e300, ErrorCode::numeric, "budget multiplier diverged");
    hi_sol = solve(hi, &hi_sol);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    CoefficientSet s = solve(mid, &hi_sol);
    const double cost = cost_of(s.values);
    if (cost > budget) {
      lo = mid;
    } else {
      hi = mid;
      hi_sol = std::move(s);
      if (budget - cost <= 1e-10 * budget) break;
    }
  }
  out.theta = hi_sol;
  out.multiplier = hi;
  out.cost = cost_of(hi_sol.values);
  return out;
}

}  // namespace fcmarket
