#include "fcmarket/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fcmarket/errors.hpp"
#include "fcmarket/knapsack.hpp"

namespace fcmarket {

void SolverConfig::validate() const {
  require(lambda >= 0.0 && std::isfinite(lambda), ErrorCode::config, "lambda must be a non-negative number");
  require(budget >= 0.0, ErrorCode::config, "budget must be non-negative");
  require(tolerance > 0.0, ErrorCode::config, "tolerance must be positive");
  require(max_iter >= 1, ErrorCode::config, "max_iter must be positive");
  require(price_resolution >= 1, ErrorCode::config, "price resolution must be positive");
}

bool CoefficientSet::group_used(const GroupInfo& g) const {
  for (Eigen::Index c = g.begin; c < g.end; ++c)
    if (values(c) != 0.0) return true;
  return false;
}

std::vector<int> CoefficientSet::used_groups(std::span<const GroupInfo> groups) const {
  std::vector<int> out;
  for (std::size_t g = 0; g < groups.size(); ++g)
    if (group_used(groups[g])) out.push_back(static_cast<int>(g));
  return out;
}

double CoefficientSet::cost(std::span<const GroupInfo> groups) const {
  double total = 0.0;
  for (const auto& g : groups)
    if (group_used(g)) total += g.price;
  return total;
}

std::int64_t price_weight(double price, int resolution) {
  require(price >= 0.0 && std::isfinite(price), ErrorCode::config, "prices must be finite and non-negative");
  const double scaled = price * resolution;
  require(scaled <= 1e15, ErrorCode::config, "price times resolution overflows knapsack weights");
  return std::llround(scaled);
}

std::int64_t budget_capacity(double budget, int resolution) {
  require(budget >= 0.0, ErrorCode::config, "budget must be non-negative");
  const double scaled = budget * resolution;
  if (!(scaled < 9e18)) return std::numeric_limits<std::int64_t>::max();
  // absorb representation error such as 0.29 * 100 = 28.999999999999996
  return static_cast<std::int64_t>(std::floor(scaled + 1e-9 * std::max(1.0, scaled)));
}

ProxResult prox_knapsack(const Eigen::VectorXd& a, double lambda, std::span<const GroupInfo> groups,
                         double budget, int resolution, double min_value) {
  ProxResult out;
  out.theta = Eigen::VectorXd::Zero(a.size());
  out.selected.assign(groups.size(), false);
  out.mu.assign(groups.size(), 0.0);

  std::vector<std::size_t> candidates;
  KnapsackInstance inst;
  std::int64_t total = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& grp = groups[g];
    require(grp.end <= a.size(), ErrorCode::shape, "group range outside the coefficient vector");
    if (!grp.active) continue;
    double mu = 0.0;
    for (Eigen::Index c = grp.begin; c < grp.end; ++c) {
      const double excess = std::abs(a(c)) - lambda;
      if (excess > 0.0) mu += excess * excess / 2.0;
    }
    out.mu[g] = mu;
    if (mu <= 0.0 || (grp.price > 0.0 && mu <= min_value)) continue;
    candidates.push_back(g);
    inst.weights.push_back(price_weight(grp.price, resolution));
    inst.values.push_back(mu);
    total += inst.weights.back();
  }

  const std::int64_t cap = budget_capacity(budget, resolution);
  std::vector<bool> take;
  if (total <= cap) {
    take.assign(candidates.size(), true);
  } else {
    // common divisor of the weights shrinks the table without changing
    // the feasible sets
    std::int64_t div = 0;
    for (auto w : inst.weights) div = std::gcd(div, w);
    if (div > 1) {
      for (auto& w : inst.weights) w /= div;
      inst.capacity = cap / div;
    } else {
      inst.capacity = cap;
    }
    take = knapsack(inst);
  }

  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (!take[k]) continue;
    const auto g = candidates[k];
    out.selected[g] = true;
    for (Eigen::Index c = groups[g].begin; c < groups[g].end; ++c) {
      const double excess = std::abs(a(c)) - lambda;
      if (excess > 0.0) out.theta(c) = std::copysign(excess, a(c));
    }
  }
  return out;
}

double prox_objective(const Eigen::VectorXd& theta, const Eigen::VectorXd& a, double lambda) {
  return 0.5 * (theta - a).squaredNorm() + lambda * theta.lpNorm<1>();
}

double largest_eigenvalue(const Eigen::MatrixXd& A) {
  const Eigen::Index n = A.rows();
  if (n == 0) return 0.0;
  if (n <= 400) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
  }
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = 1.0 + 0.5 * std::sin(static_cast<double>(i + 1));
  v.normalize();
  double lam = 0.0;
  for (int it = 0; it < 20000; ++it) {
    Eigen::VectorXd w = A * v;
    const double next = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    if (std::abs(next - lam) <= 1e-13 * std::abs(next)) {
      lam = next;
      break;
    }
    lam = next;
  }
  return lam;
}

double step_constant(const Eigen::MatrixXd& Z, LossKind loss) {
  const auto T = static_cast<double>(Z.rows());
  if (loss == LossKind::squared) {
    if (Z.rows() == 0 || Z.cols() == 0) return 0.1;
    const Eigen::MatrixXd G = Z.rows() >= Z.cols() ? Eigen::MatrixXd(Z.transpose() * Z / T)
                                                   : Eigen::MatrixXd(Z * Z.transpose() / T);
    return largest_eigenvalue(G) + 0.1;
  }
  Eigen::MatrixXd A(Z.rows(), Z.cols() + 1);
  A.col(0).setOnes();
  A.rightCols(Z.cols()) = Z;
  const Eigen::MatrixXd G = A.rows() >= A.cols() ? Eigen::MatrixXd(A.transpose() * A) : Eigen::MatrixXd(A * A.transpose());
  return largest_eigenvalue(G) / 4.0 + 0.1;
}

namespace {

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Returns (dL/dtheta, dL/db) and the loss.
Eigen::VectorXd logistic_gradient(const Eigen::VectorXd& theta, double b, const Eigen::MatrixXd& Z,
                                  const Eigen::VectorXd& y, double* grad_b, double* loss) {
  const Eigen::VectorXd eta = (Z * theta).array() + b;
  Eigen::VectorXd s(y.size());
  double L = 0.0;
  for (Eigen::Index t = 0; t < y.size(); ++t) {
    const double m = -y(t) * eta(t);
    L += softplus(m);
    s(t) = y(t) * sigmoid(m);
  }
  if (grad_b) *grad_b = -s.sum();
  if (loss) *loss = L;
  return -(Z.transpose() * s);
}

void check_labels(const Eigen::VectorXd& y) {
  for (Eigen::Index t = 0; t < y.size(); ++t)
    require(y(t) == 1.0 || y(t) == -1.0, ErrorCode::domain, "logistic labels must be -1 or +1");
}

}  // namespace

double loss_value(const Eigen::VectorXd& theta, double intercept, const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                  LossKind loss) {
  require(Z.cols() == theta.size() && Z.rows() == y.size(), ErrorCode::shape, "loss inputs disagree in shape");
  if (loss == LossKind::squared) {
    const Eigen::VectorXd r = y - (Z * theta).array().matrix() - Eigen::VectorXd::Constant(y.size(), intercept);
    return r.squaredNorm() / (2.0 * static_cast<double>(y.size()));
  }
  double L = 0.0;
  logistic_gradient(theta, intercept, Z, y, nullptr, &L);
  return L;
}

Eigen::VectorXd gradient_step_vector(const Eigen::VectorXd& theta, double intercept, const Eigen::MatrixXd& Z,
                                     const Eigen::VectorXd& y, LossKind loss, double C) {
  require(Z.cols() == theta.size() && Z.rows() == y.size(), ErrorCode::shape, "gradient inputs disagree in shape");
  require(Z.allFinite() && y.allFinite() && theta.allFinite(), ErrorCode::numeric, "non-finite gradient input");
  require(C > 0.0, ErrorCode::domain, "step constant must be positive");
  if (loss == LossKind::squared) {
    const Eigen::VectorXd r = y - Z * theta - Eigen::VectorXd::Constant(y.size(), intercept);
    return theta + Z.transpose() * r / (static_cast<double>(y.size()) * C);
  }
  return theta - logistic_gradient(theta, intercept, Z, y, nullptr, nullptr) / C;
}

BudgetLassoProblem::BudgetLassoProblem(GroupedDesign design, Eigen::VectorXd y, LossKind loss)
    : design_(std::move(design)), y_(std::move(y)), loss_(loss) {
  design_.validate();
  const auto& Z = design_.matrix;
  require(Z.rows() == y_.size(), ErrorCode::shape, "target length does not match design rows");
  require(Z.rows() > 0, ErrorCode::shape, "design has no rows");
  require(Z.allFinite() && y_.allFinite(), ErrorCode::numeric, "design or target has non-finite entries");
  if (loss_ == LossKind::logistic) check_labels(y_);
  const auto T = static_cast<double>(Z.rows());
  if (loss_ == LossKind::squared && Z.rows() >= Z.cols()) {
    gram_ = true;
    G_ = Z.transpose() * Z / T;
    zty_ = Z.transpose() * y_ / T;
    zbar_ = Z.colwise().mean().transpose();
    ybar_ = y_.mean();
    yy_ = y_.squaredNorm() / T;
    C_ = (Z.cols() == 0 ? 0.0 : largest_eigenvalue(G_)) + 0.1;
  } else {
    C_ = fcmarket::step_constant(Z, loss_);
  }
}

double BudgetLassoProblem::best_intercept(const Eigen::VectorXd& theta) const {
  if (gram_) return ybar_ - zbar_.dot(theta);
  return (y_ - design_.matrix * theta).mean();
}

Eigen::VectorXd BudgetLassoProblem::gradient(const Eigen::VectorXd& theta, double b, double* loss_out) const {
  const auto& Z = design_.matrix;
  if (gram_) {
    Eigen::VectorXd Gt = Eigen::VectorXd::Zero(theta.size());
    for (Eigen::Index j = 0; j < theta.size(); ++j)
      if (theta(j) != 0.0) Gt.noalias() += G_.col(j) * theta(j);
    const Eigen::VectorXd cross = zty_ - b * zbar_;
    if (loss_out)
      *loss_out = 0.5 * (yy_ - 2.0 * b * ybar_ + b * b - 2.0 * theta.dot(cross) + theta.dot(Gt));
    return Gt - cross;
  }
  const auto T = static_cast<double>(Z.rows());
  const Eigen::VectorXd r = y_ - Z * theta - Eigen::VectorXd::Constant(y_.size(), b);
  if (loss_out) *loss_out = r.squaredNorm() / (2.0 * T);
  return -(Z.transpose() * r) / T;
}

double BudgetLassoProblem::loss(const CoefficientSet& theta) const {
  return loss_value(theta.values, theta.intercept, design_.matrix, y_, loss_);
}

FitResult BudgetLassoProblem::fit(const SolverConfig& config, const CoefficientSet* start) const {
  config.validate();
  require(config.loss == loss_, ErrorCode::config, "solver config loss differs from the problem loss");
  const auto p = design_.cols();
  const auto& groups = design_.groups;
  const int rho = config.price_resolution;

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
  double b = 0.0;
  if (start) {
    require(start->values.size() == p, ErrorCode::shape, "start coefficients have the wrong length");
    theta = start->values;
    b = start->intercept;
    std::int64_t used = 0;
    for (std::size_t c = 0; c < design_.column_active.size(); ++c)
      require(design_.column_active[c] || theta(static_cast<Eigen::Index>(c)) == 0.0, ErrorCode::precondition,
              "start has nonzero coefficients on inactive columns");
    for (const auto& g : groups) {
      if (!start->group_used(g)) continue;
      require(g.active, ErrorCode::precondition, "start uses an inactive group");
      used += price_weight(g.price, rho);
    }
    require(used <= budget_capacity(config.budget, rho), ErrorCode::precondition,
            "start coefficients violate the budget constraint");
  }
  if (loss_ == LossKind::squared) b = best_intercept(theta);

  const double C = C_;
  const double lambda = config.lambda;
  FitResult result;
  result.step_constant = C;

  auto objective = [&](double L, const Eigen::VectorXd& t) { return L + lambda * t.lpNorm<1>(); };

  double L = 0.0, gb = 0.0;
  Eigen::VectorXd g = loss_ == LossKind::squared
                          ? gradient(theta, b, &L)
                          : logistic_gradient(theta, b, design_.matrix, y_, &gb, &L);
  double F = objective(L, theta);
  result.trace.push_back(F);

  for (int k = 1; k <= config.max_iter; ++k) {
    Eigen::VectorXd a = theta - g / C;
    for (std::size_t c = 0; c < design_.column_active.size(); ++c)
      if (!design_.column_active[c]) a(static_cast<Eigen::Index>(c)) = 0.0;
    // a priced group whose inclusion would lower the objective by less than
    // the tolerance is not worth buying
    theta = prox_knapsack(a, lambda / C, groups, config.budget, rho, config.tolerance / C).theta;
    if (loss_ == LossKind::squared) {
      b = best_intercept(theta);
      g = gradient(theta, b, &L);
    } else {
      b -= gb / C;
      g = logistic_gradient(theta, b, design_.matrix, y_, &gb, &L);
    }
    const double Fk = objective(L, theta);
    result.trace.push_back(Fk);
    result.iterations = k;
    if (std::abs(Fk - F) <= config.tolerance) {
      result.converged = true;
      break;
    }
    F = Fk;
  }
  result.theta.values = std::move(theta);
  result.theta.intercept = b;
  return result;
}

FitResult fit_budget_constrained(const GroupedDesign& design, const Eigen::VectorXd& y, const SolverConfig& config,
                                 const CoefficientSet* start) {
  return BudgetLassoProblem(design, y, config.loss).fit(config, start);
}

Eigen::VectorXd predict(const Eigen::MatrixXd& Z, const CoefficientSet& theta, LossKind loss, bool clip_unit) {
  require(Z.cols() == theta.values.size(), ErrorCode::shape,
          "prediction rows have " + std::to_string(Z.cols()) + " columns, coefficients " +
              std::to_string(theta.values.size()));
  Eigen::VectorXd eta = (Z * theta.values).array() + theta.intercept;
  if (loss == LossKind::logistic) return eta.unaryExpr([](double x) { return sigmoid(x); });
  if (clip_unit) eta = eta.cwiseMax(0.0).cwiseMin(1.0);
  return eta;
}

}  // namespace fcmarket
