#include "fcmarket/mixed_effects.hpp"

#include <cstdint>
#include <map>

#include "fcmarket/errors.hpp"

namespace fcmarket {

Eigen::MatrixXd term_matrix(const Eigen::MatrixXd& X, const std::vector<ProductTerm>& terms) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Ones(X.rows(), static_cast<Eigen::Index>(terms.size()));
  for (std::size_t k = 0; k < terms.size(); ++k) {
    require(!terms[k].features.empty(), ErrorCode::schema, "term '" + terms[k].name + "' has no features");
    for (int f : terms[k].features) {
      require(f >= 0 && f < X.cols(), ErrorCode::schema,
              "term '" + terms[k].name + "' references unknown feature " + std::to_string(f));
      out.col(static_cast<Eigen::Index>(k)).array() *= X.col(f).array();
    }
  }
  return out;
}

MixedEffectsResult fit_mixed_effects(const MixedEffectsProblem& problem) {
  const auto n = static_cast<int>(problem.X.cols());
  require(n <= 20, ErrorCode::config, "mixed effects search is limited to 20 features");
  require(static_cast<int>(problem.prices.size()) == n, ErrorCode::schema, "one price per feature required");
  require(problem.y.size() == problem.X.rows() && problem.y.size() > 0, ErrorCode::shape,
          "target length does not match the feature rows");
  require(problem.budget >= 0.0, ErrorCode::config, "budget must be non-negative");
  for (double s : problem.prices) require(s >= 0.0, ErrorCode::config, "prices must be non-negative");

  const Eigen::MatrixXd P = term_matrix(problem.X, problem.terms);
  const auto K = problem.terms.size();
  require(K <= 64, ErrorCode::config, "mixed effects search is limited to 64 terms");
  std::vector<std::uint32_t> need(K, 0);
  for (std::size_t k = 0; k < K; ++k)
    for (int f : problem.terms[k].features) need[k] |= 1u << f;

  const auto T = static_cast<double>(problem.y.size());
  struct Fit {
    Eigen::VectorXd coef;
    double intercept = 0.0;
    double loss = 0.0;
  };
  // subsets covering the same terms share one regression
  std::map<std::uint64_t, Fit> cache;
  auto fit_terms = [&](std::uint64_t mask) -> const Fit& {
    auto it = cache.find(mask);
    if (it != cache.end()) return it->second;
    std::vector<Eigen::Index> cols;
    for (std::size_t k = 0; k < K; ++k)
      if (mask & (1ull << k)) cols.push_back(static_cast<Eigen::Index>(k));
    Eigen::MatrixXd A(problem.X.rows(), static_cast<Eigen::Index>(cols.size()) + 1);
    A.col(0).setOnes();
    for (std::size_t c = 0; c < cols.size(); ++c) A.col(static_cast<Eigen::Index>(c) + 1) = P.col(cols[c]);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    const Eigen::VectorXd sol = qr.solve(problem.y);
    Fit f;
    f.coef = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(K));
    f.intercept = sol(0);
    for (std::size_t c = 0; c < cols.size(); ++c) f.coef(cols[c]) = sol(static_cast<Eigen::Index>(c) + 1);
    f.loss = (problem.y - A * sol).squaredNorm() / (2.0 * T);
    return cache.emplace(mask, std::move(f)).first->second;
  };

  MixedEffectsResult best;
  bool have = false;
  std::uint64_t best_terms = 0;
  std::uint32_t best_features = 0;
  for (std::uint32_t s = 0; s < (1u << n); ++s) {
    double cost = 0.0;
    for (int f = 0; f < n; ++f)
      if (s & (1u << f)) cost += problem.prices[static_cast<std::size_t>(f)];
    if (cost > problem.budget) continue;
    ++best.subsets_evaluated;
    std::uint64_t terms = 0;
    for (std::size_t k = 0; k < K; ++k)
      if ((need[k] & s) == need[k]) terms |= 1ull << k;
    const Fit& f = fit_terms(terms);
    if (!have || f.loss < best.loss - 1e-12 * (1.0 + best.loss) ||
        (f.loss <= best.loss + 1e-12 * (1.0 + best.loss) && cost < best.cost)) {
      have = true;
      best.loss = f.loss;
      best.cost = cost;
      best.coefficients = f.coef;
      best.intercept = f.intercept;
      best_terms = terms;
      best_features = s;
    }
  }
  best.features_used.assign(static_cast<std::size_t>(n), false);
  best.terms_used.assign(K, false);
  // charge only features that some selected term actually uses
  std::uint32_t used = 0;
  for (std::size_t k = 0; k < K; ++k)
    if (best_terms & (1ull << k)) {
      best.terms_used[k] = true;
      used |= need[k];
    }
  used &= best_features;
  best.cost = 0.0;
  for (int f = 0; f < n; ++f)
    if (used & (1u << f)) {
      best.features_used[static_cast<std::size_t>(f)] = true;
      best.cost += problem.prices[static_cast<std::size_t>(f)];
    }
  return best;
}

}  // namespace fcmarket
