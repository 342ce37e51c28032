#include "fcmarket/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

#include "fcmarket/errors.hpp"
#include "fcmarket/parallel.hpp"

namespace fcmarket {

std::vector<double> log_space(double lo, double hi, int n) {
  require(lo > 0.0 && hi >= lo && n >= 1, ErrorCode::config, "log_space needs 0 < lo <= hi and n >= 1");
  std::vector<double> out;
  if (n == 1) return {lo};
  const double a = std::log10(lo), b = std::log10(hi);
  for (int k = 0; k < n; ++k) out.push_back(std::pow(10.0, a + (b - a) * k / (n - 1)));
  return out;
}

TuningGrid::TuningGrid() {
  for (int k = 3; k <= 30; ++k) knot_counts.push_back(k);
}

void TuningGrid::validate() const {
  require(!degrees.empty() && !knot_counts.empty() && !lambdas.empty(), ErrorCode::config,
          "tuning grid sets must be non-empty");
  if (use_splines) {
    for (int d : degrees) require(d >= 1, ErrorCode::config, "spline degree must be >= 1");
    for (int k : knot_counts) require(k >= 2, ErrorCode::config, "knot count must be >= 2");
  }
  for (double l : lambdas) require(std::isfinite(l) && l >= 0.0, ErrorCode::config, "lambda must be >= 0");
  require(alpha > 0.0, ErrorCode::config, "filter alpha must be positive");
}

TuningResult tune(const TuningTask& task, double bid, const TuningGrid& grid, const SolverConfig& base, int jobs) {
  grid.validate();
  base.validate();
  require(task.X.rows() == task.y.size(), ErrorCode::shape, "task rows and target differ");
  require(task.times.size() == static_cast<std::size_t>(task.y.size()), ErrorCode::shape,
          "task needs one timestamp per row");
  const auto folds = split(task.times, grid.cv);
  require(folds.size() >= 2, ErrorCode::config, "tuning needs at least two folds");

  // larger lambda first so ties resolve to the larger value and warm starts
  // move toward denser solutions
  std::vector<double> lambdas = grid.lambdas;
  std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
  lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());
  std::vector<int> degrees = grid.degrees, knots = grid.knot_counts;
  if (!grid.use_splines) degrees = knots = {0};
  std::sort(degrees.begin(), degrees.end());
  degrees.erase(std::unique(degrees.begin(), degrees.end()), degrees.end());
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  const std::size_t nD = degrees.size(), nK = knots.size(), nF = folds.size(), nL = lambdas.size();
  struct Cell {
    std::vector<std::optional<double>> loss;  // per lambda
    std::string warning;
    std::size_t solves = 0;
    std::size_t prepared = 0;
  };
  std::vector<Cell> cells(nD * nK * nF);

  parallel_for(cells.size(), jobs, [&](std::size_t idx) {
    const std::size_t f = idx % nF, k = (idx / nF) % nK, d = idx / (nF * nK);
    Cell& cell = cells[idx];
    cell.loss.assign(nL, std::nullopt);
    const auto& fold = folds[f];
    try {
      require(!fold.train.empty() && !fold.validation.empty(), ErrorCode::degenerate, "empty fold");
      ModelSpec spec;
      spec.use_splines = grid.use_splines;
      if (grid.use_splines) spec.spline = {degrees[d], knots[k], KnotRule::quantile};
      spec.alpha = grid.alpha;
      const Eigen::VectorXd ytr = take(task.y, fold.train), yval = take(task.y, fold.validation);
      ++cell.prepared;
      auto prepared = PreparedDesign::fit(take_rows(task.X, fold.train), ytr, task.features, spec);
      const auto Zval = prepared.transform(take_rows(task.X, fold.validation));
      BudgetLassoProblem problem(prepared.train(), ytr, base.loss);
      std::optional<CoefficientSet> warm;
      for (std::size_t l = 0; l < nL; ++l) {
        SolverConfig cfg = base;
        cfg.lambda = lambdas[l];
        cfg.budget = bid;
        auto fit = problem.fit(cfg, warm ? &*warm : nullptr);
        ++cell.solves;
        cell.loss[l] = rmse(yval, predict(Zval.matrix, fit.theta, base.loss, false));
        warm = std::move(fit.theta);
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::config || e.code() == ErrorCode::shape) throw;
      cell.loss.assign(nL, std::nullopt);
      cell.warning = "D=" + std::to_string(degrees[d]) + " K=" + std::to_string(knots[k]) + " fold " +
                     std::to_string(f) + " skipped: " + e.what();
    }
  });

  TuningResult out;
  bool found = false;
  for (std::size_t d = 0; d < nD; ++d)
    for (std::size_t k = 0; k < nK; ++k) {
      for (std::size_t f = 0; f < nF; ++f) {
        const Cell& c = cells[(d * nK + k) * nF + f];
        out.stats.solves += c.solves;
        if (grid.use_splines) out.stats.transformer_fits += c.prepared;
        if (grid.alpha < 1.0) out.stats.filter_fits += c.prepared;
        if (!c.warning.empty()) out.warnings.push_back(c.warning);
      }
      for (std::size_t l = 0; l < nL; ++l) {
        double sum = 0.0;
        int used = 0;
        for (std::size_t f = 0; f < nF; ++f) {
          const auto& v = cells[(d * nK + k) * nF + f].loss[l];
          if (!v) continue;
          out.folds.push_back({degrees[d], knots[k], lambdas[l], static_cast<int>(f), *v});
          sum += *v;
          ++used;
        }
        if (used == 0) continue;
        const double mean = sum / used;
        out.table.push_back({degrees[d], knots[k], lambdas[l], mean, used});
        if (!found || mean < out.loss) {
          found = true;
          out.degree = degrees[d];
          out.knots = knots[k];
          out.lambda = lambdas[l];
          out.loss = mean;
        }
      }
    }
  require(found, ErrorCode::tuning, "every cross-validation fold was degenerate");
  return out;
}

}  // namespace fcmarket
