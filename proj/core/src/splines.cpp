#include "fcmarket/splines.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "fcmarket/errors.hpp"

namespace fcmarket {

void GroupedDesign::validate() const {
  require(static_cast<Eigen::Index>(column_active.size()) == cols(), ErrorCode::shape,
          "column mask length does not match design width");
  Eigen::Index next = 0;
  for (const auto& g : groups) {
    require(g.begin == next && g.end > g.begin, ErrorCode::shape, "group ranges do not partition the design");
    require(g.price >= 0.0 && std::isfinite(g.price), ErrorCode::config, "group prices must be non-negative");
    next = g.end;
  }
  require(next == cols(), ErrorCode::shape, "group ranges do not cover the design");
}

std::vector<int> GroupedDesign::column_groups() const {
  std::vector<int> owner(static_cast<std::size_t>(cols()), -1);
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (Eigen::Index c = groups[g].begin; c < groups[g].end; ++c) owner[static_cast<std::size_t>(c)] = static_cast<int>(g);
  return owner;
}

void GroupedDesign::sync_masks() {
  for (auto& g : groups) {
    bool any = false;
    for (Eigen::Index c = g.begin; c < g.end; ++c) {
      const auto i = static_cast<std::size_t>(c);
      if (!g.active) column_active[i] = false;
      any = any || column_active[i];
    }
    g.active = g.active && any;
  }
}

GroupedDesign identity_design(const Eigen::MatrixXd& X, const std::vector<FeatureInfo>& features) {
  require(static_cast<Eigen::Index>(features.size()) == X.cols(), ErrorCode::shape,
          "feature list does not match matrix width");
  GroupedDesign d;
  d.matrix = X;
  d.column_active.assign(features.size(), true);
  for (std::size_t j = 0; j < features.size(); ++j) {
    const auto& f = features[j];
    const auto c = static_cast<Eigen::Index>(j);
    d.groups.push_back({static_cast<int>(j), f.owner_agent, f.name, f.price, c, c + 1, true, f.local});
  }
  d.validate();
  return d;
}

void SplineConfig::validate() const {
  require(degree >= 1, ErrorCode::config, "spline degree must be at least 1");
  require(knots >= 2, ErrorCode::config, "spline knot count must be at least 2");
}

void FittedSpline::evaluate(double x, double* out) const {
  const int M = basis_size();
  std::fill(out, out + M, 0.0);
  if (degenerate) return;
  x = std::clamp(x, lower, upper);
  const int p = degree;
  const int n = M - 1;
  const auto& U = knots;
  int span;
  if (x >= U[static_cast<std::size_t>(n + 1)]) {
    span = n;
  } else {
    auto it = std::upper_bound(U.begin() + p, U.begin() + n + 1, x);
    span = static_cast<int>(it - U.begin()) - 1;
  }
  double N[64], left[64], right[64];
  N[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - U[static_cast<std::size_t>(span + 1 - j)];
    right[j] = U[static_cast<std::size_t>(span + j)] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = N[r] / (right[r + 1] + left[j - r]);
      N[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    N[j] = saved;
  }
  for (int r = 0; r <= p; ++r) out[span - p + r] = N[r];
}

namespace {

double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

FittedSpline fit_one(const Eigen::VectorXd& col, const SplineConfig& config) {
  FittedSpline s;
  s.degree = config.degree;
  const int K = config.knots;
  const int p = config.degree;
  std::vector<double> v(col.data(), col.data() + col.size());
  std::sort(v.begin(), v.end());
  if (v.empty() || v.front() == v.back()) {
    s.degenerate = true;
    s.lower = s.upper = v.empty() ? 0.0 : v.front();
    s.knots.assign(static_cast<std::size_t>(2 * (p + 1) + K), s.lower);
    return s;
  }
  s.lower = v.front();
  s.upper = v.back();
  std::vector<double> interior(static_cast<std::size_t>(K));
  bool ok = config.rule == KnotRule::quantile;
  if (ok) {
    for (int i = 1; i <= K; ++i)
      interior[static_cast<std::size_t>(i - 1)] = quantile_sorted(v, static_cast<double>(i) / (K + 1));
    double prev = s.lower;
    for (double k : interior) {
      if (!(k > prev)) ok = false;
      prev = k;
    }
    if (!(prev < s.upper)) ok = false;
    s.uniform_fallback = !ok;
  }
  if (!ok)
    for (int i = 1; i <= K; ++i)
      interior[static_cast<std::size_t>(i - 1)] = s.lower + (s.upper - s.lower) * i / (K + 1);
  s.knots.assign(static_cast<std::size_t>(p + 1), s.lower);
  s.knots.insert(s.knots.end(), interior.begin(), interior.end());
  s.knots.insert(s.knots.end(), static_cast<std::size_t>(p + 1), s.upper);
  return s;
}

}  // namespace

SplineTransformer SplineTransformer::fit(const Eigen::MatrixXd& X, const SplineConfig& config) {
  config.validate();
  require(config.degree < 60, ErrorCode::config, "spline degree too large");
  require(X.allFinite(), ErrorCode::numeric, "spline input contains non-finite values");
  SplineTransformer t;
  t.config_ = config;
  for (Eigen::Index j = 0; j < X.cols(); ++j) t.features_.push_back(fit_one(X.col(j), config));
  return t;
}

Eigen::MatrixXd SplineTransformer::transform(const Eigen::MatrixXd& X) const {
  require(X.cols() == static_cast<Eigen::Index>(features_.size()), ErrorCode::shape,
          "transform input has " + std::to_string(X.cols()) + " columns, transformer fitted on " +
              std::to_string(features_.size()));
  const int M = basis_size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(X.rows(), X.cols() * M);
  std::vector<double> buf(static_cast<std::size_t>(M));
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const auto& f = features_[static_cast<std::size_t>(j)];
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
      f.evaluate(X(r, j), buf.data());
      for (int m = 0; m < M; ++m) out(r, j * M + m) = buf[static_cast<std::size_t>(m)];
    }
  }
  return out;
}

void SplineTransformer::write(std::ostream& out) const {
  out << "splines " << features_.size() << ' ' << config_.degree << ' ' << config_.knots << '\n';
  out.precision(17);
  for (const auto& f : features_) {
    out << f.lower << ' ' << f.upper << ' ' << f.degenerate << ' ' << f.uniform_fallback;
    for (double k : f.knots) out << ' ' << k;
    out << '\n';
  }
}

SplineTransformer SplineTransformer::read(std::istream& in) {
  std::string tag;
  std::size_t n = 0;
  SplineTransformer t;
  in >> tag >> n >> t.config_.degree >> t.config_.knots;
  require(in.good() && tag == "splines", ErrorCode::schema, "bad spline header");
  t.config_.validate();
  const std::size_t len = static_cast<std::size_t>(2 * (t.config_.degree + 1) + t.config_.knots);
  for (std::size_t j = 0; j < n; ++j) {
    FittedSpline f;
    f.degree = t.config_.degree;
    in >> f.lower >> f.upper >> f.degenerate >> f.uniform_fallback;
    f.knots.resize(len);
    for (auto& k : f.knots) in >> k;
    require(!in.fail(), ErrorCode::schema, "truncated spline record");
    t.features_.push_back(std::move(f));
  }
  return t;
}

GroupedDesign fit_transform(const Eigen::MatrixXd& X, const std::vector<FeatureInfo>& features,
                            const SplineConfig& config, SplineTransformer* fitted) {
  require(static_cast<Eigen::Index>(features.size()) == X.cols(), ErrorCode::shape,
          "feature list does not match matrix width");
  auto transformer = SplineTransformer::fit(X, config);
  const int M = config.basis_size();
  GroupedDesign d;
  d.matrix = transformer.transform(X);
  d.column_active.assign(static_cast<std::size_t>(d.matrix.cols()), true);
  for (std::size_t j = 0; j < features.size(); ++j) {
    const auto& f = features[j];
    const bool active = !transformer.features()[j].degenerate;
    const auto b = static_cast<Eigen::Index>(j) * M;
    d.groups.push_back({static_cast<int>(j), f.owner_agent, f.name, f.price, b, b + M, active, f.local});
  }
  d.sync_masks();
  d.validate();
  if (fitted) *fitted = std::move(transformer);
  return d;
}

GroupedDesign apply_transform(const Eigen::MatrixXd& X, const SplineTransformer& transformer,
                              const GroupedDesign& layout) {
  GroupedDesign d;
  d.matrix = transformer.transform(X);
  require(d.matrix.cols() == layout.cols(), ErrorCode::shape, "layout does not match transformer");
  d.groups = layout.groups;
  d.column_active = layout.column_active;
  return d;
}

std::vector<Eigen::Index> local_columns(const GroupedDesign& design) {
  std::vector<Eigen::Index> cols;
  for (const auto& g : design.groups)
    if (g.local)
      for (Eigen::Index c = g.begin; c < g.end; ++c) cols.push_back(c);
  return cols;
}

}  // namespace fcmarket
