// Acceptance suite: one PASS/FAIL line per criterion. `--only N` runs a
// single criterion; the exit status is nonzero when any selected one fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <boost/math/distributions/students_t.hpp>

#include "fcmarket/baselines.hpp"
#include "fcmarket/config.hpp"
#include "fcmarket/errors.hpp"
#include "fcmarket/knapsack.hpp"
#include "fcmarket/market.hpp"
#include "fcmarket/random.hpp"
#include "fcmarket/session.hpp"
#include "fcmarket/solver.hpp"
#include "fcmarket/splines.hpp"

#ifndef FCMARKET_CLI_PATH
#define FCMARKET_CLI_PATH "fcmarket"
#endif

using namespace fcmarket;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::vector<SettlementReport> g_audited;  // every report produced here, checked by criterion 6

void audit(const std::vector<SettlementReport>& reports) {
  g_audited.insert(g_audited.end(), reports.begin(), reports.end());
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int digits = 3) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

std::string sci(double v) {
  std::ostringstream s;
  s.setf(std::ios::scientific);
  s.precision(2);
  s << v;
  return s.str();
}

double soft(double a, double t) { return std::copysign(std::max(std::abs(a) - t, 0.0), a); }

// ---- 1 -------------------------------------------------------------------

Outcome knapsack_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  int agree = 0;
  const int N = 1000;
  for (int i = 0; i < N; ++i) {
    const int n = std::uniform_int_distribution<int>(1, 20)(rng);
    KnapsackInstance k;
    k.capacity = std::uniform_int_distribution<std::int64_t>(0, 200)(rng);
    for (int j = 0; j < n; ++j) {
      k.weights.push_back(std::uniform_int_distribution<std::int64_t>(0, 50)(rng));
      k.values.push_back(std::uniform_int_distribution<int>(0, 100)(rng));
    }
    const auto pick = knapsack(k);
    const bool fits = allocation_weight(k, pick) <= k.capacity;
    // Gray-code walk over every subset
    std::int64_t w = 0;
    double v = 0.0, best = 0.0;
    std::uint32_t prev = 0;
    for (std::uint32_t m = 1; m < (1u << n); ++m) {
      const std::uint32_t gray = m ^ (m >> 1), flip = gray ^ prev;
      const int bit = __builtin_ctz(flip);
      const double sign = (gray & flip) ? 1.0 : -1.0;
      w += static_cast<std::int64_t>(sign) * k.weights[static_cast<std::size_t>(bit)];
      v += sign * k.values[static_cast<std::size_t>(bit)];
      prev = gray;
      if (w <= k.capacity) best = std::max(best, v);
    }
    if (fits && allocation_value(k, pick) == best) ++agree;
  }
  const double secs = seconds_since(t0);
  return {agree == N && secs < 10.0,
          std::to_string(agree) + "/" + std::to_string(N) + " instances equal brute force, " + fmt(secs, 2) + " s"};
}

// ---- 2 -------------------------------------------------------------------

Outcome prox_closed_form() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(202);
  std::normal_distribution<double> nd;
  const int N = 500, res = 100;
  int agree = 0;
  double worst = 0.0;
  for (int i = 0; i < N; ++i) {
    const int G = std::uniform_int_distribution<int>(1, 12)(rng);
    const int M = std::uniform_int_distribution<int>(1, 6)(rng);
    const double lambda = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    std::vector<GroupInfo> groups;
    double total = 0.0;
    for (int g = 0; g < G; ++g) {
      GroupInfo gi;
      gi.group_id = g;
      gi.owner_agent = g + 1;
      gi.price = std::uniform_int_distribution<int>(0, 5)(rng) == 0
                     ? 0.0
                     : std::uniform_int_distribution<int>(1, 1000)(rng) / 100.0;
      gi.begin = g * M;
      gi.end = (g + 1) * M;
      total += gi.price;
      groups.push_back(gi);
    }
    const double budget = std::uniform_real_distribution<double>(0.0, total)(rng);
    Eigen::VectorXd a(G * M);
    for (auto& x : a) x = 1.5 * nd(rng);

    const auto r = prox_knapsack(a, lambda, groups, budget, res);
    const double got = prox_objective(r.theta, a, lambda);
    std::int64_t used = 0;
    for (const auto& g : groups)
      if (r.theta.segment(g.begin, g.size()).cwiseAbs().maxCoeff() > 0.0) used += price_weight(g.price, res);
    const bool feasible = used <= budget_capacity(budget, res);

    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t m = 0; m < (1u << G); ++m) {
      std::int64_t cost = 0;
      for (int g = 0; g < G; ++g)
        if (m >> g & 1u) cost += price_weight(groups[static_cast<std::size_t>(g)].price, res);
      if (cost > budget_capacity(budget, res)) continue;
      Eigen::VectorXd t = Eigen::VectorXd::Zero(G * M);
      for (int g = 0; g < G; ++g)
        if (m >> g & 1u)
          for (int c = g * M; c < (g + 1) * M; ++c) t(c) = soft(a(c), lambda);
      best = std::min(best, 0.5 * (t - a).squaredNorm() + lambda * t.lpNorm<1>());
    }
    worst = std::max(worst, std::abs(got - best));
    if (feasible && std::abs(got - best) <= 1e-9) ++agree;
  }
  const double secs = seconds_since(t0);
  return {agree == N && secs < 60.0, std::to_string(agree) + "/" + std::to_string(N) + " within 1e-9 (max gap " +
                                         sci(worst) + "), " + fmt(secs, 2) + " s"};
}

// ---- 3 -------------------------------------------------------------------

Outcome unconstrained_limit() {
  std::mt19937_64 rng(303);
  std::normal_distribution<double> nd;
  int agree = 0;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const int T = std::uniform_int_distribution<int>(80, 200)(rng);
    const int F = std::uniform_int_distribution<int>(2, 6)(rng);
    Eigen::MatrixXd X(T, F);
    for (auto& x : X.reshaped()) x = nd(rng);
    Eigen::VectorXd y = Eigen::VectorXd::Constant(T, 0.5);
    for (int f = 0; f < F; ++f) y += (0.5 + f % 3) * X.col(f).array().sin().matrix();
    for (auto& v : y) v += 0.2 * nd(rng);
    std::vector<FeatureInfo> feats;
    double total = 0.0;
    for (int f = 0; f < F; ++f) {
      const double p = f == 0 ? 0.0 : 1.0 + f;
      feats.push_back({f + 1, "x" + std::to_string(f), p, f == 0});
      total += p;
    }
    const auto d = fit_transform(X, feats, {3, 4, KnotRule::quantile});

    SolverConfig cfg;
    cfg.lambda = std::uniform_real_distribution<double>(0.005, 0.1)(rng);
    cfg.budget = total + 1.0;
    const auto fit = fit_budget_constrained(d, y, cfg);

    // plain proximal gradient on the same design, same step and iterations
    const auto& Z = d.matrix;
    const double C = step_constant(Z, LossKind::squared);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(Z.cols());
    for (int k = 0; k < fit.iterations; ++k) {
      const double b = (y - Z * theta).mean();
      const Eigen::VectorXd grad = -Z.transpose() * (y - Z * theta - Eigen::VectorXd::Constant(T, b)) / T;
      const Eigen::VectorXd step = theta - grad / C;
      for (Eigen::Index j = 0; j < theta.size(); ++j) theta(j) = soft(step(j), cfg.lambda / C);
    }
    const double diff = (theta - fit.theta.values).cwiseAbs().maxCoeff();
    worst = std::max(worst, diff);
    if (diff <= 1e-6) ++agree;
  }
  return {agree == 20, std::to_string(agree) + "/20 within 1e-6 (max diff " + sci(worst) + ")"};
}

// ---- 4, 5 ----------------------------------------------------------------

std::set<int> paid_sellers(const SettlementReport& r) {
  std::set<int> s;
  for (const auto& x : r.revenues)
    if (x.amount > 0.0) s.insert(x.seller);
  return s;
}

SettlementReport case_session(const std::string& name, std::uint64_t seed) {
  auto c = preset(name);
  apply_seed(c, seed);
  auto data = synthesize(c.data.synthetic, c.data.rows);
  auto reps = run_sessions(data.frame, c.session, {});
  audit(reps);
  return reps.front();
}

Outcome case1() {
  // eight relevant sellers; 37 (price 11) has the cheaper copy 74, and 73
  // copies buyer-owned feature 3
  const std::set<int> relevant{12, 21, 31, 37, 48, 51, 63, 90, 74};
  int ok = 0;
  std::string sets;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto rep = case_session("case1-linear", seed);
    const auto paid = paid_sellers(rep);
    const bool all_relevant = std::all_of(paid.begin(), paid.end(), [&](int s) { return relevant.count(s) > 0; });
    const bool cheaper = paid.count(37) == 0 && paid.count(73) == 0;
    if (paid.size() == 5 && all_relevant && cheaper) ++ok;
    sets += " " + std::to_string(paid.size());
  }
  return {ok >= 9, std::to_string(ok) + "/10 seeds allocate exactly 5 relevant groups with the cheaper copies (sizes:" +
                       sets + ")"};
}

Outcome case2() {
  const std::set<int> expected{12, 21, 31, 48, 51, 63, 74, 90};
  int ok = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto rep = case_session("case2-linear", seed);
    bool good = paid_sellers(rep) == expected;
    for (const auto& r : rep.revenues) {
      if (expected.count(r.seller) && r.amount != 10.0) good = false;
      if (r.seller == 37 && r.amount != 0.0) good = false;
    }
    if (good) ++ok;
  }
  return {ok >= 9, std::to_string(ok) + "/10 seeds allocate all eight relevant groups at 10.00 with seller 37 at 0"};
}

// ---- 6 -------------------------------------------------------------------

MarketFrame small_cross_frame(std::uint64_t seed, int sellers, int T) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd x(T, sellers + 1);
  for (auto& v : x.reshaped()) v = nd(rng);
  Eigen::VectorXd y = 0.4 * x.col(0);
  for (int j = 1; j <= sellers; ++j) y += (j % 2 ? 1.0 : 0.3) * x.col(j).array().tanh().matrix();
  for (auto& v : y) v += 0.3 * nd(rng);
  std::vector<AgentSchema> agents;
  std::vector<AgentSeries> series(static_cast<std::size_t>(sellers + 1));
  std::vector<Timestamp> ts;
  for (int t = 0; t < T; ++t) ts.push_back(make_timestamp(2013, 1, 1) + std::chrono::hours(t));
  for (int j = 0; j <= sellers; ++j) {
    agents.push_back({j + 1, 1, {"x"}, 1.0});
    series[static_cast<std::size_t>(j)].exogenous = x.col(j);
  }
  series[0].target = y;
  return MarketFrame(ts, agents, series, false);
}

SessionConfig small_cross_config(double vf_slope) {
  SessionConfig c;
  c.horizon = 0;
  c.buyers = {1};
  c.default_price = 2.0;
  c.default_value_function = ValueFunction::linear(vf_slope);
  c.model.spline = {2, 3, KnotRule::quantile};
  c.solver.lambda = 0.02;
  return c;
}

Outcome budget_balance() {
  // sessions of its own on top of whatever the other criteria produced
  audit({case_session("case1-nonlinear", 1)});
  {
    auto c = preset("zones-vf2");
    c.data.zones.months = 2;
    c.session.stationarity = Stationarity::assume_nonstationary;
    audit(run_sessions(synthesize_zones(c.data.zones), c.session, {5, true}));
  }
  for (std::uint64_t s = 1; s <= 5; ++s) audit({run_session(small_cross_frame(s, 5, 300), small_cross_config(0.5))});

  std::size_t violations = 0, checked = 0, no_sale = 0;
  for (const auto& r : g_audited) {
    ++checked;
    double sum = 0.0;
    for (const auto& s : r.revenues) {
      sum += s.amount;
      if (s.amount < 0.0) ++violations;
    }
    if (r.payment != sum) ++violations;
    for (const auto& h : r.horizons) {
      double hs = 0.0;
      for (const auto& s : h.revenues) hs += s.amount;
      if (h.payment != hs) ++violations;
    }
    if (r.payment == 0.0) {
      ++no_sale;
      for (bool d : r.delivered)
        if (d) ++violations;
    }
  }
  return {violations == 0 && checked > 0, std::to_string(checked) + " reports (" + std::to_string(no_sale) +
                                              " without payment), " + std::to_string(violations) + " violations"};
}

// ---- 7 -------------------------------------------------------------------

Outcome gain_formula() {
  bool ok = gain(10.0, 12.0) == 0.0 && gain(10.0, 9.0) == 10.0 && gain(10.0, 10.0) == 0.0;
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> u(0.01, 10.0);
  int good = 0;
  for (int i = 0; i < 1000; ++i) {
    const double l = u(rng), m = u(rng);
    const double g = gain(l, m);
    const double expect = std::max(0.0, 100.0 * (l - m) / l);
    if (std::abs(g - expect) <= 1e-12 && g >= 0.0 && g <= 100.0) ++good;
  }
  bool domain = false;
  try {
    gain(0.0, 1.0);
  } catch (const Error&) {
    domain = true;
  }
  return {ok && good == 1000 && domain,
          "(10,12)->" + fmt(gain(10.0, 12.0), 1) + ", (10,9)->" + fmt(gain(10.0, 9.0), 1) + ", " +
              std::to_string(good) + "/1000 random pairs match, zero local loss rejected"};
}

// ---- 8 -------------------------------------------------------------------

Outcome price_mechanism() {
  std::vector<double> bids;
  for (int b = 0; b <= 60; ++b) bids.push_back(b);

  // crossing: concave gains, linear VF through the gain at 31
  std::vector<double> raw;
  for (double b : bids) raw.push_back(100.0 * (1.0 - std::exp(-b / 30.0)));
  const auto p1 = set_price(make_table(bids, raw), ValueFunction::linear(31.01 / raw[31]));

  // feasible below 10 and from 40 on; the larger gain sits at 40
  std::vector<double> raw2;
  for (double b : bids) raw2.push_back(b <= 10 ? b : (b < 40 ? 10.0 : 52.0));
  const auto p2 = set_price(make_table(bids, raw2), ValueFunction::linear(1.0));

  // nowhere feasible: the grid starts at 1 and the VF is worth at most a
  // tenth of the gain
  const std::vector<double> bids3(bids.begin() + 1, bids.end());
  const std::vector<double> raw3(raw.begin() + 1, raw.end());
  const auto p3 = set_price(make_table(bids3, raw3), ValueFunction::linear(0.1));

  const bool ok = p1.sale && p1.bid == 31.0 && p2.sale && p2.bid == 40.0 && p2.gain == 52.0 && !p3.sale &&
                  p3.bid == 0.0;
  return {ok, "crossing -> " + fmt(p1.bid, 0) + ", two regions -> " + fmt(p2.bid, 0) + " (gain " + fmt(p2.gain, 0) +
                  "), nowhere -> " + (p3.sale ? "sale" : "no-sale")};
}

// ---- 9 -------------------------------------------------------------------

Outcome logistic_gradient() {
  std::mt19937_64 rng(909);
  std::normal_distribution<double> nd;
  int ok = 0;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int T = std::uniform_int_distribution<int>(5, 30)(rng);
    const int P = std::uniform_int_distribution<int>(1, 6)(rng);
    Eigen::MatrixXd Z(T, P);
    for (auto& v : Z.reshaped()) v = nd(rng);
    Eigen::VectorXd y(T), theta(P);
    for (auto& v : y) v = nd(rng) > 0 ? 1.0 : -1.0;
    for (auto& v : theta) v = nd(rng);
    const double b = nd(rng), C = 1.0;
    const Eigen::VectorXd analytic = C * (theta - gradient_step_vector(theta, b, Z, y, LossKind::logistic, C));
    Eigen::VectorXd numeric(P);
    const double h = 1e-6;
    for (int j = 0; j < P; ++j) {
      Eigen::VectorXd up = theta, dn = theta;
      up(j) += h;
      dn(j) -= h;
      numeric(j) = (loss_value(up, b, Z, y, LossKind::logistic) - loss_value(dn, b, Z, y, LossKind::logistic)) / (2 * h);
    }
    const double rel = (analytic - numeric).norm() / std::max(numeric.norm(), 1e-12);
    worst = std::max(worst, rel);
    if (rel <= 1e-5) ++ok;
  }
  return {ok == 100, std::to_string(ok) + "/100 within 1e-5 relative (max " + sci(worst) + ")"};
}

// ---- 10 ------------------------------------------------------------------

double seller_revenue(const SettlementReport& r, int seller) {
  for (const auto& s : r.revenues)
    if (s.seller == seller) return s.amount;
  return 0.0;
}

Outcome truthfulness() {
  const auto t0 = std::chrono::steady_clock::now();
  const int seller = 12, N = 50;
  std::vector<double> truth, noised;
  for (int s = 1; s <= N; ++s) {
    auto c = preset("case1-linear");
    apply_seed(c, static_cast<std::uint64_t>(s));
    auto data = synthesize(c.data.synthetic, c.data.rows);
    const auto honest = run_session(data.frame, c.session);

    const auto& x = data.frame.series_of(seller).exogenous;
    const double mean = x.col(0).mean();
    const double sd = std::sqrt((x.col(0).array() - mean).square().sum() / static_cast<double>(x.rows() - 1));
    auto rng = SeedTree(static_cast<std::uint64_t>(s)).child("misreport").engine();
    std::normal_distribution<double> nd(0.0, 0.5 * sd);
    Eigen::MatrixXd noisy = x;
    for (Eigen::Index t = 0; t < noisy.rows(); ++t) noisy(t, 0) += nd(rng);
    const auto dishonest = run_session(data.frame.with_exogenous(seller, noisy), c.session);
    audit({honest, dishonest});
    truth.push_back(seller_revenue(honest, seller));
    noised.push_back(seller_revenue(dishonest, seller));
  }
  // H1: noised revenue exceeds true revenue
  std::vector<double> d;
  for (int i = 0; i < N; ++i) d.push_back(noised[static_cast<std::size_t>(i)] - truth[static_cast<std::size_t>(i)]);
  double md = 0.0;
  for (double v : d) md += v;
  md /= N;
  double var = 0.0;
  for (double v : d) var += (v - md) * (v - md);
  var /= (N - 1);
  double p = md > 0.0 ? 0.0 : 1.0;
  if (var > 0.0) {
    const double t = md / std::sqrt(var / N);
    p = boost::math::cdf(boost::math::complement(boost::math::students_t(N - 1), t));
  }
  double mt = 0.0, mn = 0.0;
  for (int i = 0; i < N; ++i) {
    mt += truth[static_cast<std::size_t>(i)] / N;
    mn += noised[static_cast<std::size_t>(i)] / N;
  }
  const double secs = seconds_since(t0);
  return {p >= 0.05 && secs < 300.0, "seller " + std::to_string(seller) + " mean revenue true " + fmt(mt, 2) +
                                         " vs noised " + fmt(mn, 2) + ", one-sided p = " + fmt(p, 4) + ", " +
                                         fmt(secs, 1) + " s"};
}

// ---- 11 ------------------------------------------------------------------

Outcome wind_benefit() {
  const auto t0 = std::chrono::steady_clock::now();
  auto c = preset("zones");
  const auto frame = synthesize_zones(c.data.zones);
  const auto reps = run_sessions(frame, c.session, c.run);
  audit(reps);
  const auto cmp = compare(forecast_rows(reps));
  std::string zones;
  for (const auto& r : cmp.rows)
    if (r.horizon < 0) zones += " " + std::to_string(r.zone) + ":" + fmt(r.improvement, 1) + "%";
  const double secs = seconds_since(t0);
  return {cmp.mean_improvement > 5.0 && secs < 600.0,
          "mean improvement " + fmt(cmp.mean_improvement, 2) + "% over " + std::to_string(c.run.sessions) +
              " sessions (zones" + zones + "), " + fmt(secs, 1) + " s"};
}

// ---- 12 ------------------------------------------------------------------

Outcome budget_monotonicity() {
  int ok = 0, raw_dips = 0;
  for (std::uint64_t s = 1; s <= 20; ++s) {
    auto c = small_cross_config(1.0);
    c.default_price = 1.0 + static_cast<double>(s % 3);
    const auto rep = run_session(small_cross_frame(100 + s, 4 + static_cast<int>(s % 4), 250), c);
    audit({rep});
    bool good = !rep.tables.empty();
    for (const auto& t : rep.tables)
      for (std::size_t i = 1; i < t.bids.size(); ++i) {
        if (t.gains[i] < t.gains[i - 1] - 1e-6 || t.bids[i] <= t.bids[i - 1]) good = false;
        if (t.raw_gains[i] < t.raw_gains[i - 1] - 1e-6) ++raw_dips;
      }
    if (good) ++ok;
  }
  return {ok == 20, std::to_string(ok) + "/20 tables non-decreasing (" + std::to_string(raw_dips) +
                        " dips in per-bid raw gains absorbed by the envelope)"};
}

// ---- 13 ------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// artifact list of a manifest: everything after "artifacts", which holds
// no timings
std::string manifest_artifacts(const fs::path& p) {
  const auto text = slurp(p);
  const auto a = text.find("\"artifacts\"");
  const auto w = text.find("\"warnings\"");
  return a == std::string::npos ? std::string() : text.substr(a, w - a);
}

Outcome cli_determinism(const std::string& cli) {
  const auto dir = fs::temp_directory_path() / ("fcmarket_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  };
  const auto small_case = write("case.json", R"({"preset": "case1-linear", "data": {"synthetic": {"rows": 400}},
    "tune": {"grid": {"degrees": [1, 2], "knots": [3], "lambdas": [0.01, 0.1]}}})");
  const auto small_zones = write("zones.json", R"({"preset": "zones", "data": {"zones": {"months": 2}},
    "run": {"sessions": 3}})");
  struct Run {
    std::string command, args;
  };
  const std::vector<Run> runs{{"synth", "--preset case1-linear"},
                              {"run-session", "--config " + small_zones},
                              {"run-session", "--config " + small_case},
                              {"tune", "--config " + small_case},
                              {"benchmark", "--config " + small_case},
                              {"benchmark", "--config " + small_zones + " --re-estimate"}};
  int identical = 0;
  std::size_t files = 0;
  std::string failures;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::vector<fs::path> outs;
    bool ran = true;
    for (int rep = 0; rep < 2; ++rep) {
      const auto out = dir / ("run" + std::to_string(i) + "_" + std::to_string(rep));
      const std::string cmd = "\"" + cli + "\" " + runs[i].command + " " + runs[i].args + " --seed 7 --out \"" +
                              out.string() + "\" > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) ran = false;
      outs.push_back(out);
    }
    bool same = ran && fs::exists(outs[0] / "manifest.json");
    if (same) {
      for (const auto& e : fs::recursive_directory_iterator(outs[0])) {
        if (!e.is_regular_file()) continue;
        const auto rel = fs::relative(e.path(), outs[0]);
        if (rel == "manifest.json") {
          same = same && manifest_artifacts(e.path()) == manifest_artifacts(outs[1] / rel);
          continue;
        }
        ++files;
        if (!fs::exists(outs[1] / rel) || slurp(e.path()) != slurp(outs[1] / rel)) same = false;
      }
    }
    if (same)
      ++identical;
    else
      failures += " " + runs[i].command;
  }
  fs::remove_all(dir);
  const bool ok = identical == static_cast<int>(runs.size());
  return {ok, std::to_string(identical) + "/" + std::to_string(runs.size()) + " command reruns byte-identical (" +
                  std::to_string(files) + " files)" + (ok ? "" : ", differing:" + failures)};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  std::string cli = FCMARKET_CLI_PATH;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc)
      only.insert(std::atoi(argv[++i]));
    else if (a == "--cli" && i + 1 < argc)
      cli = argv[++i];
    else {
      std::cerr << "usage: fcmarket_acceptance [--only N]... [--cli PATH]\n";
      return 2;
    }
  }

  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  // budget balance runs after the criteria whose sessions it audits
  const std::vector<Criterion> all{
      {1, "knapsack oracle equivalence", knapsack_oracle},
      {2, "prox closed form vs brute force", prox_closed_form},
      {3, "unconstrained limit", unconstrained_limit},
      {4, "synthetic case #1", case1},
      {5, "synthetic case #2", case2},
      {7, "gain formula and clamp", gain_formula},
      {8, "price mechanism fixtures", price_mechanism},
      {9, "logistic gradient check", logistic_gradient},
      {10, "truthfulness", truthfulness},
      {11, "wind-shaped collaborative benefit", wind_benefit},
      {12, "budget monotonicity", budget_monotonicity},
      {6, "budget balance and individual rationality", budget_balance},
      {13, "CLI determinism", [&] { return cli_determinism(cli); }},
  };

  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
