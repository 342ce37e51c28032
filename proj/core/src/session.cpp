#include "fcmarket/session.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "fcmarket/errors.hpp"
#include "fcmarket/parallel.hpp"

namespace fcmarket {

void SessionConfig::validate() const {
  grid.validate();
  model.validate();
  solver.validate();
  if (tuning) tuning->validate();
  require(k >= 1, ErrorCode::config, "k must be at least 1");
  require(horizon >= 0 && horizon <= 24, ErrorCode::config, "horizon must lie in 0..24");
  require(launch_hour >= 0 && launch_hour <= 23, ErrorCode::config, "launch hour must lie in 0..23");
  require(lag_count >= 0, ErrorCode::config, "lag count must be non-negative");
  require(validation_fraction > 0.0 && validation_fraction < 1.0, ErrorCode::config,
          "validation fraction must lie in (0, 1)");
  require(default_price >= 0.0, ErrorCode::config, "default price must be non-negative");
  for (const auto& [id, prices] : seller_prices)
    for (double s : prices) require(s >= 0.0 && std::isfinite(s), ErrorCode::config, "prices must be non-negative");
  require(jobs >= 1, ErrorCode::config, "jobs must be at least 1");
}

const ValueFunction& SessionConfig::value_function(int buyer) const {
  auto it = value_functions.find(buyer);
  return it == value_functions.end() ? default_value_function : it->second;
}

BuyerTask build_task(const MarketFrame& frame, int buyer, const SessionConfig& config) {
  const auto pos = frame.position_of(buyer);
  require(pos.has_value(), ErrorCode::schema, "unknown buyer agent " + std::to_string(buyer));
  require(frame.series(*pos).has_target(), ErrorCode::schema,
          "buyer agent " + std::to_string(buyer) + " has no target series");
  const bool series_mode = config.horizon > 0;
  const int L = series_mode ? config.lag_count : 0;
  const auto& ts = frame.timestamps();

  BuyerTask task;
  task.buyer = buyer;
  struct Col {
    std::size_t agent;
    bool lag;
    int index;
  };
  std::vector<Col> cols;
  for (std::size_t a = 0; a < frame.agent_count(); ++a) {
    const auto& schema = frame.agent(a);
    const bool local = schema.agent_id == buyer;
    std::vector<double> prices;
    if (auto it = config.seller_prices.find(schema.agent_id); it != config.seller_prices.end()) prices = it->second;
    const int lags = frame.series(a).has_target() ? L : 0;
    require(prices.size() <= static_cast<std::size_t>(schema.n_features + lags), ErrorCode::config,
            "agent " + std::to_string(schema.agent_id) + " has more prices than features");
    auto price_of = [&](std::size_t k) {
      if (local && config.self_price_zero) return 0.0;
      return k < prices.size() ? prices[k] : config.default_price;
    };
    for (int f = 0; f < schema.n_features; ++f) {
      cols.push_back({a, false, f});
      task.features.push_back({schema.agent_id, "a" + std::to_string(schema.agent_id) + "." + schema.feature_names[static_cast<std::size_t>(f)],
                               price_of(static_cast<std::size_t>(f)), local});
    }
    for (int l = 0; l < lags; ++l) {
      cols.push_back({a, true, l});
      task.features.push_back({schema.agent_id, "a" + std::to_string(schema.agent_id) + ".lag" + std::to_string(l),
                               price_of(static_cast<std::size_t>(schema.n_features + l)), local});
    }
  }

  std::vector<std::pair<std::size_t, int>> picked;  // (row, h)
  for (std::size_t t = 0; t < ts.size(); ++t) {
    if (!series_mode) {
      picked.push_back({t, 0});
      continue;
    }
    const int hr = hour_of_day(ts[t]);
    const int h = ((hr - config.launch_hour - 1) % 24 + 24) % 24 + 1;
    if (h > config.horizon) continue;
    if (t < static_cast<std::size_t>(h)) continue;
    const std::size_t t0 = t - static_cast<std::size_t>(h);
    if (ts[t] - ts[t0] != std::chrono::hours(h)) continue;
    if (L > 0 && t0 < static_cast<std::size_t>(L - 1)) continue;
    if (L > 0 && ts[t0] - ts[t0 - static_cast<std::size_t>(L - 1)] != std::chrono::hours(L - 1)) continue;
    picked.push_back({t, h});
  }

  const auto n = static_cast<Eigen::Index>(picked.size());
  task.X.resize(n, static_cast<Eigen::Index>(cols.size()));
  task.y.resize(n);
  const auto& target = frame.series(*pos).target;
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto [t, h] = picked[static_cast<std::size_t>(r)];
    const auto ti = static_cast<Eigen::Index>(t);
    task.rows.push_back(t);
    task.horizon.push_back(h);
    task.times.push_back(ts[t]);
    task.y(r) = target(ti);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto& col = cols[c];
      const auto& s = frame.series(col.agent);
      task.X(r, static_cast<Eigen::Index>(c)) =
          col.lag ? s.target(ti - h - col.index) : s.exogenous(ti, col.index);
    }
  }
  return task;
}

bool looks_stationary(const Eigen::VectorXd& y) {
  const Eigen::Index n = y.size();
  if (n < 4) return true;
  const Eigen::Index half = n / 2;
  auto stats = [](const Eigen::VectorXd& v) {
    const double m = v.mean();
    return std::pair{m, (v.array() - m).square().mean()};
  };
  const auto [m1, v1] = stats(y.head(half));
  const auto [m2, v2] = stats(y.tail(n - half));
  auto close = [](double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 || std::abs(a - b) <= 0.1 * scale;
  };
  return close(m1, m2) && close(v1, v2);
}

namespace {

struct BidFit {
  std::shared_ptr<const PreparedDesign> design;
  CoefficientSet theta;
};

// Things only re-estimation sessions recompute.
struct Estimate {
  bool stationary = true;
  std::vector<std::size_t> validation;  // task positions
  std::shared_ptr<const PreparedDesign> local_design;
  CoefficientSet local_theta;
  std::vector<double> bids;
  std::vector<BidFit> fits;
  Eigen::VectorXd yval;
  Eigen::VectorXd local_val;
  std::vector<Eigen::VectorXd> market_val;
  Eigen::MatrixXd distance_rows;  // validation rows in the reference design
  std::vector<int> val_horizon;
  std::vector<std::string> warnings;
  Timestamp cutoff{};
};

double total_seller_price(const std::vector<FeatureInfo>& features) {
  double total = 0.0;
  for (const auto& f : features)
    if (!f.local) total += f.price;
  return total;
}

Estimate estimate(const BuyerTask& task, const SessionConfig& config, std::size_t frame_cutoff, bool clip) {
  Estimate est;
  std::vector<std::size_t> eligible;
  for (std::size_t p = 0; p < task.rows.size(); ++p)
    if (task.rows[p] <= frame_cutoff) eligible.push_back(p);
  require(eligible.size() >= 4, ErrorCode::estimator, "too few historical rows before the launch");
  std::vector<Timestamp> etimes;
  for (auto p : eligible) etimes.push_back(task.times[p]);
  const auto fold = split(etimes, HoldoutPolicy{config.validation_fraction}).front();
  std::vector<std::size_t> train;
  for (auto i : fold.train) train.push_back(eligible[i]);
  for (auto i : fold.validation) est.validation.push_back(eligible[i]);
  require(!train.empty(), ErrorCode::estimator, "empty training set");
  require(!est.validation.empty(), ErrorCode::estimator, "empty validation set");
  est.cutoff = task.times[eligible.back()];

  const Eigen::MatrixXd Xtr = take_rows(task.X, train), Xval = take_rows(task.X, est.validation);
  const Eigen::VectorXd ytr = take(task.y, train);
  est.yval = take(task.y, est.validation);
  require((ytr.array() != ytr(0)).any(), ErrorCode::degenerate,
          "buyer " + std::to_string(task.buyer) + " has a constant target on the training window");

  switch (config.stationarity) {
    case Stationarity::assume_stationary:
      est.stationary = true;
      break;
    case Stationarity::assume_nonstationary:
      est.stationary = false;
      break;
    case Stationarity::heuristic:
      est.stationary = looks_stationary(ytr);
      break;
  }
  if (config.horizon == 0) est.stationary = true;

  const LossKind loss = config.solver.loss;
  auto base = std::make_shared<const PreparedDesign>(PreparedDesign::fit(Xtr, ytr, task.features, config.model));

  // local model: same pipeline restricted to the buyer's own groups
  est.local_design = std::make_shared<const PreparedDesign>(base->restricted([](const GroupInfo& g) { return g.local; }));
  {
    SolverConfig cfg = config.solver;
    cfg.budget = 0.0;
    for (const auto& g : est.local_design->train().groups) cfg.budget += g.price;
    BudgetLassoProblem local(est.local_design->train(), ytr, loss);
    auto fit = local.fit(cfg);
    if (!fit.converged) est.warnings.push_back("local model did not converge");
    est.local_theta = fit.theta;
  }

  est.bids = config.grid.values(total_seller_price(task.features));
  int unconverged = 0;
  if (!config.tuning) {
    // the chain starts from the local model: own coefficients, zero elsewhere
    BudgetLassoProblem problem(base->train(), ytr, loss);
    auto chain = fit_bid_chain(problem, est.bids, config.solver, &est.local_theta);
    for (auto& m : chain) {
      if (!m.converged) ++unconverged;
      // buying nothing is the local model
      const auto& groups = base->train().groups;
      const bool buys = std::any_of(groups.begin(), groups.end(),
                                    [&](const GroupInfo& g) { return !g.local && m.theta.group_used(g); });
      est.fits.push_back({base, buys ? std::move(m.theta) : est.local_theta});
    }
  } else {
    TuningTask tt{Xtr, ytr, task.features, {}};
    for (auto p : train) tt.times.push_back(task.times[p]);
    std::map<std::pair<int, int>, std::shared_ptr<const PreparedDesign>> designs;
    auto design_for = [&](int D, int K) {
      auto& d = designs[{D, K}];
      if (!d) {
        ModelSpec spec = config.model;
        spec.use_splines = true;
        spec.spline.degree = D;
        spec.spline.knots = K;
        spec.alpha = config.tuning->alpha;
        d = std::make_shared<const PreparedDesign>(PreparedDesign::fit(Xtr, ytr, task.features, spec));
      }
      return d;
    };
    std::optional<TuningResult> shared;
    if (!config.tune_per_bid) shared = tune(tt, est.bids.back(), *config.tuning, config.solver, 1);
    for (double b : est.bids) {
      const TuningResult tr = shared ? *shared : tune(tt, b, *config.tuning, config.solver, 1);
      for (const auto& w : tr.warnings) est.warnings.push_back(w);
      auto d = design_for(tr.degree, tr.knots);
      SolverConfig cfg = config.solver;
      cfg.lambda = tr.lambda;
      cfg.budget = b;
      auto fit = BudgetLassoProblem(d->train(), ytr, loss).fit(cfg);
      if (!fit.converged) ++unconverged;
      est.fits.push_back({d, std::move(fit.theta)});
    }
  }
  if (unconverged > 0)
    est.warnings.push_back(std::to_string(unconverged) + " bid model(s) stopped at max_iter");

  est.local_val = est.local_design->predict(Xval, est.local_theta, loss, clip);
  std::map<const PreparedDesign*, Eigen::MatrixXd> zval;
  for (const auto& f : est.fits) {
    auto& z = zval[f.design.get()];
    if (z.size() == 0) z = f.design->transform(Xval).matrix;
    est.market_val.push_back(predict(z, f.theta, loss, clip));
  }
  est.distance_rows = zval[est.fits.back().design.get()];
  for (auto p : est.validation) est.val_horizon.push_back(task.horizon[p]);
  return est;
}

double safe_gain(double local, double market) { return local > 0.0 ? gain(local, market) : 0.0; }

BidGainTable table_on(const Estimate& est, const std::vector<Eigen::Index>& rows, int horizon) {
  std::vector<Eigen::Index> idx = rows;
  Eigen::VectorXd y(static_cast<Eigen::Index>(idx.size())), l(y.size());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    y(static_cast<Eigen::Index>(r)) = est.yval(idx[r]);
    l(static_cast<Eigen::Index>(r)) = est.local_val(idx[r]);
  }
  const double local = rmse(y, l);
  std::vector<double> raw;
  for (const auto& mv : est.market_val) {
    Eigen::VectorXd m(y.size());
    for (std::size_t r = 0; r < idx.size(); ++r) m(static_cast<Eigen::Index>(r)) = mv(idx[r]);
    raw.push_back(safe_gain(local, rmse(y, m)));
  }
  return make_table(est.bids, std::move(raw), horizon);
}

std::vector<Eigen::Index> nearest(const Eigen::MatrixXd& pool, const Eigen::RowVectorXd& query, int k) {
  std::vector<std::pair<double, Eigen::Index>> d;
  for (Eigen::Index r = 0; r < pool.rows(); ++r) d.push_back({(pool.row(r) - query).squaredNorm(), r});
  const auto take_n = std::min<std::size_t>(static_cast<std::size_t>(k), d.size());
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(take_n), d.end());
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < take_n; ++i) out.push_back(d[i].second);
  return out;
}

void add_revenues(std::vector<SellerRevenue>& into, const std::vector<SellerRevenue>& r) {
  for (const auto& x : r) {
    auto it = std::find_if(into.begin(), into.end(), [&](const SellerRevenue& y) { return y.seller == x.seller; });
    if (it == into.end()) {
      into.push_back(x);
    } else {
      it->amount += x.amount;
      it->groups.insert(it->groups.end(), x.groups.begin(), x.groups.end());
    }
  }
  std::sort(into.begin(), into.end(), [](const auto& a, const auto& b) { return a.seller < b.seller; });
}

SettlementReport settle(const BuyerTask& task, const Estimate& est, const SessionConfig& config,
                        const std::vector<std::size_t>& delivery, bool clip) {
  SettlementReport rep;
  rep.buyer = task.buyer;
  rep.stationary = est.stationary;
  rep.warnings = est.warnings;
  const LossKind loss = config.solver.loss;
  const auto& vf = config.value_function(task.buyer);

  const Eigen::MatrixXd Xd = take_rows(task.X, delivery);
  rep.local_forecasts.resize(delivery.size());
  {
    const Eigen::VectorXd lf = est.local_design->predict(Xd, est.local_theta, loss, clip);
    for (std::size_t r = 0; r < delivery.size(); ++r) rep.local_forecasts[r] = lf(static_cast<Eigen::Index>(r));
  }
  for (auto p : delivery) {
    rep.delivery_times.push_back(task.times[p]);
    rep.delivery_horizons.push_back(task.horizon[p]);
    rep.actuals.push_back(task.y(static_cast<Eigen::Index>(p)));
  }

  // market forecasts of the delivery rows from the model behind table row
  std::map<std::size_t, Eigen::VectorXd> cache;
  auto market_rows = [&](std::size_t model) -> const Eigen::VectorXd& {
    auto& v = cache[model];
    if (v.size() == 0) v = est.fits[model].design->predict(Xd, est.fits[model].theta, loss, clip);
    return v;
  };
  auto groups_of = [&](std::size_t model) -> const std::vector<GroupInfo>& {
    return est.fits[model].design->train().groups;
  };

  rep.forecasts = rep.local_forecasts;
  rep.delivered.assign(delivery.size(), false);

  const GainEstimator estimator = config.estimator == GainEstimator::automatic
                                      ? (est.stationary ? GainEstimator::validation_split : GainEstimator::k_similar)
                                      : config.estimator;

  if (est.stationary) {
    std::vector<Eigen::Index> all(static_cast<std::size_t>(est.yval.size()));
    std::iota(all.begin(), all.end(), Eigen::Index{0});
    auto table = table_on(est, all, 0);
    if (estimator == GainEstimator::k_similar && config.horizon == 0) {
      rep.warnings.push_back("k-similar estimation needs a forecast horizon; used the validation split");
    } else if (estimator == GainEstimator::k_similar) {
      // one table for the whole day from the neighbours of every delivery row
      const auto& ref = *est.fits.back().design;
      const Eigen::MatrixXd q = ref.transform(Xd).matrix;
      std::vector<Eigen::Index> rows;
      for (Eigen::Index r = 0; r < q.rows(); ++r)
        for (auto i : nearest(est.distance_rows, q.row(r), config.k)) rows.push_back(i);
      table = table_on(est, rows, 0);
    }
    const auto price = set_price(table, vf);
    const std::size_t model = table.model_ref[price.row];
    CoefficientSet theta = price.sale ? est.fits[model].theta : est.fits.front().design->zero();
    rep.revenues = revenues(theta, price.sale ? groups_of(model) : est.fits.front().design->train().groups);
    rep.chosen_bids.push_back(price.bid);
    rep.estimated_gains.push_back(price.gain);
    if (price.sale && total_payment(rep.revenues) > 0.0) {
      const auto& mf = market_rows(model);
      for (std::size_t r = 0; r < delivery.size(); ++r) {
        rep.forecasts[r] = mf(static_cast<Eigen::Index>(r));
        rep.delivered[r] = true;
      }
    }
    rep.tables.push_back(std::move(table));
  } else {
    const auto& ref = *est.fits.back().design;
    const Eigen::MatrixXd q = ref.transform(Xd).matrix;
    for (int h = 1; h <= config.horizon; ++h) {
      std::vector<std::size_t> members;
      for (std::size_t r = 0; r < delivery.size(); ++r)
        if (rep.delivery_horizons[r] == h) members.push_back(r);
      if (members.empty()) continue;
      std::vector<Eigen::Index> rows;
      if (estimator == GainEstimator::k_similar) {
        for (auto r : members)
          for (auto i : nearest(est.distance_rows, q.row(static_cast<Eigen::Index>(r)), config.k)) rows.push_back(i);
      } else {
        for (std::size_t i = 0; i < est.val_horizon.size(); ++i)
          if (est.val_horizon[i] == h) rows.push_back(static_cast<Eigen::Index>(i));
      }
      require(!rows.empty(), ErrorCode::estimator, "no validation rows for horizon " + std::to_string(h));
      auto table = table_on(est, rows, h);
      HorizonSettlement hs;
      hs.horizon = h;
      hs.price = set_price(table, vf);
      const std::size_t model = table.model_ref[hs.price.row];
      hs.revenues = revenues(hs.price.sale ? est.fits[model].theta : est.fits.front().design->zero(),
                             hs.price.sale ? groups_of(model) : est.fits.front().design->train().groups);
      hs.payment = total_payment(hs.revenues);
      if (hs.price.sale && hs.payment > 0.0) {
        const auto& mf = market_rows(model);
        for (auto r : members) {
          rep.forecasts[r] = mf(static_cast<Eigen::Index>(r));
          rep.delivered[r] = true;
        }
      }
      add_revenues(rep.revenues, hs.revenues);
      rep.chosen_bids.push_back(hs.price.bid);
      rep.estimated_gains.push_back(hs.price.gain);
      rep.horizons.push_back(std::move(hs));
      rep.tables.push_back(std::move(table));
    }
  }
  rep.payment = total_payment(rep.revenues);
  rep.market_delivered = rep.payment > 0.0;

  if (!delivery.empty()) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(delivery.size())), l(y.size()), m(y.size());
    for (std::size_t r = 0; r < delivery.size(); ++r) {
      y(static_cast<Eigen::Index>(r)) = rep.actuals[r];
      l(static_cast<Eigen::Index>(r)) = rep.local_forecasts[r];
      m(static_cast<Eigen::Index>(r)) = rep.forecasts[r];
    }
    const double lr = rmse(y, l);
    if (lr > 0.0) rep.observed_gain = 100.0 * (lr - rmse(y, m)) / lr;
  }
  return rep;
}

SettlementReport rejected(int buyer, const std::string& why) {
  SettlementReport rep;
  rep.buyer = buyer;
  rep.rejected = true;
  rep.diagnostic = why;
  return rep;
}

}  // namespace

std::vector<SettlementReport> run_sessions(const MarketFrame& frame, const SessionConfig& config,
                                           const RunOptions& options) {
  config.validate();
  require(options.sessions >= 1, ErrorCode::config, "at least one session required");
  std::vector<int> buyers = config.buyers;
  if (buyers.empty())
    for (std::size_t a = 0; a < frame.agent_count(); ++a)
      if (frame.series(a).has_target()) buyers.push_back(frame.agent(a).agent_id);
  require(!buyers.empty(), ErrorCode::config, "no buyer has a target series");
  const bool clip = config.clip && frame.normalized() && config.solver.loss == LossKind::squared;
  const auto& ts = frame.timestamps();
  const bool series_mode = config.horizon > 0;

  std::vector<std::size_t> launches;
  if (series_mode) {
    for (std::size_t t = 0; t + static_cast<std::size_t>(config.horizon) < ts.size(); ++t)
      if (hour_of_day(ts[t]) == config.launch_hour) launches.push_back(t);
    require(launches.size() >= static_cast<std::size_t>(options.sessions), ErrorCode::range,
            "frame holds fewer launches than requested sessions");
    launches.erase(launches.begin(), launches.end() - options.sessions);
  } else {
    require(options.sessions == 1, ErrorCode::config, "cross-sectional mode runs a single session");
  }

  std::vector<BuyerTask> tasks;
  for (int b : buyers) tasks.push_back(build_task(frame, b, config));

  const std::size_t S = static_cast<std::size_t>(options.sessions);
  std::vector<std::vector<SettlementReport>> per_buyer(buyers.size());
  parallel_for(buyers.size(), config.jobs, [&](std::size_t bi) {
    const auto& task = tasks[bi];
    std::optional<Estimate> est;
    std::string failure;
    for (std::size_t s = 0; s < S; ++s) {
      SettlementReport rep;
      const std::size_t cutoff = series_mode ? launches[s] : ts.size();
      std::vector<std::size_t> delivery;
      bool estimating = false;
      try {
        if (s == 0 || options.re_estimate) {
          failure.clear();
          estimating = true;
          est = estimate(task, config, cutoff, clip);
          estimating = false;
        }
        if (!failure.empty()) fail(ErrorCode::estimator, failure);
        if (series_mode) {
          for (std::size_t p = 0; p < task.rows.size(); ++p)
            if (task.rows[p] > launches[s] && task.rows[p] <= launches[s] + static_cast<std::size_t>(config.horizon))
              delivery.push_back(p);
        } else {
          delivery = est->validation;
        }
        rep = settle(task, *est, config, delivery, clip);
        rep.launch = series_mode ? ts[launches[s]] : est->cutoff;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::degenerate && e.code() != ErrorCode::filter && e.code() != ErrorCode::estimator)
          throw;
        if (estimating) failure = e.what();
        rep = rejected(task.buyer, e.what());
        if (series_mode) rep.launch = ts[launches[s]];
      }
      rep.session = static_cast<int>(s);
      per_buyer[bi].push_back(std::move(rep));
    }
  });

  std::vector<SettlementReport> out;
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t bi = 0; bi < buyers.size(); ++bi) out.push_back(std::move(per_buyer[bi][s]));
  return out;
}

SettlementReport run_session(const MarketFrame& frame, const SessionConfig& config) {
  auto reports = run_sessions(frame, config, {});
  require(reports.size() == 1, ErrorCode::config, "run_session expects exactly one buyer; use run_sessions");
  return std::move(reports.front());
}

}  // namespace fcmarket
