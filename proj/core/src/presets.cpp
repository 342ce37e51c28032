#include <numeric>

#include "fcmarket/config.hpp"
#include "fcmarket/errors.hpp"

namespace fcmarket {

namespace {

Config basic_case(bool linear, double budget) {
  Config c;
  c.seed = 1;
  c.data.kind = DataKind::synthetic;
  auto& s = c.data.synthetic;
  s.n_features = 100;
  s.buyer_feature_ids.resize(10);
  std::iota(s.buyer_feature_ids.begin(), s.buyer_feature_ids.end(), 1);
  s.active_ids = {3, 7, 12, 21, 31, 37, 48, 51, 63, 90};
  s.redundant_pairs = {{3, 73}, {37, 74}};
  s.link = linear ? Link::linear : Link::exponential;
  c.data.rows = 2000;

  auto& m = c.session;
  m.horizon = 0;
  m.default_price = 10.0;
  m.seller_prices[37] = {11.0};
  m.default_value_function = ValueFunction::constant(budget);
  m.grid.max = budget;
  m.model.spline = {3, 5, KnotRule::quantile};
  m.solver.lambda = 0.1;
  c.tune.bid = budget;
  c.tune.grid.degrees = {1, 3};
  c.tune.grid.knot_counts = {3, 5};
  c.tune.grid.cv = KFoldPolicy{5};
  return c;
}

Config advanced(int features) {
  Config c;
  c.seed = 1;
  auto& s = c.data.synthetic;
  s.n_features = features;
  s.buyer_feature_ids.resize(10);
  std::iota(s.buyer_feature_ids.begin(), s.buyer_feature_ids.end(), 1);
  // 25% model sparsity: every fourth feature is active
  for (int id = 4; id <= features; id += 4) s.active_ids.push_back(id);
  c.data.rows = static_cast<std::size_t>(2 * features);

  auto& m = c.session;
  m.horizon = 0;
  m.default_price = 1.0;
  m.default_value_function = ValueFunction::preset("VF1");
  m.grid.step = 10.0;
  m.grid.max = 100.0;
  m.model.spline = {3, 5, KnotRule::quantile};
  m.solver.lambda = 0.1;
  c.tune.bid = 100.0;
  c.tune.grid.degrees = {1, 3};
  c.tune.grid.knot_counts = {3, 5};
  c.tune.grid.cv = KFoldPolicy{5};
  return c;
}

Config zones(const std::string& vf) {
  Config c;
  c.seed = 1;
  c.data.kind = DataKind::zones;
  c.data.zones.zones = 3;
  c.data.zones.months = 4;

  auto& m = c.session;
  m.horizon = 24;
  m.launch_hour = 0;
  m.lag_count = 6;
  m.default_price = 1.0;
  m.default_value_function = ValueFunction::preset(vf);
  m.k = 10;
  m.model.spline = {3, 5, KnotRule::quantile};
  m.solver.lambda = 0.01;
  c.run.sessions = 30;
  c.tune.grid.degrees = {1, 2, 3};
  c.tune.grid.knot_counts = {3, 5, 8};
  c.tune.grid.cv = KFoldPolicy{4};
  c.benchmark.local = LocalReference::session;
  c.benchmark.lrm = false;
  return c;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"case1-linear", "case1-nonlinear", "case2-linear", "case2-nonlinear", "advanced-100", "advanced-200",
          "advanced-300", "advanced-400",  "advanced-500", "zones-vf1",    "zones-vf2",    "zones-vf3",
          "zones-vf4"};
}

Config preset(const std::string& name) {
  Config c;
  if (name == "case1-linear") c = basic_case(true, 50.0);
  else if (name == "case1-nonlinear") c = basic_case(false, 50.0);
  else if (name == "case2-linear") c = basic_case(true, 100.0);
  else if (name == "case2-nonlinear") c = basic_case(false, 100.0);
  else if (name == "advanced" || name == "advanced-500") c = advanced(500);
  else if (name == "advanced-100") c = advanced(100);
  else if (name == "advanced-200") c = advanced(200);
  else if (name == "advanced-300") c = advanced(300);
  else if (name == "advanced-400") c = advanced(400);
  else if (name == "zones" || name == "zones-vf1") c = zones("VF1");
  else if (name == "zones-vf2") c = zones("VF2");
  else if (name == "zones-vf3") c = zones("VF3");
  else if (name == "zones-vf4") c = zones("VF4");
  else fail(ErrorCode::config, "unknown preset '" + name + "'");
  c.name = name;
  apply_seed(c, c.seed);
  return c;
}

}  // namespace fcmarket
