#include "fcmarket/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fcmarket/errors.hpp"

namespace fcmarket {

using nlohmann::json;

namespace {

// Walks one JSON object and rejects keys nobody asked for.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    require(j.is_object(), ErrorCode::config, where() + " must be an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }
  const json& at(const std::string& key) { return j_.at(key); }
  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  template <class T>
  void get(const std::string& key, T& out) {
    if (!has(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(ErrorCode::config, sub(key) + " has the wrong type");
    }
  }

  void done() const {
    for (const auto& [k, v] : j_.items())
      require(seen_.count(k) > 0, ErrorCode::config, "unknown key " + sub(k));
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class E>
struct Names {
  std::vector<std::pair<E, const char*>> items;

  E parse(const json& j, const std::string& path) const {
    require(j.is_string(), ErrorCode::config, path + " must be a string");
    const auto s = j.get<std::string>();
    for (const auto& [e, n] : items)
      if (s == n) return e;
    std::string all;
    for (const auto& [e, n] : items) all += std::string(all.empty() ? "" : ", ") + n;
    fail(ErrorCode::config, path + ": unknown value '" + s + "' (expected " + all + ")");
  }
  const char* name(E e) const {
    for (const auto& [x, n] : items)
      if (x == e) return n;
    return "?";
  }
};

const Names<Link> link_names{{{Link::linear, "linear"}, {Link::exponential, "exponential"}}};
const Names<KnotRule> knot_names{{{KnotRule::quantile, "quantile"}, {KnotRule::uniform, "uniform"}}};
const Names<LossKind> loss_names{{{LossKind::squared, "squared"}, {LossKind::logistic, "logistic"}}};
const Names<GainEstimator> estimator_names{{{GainEstimator::automatic, "automatic"},
                                            {GainEstimator::validation_split, "validation-split"},
                                            {GainEstimator::k_similar, "k-similar"}}};
const Names<Stationarity> stationarity_names{{{Stationarity::heuristic, "heuristic"},
                                              {Stationarity::assume_stationary, "stationary"},
                                              {Stationarity::assume_nonstationary, "nonstationary"}}};
const Names<DataKind> data_names{{{DataKind::synthetic, "synthetic"}, {DataKind::zones, "zones"}, {DataKind::csv, "csv"}}};
const Names<LocalReference> local_names{{{LocalReference::session, "session"},
                                         {LocalReference::lasso, "lasso"},
                                         {LocalReference::spline_lasso, "spline-lasso"}}};
const Names<BaselineKind> baseline_names{{{BaselineKind::lasso, "lasso"}, {BaselineKind::spline_lasso, "spline-lasso"}}};

template <class E>
void get_enum(Reader& r, const std::string& key, const Names<E>& names, E& out) {
  if (r.has(key)) out = names.parse(r.at(key), r.sub(key));
}

ValueFunction read_vf(const json& j, const std::string& path) {
  if (j.is_string()) {
    try {
      return ValueFunction::preset(j.get<std::string>());
    } catch (const Error& e) {
      fail(ErrorCode::config, path + ": " + e.what());
    }
  }
  if (j.is_number()) return ValueFunction::constant(j.get<double>());
  Reader r(j, path);
  std::string kind;
  r.get("kind", kind);
  double value = 0, slope = 1, num = 0, pole = 0, offset = 0;
  std::vector<std::pair<double, double>> points;
  r.get("value", value);
  r.get("slope", slope);
  r.get("numerator", num);
  r.get("pole", pole);
  r.get("offset", offset);
  r.get("points", points);
  r.done();
  if (kind == "constant") return ValueFunction::constant(value);
  if (kind == "linear") return ValueFunction::linear(slope);
  if (kind == "rational") return ValueFunction::rational(num, pole, offset);
  if (kind == "tabulated") return ValueFunction::tabulated(points);
  fail(ErrorCode::config, path + ".kind must be constant, linear, rational or tabulated");
}

json write_vf(const ValueFunction& vf) {
  const auto& p = vf.params();
  switch (vf.kind()) {
    case ValueFunction::Kind::constant:
      return {{"kind", "constant"}, {"value", p.at(0)}};
    case ValueFunction::Kind::linear:
      return {{"kind", "linear"}, {"slope", p.at(0)}};
    case ValueFunction::Kind::rational:
      return {{"kind", "rational"}, {"numerator", p.at(0)}, {"pole", p.at(1)}, {"offset", p.at(2)}};
    case ValueFunction::Kind::tabulated:
      return {{"kind", "tabulated"}, {"points", vf.points()}};
  }
  return {};
}

SplitPolicy read_split(const json& j, const std::string& path) {
  Reader r(j, path);
  std::string kind;
  r.get("kind", kind);
  SplitPolicy out;
  if (kind == "kfold") {
    KFoldPolicy p;
    r.get("folds", p.folds);
    out = p;
  } else if (kind == "holdout") {
    HoldoutPolicy p;
    r.get("fraction", p.validation_fraction);
    out = p;
  } else if (kind == "sliding") {
    SlidingWindowPolicy p;
    r.get("train_months", p.train_months);
    r.get("test_months", p.test_months);
    out = p;
  } else {
    fail(ErrorCode::config, path + ".kind must be kfold, holdout or sliding");
  }
  r.done();
  return out;
}

json write_split(const SplitPolicy& p) {
  if (auto k = std::get_if<KFoldPolicy>(&p)) return {{"kind", "kfold"}, {"folds", k->folds}};
  if (auto h = std::get_if<HoldoutPolicy>(&p)) return {{"kind", "holdout"}, {"fraction", h->validation_fraction}};
  const auto& s = std::get<SlidingWindowPolicy>(p);
  return {{"kind", "sliding"}, {"train_months", s.train_months}, {"test_months", s.test_months}};
}

void read_grid(const json& j, const std::string& path, TuningGrid& g) {
  Reader r(j, path);
  r.get("degrees", g.degrees);
  r.get("knots", g.knot_counts);
  if (r.has("lambdas")) {
    const auto& l = r.at("lambdas");
    if (l.is_object()) {
      Reader lr(l, r.sub("lambdas"));
      double lo = 1e-3, hi = 100.0;
      int n = 10;
      lr.get("min", lo);
      lr.get("max", hi);
      lr.get("count", n);
      lr.done();
      try {
        g.lambdas = log_space(lo, hi, n);
      } catch (const Error& e) {
        fail(ErrorCode::config, r.sub("lambdas") + ": " + e.what());
      }
    } else {
      r.get("lambdas", g.lambdas);
    }
  }
  r.get("alpha", g.alpha);
  if (r.has("cv")) g.cv = read_split(r.at("cv"), r.sub("cv"));
  r.get("splines", g.use_splines);
  r.done();
}

json write_grid(const TuningGrid& g) {
  return {{"degrees", g.degrees}, {"knots", g.knot_counts}, {"lambdas", g.lambdas},
          {"alpha", g.alpha},     {"cv", write_split(g.cv)}, {"splines", g.use_splines}};
}

void read_solver(const json& j, const std::string& path, SolverConfig& s) {
  Reader r(j, path);
  r.get("lambda", s.lambda);
  r.get("tolerance", s.tolerance);
  r.get("max_iter", s.max_iter);
  r.get("price_resolution", s.price_resolution);
  get_enum(r, "loss", loss_names, s.loss);
  r.done();
}

json write_solver(const SolverConfig& s) {
  return {{"lambda", s.lambda},
          {"tolerance", s.tolerance},
          {"max_iter", s.max_iter},
          {"price_resolution", s.price_resolution},
          {"loss", loss_names.name(s.loss)}};
}

// JSON object keys are strings; agent ids are written as decimal keys.
int agent_key(const std::string& key, const std::string& path) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(key, &used);
    if (used == key.size()) return v;
  } catch (const std::logic_error&) {
  }
  fail(ErrorCode::config, path + ": key '" + key + "' is not an agent id");
}

void read_session(const json& j, const std::string& path, SessionConfig& s) {
  Reader r(j, path);
  r.get("buyers", s.buyers);
  if (r.has("value_functions")) {
    const auto& m = r.at("value_functions");
    require(m.is_object(), ErrorCode::config, r.sub("value_functions") + " must be an object");
    s.value_functions.clear();
    for (const auto& [k, v] : m.items())
      s.value_functions.insert_or_assign(agent_key(k, r.sub("value_functions")),
                                         read_vf(v, r.sub("value_functions") + "." + k));
  }
  if (r.has("default_value_function"))
    s.default_value_function = read_vf(r.at("default_value_function"), r.sub("default_value_function"));
  if (r.has("seller_prices")) {
    const auto& m = r.at("seller_prices");
    require(m.is_object(), ErrorCode::config, r.sub("seller_prices") + " must be an object");
    s.seller_prices.clear();
    for (const auto& [k, v] : m.items()) {
      try {
        s.seller_prices[agent_key(k, r.sub("seller_prices"))] = v.get<std::vector<double>>();
      } catch (const json::exception&) {
        fail(ErrorCode::config, r.sub("seller_prices") + "." + k + " must be a list of numbers");
      }
    }
  }
  r.get("default_price", s.default_price);
  r.get("self_price_zero", s.self_price_zero);
  if (r.has("grid")) {
    Reader g(r.at("grid"), r.sub("grid"));
    g.get("min", s.grid.min);
    g.get("step", s.grid.step);
    g.get("max", s.grid.max);
    g.done();
  }
  get_enum(r, "estimator", estimator_names, s.estimator);
  r.get("k", s.k);
  get_enum(r, "stationarity", stationarity_names, s.stationarity);
  r.get("horizon", s.horizon);
  r.get("launch_hour", s.launch_hour);
  r.get("lag_count", s.lag_count);
  r.get("validation_fraction", s.validation_fraction);
  if (r.has("model")) {
    Reader m(r.at("model"), r.sub("model"));
    m.get("splines", s.model.use_splines);
    m.get("degree", s.model.spline.degree);
    m.get("knots", s.model.spline.knots);
    get_enum(m, "knot_rule", knot_names, s.model.spline.rule);
    m.get("alpha", s.model.alpha);
    m.done();
  }
  if (r.has("solver")) read_solver(r.at("solver"), r.sub("solver"), s.solver);
  if (r.has("tuning")) {
    TuningGrid g = s.tuning.value_or(TuningGrid{});
    read_grid(r.at("tuning"), r.sub("tuning"), g);
    s.tuning = g;
  } else if (j.contains("tuning")) {
    s.tuning.reset();  // explicit null
  }
  r.get("tune_per_bid", s.tune_per_bid);
  r.get("clip", s.clip);
  r.get("jobs", s.jobs);
  r.done();
}

json write_session(const SessionConfig& s) {
  json vfs = json::object();
  for (const auto& [id, vf] : s.value_functions) vfs[std::to_string(id)] = write_vf(vf);
  json prices = json::object();
  for (const auto& [id, p] : s.seller_prices) prices[std::to_string(id)] = p;
  json out = {{"buyers", s.buyers},
              {"value_functions", vfs},
              {"default_value_function", write_vf(s.default_value_function)},
              {"seller_prices", prices},
              {"default_price", s.default_price},
              {"self_price_zero", s.self_price_zero},
              {"grid", {{"min", s.grid.min}, {"step", s.grid.step}, {"max", s.grid.max}}},
              {"estimator", estimator_names.name(s.estimator)},
              {"k", s.k},
              {"stationarity", stationarity_names.name(s.stationarity)},
              {"horizon", s.horizon},
              {"launch_hour", s.launch_hour},
              {"lag_count", s.lag_count},
              {"validation_fraction", s.validation_fraction},
              {"model",
               {{"splines", s.model.use_splines},
                {"degree", s.model.spline.degree},
                {"knots", s.model.spline.knots},
                {"knot_rule", knot_names.name(s.model.spline.rule)},
                {"alpha", s.model.alpha}}},
              {"solver", write_solver(s.solver)},
              {"tuning", s.tuning ? write_grid(*s.tuning) : json(nullptr)},
              {"tune_per_bid", s.tune_per_bid},
              {"clip", s.clip},
              {"jobs", s.jobs}};
  return out;
}

void read_data(const json& j, const std::string& path, DataSource& d, const std::filesystem::path& base) {
  Reader r(j, path);
  get_enum(r, "kind", data_names, d.kind);
  if (r.has("synthetic")) {
    Reader s(r.at("synthetic"), r.sub("synthetic"));
    s.get("n_features", d.synthetic.n_features);
    s.get("buyer_features", d.synthetic.buyer_feature_ids);
    s.get("active", d.synthetic.active_ids);
    s.get("redundant_pairs", d.synthetic.redundant_pairs);
    get_enum(s, "link", link_names, d.synthetic.link);
    s.get("noise_sd", d.synthetic.noise_sd);
    s.get("rows", d.rows);
    s.done();
  }
  if (r.has("zones")) {
    Reader z(r.at("zones"), r.sub("zones"));
    z.get("zones", d.zones.zones);
    z.get("months", d.zones.months);
    z.get("shared_weight", d.zones.shared_weight);
    z.get("forecast_noise", d.zones.forecast_noise);
    z.get("power_noise", d.zones.power_noise);
    z.done();
  }
  if (r.has("csv")) {
    Reader c(r.at("csv"), r.sub("csv"));
    std::string p;
    c.get("path", p);
    if (!p.empty()) d.csv = std::filesystem::path(p).is_absolute() || base.empty() ? std::filesystem::path(p) : base / p;
    if (c.has("agents")) {
      const auto& a = c.at("agents");
      require(a.is_array(), ErrorCode::config, c.sub("agents") + " must be a list");
      d.schema.clear();
      for (std::size_t i = 0; i < a.size(); ++i) {
        Reader ar(a[i], c.sub("agents") + "[" + std::to_string(i) + "]");
        AgentSchema s;
        ar.get("id", s.agent_id);
        ar.get("features", s.feature_names);
        ar.get("capacity", s.capacity);
        ar.done();
        s.n_features = static_cast<int>(s.feature_names.size());
        d.schema.push_back(s);
      }
    }
    c.done();
  }
  r.done();
}

json write_data(const DataSource& d) {
  json schema = json::array();
  for (const auto& a : d.schema)
    schema.push_back({{"id", a.agent_id}, {"features", a.feature_names}, {"capacity", a.capacity}});
  return {{"kind", data_names.name(d.kind)},
          {"synthetic",
           {{"n_features", d.synthetic.n_features},
            {"buyer_features", d.synthetic.buyer_feature_ids},
            {"active", d.synthetic.active_ids},
            {"redundant_pairs", d.synthetic.redundant_pairs},
            {"link", link_names.name(d.synthetic.link)},
            {"noise_sd", d.synthetic.noise_sd},
            {"rows", d.rows}}},
          {"zones",
           {{"zones", d.zones.zones},
            {"months", d.zones.months},
            {"shared_weight", d.zones.shared_weight},
            {"forecast_noise", d.zones.forecast_noise},
            {"power_noise", d.zones.power_noise}}},
          {"csv", {{"path", d.csv.generic_string()}, {"agents", schema}}}};
}

}  // namespace

void Config::validate() const {
  session.validate();
  require(run.sessions >= 1, ErrorCode::config, "run.sessions must be >= 1");
  if (data.kind == DataKind::synthetic) {
    data.synthetic.validate();
    require(data.rows >= 4, ErrorCode::config, "synthetic rows must be >= 4");
  }
  if (data.kind == DataKind::csv) require(!data.csv.empty(), ErrorCode::config, "data.csv.path is required");
  tune.grid.validate();
  benchmark.baseline.validate();
}

void apply_seed(Config& config, std::uint64_t seed) {
  config.seed = seed;
  config.data.synthetic.seed = seed;
  config.data.zones.seed = seed;
}

Config parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    fail(ErrorCode::config, std::string("config is not valid JSON: ") + e.what());
  }
  Reader r(j, "");
  Config c;
  if (r.has("preset")) {
    require(r.at("preset").is_string(), ErrorCode::config, "preset must be a string");
    c = preset(r.at("preset").get<std::string>());
  }
  r.get("name", c.name);
  std::uint64_t seed = c.seed;
  r.get("seed", seed);
  if (r.has("data")) read_data(r.at("data"), "data", c.data, base_dir);
  if (r.has("session")) read_session(r.at("session"), "session", c.session);
  if (r.has("run")) {
    Reader rr(r.at("run"), "run");
    rr.get("sessions", c.run.sessions);
    rr.get("re_estimate", c.run.re_estimate);
    rr.done();
  }
  if (r.has("tune")) {
    Reader t(r.at("tune"), "tune");
    if (t.has("grid")) read_grid(t.at("grid"), "tune.grid", c.tune.grid);
    t.get("buyer", c.tune.buyer);
    t.get("bid", c.tune.bid);
    t.done();
  }
  if (r.has("benchmark")) {
    Reader b(r.at("benchmark"), "benchmark");
    get_enum(b, "local", local_names, c.benchmark.local);
    get_enum(b, "kind", baseline_names, c.benchmark.baseline.kind);
    if (b.has("grid")) read_grid(b.at("grid"), "benchmark.grid", c.benchmark.baseline.grid);
    if (b.has("solver")) read_solver(b.at("solver"), "benchmark.solver", c.benchmark.baseline.solver);
    std::string ext;
    b.get("external", ext);
    if (!ext.empty())
      c.benchmark.external = std::filesystem::path(ext).is_absolute() || base_dir.empty() ? std::filesystem::path(ext)
                                                                                          : base_dir / ext;
    b.get("lrm", c.benchmark.lrm);
    b.done();
  }
  r.done();
  apply_seed(c, seed);
  c.validate();
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::io, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

std::string dump_config(const Config& c) {
  json j = {{"name", c.name},
            {"seed", c.seed},
            {"data", write_data(c.data)},
            {"session", write_session(c.session)},
            {"run", {{"sessions", c.run.sessions}, {"re_estimate", c.run.re_estimate}}},
            {"tune", {{"grid", write_grid(c.tune.grid)}, {"buyer", c.tune.buyer}, {"bid", c.tune.bid}}},
            {"benchmark",
             {{"local", local_names.name(c.benchmark.local)},
              {"kind", baseline_names.name(c.benchmark.baseline.kind)},
              {"grid", write_grid(c.benchmark.baseline.grid)},
              {"solver", write_solver(c.benchmark.baseline.solver)},
              {"external", c.benchmark.external.generic_string()},
              {"lrm", c.benchmark.lrm}}}};
  return j.dump(2) + "\n";
}

}  // namespace fcmarket
