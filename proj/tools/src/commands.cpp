#include "commands.hpp"

#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "artifacts.hpp"
#include "fcmarket/csv.hpp"
#include "fcmarket/errors.hpp"
#include "fcmarket/lrm.hpp"
#include "reports.hpp"

namespace fcmarket::cli {

namespace {

int parse_jobs(const std::string& text) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == text.size() && v >= 1, ErrorCode::config, "FCMARKET_JOBS must be a positive integer, got '" + text + "'");
  return v;
}

struct Context {
  Config config;
  RunManifest manifest;
  Artifacts artifacts;
  Stopwatch clock{manifest.timings};

  Context(const Options& o, std::string command) {
    manifest.command = std::move(command);
    config = resolve_config(o, &manifest.config);
    manifest.seed = config.seed;
    manifest.out = o.out;
    clock.lap("config");
    artifacts.add("config.json", dump_config(config) + "\n");
  }

  void finish() {
    clock.lap("write");
    write_outputs(artifacts, manifest);
  }
};

MarketFrame load_frame(Context& ctx) {
  const auto& d = ctx.config.data;
  switch (d.kind) {
    case DataKind::synthetic: {
      auto s = synthesize(d.synthetic, d.rows);
      for (auto& w : s.warnings) ctx.manifest.warnings.push_back(w);
      return std::move(s.frame);
    }
    case DataKind::zones:
      return synthesize_zones(d.zones);
    case DataKind::csv: {
      LoadReport lr;
      auto f = load_csv(d.csv, d.schema, &lr);
      if (lr.rows_dropped > 0)
        ctx.manifest.warnings.push_back(std::to_string(lr.rows_dropped) + " csv rows outside the shared time range dropped");
      return f;
    }
  }
  fail(ErrorCode::config, "unknown data kind");
}

void collect_warnings(Context& ctx, const std::vector<SettlementReport>& reports) {
  for (const auto& r : reports) {
    const std::string who = "session " + std::to_string(r.session) + " buyer " + std::to_string(r.buyer) + ": ";
    if (r.rejected) ctx.manifest.warnings.push_back(who + "rejected: " + r.diagnostic);
    for (const auto& w : r.warnings) ctx.manifest.warnings.push_back(who + w);
  }
}

void add_session_outputs(Context& ctx, const std::vector<SettlementReport>& reports) {
  ctx.artifacts.add("reports.json", reports_json(reports));
  ctx.artifacts.add("settlements.csv", settlements_csv(reports));
  ctx.artifacts.add("revenues.csv", revenues_csv(reports));
  std::set<int> buyers;
  for (const auto& r : reports) buyers.insert(r.buyer);
  for (int b : buyers) ctx.artifacts.add("bgt/buyer_" + std::to_string(b) + ".csv", bgt_csv(reports, b));
  ctx.artifacts.add("cumulative_gain.csv", cumulative_gain_csv(reports));
  ctx.artifacts.add("forecasts.csv", forecasts_csv(reports));
}

int first_buyer(const MarketFrame& frame, const SessionConfig& s) {
  if (!s.buyers.empty()) return s.buyers.front();
  for (std::size_t a = 0; a < frame.agent_count(); ++a)
    if (frame.series(a).has_target()) return frame.agent(a).agent_id;
  fail(ErrorCode::config, "no agent has a target series");
}

const char* reference_name(LocalReference r) {
  switch (r) {
    case LocalReference::session:
      return "session";
    case LocalReference::lasso:
      return "lasso";
    case LocalReference::spline_lasso:
      return "spline-lasso";
  }
  return "";
}

// Replaces the local column by a baseline fitted on rows preceding the
// buyer's first delivery.
void apply_baseline(Context& ctx, const MarketFrame& frame, std::vector<ForecastRow>& rows) {
  auto bc = ctx.config.benchmark.baseline;
  bc.kind = ctx.config.benchmark.local == LocalReference::lasso ? BaselineKind::lasso : BaselineKind::spline_lasso;
  std::map<int, std::vector<std::size_t>> by_zone;
  for (std::size_t i = 0; i < rows.size(); ++i) by_zone[rows[i].zone].push_back(i);
  for (const auto& [buyer, members] : by_zone) {
    const auto task = build_task(frame, buyer, ctx.config.session);
    Timestamp first = rows[members.front()].time;
    for (auto i : members) first = std::min(first, rows[i].time);
    std::vector<std::size_t> train;
    std::map<std::pair<Timestamp, int>, std::size_t> where;
    for (std::size_t p = 0; p < task.rows.size(); ++p) {
      if (task.times[p] < first) train.push_back(p);
      where[{task.times[p], task.horizon[p]}] = p;
    }
    const auto model = fit_local(task, bc, train, ctx.config.session.jobs);
    const auto cols = local_columns(task);
    Eigen::MatrixXd X(static_cast<Eigen::Index>(members.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t r = 0; r < members.size(); ++r) {
      const auto& fr = rows[members[r]];
      auto it = where.find({fr.time, fr.horizon});
      require(it != where.end(), ErrorCode::integrity, "delivery row missing from the buyer task");
      for (std::size_t c = 0; c < cols.size(); ++c)
        X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            task.X(static_cast<Eigen::Index>(it->second), cols[c]);
    }
    const bool clip = ctx.config.session.clip && frame.normalized();
    const Eigen::VectorXd p = model.predict(X, clip);
    for (std::size_t r = 0; r < members.size(); ++r) rows[members[r]].local = p(static_cast<Eigen::Index>(r));
  }
}

}  // namespace

Config resolve_config(const Options& o, std::string* label) {
  require(o.config_path.empty() != o.preset.empty(), ErrorCode::config, "give exactly one of --config and --preset");
  Config c = o.preset.empty() ? load_config(o.config_path) : preset(o.preset);
  if (label) *label = o.preset.empty() ? o.config_path : "preset:" + o.preset;
  apply_seed(c, o.seed.value_or(c.seed));
  if (o.jobs) {
    require(*o.jobs >= 1, ErrorCode::config, "--jobs must be >= 1");
    c.session.jobs = *o.jobs;
  }
  if (const char* env = std::getenv("FCMARKET_JOBS"); env && *env) c.session.jobs = parse_jobs(env);
  if (o.re_estimate) c.run.re_estimate = true;
  if (!o.external.empty()) c.benchmark.external = o.external;
  c.validate();
  return c;
}

void cmd_synth(const Options& o) {
  Context ctx(o, "synth");
  const auto& d = ctx.config.data;
  std::ostringstream csv;
  switch (d.kind) {
    case DataKind::synthetic: {
      auto s = synthesize(d.synthetic, d.rows);
      ctx.clock.lap("synthesize");
      write_wide_csv(csv, s.frame);
      ctx.artifacts.add("dataset.csv", csv.str());
      ctx.artifacts.add("truth.json", truth_json(s.truth, s.warnings));
      for (auto& w : s.warnings) ctx.manifest.warnings.push_back(w);
      break;
    }
    case DataKind::zones: {
      auto f = synthesize_zones(d.zones);
      ctx.clock.lap("synthesize");
      write_zone_csv(csv, f);
      ctx.artifacts.add("dataset.csv", csv.str());
      break;
    }
    case DataKind::csv:
      fail(ErrorCode::config, "synth needs a synthetic or zones data source");
  }
  ctx.finish();
}

void cmd_run_session(const Options& o) {
  Context ctx(o, "run-session");
  const auto frame = load_frame(ctx);
  ctx.clock.lap("load");
  const auto reports = run_sessions(frame, ctx.config.session, ctx.config.run);
  ctx.clock.lap("sessions");
  collect_warnings(ctx, reports);
  add_session_outputs(ctx, reports);
  ctx.finish();
}

void cmd_tune(const Options& o) {
  Context ctx(o, "tune");
  const auto frame = load_frame(ctx);
  ctx.clock.lap("load");
  const auto& ts = ctx.config.tune;
  const int buyer = ts.buyer != 0 ? ts.buyer : first_buyer(frame, ctx.config.session);
  const auto task = build_task(frame, buyer, ctx.config.session);
  double bid = ts.bid;
  if (bid < 0.0) {
    bid = 0.0;
    for (const auto& f : task.features)
      if (!f.local) bid += f.price;
  }
  const TuningTask tt{task.X, task.y, task.features, task.times};
  const auto result = tune(tt, bid, ts.grid, ctx.config.session.solver, ctx.config.session.jobs);
  ctx.clock.lap("tune");
  for (const auto& w : result.warnings) ctx.manifest.warnings.push_back(w);
  ctx.artifacts.add("tune_table.csv", tune_table_csv(result));
  ctx.artifacts.add("tune_folds.csv", tune_folds_csv(result));
  ctx.artifacts.add("tune_choice.json", tune_choice_json(result, buyer, bid));
  ctx.finish();
}

void cmd_benchmark(const Options& o) {
  Context ctx(o, "benchmark");
  const auto& bs = ctx.config.benchmark;
  // read the external file first so a bad path fails before any work
  std::optional<ExternalForecasts> external;
  if (!bs.external.empty()) external = load_external_forecasts(bs.external);

  const auto frame = load_frame(ctx);
  ctx.clock.lap("load");
  const auto reports = run_sessions(frame, ctx.config.session, ctx.config.run);
  ctx.clock.lap("sessions");
  collect_warnings(ctx, reports);
  add_session_outputs(ctx, reports);

  auto rows = forecast_rows(reports);
  require(!rows.empty(), ErrorCode::degenerate, "every buyer was rejected; nothing to compare");
  if (bs.local != LocalReference::session) {
    apply_baseline(ctx, frame, rows);
    ctx.clock.lap("baseline");
  }
  ctx.artifacts.add("local_forecasts.csv", external_csv(rows, true));
  ctx.artifacts.add("market_forecasts.csv", external_csv(rows, false));
  std::size_t missing = 0;
  if (external) {
    rows = with_external(rows, *external, &missing);
    if (missing > 0)
      ctx.manifest.warnings.push_back(std::to_string(missing) + " forecast rows have no external value");
  }
  const auto cmp = compare(rows);
  ctx.artifacts.add("comparison.csv", comparison_csv(cmp));
  ctx.artifacts.add("comparison.json", comparison_json(cmp, reference_name(bs.local), missing));
  ctx.clock.lap("compare");

  if (bs.lrm && ctx.config.session.horizon == 0) {
    std::vector<LrmEntry> entries;
    for (const auto& r : reports) {
      if (r.rejected) continue;
      const auto task = build_task(frame, r.buyer, ctx.config.session);
      entries.push_back({r.buyer, lrm_benchmark(task.X, task.y, task.features), r.payment});
      if (!entries.back().result.converged)
        ctx.manifest.warnings.push_back("lrm for buyer " + std::to_string(r.buyer) + " stopped at max_iter");
    }
    ctx.artifacts.add("lrm_payments.csv", lrm_payments_csv(entries));
    ctx.artifacts.add("lrm_revenues.csv", lrm_revenues_csv(entries));
    ctx.clock.lap("lrm");
  }
  ctx.finish();
}

}  // namespace fcmarket::cli
