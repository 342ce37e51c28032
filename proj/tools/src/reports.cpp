#include "reports.hpp"

#include <map>
#include <sstream>

#include "fcmarket/csv.hpp"
#include "json.hpp"

namespace fcmarket::cli {

using Json = nlohmann::ordered_json;

namespace {

Json revenues_json(const std::vector<SellerRevenue>& rs) {
  Json a = Json::array();
  for (const auto& r : rs) a.push_back({{"seller", r.seller}, {"amount", r.amount}, {"groups", r.groups}});
  return a;
}

Json table_json(const BidGainTable& t) {
  return {{"horizon", t.horizon}, {"bids", t.bids}, {"gains", t.gains}, {"raw_gains", t.raw_gains},
          {"model_ref", t.model_ref}};
}

std::string optional_number(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::string groups_field(const std::vector<int>& g) {
  std::string out;
  for (std::size_t i = 0; i < g.size(); ++i) out += (i ? ";" : "") + std::to_string(g[i]);
  return out;
}

}  // namespace

std::string reports_json(const std::vector<SettlementReport>& reports) {
  Json arr = Json::array();
  for (const auto& r : reports) {
    Json j{{"session", r.session},
           {"buyer", r.buyer},
           {"launch", format_iso8601(r.launch)},
           {"rejected", r.rejected},
           {"diagnostic", r.diagnostic},
           {"stationary", r.stationary},
           {"payment", r.payment},
           {"revenues", revenues_json(r.revenues)},
           {"market_delivered", r.market_delivered},
           {"chosen_bids", r.chosen_bids},
           {"estimated_gains", r.estimated_gains},
           {"observed_gain", r.observed_gain ? Json(*r.observed_gain) : Json(nullptr)}};
    Json hs = Json::array();
    for (const auto& h : r.horizons)
      hs.push_back({{"horizon", h.horizon},
                    {"sale", h.price.sale},
                    {"bid", h.price.bid},
                    {"gain", h.price.gain},
                    {"payment", h.payment},
                    {"revenues", revenues_json(h.revenues)}});
    j["horizons"] = hs;
    Json rows = Json::array();
    for (std::size_t i = 0; i < r.actuals.size(); ++i)
      rows.push_back({{"time", format_iso8601(r.delivery_times[i])},
                      {"horizon", r.delivery_horizons[i]},
                      {"actual", r.actuals[i]},
                      {"local", r.local_forecasts[i]},
                      {"forecast", r.forecasts[i]},
                      {"delivered", static_cast<bool>(r.delivered[i])}});
    j["deliveries"] = rows;
    Json tables = Json::array();
    for (const auto& t : r.tables) tables.push_back(table_json(t));
    j["tables"] = tables;
    j["warnings"] = r.warnings;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::string settlements_csv(const std::vector<SettlementReport>& reports) {
  std::ostringstream out;
  out << "session,buyer,launch,rejected,payment,market_delivered,mean_bid,mean_estimated_gain,observed_gain,"
         "diagnostic\n";
  for (const auto& r : reports) {
    std::string diag = r.diagnostic;
    for (auto& ch : diag)
      if (ch == ',' || ch == '\n') ch = ';';
    out << r.session << ',' << r.buyer << ',' << format_iso8601(r.launch) << ',' << (r.rejected ? 1 : 0) << ','
        << format_double(r.payment) << ',' << (r.market_delivered ? 1 : 0) << ',' << format_double(mean_of(r.chosen_bids))
        << ',' << format_double(mean_of(r.estimated_gains)) << ',' << optional_number(r.observed_gain) << ','
        << diag << '\n';
  }
  return out.str();
}

std::string revenues_csv(const std::vector<SettlementReport>& reports) {
  std::ostringstream out;
  out << "session,buyer,horizon,seller,amount,groups\n";
  auto emit = [&](const SettlementReport& r, int h, const std::vector<SellerRevenue>& rs) {
    for (const auto& s : rs)
      out << r.session << ',' << r.buyer << ',' << h << ',' << s.seller << ',' << format_double(s.amount) << ','
          << groups_field(s.groups) << '\n';
  };
  for (const auto& r : reports) {
    if (r.horizons.empty())
      emit(r, 0, r.revenues);
    else
      for (const auto& h : r.horizons) emit(r, h.horizon, h.revenues);
  }
  return out.str();
}

std::string bgt_csv(const std::vector<SettlementReport>& reports, int buyer) {
  std::ostringstream out;
  out << "session,horizon,bid,gain,raw_gain,model_ref\n";
  for (const auto& r : reports) {
    if (r.buyer != buyer) continue;
    for (const auto& t : r.tables)
      for (std::size_t i = 0; i < t.bids.size(); ++i)
        out << r.session << ',' << t.horizon << ',' << format_double(t.bids[i]) << ',' << format_double(t.gains[i])
            << ',' << format_double(t.raw_gains[i]) << ',' << t.model_ref[i] << '\n';
  }
  return out.str();
}

std::string cumulative_gain_csv(const std::vector<SettlementReport>& reports) {
  std::ostringstream out;
  out << "session,buyer,launch,estimated_gain,observed_gain,cumulative_estimated,cumulative_observed\n";
  std::map<int, std::pair<double, double>> acc;
  for (const auto& r : reports) {
    if (r.rejected) continue;
    const double est = mean_of(r.estimated_gains);
    const double obs = r.observed_gain.value_or(0.0);
    auto& a = acc[r.buyer];
    a.first += est;
    a.second += obs;
    out << r.session << ',' << r.buyer << ',' << format_iso8601(r.launch) << ',' << format_double(est) << ','
        << format_double(obs) << ',' << format_double(a.first) << ',' << format_double(a.second) << '\n';
  }
  return out.str();
}

std::string forecasts_csv(const std::vector<SettlementReport>& reports) {
  std::ostringstream out;
  out << "session,buyer,timestamp,horizon,actual,local,forecast,delivered\n";
  for (const auto& r : reports)
    for (std::size_t i = 0; i < r.actuals.size(); ++i)
      out << r.session << ',' << r.buyer << ',' << format_iso8601(r.delivery_times[i]) << ','
          << r.delivery_horizons[i] << ',' << format_double(r.actuals[i]) << ',' << format_double(r.local_forecasts[i])
          << ',' << format_double(r.forecasts[i]) << ',' << (r.delivered[i] ? 1 : 0) << '\n';
  return out.str();
}

std::string truth_json(const SyntheticTruth& t, const std::vector<std::string>& warnings) {
  Json pairs = Json::array();
  for (const auto& [a, b] : t.redundant_pairs) pairs.push_back({a, b});
  Json beta = Json::object();
  for (std::size_t i = 0; i < t.beta.size(); ++i)
    if (t.beta[i] != 0.0) beta[std::to_string(i + 1)] = t.beta[i];
  Json j{{"active_ids", t.active_ids},
         {"beta", beta},
         {"redundant_pairs", pairs},
         {"buyer_feature_ids", t.buyer_feature_ids},
         {"warnings", warnings}};
  return j.dump(2) + "\n";
}

std::string tune_table_csv(const TuningResult& r) {
  std::ostringstream out;
  out << "degree,knots,lambda,rmse,folds\n";
  for (const auto& row : r.table)
    out << row.degree << ',' << row.knots << ',' << format_double(row.lambda) << ',' << format_double(row.loss) << ','
        << row.folds << '\n';
  return out.str();
}

std::string tune_folds_csv(const TuningResult& r) {
  std::ostringstream out;
  out << "degree,knots,lambda,fold,rmse\n";
  for (const auto& row : r.folds)
    out << row.degree << ',' << row.knots << ',' << format_double(row.lambda) << ',' << row.fold << ','
        << format_double(row.loss) << '\n';
  return out.str();
}

std::string tune_choice_json(const TuningResult& r, int buyer, double bid) {
  Json j{{"buyer", buyer},
         {"bid", bid},
         {"degree", r.degree},
         {"knots", r.knots},
         {"lambda", r.lambda},
         {"rmse", r.loss},
         {"grid_rows", r.table.size()},
         {"transformer_fits", r.stats.transformer_fits},
         {"filter_fits", r.stats.filter_fits},
         {"solves", r.stats.solves},
         {"warnings", r.warnings}};
  return j.dump(2) + "\n";
}

std::string comparison_csv(const Comparison& c) {
  std::ostringstream out;
  out << "zone,horizon,count,rmse_local,rmse_market,improvement\n";
  for (const auto& r : c.rows)
    out << r.zone << ',' << (r.horizon < 0 ? std::string("all") : std::to_string(r.horizon)) << ',' << r.count << ','
        << format_double(r.rmse_local) << ',' << format_double(r.rmse_market) << ',' << format_double(r.improvement)
        << '\n';
  return out.str();
}

std::string comparison_json(const Comparison& c, const std::string& local_reference, std::size_t missing) {
  Json zones = Json::array();
  for (const auto& r : c.rows)
    if (r.horizon < 0)
      zones.push_back({{"zone", r.zone},
                       {"count", r.count},
                       {"rmse_local", r.rmse_local},
                       {"rmse_market", r.rmse_market},
                       {"improvement", r.improvement}});
  Json j{{"local_reference", local_reference},
         {"mean_improvement", c.mean_improvement},
         {"missing_external", missing},
         {"zones", zones}};
  return j.dump(2) + "\n";
}

std::string external_csv(const std::vector<ForecastRow>& rows, bool local_column) {
  std::vector<ForecastRow> copy = rows;
  if (local_column)
    for (auto& r : copy) r.market = r.local;
  std::ostringstream out;
  write_external_forecasts(out, copy);
  return out.str();
}

std::string lrm_payments_csv(const std::vector<LrmEntry>& entries) {
  std::ostringstream out;
  out << "buyer,lrm_payment,market_payment,iterations,converged\n";
  for (const auto& e : entries)
    out << e.buyer << ',' << format_double(e.result.payment) << ',' << format_double(e.market_payment) << ','
        << e.result.iterations << ',' << (e.result.converged ? 1 : 0) << '\n';
  return out.str();
}

std::string lrm_revenues_csv(const std::vector<LrmEntry>& entries) {
  std::ostringstream out;
  out << "buyer,seller,amount,columns\n";
  for (const auto& e : entries)
    for (const auto& s : e.result.revenues)
      out << e.buyer << ',' << s.seller << ',' << format_double(s.amount) << ',' << groups_field(s.groups) << '\n';
  return out.str();
}

}  // namespace fcmarket::cli
