#pragma once

#include <string>
#include <vector>

#include "fcmarket/baselines.hpp"
#include "fcmarket/dataset.hpp"
#include "fcmarket/lrm.hpp"
#include "fcmarket/session.hpp"
#include "fcmarket/tuning.hpp"

namespace fcmarket::cli {

std::string reports_json(const std::vector<SettlementReport>& reports);
// session,buyer,launch,rejected,payment,... one line per report
std::string settlements_csv(const std::vector<SettlementReport>& reports);
// one line per (report, horizon, seller); horizon 0 for a single table
std::string revenues_csv(const std::vector<SettlementReport>& reports);
std::string bgt_csv(const std::vector<SettlementReport>& reports, int buyer);
// estimated vs observed gain accumulated over sessions, per buyer
std::string cumulative_gain_csv(const std::vector<SettlementReport>& reports);
std::string forecasts_csv(const std::vector<SettlementReport>& reports);

std::string truth_json(const SyntheticTruth& truth, const std::vector<std::string>& warnings);

std::string tune_table_csv(const TuningResult& r);
std::string tune_folds_csv(const TuningResult& r);
std::string tune_choice_json(const TuningResult& r, int buyer, double bid);

std::string comparison_csv(const Comparison& c);
std::string comparison_json(const Comparison& c, const std::string& local_reference, std::size_t missing);
std::string external_csv(const std::vector<ForecastRow>& rows, bool local_column);

struct LrmEntry {
  int buyer = 0;
  LrmResult result;
  double market_payment = 0.0;
};
std::string lrm_payments_csv(const std::vector<LrmEntry>& entries);
std::string lrm_revenues_csv(const std::vector<LrmEntry>& entries);

}  // namespace fcmarket::cli
