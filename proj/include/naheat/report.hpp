#pragma once

// Check results and their serialization: JSON lines (one record per check, keys sorted) and CSV.

#include "naheat/estimator.hpp"
#include "naheat/riesz.hpp"

#include "json.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace naheat {

using Json = nlohmann::json;

// Common record: id, suite, passed, diagnosis, params, t, values, est_abs_errors, slope, constant.
struct CheckResult {
  std::string id;
  std::string suite;
  bool passed = false;
  std::string diagnosis;
  Json record = Json::object();

  Json to_json() const;
};

Json report_json(const EstimateReport& r);
Json report_json(const CzCheck& c);
Json report_json(const TailStability& s);

// NaN and inf become null
Json number(double v);
Json numbers(const std::vector<double>& v);

void write_jsonl(std::ostream& os, const std::vector<CheckResult>& results);
void write_jsonl(std::ostream& os, const Json& record);
// columns t, value, est_abs_error
void write_csv(std::ostream& os, const std::vector<double>& t, const std::vector<double>& values,
               const std::vector<double>& errors);

}  // namespace naheat
