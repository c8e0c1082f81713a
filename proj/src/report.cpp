#include "naheat/report.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace naheat {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json numbers(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

Json CheckResult::to_json() const {
  Json j = record;
  j["id"] = id;
  j["suite"] = suite;
  j["passed"] = passed;
  j["diagnosis"] = diagnosis;
  return j;
}

Json report_json(const EstimateReport& r) {
  Json j;
  j["label"] = r.label;
  j["params"] = {{"epsilon", number(r.epsilon)}, {"target_slope", number(r.target_slope)},
                 {"tolerance", number(r.tolerance)}};
  j["t"] = numbers(r.t_values);
  j["values"] = numbers(r.norms);
  j["est_abs_errors"] = numbers(r.est_abs_errors);
  j["slope"] = number(r.fitted_slope);
  j["constant"] = number(r.fitted_constant);
  j["spread"] = number(r.ratio_spread);
  j["trusted"] = r.trusted;
  j["passed"] = r.passed;
  return j;
}

Json report_json(const CzCheck& c) {
  Json j;
  j["n"] = c.n;
  j["values"] = numbers(c.values);
  j["normalized"] = numbers(c.normalized);
  j["constant"] = number(c.bound);
  j["spread"] = number(c.spread);
  j["trusted"] = c.trusted;
  j["passed"] = c.passed;
  return j;
}

Json report_json(const TailStability& s) {
  Json j;
  j["values"] = numbers({s.base.value, s.half_radius_value, s.double_T_value});
  j["value_labels"] = {"R", "R/2", "2T"};
  j["est_abs_errors"] = numbers({s.base.est_abs_error});
  j["params"] = {{"radius", number(s.base.radius)}};
  j["radius_change"] = number(s.radius_change);
  j["T_change"] = number(s.T_change);
  j["remainder"] = number(s.base.remainder);
  j["remainder_fraction"] = number(s.base.remainder_fraction);
  j["remainder_ok"] = s.base.remainder_ok;
  Json parts = Json::object();
  for (const auto& [name, v] : s.base.part_norms) parts[name] = number(v);
  j["parts"] = parts;
  j["trusted"] = s.base.trusted;
  j["passed"] = s.passed;
  return j;
}

void write_jsonl(std::ostream& os, const Json& record) { os << record.dump() << '\n'; }

void write_jsonl(std::ostream& os, const std::vector<CheckResult>& results) {
  for (const auto& r : results) write_jsonl(os, r.to_json());
}

void write_csv(std::ostream& os, const std::vector<double>& t, const std::vector<double>& values,
               const std::vector<double>& errors) {
  if (t.size() != values.size() || (!errors.empty() && errors.size() != t.size()))
    throw std::invalid_argument("write_csv: column lengths differ");
  os << "t,value,est_abs_error\n";
  char buf[96];
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", t[i], values[i], errors.empty() ? 0.0 : errors[i]);
    os << buf;
  }
}

}  // namespace naheat
