#include "doctest.h"

#include "naheat/report.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

using namespace naheat;

TEST_CASE("numbers: non-finite values become null") {
  CHECK(number(1.5) == Json(1.5));
  CHECK(number(std::numeric_limits<double>::quiet_NaN()).is_null());
  CHECK(number(std::numeric_limits<double>::infinity()).is_null());
  const Json a = numbers({1.0, std::nan(""), 3.0});
  REQUIRE(a.size() == 3);
  CHECK(a[1].is_null());
}

TEST_CASE("estimate reports serialize slope, constant and arrays") {
  EstimateReport r;
  r.label = "P3_6_mixed_j1_l1";
  r.t_values = {4, 8, 16, 32};
  r.norms = {1, 0.5, 0.25, 0.125};
  r.est_abs_errors = {0, 0, 0, 0};
  r.target_slope = -1.5;
  r.fitted_slope = -1.0;
  r.fitted_constant = 8.0;
  r.tolerance = std::numeric_limits<double>::infinity();
  r.passed = false;
  const Json j = report_json(r);
  CHECK(j.at("slope") == Json(-1.0));
  CHECK(j.at("constant") == Json(8.0));
  CHECK(j.at("t").size() == 4);
  CHECK(j.at("values").size() == 4);
  CHECK(j.at("params").at("tolerance").is_null());
}

TEST_CASE("JSON lines: one record per line, keys sorted, stable") {
  CheckResult a{"geometry.b", "geometry", true, "", Json::object()};
  CheckResult b{"geometry.a", "geometry", false, "off", Json{{"zeta", 1}, {"alpha", 2}}};
  std::ostringstream s1, s2;
  write_jsonl(s1, {a, b});
  write_jsonl(s2, {a, b});
  CHECK(s1.str() == s2.str());
  std::istringstream in(s1.str());
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    const Json j = Json::parse(line);
    CHECK(j.contains("id"));
    CHECK(j.contains("passed"));
    ++n;
  }
  CHECK(n == 2);
  const std::string second = s1.str().substr(s1.str().find('\n') + 1);
  CHECK(second.find("\"alpha\"") < second.find("\"zeta\""));
}

TEST_CASE("CSV columns and round trip") {
  std::ostringstream os;
  write_csv(os, {1.0, 2.0}, {0.1, 1.0 / 3.0}, {1e-12, std::nan("")});
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,value,est_abs_error");
  std::getline(in, line);
  std::getline(in, line);
  const auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
  CHECK(std::stod(line.substr(c1 + 1, c2 - c1 - 1)) == 1.0 / 3.0);
}
