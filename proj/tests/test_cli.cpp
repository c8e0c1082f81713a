#include "doctest.h"

#include "naheat/cli.hpp"
#include "naheat/heat_kernel.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

using namespace naheat;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::initializer_list<const char*> args) {
  std::vector<const char*> argv{"naheat"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("naheat_cli_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("eval prints value, error line and JSON record") {
  const Run d = run({"eval", "distance", "--q", "1", "--z", "0", "--u", "2"});
  CHECK(d.code == kExitOk);
  CHECK(std::stod(first_line(d.out)) == 2.0);

  const Run h1 = run({"eval", "heat", "--q", "1", "--t", "1", "--z", "0", "--u", "0"});
  REQUIRE(h1.code == kExitOk);
  const double lib = h(1.0, PointG{PointN{0.0}, 0.0}, GroupDescriptor::abelian(1)).value;
  CHECK(std::strtod(first_line(h1.out).c_str(), nullptr) == lib);
  CHECK(h1.out.find("est_abs_error ") != std::string::npos);
  const std::string json = h1.out.substr(h1.out.find('{'));
  CHECK(Json::parse(json).at("value") == Json(lib));

  const Run p = run({"eval", "psi", "--t", "1", "--xi", "1"});
  CHECK(p.code == kExitOk);
  CHECK(std::isfinite(std::stod(first_line(p.out))));
  CHECK(p.out.find("est_abs_error n/a") == std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(run({"eval", "heat", "--t", "-1", "--z", "0", "--u", "0"}).code == kExitInvalid);
  CHECK(run({"eval", "nonsense"}).code == kExitInvalid);
  CHECK(run({"verify", "nonsense"}).code == kExitInvalid);
  CHECK(run({"eval", "heat", "--bogus"}).code == kExitInvalid);
  CHECK(run({"eval", "heat", "--group", "heisenberg", "--t", "0.1", "--z", "0,0,0", "--u", "0"}).code ==
        kExitUnsupported);
  CHECK(run({"verify", "estimates", "--group", "heisenberg"}).code == kExitUnsupported);
  CHECK(run({}).code == kExitInvalid);
}

TEST_CASE("config file mirrors the flags") {
  const auto dir = temp_dir("config");
  std::filesystem::create_directories(dir);
  const auto file = dir / "run.ini";
  std::ofstream(file) << "q = 1\nt = 1\nz = 0.5\nu = 0.25\n[eval]\nj = 1\n";
  const std::string arg = "--config=" + file.string();
  const Run a = run({"eval", "heat_derivative", arg.c_str()});
  const Run b = run({"eval", "heat_derivative", "--q", "1", "--t", "1", "--z", "0.5", "--u", "0.25", "--j", "1"});
  CHECK(a.code == kExitOk);
  CHECK(a.out == b.out);
}

TEST_CASE("verify: sorted table, reports on disk, deterministic") {
  const auto dir = temp_dir("verify");
  const std::string out = dir.string();
  const Run a = run({"verify", "geometry", "--seed", "7", "--out", out.c_str()});
  CHECK(a.code == kExitOk);
  std::istringstream in(a.out);
  std::string line, prev;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.rfind("PASS ", 0) != 0 && line.rfind("FAIL ", 0) != 0) continue;
    const std::string id = line.substr(5, line.find(' ', 5) - 5);
    CHECK(prev < id);
    prev = id;
    ++rows;
  }
  CHECK(rows >= 3);
  CHECK(std::filesystem::exists(dir / "report.jsonl"));
  std::ifstream rep(dir / "report.jsonl");
  std::stringstream r1;
  r1 << rep.rdbuf();
  const Run b = run({"verify", "geometry", "--seed", "7", "--out", out.c_str()});
  std::ifstream rep2(dir / "report.jsonl");
  std::stringstream r2;
  r2 << rep2.rdbuf();
  CHECK(a.out == b.out);
  CHECK(r1.str() == r2.str());
  CHECK(run({"verify", "estimates", "--t-min", "0.5"}).code == kExitInvalid);
}

TEST_CASE("verify estimates writes a slope table and CSV") {
  const auto dir = temp_dir("estimates");
  const std::string out = dir.string();
  const Run a = run({"verify", "estimates", "--t-min", "4", "--t-max", "64", "--out", out.c_str()});
  CHECK(a.code == kExitOk);
  CHECK(a.out.find("slope") != std::string::npos);
  bool csv = false;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ".csv") {
      std::ifstream f(e.path());
      std::string head;
      std::getline(f, head);
      CHECK(head == "t,value,est_abs_error");
      csv = true;
    }
  CHECK(csv);
}
