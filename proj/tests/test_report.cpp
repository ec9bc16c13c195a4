#include "klab/report.hpp"

#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

using namespace klab;

namespace {

RunReport sample() {
  RunReport rep("verify", ExperimentConfig{});
  rep.add_check({"route", true, 1e-15, 1e-5, "", ""});
  rep.add_check({"a1", false, 0.5, 1e-3, "off by (r+1)/r", "klab verify --config x.ini"});
  rep.add_result(3, "rho_integral", number(4.0));
  rep.set("slope", number(NAN));
  rep.add_timing("route", 0.25);
  return rep;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  return std::string(std::istreambuf_iterator<char>(f), {});
}

}  // namespace

TEST_CASE("report json carries schema 1 and failing repro commands") {
  const Json j = sample().to_json("t0");
  CHECK(j["schema"] == 1);
  CHECK(j["all_passed"] == false);
  CHECK(j["checks"][0].contains("repro") == false);
  CHECK(j["checks"][1]["repro"] == "klab verify --config x.ini");
  CHECK(j["results"]["slope"] == "nan");
  CHECK(j["per_k"]["3"]["rho_integral"] == 4.0);
}

TEST_CASE("report is deterministic apart from the timestamp") {
  Json a = sample().to_json("t0"), b = sample().to_json("t1");
  CHECK(a != b);
  a.erase("timestamp");
  b.erase("timestamp");
  CHECK(a.dump() == b.dump());
}

TEST_CASE("files and CSV headers") {
  const auto dir = std::filesystem::temp_directory_path() / "klab_test_report";
  std::filesystem::remove_all(dir);
  sample().write(dir.string());
  CHECK(Json::parse(slurp(dir / "report.json"))["schema"] == 1);
  CHECK(slurp(dir / "timing.csv").rfind("task,seconds\nroute,0.25\n", 0) == 0);
  write_trajectory_csv((dir / "t.csv").string(), {1.0, 0.5}, {2.0, 1.0});
  CHECK(slurp(dir / "t.csv") == "iteration,op_norm,frobenius\n0,1,2\n1,0.5,1\n");
  CMat m(1, 1);
  m(0, 0) = cplx(1.5, -2);
  write_matrix_csv((dir / "m.csv").string(), m);
  CHECK(slurp(dir / "m.csv") == "row,col,re,im\n0,0,1.5,-2\n");
  std::filesystem::remove_all(dir);
}
