// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "speclab/cli.hpp"

using speclab::cli::run;

namespace {

struct Captured {
  int status;
  std::string out;
  std::string err;
};

Captured call(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int status = run(args, out, err);
  return {status, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::stringstream ss(s);
  std::string line;
  while (std::getline(ss, line)) v.push_back(line);
  return v;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(item);
  return v;
}

}  // namespace

TEST_CASE("gamma subcommand") {
  const Captured c = call({"gamma", "--p", "2"});
  REQUIRE(c.status == 0);
  const auto l = lines(c.out);
  REQUIRE(l.size() == 3);
  CHECK(l[0].rfind("# command=gamma p=2 ", 0) == 0);
  CHECK(l[0].find(" spacing=0.05 ") != std::string::npos);
  CHECK(l[0].find(" radius=20 ") != std::string::npos);
  CHECK(l[0].find(" tol=1e-8 ") != std::string::npos);
  CHECK(l[0].find(" seed=42 ") != std::string::npos);
  CHECK(l[0].find(" version=") != std::string::npos);
  CHECK(l[1] == "p,gamma,halflength,meshcount,change,refinements");
  CHECK(std::fabs(std::strtod(split(l[2])[1].c_str(), nullptr) - 1.0) < 1e-6);
  CHECK(c.err.find("gamma") != std::string::npos);
}

TEST_CASE("usage errors exit with status 2") {
  CHECK(call({"gamma", "--p", "0.5"}).status == 2);
  CHECK(call({"gamma", "--bogus", "1"}).status == 2);
  CHECK(call({"frobnicate"}).status == 2);
  CHECK(call({}).status == 2);
  CHECK(call({"gamma", "--p", "two"}).status == 2);
  CHECK(call({"spectrum", "--bc", "robin", "--radius", "3", "--spacing", "0.25"}).status == 2);
  CHECK(call({"gamma", "--p", "2", "--format", "xml"}).status == 2);
  CHECK(call({"quasimode", "--kind", "other"}).status == 2);
  CHECK(call({"gamma", "--help"}).status == 0);
}

TEST_CASE("non-convergence exits with status 3") {
  // A residual tolerance below rounding level is unreachable.
  const Captured c = call({"spectrum", "--radius", "6", "--spacing", "0.1", "--count", "2", "--tol", "1e-14"});
  CHECK(c.status == 3);
  CHECK(c.out.find("status=nonconverged") != std::string::npos);
}

TEST_CASE("identical configuration gives identical bytes") {
  const std::vector<std::string> args = {"spectrum", "--p", "2", "--lambda", "1", "--radius", "3",
                                         "--spacing", "0.25", "--count", "3"};
  const Captured a = call(args);
  const Captured b = call(args);
  REQUIRE(a.status == 0);
  CHECK(a.out == b.out);
  std::vector<std::string> json_args = args;
  json_args.insert(json_args.end(), {"--format", "json"});
  CHECK(call(json_args).out == call(json_args).out);
}

TEST_CASE("csv and json outputs round-trip every number") {
  const std::vector<std::string> args = {"bracket", "--radius", "3", "--spacing", "0.25", "--count", "3"};
  const Captured csv = call(args);
  std::vector<std::string> json_args = args;
  json_args.insert(json_args.end(), {"--format", "json"});
  const Captured js = call(json_args);
  REQUIRE(csv.status == 0);
  REQUIRE(js.status == 0);
  const auto doc = nlohmann::json::parse(js.out);
  const auto l = lines(csv.out);
  REQUIRE(l.size() == 2 + doc["rows"].size());
  CHECK(split(l[1]) == doc["columns"].get<std::vector<std::string>>());
  CHECK(doc["metadata"]["command"] == "bracket");
  CHECK(doc["metadata"]["radius"] == "3");
  for (std::size_t r = 0; r < doc["rows"].size(); ++r) {
    const auto cells = split(l[r + 2]);
    for (std::size_t i = 1; i < cells.size(); ++i) {
      const double from_csv = std::strtod(cells[i].c_str(), nullptr);
      CHECK(from_csv == doc["rows"][r][i].get<double>());
      CHECK(speclab::cli::format_real(from_csv) == cells[i]);
    }
  }
}

TEST_CASE("output file and summary line") {
  const auto path = std::filesystem::temp_directory_path() / "speclab_cli_test.csv";
  const Captured c = call({"eigfun", "--radius", "2", "--spacing", "0.25", "--output", path.string()});
  REQUIRE(c.status == 0);
  CHECK(lines(c.out).size() == 1);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto l = lines(ss.str());
  REQUIRE(l.size() == 2 + 17 * 17);
  CHECK(l[1] == "x,y,value");
  CHECK(l[0].find("output=" + path.string()) != std::string::npos);
  std::filesystem::remove(path);
}

TEST_CASE("every subcommand runs on a small configuration") {
  CHECK(call({"gamma-min", "--plo", "1.5", "--phi", "2.5", "--tol", "1e-4"}).status == 0);
  CHECK(call({"scan-r", "--radii", "2,3", "--spacing", "0.1", "--count", "1"}).status == 0);
  CHECK(call({"critical", "--radius", "3", "--spacing", "0.25", "--width", "1e-3"}).status == 0);
  CHECK(call({"surface", "--pvalues", "1,2", "--radius", "3", "--spacing", "0.25", "--width", "1e-3"}).status == 0);
  CHECK(call({"quasimode", "--p", "2", "--lambda", "1.5", "--mu", "-1", "--k", "20,40"}).status == 0);
  CHECK(call({"quasimode", "--p", "2", "--mu", "1", "--k", "20", "--kind", "critical"}).status == 0);
  CHECK(call({"moments", "--lambda", "0.5", "--biglambda", "1,2", "--radius", "4", "--spacing", "0.25"}).status == 0);
}
