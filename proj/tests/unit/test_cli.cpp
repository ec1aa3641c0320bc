#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "hkgame/errors.hpp"
#include "hkgame_cli/experiment.hpp"

using namespace hkgame;
using namespace hkgame::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hkgame_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::vector<double>> read_csv(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) row.push_back(std::stod(field));
    rows.push_back(row);
  }
  return rows;
}

ExperimentSpec k2_spec(const fs::path& out) {
  ExperimentSpec spec;
  spec.graph = "k2";
  spec.horizon = 1.0;
  spec.x0 = std::vector<double>{1.0, -1.0};
  spec.out = out;
  return spec;
}

}  // namespace

TEST_CASE("argument parsing") {
  CHECK(parse_number_list("1.5") == std::vector<double>{1.5});
  CHECK(parse_number_list("1,2,3") == std::vector<double>{1, 2, 3});
  CHECK_THROWS_AS(parse_number_list("1,x"), ConfigError);
  CHECK_THROWS_AS(parse_number_list("2.5abc"), ConfigError);
  CHECK_THROWS_AS(parse_number_list(""), ConfigError);
  CHECK(parse_mode("nash") == Mode::kNash);
  CHECK_THROWS_AS(parse_mode("closed-loop"), ConfigError);

  ExperimentSpec spec;
  apply_x0_argument(spec, "cluster:17");
  CHECK(spec.seed == 17);
  CHECK_FALSE(spec.x0.has_value());
  apply_x0_argument(spec, "0.5,-0.5");
  CHECK(spec.x0 == std::vector<double>{0.5, -0.5});
  CHECK_THROWS_AS(apply_x0_argument(spec, "cluster:abc"), ConfigError);
}

TEST_CASE("spec JSON round trip") {
  ExperimentSpec spec = k2_spec("somewhere");
  spec.r = {2.0, 3.0};
  spec.mode = Mode::kSocial;
  spec.samples = 51;
  const auto back = spec_from_json(spec_to_json(spec));
  CHECK(back.graph == "k2");
  CHECK(back.r == spec.r);
  CHECK(back.x0 == spec.x0);
  CHECK(back.mode == Mode::kSocial);
  CHECK(back.samples == 51);
  // The output directory is not part of the recorded spec, so diagnostics
  // stay identical wherever they are written.
  CHECK_FALSE(spec_to_json(spec).contains("out"));
}

TEST_CASE("config errors map to exit code 1") {
  std::ostringstream err;
  auto spec = k2_spec(scratch("bad"));
  spec.r = {1.0, 0.0};
  CHECK(run(spec, err) == kConfigFailure);
  spec.r = {1.0};
  spec.b = {0.0};
  CHECK(run(spec, err) == kConfigFailure);
  spec.b = {1.0};
  spec.x0 = std::vector<double>{1.0, 2.0, 3.0};
  CHECK(run(spec, err) == kConfigFailure);
  spec.x0.reset();
  spec.graph = "/nonexistent/edges.txt";
  CHECK(run(spec, err) == kConfigFailure);
  CHECK_FALSE(err.str().empty());
}

TEST_CASE("K2 run writes all outputs and Nash stays antisymmetric") {
  const auto out = scratch("k2");
  std::ostringstream err;
  REQUIRE(run(k2_spec(out), err) == kSuccess);
  for (const char* name : {"uncontrolled.csv", "nash.csv", "nash_controls.csv", "social.csv",
                           "social_controls.csv", "plot_data.csv", "diagnostics.json"}) {
    CHECK(fs::exists(out / name));
  }
  CHECK(slurp(out / "nash.csv").rfind("t,x1,x2\n", 0) == 0);
  CHECK(slurp(out / "nash_controls.csv").rfind("t,u1,u2\n", 0) == 0);
  for (const auto& row : read_csv(out / "nash.csv")) {
    REQUIRE(row.size() == 3);
    CHECK(std::abs(row[1] + row[2]) <= 1e-9);
  }
  const auto diag = nlohmann::json::parse(slurp(out / "diagnostics.json"));
  CHECK(diag.contains("nash"));
  CHECK(diag.contains("social"));
}

TEST_CASE("uncontrolled Zachary output shape") {
  const auto out = scratch("zachary");
  ExperimentSpec spec;
  spec.seed = 2023;
  spec.mode = Mode::kUncontrolled;
  spec.out = out;
  std::ostringstream err;
  REQUIRE(run(spec, err) == kSuccess);
  std::istringstream csv(slurp(out / "uncontrolled.csv"));
  std::string line;
  int lines = 0;
  while (std::getline(csv, line)) {
    ++lines;
    CHECK(std::count(line.begin(), line.end(), ',') == 34);
  }
  CHECK(lines == 202);
  CHECK_FALSE(fs::exists(out / "nash.csv"));
}

TEST_CASE("higher effort weight leaves a wider final spread") {
  auto final_spread = [](double r) {
    const auto out = scratch("r" + std::to_string(static_cast<int>(r)));
    ExperimentSpec spec;
    spec.seed = 2023;
    spec.r = {r};
    spec.mode = Mode::kNash;
    spec.out = out;
    std::ostringstream err;
    REQUIRE(run(spec, err) == kSuccess);
    return nlohmann::json::parse(slurp(out / "diagnostics.json"))["nash"]["final_spread"]
        .get<double>();
  };
  CHECK(final_spread(20.0) > final_spread(1.0));
}

TEST_CASE("runs are byte-identical") {
  auto once = [](const std::string& tag) {
    const auto out = scratch(tag);
    ExperimentSpec spec;
    spec.seed = 5;
    spec.samples = 51;
    spec.out = out;
    std::ostringstream err;
    REQUIRE(run(spec, err) == kSuccess);
    return slurp(out / "nash.csv") + slurp(out / "social.csv") + slurp(out / "diagnostics.json");
  };
  const std::string first = once("det_a");
  CHECK(first == once("det_b"));
}

TEST_CASE("graph info") {
  ExperimentSpec spec;
  std::ostringstream out, err;
  REQUIRE(graph_info(spec, out, err) == kSuccess);
  const auto j = nlohmann::json::parse(out.str());
  CHECK(j["agents"] == 34);
  CHECK(j["edges"] == 78);
}
