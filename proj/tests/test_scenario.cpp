#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "petreg/cli.hpp"
#include "scenario_fixtures.hpp"

using namespace petreg;
using namespace petreg::testing;

namespace {

std::string bundled_scenario() {
  return std::string(PETREG_SCENARIO_DIR) + "/four_follower.json";
}

std::string write_temp_doc(const nlohmann::json& j, const std::string& name) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream f(path);
  f << j.dump(2);
  return path.string();
}

}  // namespace

TEST_CASE("bundled scenario parses and matches the in-code fixture") {
  const ScenarioDocument from_file = load_scenario_file(bundled_scenario());
  const ScenarioDocument fixture = four_follower_document();
  CHECK(to_json(from_file) == to_json(fixture));
}

TEST_CASE("round-trip: serialize then parse preserves every parameter") {
  const ScenarioDocument doc = four_follower_document();
  const nlohmann::json serialized = to_json(doc);
  const ScenarioDocument reparsed = parse_scenario(serialized);
  CHECK(to_json(reparsed) == serialized);
}

TEST_CASE("schema rejections") {
  const nlohmann::json base = to_json(four_follower_document());

  SUBCASE("unknown top-level key") {
    nlohmann::json j = base;
    j["extra"] = 1;
    CHECK_THROWS_WITH_AS(parse_scenario(j), doctest::Contains("extra"), SchemaError);
  }

  SUBCASE("unknown nested key") {
    nlohmann::json j = base;
    j["observer"]["mu3"] = 1.0;
    CHECK_THROWS_WITH_AS(parse_scenario(j), doctest::Contains("mu3"), SchemaError);
  }

  SUBCASE("missing key") {
    nlohmann::json j = base;
    j["leader"].erase("v0");
    CHECK_THROWS_WITH_AS(parse_scenario(j), doctest::Contains("v0"), SchemaError);
  }

  SUBCASE("dimension mismatch is caught with a path") {
    nlohmann::json j = base;
    j["followers"][1]["c"] = {{1.0, 0.0, 0.0}};
    CHECK_THROWS_WITH_AS(parse_scenario(j), doctest::Contains("followers[2]"), SchemaError);
  }

  SUBCASE("non-Hurwitz gain") {
    nlohmann::json j = base;
    j["followers"][0]["k"] = {{0.0, 0.0}};
    CHECK_THROWS_WITH_AS(parse_scenario(j), doctest::Contains(".k"), SchemaError);
  }

  SUBCASE("non-skew leader matrix") {
    nlohmann::json j = base;
    j["leader"]["s"] = {{0.0, 1.0}, {1.0, 0.0}};
    CHECK_THROWS_WITH_AS(parse_scenario(j), doctest::Contains("leader.s"), SchemaError);
  }

  SUBCASE("disconnected graph") {
    nlohmann::json j = base;
    j["graph"]["edges"] = {{1, 2}, {1, 3}};
    CHECK_THROWS_WITH_AS(parse_scenario(j), doctest::Contains("spanning tree"), SchemaError);
  }

  SUBCASE("invalid combine mode") {
    nlohmann::json j = base;
    j["observer"]["combine_mode"] = "both";
    CHECK_THROWS_AS(parse_scenario(j), SchemaError);
  }

  SUBCASE("ragged matrix") {
    nlohmann::json j = base;
    j["leader"]["s"] = {{0.0, 1.0}, {-1.0}};
    CHECK_THROWS_AS(parse_scenario(j), SchemaError);
  }
}

TEST_CASE("comments are allowed in scenario files") {
  std::ostringstream text;
  text << "// leading comment\n" << to_json(four_follower_document()).dump(2);
  CHECK_NOTHROW(load_scenario_text(text.str()));
}

TEST_CASE("apply_axis_value") {
  ScenarioDocument doc = four_follower_document();

  apply_axis_value(doc, "observer.iota_s", 0.5);
  CHECK(doc.iota_s == 0.5);

  apply_axis_value(doc, "controller.iota_omega_bar", 0.02);
  CHECK(doc.iota_omega_bar == 0.02);

  apply_axis_value(doc, "followers.sigma", 0.0);
  for (const auto& fe : doc.followers) CHECK(fe.sigma == 0.0);

  apply_axis_value(doc, "followers[2].rho", 0.7);
  CHECK(doc.followers[1].rho == 0.7);
  CHECK(doc.followers[0].rho == 1.0);

  CHECK_THROWS_AS(apply_axis_value(doc, "observer.bogus", 1.0), std::invalid_argument);
  CHECK_THROWS_AS(apply_axis_value(doc, "followers[9].sigma", 1.0), std::invalid_argument);
}

TEST_CASE("cmd_bounds verdicts") {
  ScenarioDocument doc = four_follower_document();
  std::ostringstream os;
  CHECK(cmd_bounds(doc, os) == kExitOk);
  CHECK(os.str().find("admissible") != std::string::npos);

  doc.comm_period = 0.06;
  std::ostringstream os2;
  CHECK(cmd_bounds(doc, os2) == kExitInfeasible);
  CHECK(os2.str().find("NOT admissible") != std::string::npos);
}

TEST_CASE("cmd_bounds reports steady-state bounds with PETM-C on") {
  ScenarioDocument doc = four_follower_document();
  doc.petm_c = true;
  doc.iota_psi_bar = doc.iota_omega_bar = 0.001;
  std::ostringstream os;
  CHECK(cmd_bounds(doc, os) == kExitOk);
  CHECK(os.str().find("steady-state error bound") != std::string::npos);
  CHECK(os.str().find("max steady-state error bound") != std::string::npos);
}

TEST_CASE("cmd_run writes outputs and refuses violated bounds") {
  ScenarioDocument doc = four_follower_document();
  doc.t_end = 1.0;
  const auto out = std::filesystem::temp_directory_path() / "petreg_cmd_run";
  std::filesystem::remove_all(out);

  std::ostringstream os;
  CHECK(cmd_run(doc, out.string(), false, 0.5, os) == kExitOk);
  CHECK(std::filesystem::exists(out / "trajectory.csv"));
  CHECK(std::filesystem::exists(out / "events.csv"));
  CHECK(std::filesystem::exists(out / "metrics.json"));

  doc.comm_period = 0.06;
  std::ostringstream os2;
  CHECK(cmd_run(doc, out.string(), false, 0.5, os2) == kExitInfeasible);
}

TEST_CASE("cmd_run maps divergence to its exit code") {
  ScenarioDocument doc = four_follower_document();
  doc.comm_period = 1.0;
  doc.sensor_periods = {1.0, 1.0, 1.0, 1.0};
  doc.t_end = 200.0;
  const auto out = std::filesystem::temp_directory_path() / "petreg_cmd_run_div";
  std::ostringstream os;
  CHECK(cmd_run(doc, out.string(), /*override_bounds=*/true, 10.0, os) == kExitDivergence);
  CHECK(os.str().find("warning") != std::string::npos);
}

TEST_CASE("bundled actuation-triggered scenario parses") {
  const ScenarioDocument doc =
      load_scenario_file(std::string(PETREG_SCENARIO_DIR) + "/four_follower_petm_c.json");
  CHECK(doc.petm_c);
  CHECK(doc.iota_omega_bar == 0.001);
}

TEST_CASE("run_main exit codes") {
  SUBCASE("schema error") {
    nlohmann::json j = to_json(four_follower_document());
    j["extra"] = true;
    const std::string path = write_temp_doc(j, "petreg_bad_doc.json");
    const char* argv[] = {"petreg", "bounds", path.c_str()};
    CHECK(run_main(3, argv) == kExitSchema);
  }

  SUBCASE("missing file") {
    const char* argv[] = {"petreg", "bounds", "/nonexistent/doc.json"};
    CHECK(run_main(3, argv) == kExitSchema);
  }

  SUBCASE("bounds on the bundled scenario") {
    const std::string path = bundled_scenario();
    const char* argv[] = {"petreg", "bounds", path.c_str()};
    CHECK(run_main(3, argv) == kExitOk);
  }
}

TEST_CASE("cmd_sweep produces one ordered row per value") {
  ScenarioDocument doc = four_follower_document();
  doc.t_end = 1.0;
  const auto out = std::filesystem::temp_directory_path() / "petreg_cmd_sweep";
  std::filesystem::remove_all(out);

  std::ostringstream os;
  const std::vector<std::string> axes = {"observer.iota_s", "observer.iota_v"};
  const std::vector<std::vector<double>> values = {{2.0, 2.0}, {1.0, 1.0}};
  CHECK(cmd_sweep(doc, axes, values, out.string(), false, 0.5, os) == kExitOk);

  std::ifstream f(out / "sweep.csv");
  std::string header, row1, row2;
  std::getline(f, header);
  std::getline(f, row1);
  std::getline(f, row2);
  CHECK(header.rfind("observer.iota_s,observer.iota_v,tail_error", 0) == 0);
  CHECK(row1.rfind("2,2,", 0) == 0);
  CHECK(row2.rfind("1,1,", 0) == 0);

  std::ostringstream os2;
  CHECK(cmd_sweep(doc, {"bogus.path"}, {{1.0}}, out.string(), false, 0.5, os2) == kExitSchema);
}
