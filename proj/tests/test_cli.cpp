#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "mfs/config.hpp"
#include "mfs/runner.hpp"
#include "mfs/suites.hpp"
#include "near.hpp"

using namespace mfs::cli;

namespace {

constexpr double kPi = std::numbers::pi;

std::string validation_message(const json& raw) {
  try {
    resolve_config(raw);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

json residual_config() {
  return {{"command", "horizontal-residual"}, {"phi0", "paper_phi0"}, {"y_grid", {0, "pi/4"}}};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "mfs_test_cli";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Data rows of a CSV artifact, split into cells.
std::vector<std::vector<std::string>> data_rows(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(csv);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.starts_with("#")) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("angle strings") {
  CHECK(parse_angle(json(0.25), "a") == 0.25);
  CHECK(parse_angle(json("0.25"), "a") == 0.25);
  CHECK(parse_angle(json("pi"), "a") == kPi);
  CHECK(parse_angle(json("-pi/2"), "a") == -kPi / 2);
  CHECK(parse_angle(json("3pi/4"), "a") == rel(3 * kPi / 4, 1e-15));
  CHECK(parse_angle(json("2*pi/3"), "a") == rel(2 * kPi / 3, 1e-15));
  CHECK(parse_angle(json(" pi / 4 "), "a") == kPi / 4);
  for (const char* bad : {"", "pie", "pi/0", "2pi/x", "tau", "1e999"}) CHECK_THROWS_AS(parse_angle(json(bad), "a"), ValidationError);
  CHECK_THROWS_AS(parse_angle(json(true), "a"), ValidationError);
}

TEST_CASE("configuration validation names the offending field") {
  json raw = residual_config();
  raw["bogus_field"] = 1;
  CHECK(validation_message(raw).find("bogus_field") != std::string::npos);
  CHECK(validation_message(json{{"phi0", "paper_phi0"}}).find("command") != std::string::npos);
  CHECK(validation_message(json{{"command", "warp-drive"}}).find("warp-drive") != std::string::npos);

  json nested = residual_config();
  nested["phi0"] = {{"family", "scaled_ellipse"}, {"M", {{1, 0}, {0, 1}}}, {"shear", 2}};
  CHECK(validation_message(nested).find("shear") != std::string::npos);

  json not_spd = residual_config();
  not_spd["phi0"] = {{"family", "scaled_ellipse"}, {"M", {{1, 2}, {2, 1}}}};
  CHECK(validation_message(not_spd).find("phi0.M") != std::string::npos);

  json bad_angle = residual_config();
  bad_angle["y_grid"] = {0, "pie"};
  CHECK(validation_message(bad_angle).find("y_grid[1]") != std::string::npos);

  CHECK(validation_message(residual_config()).empty());
}

TEST_CASE("resolved configurations and their hashes") {
  const json r = resolve_config(residual_config());
  CHECK(r.contains("seed"));
  CHECK(r.contains("tolerances"));
  CHECK(r["format"] == "csv");
  CHECK(resolve_config(r) == r);
  CHECK(config_hash(r) == config_hash(resolve_config(residual_config())));
  CHECK(hash_hex(config_hash(r)).size() == 16);

  // Key order in the input does not matter; any value change does.
  json reordered = json::object();
  reordered["y_grid"] = {0, "pi/4"};
  reordered["phi0"] = "paper_phi0";
  reordered["command"] = "horizontal-residual";
  CHECK(config_hash(resolve_config(reordered)) == config_hash(r));
  json other = residual_config();
  other["seed"] = 1;
  CHECK(config_hash(resolve_config(other)) != config_hash(r));
  // FNV-1a 64 of the empty string.
  CHECK(hash_hex(0xcbf29ce484222325ULL) == "cbf29ce484222325");
}

TEST_CASE("horizontal residual run in process") {
  std::ostringstream out, err;
  REQUIRE(run_config(residual_config(), {}, out, err) == kOk);
  const std::string csv = out.str();
  CHECK(csv.starts_with("# mfs "));
  CHECK(csv.find("# config_hash: ") != std::string::npos);
  CHECK(csv.find("# seed: 0\n") != std::string::npos);
  CHECK(csv.find("\ny,residual\n") != std::string::npos);
  CHECK(csv.find('\r') == std::string::npos);
  const auto rows = data_rows(csv);
  REQUIRE(rows.size() == 2);
  CHECK(std::abs(std::stod(rows[0][1])) < 1e-15);
  CHECK(std::stod(rows[1][0]) == rel(kPi / 4, 1e-15));
  CHECK(std::abs(std::stod(rows[1][1]) + 0.40824829) < 1e-6);
}

TEST_CASE("ellipsoid scan run in process") {
  const json raw = {{"command", "amu-scan"},
                    {"norm", {{"family", "ellipsoid"}, {"Q", {1, 2, 5}}}},
                    {"center", {0, 0}},
                    {"radius", 0.3},
                    {"count", 8},
                    {"n", 256},
                    {"format", "json"}};
  std::ostringstream out, err;
  REQUIRE(run_config(raw, {}, out, err) == kOk);
  const json doc = json::parse(out.str());
  CHECK(doc.at("summary").at("max_defect").get<double>() < 1e-6);
  CHECK(doc.at("provenance").at("config_hash").get<std::string>().size() == 16);
  json echoed = resolve_config(raw);
  echoed.erase("output_path");
  CHECK(doc.at("provenance").at("config") == echoed);
}

TEST_CASE("exit statuses") {
  std::ostringstream out, err;
  json bad = residual_config();
  bad["bogus_field"] = 1;
  CHECK(run_config(bad, {}, out, err) == kValidation);
  CHECK(err.str().find("bogus_field") != std::string::npos);
  CHECK(run_suite("unknown", {}, out, err) == kValidation);
  CHECK_THROWS_AS(suite_checks("unknown", 0), ValidationError);

  // A library domain error is an input problem.
  const json arc = {{"command", "arc-defect"}, {"phi0", "paper_phi0"}, {"arcs", {{1, 1}}}};
  std::ostringstream err2;
  CHECK(run_config(arc, {}, out, err2) == kValidation);
  CHECK(err2.str().find("invalid input") != std::string::npos);

}

TEST_CASE("output path does not enter the hash") {
  const auto a = scratch("residual_a.csv"), b = scratch("residual_b.json");
  std::ostringstream out, err;
  RunOptions oa;
  oa.out = a.string();
  REQUIRE(run_config(residual_config(), oa, out, err) == kOk);
  RunOptions ob;
  ob.out = b.string();
  ob.format = "json";
  REQUIRE(run_config(residual_config(), ob, out, err) == kOk);
  CHECK(out.str().empty());
  const auto ha = read_config_hash(a.string()), hb = read_config_hash(b.string());
  REQUIRE(ha);
  REQUIRE(hb);
  // The format is part of the experiment record, so the two hashes differ;
  // moving the same run to another path does not.
  RunOptions oc = oa;
  oc.out = scratch("elsewhere.csv").string();
  REQUIRE(run_config(residual_config(), oc, out, err) == kOk);
  CHECK(read_config_hash(*oc.out) == ha);
  CHECK(slurp(a) == slurp(*oc.out));
  CHECK_FALSE(read_config_hash(scratch("missing.csv").string()));
}

TEST_CASE("seed override") {
  std::ostringstream a, b, err;
  RunOptions o;
  o.seed = 42;
  REQUIRE(run_config(residual_config(), o, a, err) == kOk);
  json seeded = residual_config();
  seeded["seed"] = 42;
  REQUIRE(run_config(seeded, {}, b, err) == kOk);
  CHECK(a.str() == b.str());
  CHECK(a.str().find("# seed: 42\n") != std::string::npos);
}

TEST_CASE("suite tables are reproducible") {
  const auto a = scratch("kakutani_a.csv"), b = scratch("kakutani_b.csv");
  std::ostringstream out, err;
  RunOptions oa, ob;
  oa.out = a.string();
  ob.out = b.string();
  const int sa = run_suite("kakutani", oa, out, err), sb = run_suite("kakutani", ob, out, err);
  CHECK(sa == sb);
  CHECK(sa == kOk);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).find("group,check,value,relation,threshold,pass") != std::string::npos);
  CHECK(out.str().find("PASSED") != std::string::npos);
}
