#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wcs/commands.hpp"
#include "wcs/error.hpp"

using namespace wcs;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

json run(std::string_view cmd, const json& cfg, CommandOptions opts = {}, int* exit_code = nullptr) {
  const CommandResult r = run_command(cmd, cfg.dump(), opts);
  if (exit_code) *exit_code = r.exit_code;
  return json::parse(r.json);
}

ErrorCode error_of(std::string_view cmd, const std::string& text) {
  try {
    run_command(cmd, text, {});
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

}  // namespace

TEST_CASE("certify reports") {
  int code = -1;
  json j = run("certify", {{"matrix", {{"generator", "identity"}, {"n", 3}}}, {"property", "rip"}, {"s", 1}}, {}, &code);
  CHECK(code == 0);
  CHECK(j["schema_version"] == 1);
  CHECK(j["result"]["constant"].get<double>() == 0.0);
  CHECK(j["result"]["witness"].is_null());
  CHECK(j["telemetry"].contains("wall_time_s"));

  j = run("certify", {{"matrix", {{"rows", {{1, 1, 1}}}}}, {"property", "nsp"}, {"s", 1}}, {}, &code);
  CHECK(code == 2);
  CHECK(j["result"]["constant"].get<double>() == doctest::Approx(1.0));
  CHECK(j["result"]["witness"].is_object());
}

TEST_CASE("config errors") {
  CHECK(error_of("certify", "{not json") == ErrorCode::Parse);
  CHECK(error_of("certify", R"({"matrix": {"generator": "identity", "n": 2}, "property": "rip", "s": 1, "x": 1})") ==
        ErrorCode::Schema);
  CHECK(error_of("certify", R"({"schema_version": 2, "matrix": {"generator": "identity", "n": 2}})") ==
        ErrorCode::Schema);
  CHECK(error_of("launch", R"({})") == ErrorCode::InvalidArgument);
  CHECK(error_of("recover", R"({"matrix": {"rows": [[1, 0], [1, 0]]}, "y": [1, 2]})") == ErrorCode::Infeasible);
}

TEST_CASE("recover writes a solution file") {
  TempDir dir("wcs_unit_recover");
  CommandOptions o;
  o.out_dir = dir.path;
  int code = -1;
  const json j = run("recover",
                     {{"matrix", {{"generator", "gaussian"}, {"m", 8}, {"n", 16}, {"seed", 2}}},
                      {"planted", {{"support", {1, 9}}, {"seed", 3}}}},
                     o, &code);
  CHECK(code == 0);
  CHECK(j["result"]["converged"] == true);
  CHECK(j["result"]["relative_error"].get<double>() <= 1e-6);
  CHECK(fs::exists(dir.path / "solution.wcsmat"));
  CHECK(fs::exists(dir.path / "report.json"));
}

TEST_CASE("construct output is deterministic") {
  TempDir a("wcs_unit_construct_a"), b("wcs_unit_construct_b");
  const json cfg = {{"kind", "partial_unitary"}, {"base", "dft"}, {"n", 12}, {"m", 5}, {"seed", 9}};
  CommandOptions oa, ob;
  oa.out_dir = a.path;
  ob.out_dir = b.path;
  run("construct", cfg, oa);
  run("construct", cfg, ob);
  REQUIRE(fs::exists(a.path / "matrix.wcsmat"));
  CHECK(slurp(a.path / "matrix.wcsmat") == slurp(b.path / "matrix.wcsmat"));
}

TEST_CASE("experiment determinism and resume") {
  TempDir full("wcs_unit_exp_full"), part("wcs_unit_exp_part");
  json cfg = {{"experiment", "scaling"}, {"trials", 3}, {"n", 8}, {"m", 5}, {"s", 2}, {"seed", 4}};
  CommandOptions of;
  of.out_dir = full.path;
  of.workers = 2;
  int code = -1;
  json j = run("experiment", cfg, of, &code);
  CHECK(code == 0);
  CHECK(j["result"]["complete"] == true);
  CHECK(j["result"]["resume_token"].is_null());
  const std::string csv = slurp(full.path / "scaling.csv");

  CommandOptions op;
  op.out_dir = part.path;
  op.workers = 1;
  json first = cfg;
  first["time_budget_s"] = 1e-12;
  j = run("experiment", first, op, &code);
  CHECK(code == 1);
  CHECK(j["result"]["complete"] == false);
  REQUIRE(j["result"]["resume_token"].is_string());
  json second = cfg;
  second["resume_token"] = j["result"]["resume_token"];
  j = run("experiment", second, op, &code);
  CHECK(code == 0);
  CHECK(j["result"]["complete"] == true);
  CHECK(slurp(part.path / "scaling.csv") == csv);

  json wrong = cfg;
  wrong["resume_token"] = "scaling:1:0000";
  CHECK_THROWS_AS(run("experiment", wrong, op), Error);
}
