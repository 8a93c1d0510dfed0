#include "doctest.h"

#include "shapecalc/cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace shapecalc;
using namespace shapecalc::cli;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string error_of(const std::string& text) {
  try {
    validate(parse(text));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("an empty config gives the annulus defaults") {
  const auto c = parse("");
  CHECK_NOTHROW(validate(c));
  CHECK(c.domain_type == "annulus");
  CHECK(c.level == 2);
  CHECK(c.degree == 3);
  CHECK(c.t_list == std::vector<double>{0.1, 0.05, 0.025, 0.0125});
  CHECK(c.fields.size() == 3);
}

TEST_CASE("the reference page is itself a valid config with the defaults") {
  const auto c = parse(config_reference());
  const ExperimentConfig d;
  CHECK_NOTHROW(validate(c));
  CHECK(c.fields == d.fields);
  CHECK(c.multipliers == d.multipliers);
  CHECK(c.n_list == d.n_list);
  CHECK(c.alpha_list == d.alpha_list);
  CHECK(c.target == d.target);
  CHECK(c.data == d.data);
}

TEST_CASE("lists and sections parse") {
  const auto c = parse(
      "[domain]\ntype = star\nr0 = 1.5\nmodes = 2 0.15 0; 3 0 0.1\nbreaks = 0 0.1 0.5 0.6\n"
      "labels = inflow wall inflow wall\n[data]\nloop0 = ramp 0 1; const 1; ramp 1 0; const 0\n"
      "[flow]\nkind = stokes\n[verify]\nfields = windowed 0 1 0 | windowed 0 3 1 * 0.5\n"
      "t_list = 0.2, 0.1\n[control]\nproject_kernel = no\n");
  CHECK(c.star_modes.size() == 2);
  CHECK(c.star_modes[1].b == doctest::Approx(0.1));
  CHECK(c.breaks.size() == 4);
  CHECK(c.flow == "stokes");
  CHECK(c.fields == std::vector<std::string>{"windowed 0 1 0", "windowed 0 3 1 * 0.5"});
  CHECK(c.t_list == std::vector<double>{0.2, 0.1});
  CHECK_FALSE(c.project_kernel);
  CHECK_NOTHROW(validate(c));
  CHECK_NOTHROW(build_domain(c));
}

TEST_CASE("errors name the offending key") {
  CHECK(error_of("[mesh]\nlevl = 2\n").find("mesh.levl") != std::string::npos);
  CHECK(error_of("[meshes]\nlevel = 2\n").find("meshes") != std::string::npos);
  CHECK(error_of("[mesh]\nlevel = 9\n").find("mesh.level") != std::string::npos);
  CHECK(error_of("[mesh]\nlevel = two\n").find("mesh.level") != std::string::npos);
  CHECK(error_of("[flow]\ndegree = 4\n").find("flow.degree") != std::string::npos);
  CHECK(error_of("[verify]\nt_list = 0.1 0.2\n").find("verify.t_list") != std::string::npos);
  CHECK(error_of("[verify]\nfields =\n").find("verify.fields") != std::string::npos);
  CHECK(error_of("[control]\nn_list = 1 40\n").find("control.n_list") != std::string::npos);
  CHECK(error_of("[domain]\ntype = torus\n").find("domain.type") != std::string::npos);
  CHECK(error_of("[mesh\nlevel = 1\n").find("line") != std::string::npos);
}

TEST_CASE("setup errors become config errors") {
  ExperimentConfig c;
  c.data = {"const 1"};
  CHECK_THROWS_AS(build_setup(c, 0), ConfigError);
  c = ExperimentConfig{};
  c.data = {"const 1", "ramp 0"};
  CHECK_THROWS_AS(build_setup(c, 0), ConfigError);
  const auto d = build_domain(ExperimentConfig{});
  CHECK_THROWS_AS(parse_wall_function(d, "uniform 1"), ConfigError);
  CHECK_THROWS_AS(parse_wall_function(d, "spiral 0"), ConfigError);
  CHECK_THROWS_AS(parse_wall_function(d, "fourier 0 2 tan"), ConfigError);
  CHECK(parse_wall_function(d, "zero").is_zero());
  const auto f = parse_wall_function(d, "uniform 0 * 2; fourier 0 1 sin * 0.5");
  CHECK(f.terms().size() == 2);
  CHECK(f.value(0, 0.0) == doctest::Approx(2.0));
}

TEST_CASE("solve and mesh-export write their files") {
  ExperimentConfig c;
  c.level = 0;
  c.output_dir = (std::filesystem::temp_directory_path() / "shapecalc_cli_unit").string();
  std::filesystem::remove_all(c.output_dir);
  std::ostringstream log;
  CHECK(cmd_solve(c, log) == kOk);
  CHECK(cmd_mesh_export(c, log) == kOk);
  CHECK(cmd_linearize(c, 1, "", log) == kOk);
  const std::filesystem::path out(c.output_dir);
  CHECK(std::filesystem::exists(out / "S_potential_level0.csv"));
  CHECK(std::filesystem::exists(out / "mesh_level0.txt"));
  CHECK(std::filesystem::exists(out / "dS_potential_V1_level0.csv"));
  // Re-import the exported mesh.
  CHECK(cmd_mesh_import(c, out / "mesh_level0.txt", log) == kOk);
  CHECK(std::filesystem::exists(out / "imported_mesh.txt"));
  CHECK_THROWS_AS(cmd_linearize(c, 99, "", log), ConfigError);
  std::filesystem::remove_all(out);
}

TEST_CASE("verify report format") {
  VerifyReport r;
  r.checks.push_back({"a.b", 1.5, ">=", 1.0, true});
  r.checks.push_back({"c", 2.0, "info", 0.0, true});
  r.checks.push_back({"d", 3.0, "<", 1.0, false});
  std::ostringstream out;
  r.write(out);
  CHECK_FALSE(r.passed());
  CHECK(out.str().find("PASS a.b = 1.500000e+00 >= 1.000000e+00") != std::string::npos);
  CHECK(out.str().find("INFO c = 2.000000e+00") != std::string::npos);
  CHECK(out.str().find("FAIL d") != std::string::npos);
  CHECK(out.str().find("summary: 3 entries, 1 failed") != std::string::npos);
}
