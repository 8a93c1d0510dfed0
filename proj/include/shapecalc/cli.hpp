#pragma once

#include "shapecalc/adjoint.hpp"
#include "shapecalc/control.hpp"
#include "shapecalc/validation.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace shapecalc::cli {

/// Bad configuration or usage; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kUsage = 2 };

/// Everything one experiment needs, read from an INI file. Defaults describe
/// the annulus 1 < r < 2 with an inflow inner circle and a wall outer circle.
struct ExperimentConfig {
  // [domain]
  std::string domain_type = "annulus";  // annulus | circle | ellipse | star | spline
  double inner_radius = 1.0;
  double outer_radius = 2.0;
  std::string inner_label = "inflow";
  std::string outer_label = "wall";
  Vec2 center = Vec2::Zero();
  double radius = 1.0;               // circle
  double semi_a = 2.0, semi_b = 1.0;  // ellipse
  double star_r0 = 1.0;
  std::vector<geometry::StarCurve::Mode> star_modes;
  std::vector<Vec2> spline_points;
  std::vector<double> breaks{0.0};  // single-loop arc breakpoints in [0, 1)
  std::vector<std::string> labels{"wall"};

  // [data]: one arc list per loop, e.g. "const 1" or "ramp 0 1; const 0"
  std::vector<std::string> data{"const 1", "const 0"};

  // [flow]
  std::string flow = "potential";
  int degree = 3;

  // [mesh]
  double h0 = 0.25;
  int level = 2;
  int quadrature_order = 4;

  // [basis]
  std::string basis = "fourier";
  int basis_size = 16;
  double bump_width = 0.2;

  // [verify]
  std::vector<std::string> fields{"uniform 0", "bump 0 3.0 2.0 * 0.5", "fourier 0 3 cos * 0.3"};
  std::vector<std::string> multipliers{"uniform 0", "fourier 0 2 cos; fourier 0 1 sin * 0.5"};
  std::vector<double> t_list{0.1, 0.05, 0.025, 0.0125};
  double fd_step = 1e-2;
  int probe_level = 1;
  double obstruction_threshold = 1e-6;

  // [control]
  std::vector<int> n_list{1, 2, 4, 8, 12, 16};
  std::vector<double> alpha_list{1e-4, 1e-8, 1e-12};
  std::string target = "gaussian 0 2.0 1.0";
  bool project_kernel = true;

  // [output]
  std::string output_dir = "out";

  // Runtime settings, from flags.
  int threads = 1;
  std::uint64_t seed = 1;
  bool flip_kappa = false;
};

/// Reads an INI file; unknown keys and out-of-range values raise ConfigError
/// naming the offending key.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(std::istream& in);
/// Range checks shared by the loader and the flag overrides.
void validate(const ExperimentConfig& cfg);
/// Reference page of keys and defaults.
std::string config_reference();

/// Objects built from a config, shared by all commands.
struct Setup {
  geometry::DomainPtr domain;
  geometry::BoundaryData g;
  mesh::TriMeshPtr mesh;
  fem::DiscretizationPtr disc;
  mesh::WallQuadraturePtr quad;
  ops::FlowCase flow_case;
};

geometry::DomainPtr build_domain(const ExperimentConfig& cfg);
Setup build_setup(const ExperimentConfig& cfg, int level);

/// "uniform L", "fourier L k cos|sin", "windowed L arc k", "bump L center width",
/// "zero"; terms joined by ';', each optionally followed by "* scale".
geometry::WallFunction parse_wall_function(const geometry::DomainPtr& domain, const std::string& spec);
/// "gaussian L center width", "mode L k" or "column i" (response column i).
fem::WallProfile build_target(const ExperimentConfig& cfg, const Setup& s, const control::GramSystem& sys);

// Commands. Each writes into cfg.output_dir and logs to `log`.

int cmd_solve(const ExperimentConfig& cfg, std::ostream& log);
/// Basis member `index`, or `field_spec` if nonempty.
int cmd_linearize(const ExperimentConfig& cfg, int index, const std::string& field_spec, std::ostream& log);
/// Writes report.txt; returns kVerificationFailed if any check fails.
int cmd_verify(const ExperimentConfig& cfg, std::ostream& log);
int cmd_control(const ExperimentConfig& cfg, std::ostream& log);
/// Reads a Gmsh 2.2 or plain-text mesh against the configured domain and
/// re-exports it with its wall quadrature.
int cmd_mesh_import(const ExperimentConfig& cfg, const std::filesystem::path& mesh_path, std::ostream& log);
int cmd_mesh_export(const ExperimentConfig& cfg, std::ostream& log);

/// One line of a verification report.
struct Check {
  std::string name;
  double value = 0.0;
  std::string relation;  // ">=", "<", ">", "info"
  double threshold = 0.0;
  bool passed = true;
};

struct VerifyReport {
  std::vector<Check> checks;
  bool passed() const;
  void write(std::ostream& out) const;
};

VerifyReport run_verify(const ExperimentConfig& cfg);

}  // namespace shapecalc::cli
