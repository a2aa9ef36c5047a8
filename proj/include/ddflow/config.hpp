#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ddflow/model.hpp"
#include "ddflow/optimizer.hpp"

namespace ddflow {

/// Everything a run needs. Sections and keys of the INI file:
///   [mesh] n            [run] seed
///   [model] viscosity nu0 gamma buoyancy g_T g_S kinv diffusion lambda
///   [data] yD yD_value desired u_d y_d y_d_value desired_file ustar ustar_scale
///   [bounds] lower upper
///   [solver] newton_tol newton_max_iterations kkt_tol max_iterations armijo_c1 barzilai_borwein
///   [diagnostics] C6 C3 Cgn Cp2 C4 C2r epsilon probe_directions growth_radius growth_samples
///   [check] directions control_scale direction_scale fd_steps
///   [mms] levels
struct RunConfig {
  int n = 8;
  std::uint64_t seed = 1;
  BoussinesqParams model;

  std::string y_boundary = "zero";  ///< named field, see field_names()
  Vec2 y_boundary_value = Vec2::Zero();
  std::string desired = "analytic";  ///< analytic | file | inverse-crime
  std::string u_desired = "zero";
  std::string y_desired = "zero";
  Vec2 y_desired_value = Vec2::Zero();
  std::string desired_file;  ///< state CSV, used with desired = file
  std::string ustar = "vortex";
  double ustar_scale = 1.0;

  double lower = -10.0;
  double upper = 10.0;

  double newton_tol = 1e-12;
  int newton_max_iterations = 30;
  double kkt_tol = 1e-6;
  int max_iterations = 200;
  double armijo_c1 = 1e-4;
  bool barzilai_borwein = true;

  DiagnosticsConfig constants;
  double epsilon = 0.0;  ///< 0 selects the default
  int probe_directions = 50;
  double growth_radius = 0.1;
  int growth_samples = 100;

  int check_directions = 5;
  double control_scale = 1.0;
  double direction_scale = 1.0;
  std::vector<double> fd_steps{1e-2, 1e-3, 1e-4};

  std::vector<int> mms_levels{8, 16, 32};

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Parses an INI document; unknown keys, malformed values and invariant
/// violations raise ConfigError with the line number.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_string(const std::string& text, const std::string& origin = "<config>");

/// Names accepted for yD, u_d, y_d and ustar.
std::vector<std::string> field_names();
/// zero | constant (uses `value`) | linear-x (x, x) | linear-xy (x, y/2) |
/// vortex (sin^2(pi x) sin(2 pi y), -sin(2 pi x) sin^2(pi y)).
VectorFunction named_field(const std::string& name, const Vec2& value = Vec2::Zero());

/// Model, mesh and targets described by the configuration. With desired =
/// inverse-crime the targets are the state at ustar; with desired = file they
/// are read from the state CSV.
FlowProblem build_problem(const RunConfig& config);
/// ustar_scale * named ustar field at the cell centroids.
Vector build_ustar(const FlowProblem& problem, const RunConfig& config);
/// Zero control projected onto the configured bounds.
ControlField initial_control(const FlowProblem& problem, const RunConfig& config);
NewtonOptions newton_options(const RunConfig& config);
OptimizeOptions optimize_options(const RunConfig& config);

}  // namespace ddflow
