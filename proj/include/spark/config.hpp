#pragma once

#include <array>
#include <optional>
#include <string>

#include "spark/dynamics.hpp"
#include "spark/mechanism.hpp"
#include "spark/params.hpp"
#include "spark/statics.hpp"

namespace spark {

// Parse failure; line and column are 1-based, 0 when unknown.
struct ConfigError : Error {
  ConfigError(const std::string& what, int line, int column)
      : Error(what), line(line), column(column) {}
  int line;
  int column;
};

inline constexpr int kSchemaVersion = 1;

struct RunConfig {
  FingerParams finger;

  // Rotational inertias about each COM; slender rods when absent.
  std::array<std::optional<double>, 3> inertia;
  std::array<double, 3> q0_deg{30.0, 20.0, 10.0};
  std::array<double, 3> dq0_deg_s{60.0, -30.0, 45.0};
  double duration_s = 1.0;
  double dt_s = 1e-4;
  bool gravity = true;

  double torque = 20.0;  // N*mm
  double spring = 10.0;  // N*mm/rad, scoop limiting spring
  std::optional<double> d2, d3;
  double theta2_deg = 45.0;
  double theta3_deg = 15.0;
  std::optional<SweepSpec> sweep;

  double max_depth = 30.4;
  double tilt_deg = 0.0;
  double half_span = 60.0;
  std::size_t descent_samples = 100;

  std::size_t traj_samples = 1000;
  std::optional<double> stroke_lower, stroke_upper;

  SolverOptions solver;
  std::array<double, 3> reference_deg{60.0, -60.0, -90.0};

  std::optional<std::string> output_dir;

  DynamicsParams<double> dynamics() const;
  ContactGeometry<double> contact() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace spark
