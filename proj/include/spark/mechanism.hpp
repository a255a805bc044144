#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "spark/error.hpp"
#include "spark/params.hpp"

namespace spark {

using Point = Eigen::Vector2d;

struct ValidationReport {
  struct Violation {
    std::string relation;  // e.g. "L1:L3 != 4:1"
    double measured;       // measured ratio
    double expected;
  };
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  explicit operator bool() const { return ok(); }
  std::string describe() const;
};

// Checks the link equalities and the 4:2:1 ratio with relative tolerance 1e-9.
ValidationReport validate_kempe_constraints(const FingerParams& params);

struct Bar {
  std::string a, b;
  double rest_length;
};

// Joint rigidly carried by the frame of segment base->tip:
//   joint = base + along*(tip - base) + across*perp(tip - base)
// with perp the counter-clockwise quarter turn.
struct Attachment {
  std::string joint, base, tip;
  double along = 0.0;
  double across = 0.0;
};

struct Grounding {
  std::string joint;
  Point at;
};

enum class Axis { X, Y };

// The driven coordinate equals `origin + driver_value`.
struct Driver {
  std::string joint;
  Axis axis = Axis::Y;
  double origin = 0.0;
};

struct LinkageState {
  std::map<std::string, Point> coordinates;
  double residual_norm = 0.0;

  const Point& at(const std::string& joint) const;
};

struct LinkageTopology {
  std::vector<std::string> joints;
  std::vector<Bar> bars;
  std::vector<Attachment> attachments;
  std::vector<Grounding> grounded;
  Driver driver;
  // Assembled pose at driver value 0, used to seed solves.
  LinkageState reference;
  // Output point and the joint it hangs from (orientation of the segment).
  std::string output = "J";
  std::string output_base = "C";

  bool is_grounded(const std::string& joint) const;
  // 2*(free joints) - (bars not joining two grounded joints) - 2*(attachments)
  int mobility() const;
  bool connected() const;
  const Bar* find_bar(const std::string& a, const std::string& b) const;
  // Throws InvalidArgument on dangling names, non-positive bars, duplicates.
  void check() const;
};

// Kempe-linkage reconstruction. Throws ConstraintViolation if validation fails.
LinkageTopology spark_preset(const FingerParams& params);

struct SolverOptions {
  double tolerance = 1e-10;
  int max_iterations = 100;
  int max_halvings = 20;
  // Relative pivot threshold below which the constraint Jacobian is singular.
  double singular_threshold = 1e-10;
};

LinkageState solve_position(const LinkageTopology& topology, double driver_value,
                            const LinkageState& initial_guess,
                            const SolverOptions& options = {});

// Stacked residual (bars, attachments, driver) at a state.
Eigen::VectorXd constraint_residual(const LinkageTopology& topology, double driver_value,
                                    const LinkageState& state);

struct StrokeLimits {
  double lower;
  double upper;
  double span() const { return upper - lower; }
};

// Driver sweep from the reference pose outwards until the solver fails, refined
// by bisection; the returned range is the bracket shrunk by 1e-3 of its span on
// each end. Results are cached per topology.
StrokeLimits discover_stroke(const LinkageTopology& topology, const SolverOptions& options = {});

// Solves at `target`, walking from `from` (solved at `from_value`) in steps of at most `max_step`.
LinkageState continue_to(const LinkageTopology& topology, const LinkageState& from,
                         double from_value, double target, double max_step,
                         const SolverOptions& options = {});

struct TrajectorySample {
  double driver;
  Point tip;
  double orientation;  // rad, direction of output_base -> output
};

// Thrown by fingertip_trajectory; carries the samples solved before the failure.
struct TrajectoryFailure : SampleFailure {
  TrajectoryFailure(const std::string& what, std::size_t index, std::vector<TrajectorySample> completed)
      : SampleFailure(what, index), completed(std::move(completed)) {}
  std::vector<TrajectorySample> completed;
};

std::vector<TrajectorySample> fingertip_trajectory(const LinkageTopology& topology,
                                                   double lower, double upper,
                                                   std::size_t n_samples,
                                                   const SolverOptions& options = {});

struct Straightness {
  double max_dev;
  double rms_dev;
};

Straightness straightness_metric(const std::vector<TrajectorySample>& trajectory);

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectorySample>& trajectory);

}  // namespace spark
