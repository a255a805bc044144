#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "spark/params.hpp"

namespace spark {

enum class GraspPhase { PinchContact, StopperEngaged, Scooping, ScoopComplete };

std::string to_string(GraspPhase phase);

struct DescentState {
  GraspPhase mode = GraspPhase::PinchContact;
  double depth = 0.0;               // mm past first surface contact
  double distal_rotation = 0.0;     // deg, 0 when the distal segment is straight
  double spring1_deflection = 0.0;  // rad
  double spring2_deflection = 0.0;  // rad
};

struct SurfaceScenario {
  double surface_height = 0.0;  // mm
  double tilt = 0.0;            // deg, envelope [0, 45]
  bool asymmetric = false;
  double half_span = 60.0;      // mm, wrist centre to each finger
};

// Distal rotation ramps linearly from 0 at dh1 to dtheta_c1 at dh1 + dh2.
DescentState descend(const FingerParams& params, const SurfaceScenario& scenario, double depth);

std::vector<DescentState> mode_trace(const FingerParams& params, const SurfaceScenario& scenario,
                                     double max_depth, std::size_t n_samples);

// Finger A is lowered and finger B raised by half_span*sin(tilt) relative to the
// wrist-centre depth; a finger above the surface reports depth 0.
std::pair<DescentState, DescentState> asymmetric_pose(const FingerParams& params,
                                                      const SurfaceScenario& scenario,
                                                      double centre_depth);

struct SpringMoments {
  double k1;  // N*mm, about joint B
  double k2;  // N*mm, about joint C
};

SpringMoments spring_moments(const FingerParams& params, const DescentState& state);

// Angle between CI and the distal segment CJ (deg); stays at q2 while pinching.
double distal_joint_angle(const FingerParams& params, const DescentState& state);

void write_mode_trace_csv(std::ostream& out, const FingerParams& params, const std::vector<DescentState>& trace);

std::vector<double> trace_depths(double max_depth, std::size_t n_samples);

// `depths` are the wrist-centre depths the pairs were evaluated at.
void write_asymmetric_trace_csv(std::ostream& out, const FingerParams& params, const std::vector<double>& depths,
                                const std::vector<std::pair<DescentState, DescentState>>& trace);

}  // namespace spark
