#include "spark/modeswitch.hpp"

#include <algorithm>
#include <cmath>

#include "spark/csv.hpp"
#include "spark/error.hpp"

namespace spark {

namespace {

void check_envelope(const SurfaceScenario& s) {
  if (!(s.tilt >= 0.0 && s.tilt <= 45.0))
    throw EnvelopeViolation("wrist tilt " + format_number(s.tilt) + " deg outside [0, 45]");
  if (!(s.half_span > 0.0)) throw InvalidArgument("gripper half-span must be positive");
}

}  // namespace

std::string to_string(GraspPhase phase) {
  switch (phase) {
    case GraspPhase::PinchContact: return "PinchContact";
    case GraspPhase::StopperEngaged: return "StopperEngaged";
    case GraspPhase::Scooping: return "Scooping";
    case GraspPhase::ScoopComplete: return "ScoopComplete";
  }
  return "?";
}

DescentState descend(const FingerParams& p, const SurfaceScenario& scenario, double depth) {
  check_envelope(scenario);
  if (!(depth >= 0.0)) throw InvalidArgument("descent depth must be non-negative");
  const double complete = p.dh1 + p.dh2;
  DescentState s;
  s.depth = depth;
  if (depth < p.dh1) {
    s.mode = GraspPhase::PinchContact;
  } else if (depth >= complete) {
    s.mode = GraspPhase::ScoopComplete;
    s.distal_rotation = p.dtheta_c1;
  } else {
    s.mode = depth == p.dh1 ? GraspPhase::StopperEngaged : GraspPhase::Scooping;
    s.distal_rotation = std::min(p.dtheta_c1, p.dtheta_c1 * (depth - p.dh1) / p.dh2);
  }
  s.spring1_deflection = std::min(depth, p.dh1) / p.L1;
  s.spring2_deflection = deg2rad(s.distal_rotation);
  return s;
}

std::vector<double> trace_depths(double max_depth, std::size_t n) {
  if (n < 2) throw InvalidArgument("mode trace needs at least 2 samples");
  if (!(max_depth >= 0.0)) throw InvalidArgument("descent depth must be non-negative");
  std::vector<double> depths(n);
  for (std::size_t i = 0; i < n; ++i)
    depths[i] = i + 1 == n ? max_depth : max_depth * static_cast<double>(i) / static_cast<double>(n - 1);
  return depths;
}

std::vector<DescentState> mode_trace(const FingerParams& p, const SurfaceScenario& scenario, double max_depth,
                                     std::size_t n_samples) {
  std::vector<DescentState> trace;
  for (double d : trace_depths(max_depth, n_samples)) trace.push_back(descend(p, scenario, d));
  return trace;
}

std::pair<DescentState, DescentState> asymmetric_pose(const FingerParams& p, const SurfaceScenario& scenario,
                                                      double centre_depth) {
  check_envelope(scenario);
  const double offset = scenario.half_span * std::sin(deg2rad(scenario.tilt));
  return {descend(p, scenario, std::max(0.0, centre_depth + offset)),
          descend(p, scenario, std::max(0.0, centre_depth - offset))};
}

SpringMoments spring_moments(const FingerParams& p, const DescentState& s) {
  return {p.k1 * s.spring1_deflection, p.k2 * s.spring2_deflection};
}

double distal_joint_angle(const FingerParams& p, const DescentState& s) { return p.q2 - s.distal_rotation; }

void write_mode_trace_csv(std::ostream& out, const FingerParams& p, const std::vector<DescentState>& trace) {
  out << "depth_mm,mode,distal_rotation_deg,k1_moment_Nmm,k2_moment_Nmm\n";
  for (const auto& s : trace) {
    const auto m = spring_moments(p, s);
    out << format_number(s.depth) << ',' << to_string(s.mode) << ',' << format_number(s.distal_rotation) << ','
        << format_number(m.k1) << ',' << format_number(m.k2) << '\n';
  }
}

void write_asymmetric_trace_csv(std::ostream& out, const FingerParams& p, const std::vector<double>& depths,
                                const std::vector<std::pair<DescentState, DescentState>>& trace) {
  out << "depth_mm";
  for (const char* f : {"a", "b"})
    out << ",depth_mm_" << f << ",mode_" << f << ",distal_rotation_deg_" << f << ",k1_moment_Nmm_" << f
        << ",k2_moment_Nmm_" << f;
  out << '\n';
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << format_number(depths.at(i));
    for (const DescentState* s : {&trace[i].first, &trace[i].second}) {
      const auto m = spring_moments(p, *s);
      out << ',' << format_number(s->depth) << ',' << to_string(s->mode) << ',' << format_number(s->distal_rotation)
          << ',' << format_number(m.k1) << ',' << format_number(m.k2);
    }
    out << '\n';
  }
}

}  // namespace spark
