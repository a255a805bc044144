#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spark/error.hpp"
#include "spark/modeswitch.hpp"

using namespace spark;

namespace {

const FingerParams kDefaults{};

int count_commas(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), ',')); }

}  // namespace

TEST_CASE("descend: shallow contact pinches") {
  const auto s = descend(kDefaults, {}, 5.0);
  CHECK(s.mode == GraspPhase::PinchContact);
  CHECK(s.distal_rotation == 0.0);
  CHECK(s.spring2_deflection == 0.0);
  CHECK(s.depth == 5.0);
  const auto z = descend(kDefaults, {}, 0.0);
  CHECK(z.mode == GraspPhase::PinchContact);
  CHECK(z.spring1_deflection == 0.0);
}

TEST_CASE("descend: full scoop reaches the nominal rotation") {
  const auto s = descend(kDefaults, {}, 30.4);
  CHECK(s.mode == GraspPhase::ScoopComplete);
  CHECK(s.distal_rotation == doctest::Approx(22.8).epsilon(1e-12));
  CHECK(s.spring2_deflection == doctest::Approx(22.8 * std::numbers::pi / 180).epsilon(1e-12));
  CHECK(descend(kDefaults, {}, 45.0).distal_rotation == doctest::Approx(22.8).epsilon(1e-12));
}

TEST_CASE("descend: ramp midpoint") {
  const auto s = descend(kDefaults, {}, 15.8 + 14.6 / 2);
  CHECK(s.mode == GraspPhase::Scooping);
  CHECK(s.distal_rotation == doctest::Approx(11.4).epsilon(1e-12));
}

TEST_CASE("descend: phase boundaries") {
  const auto at = descend(kDefaults, {}, 15.8);
  CHECK(at.mode == GraspPhase::StopperEngaged);
  CHECK(std::abs(at.distal_rotation) <= 1e-9);
  CHECK(descend(kDefaults, {}, std::nextafter(15.8, 0.0)).mode == GraspPhase::PinchContact);
  CHECK(descend(kDefaults, {}, std::nextafter(15.8, 100.0)).mode == GraspPhase::Scooping);
  const auto end = descend(kDefaults, {}, kDefaults.dh1 + kDefaults.dh2);
  CHECK(end.mode == GraspPhase::ScoopComplete);
  CHECK(std::abs(end.distal_rotation - 22.8) <= 1e-9);
}

TEST_CASE("descend: negative depth") {
  CHECK_THROWS_AS(descend(kDefaults, {}, -0.1), InvalidArgument);
}

TEST_CASE("descend: invariants over a dense sweep") {
  double prev = 0;
  for (int i = 0; i <= 4000; ++i) {
    const double d = i * 0.01;
    const auto s = descend(kDefaults, {}, d);
    CHECK(s.distal_rotation >= prev);
    CHECK(s.distal_rotation >= 0.0);
    CHECK(s.distal_rotation <= 22.8 + 1e-12);
    if (d < 15.8) CHECK(s.mode == GraspPhase::PinchContact);
    else if (d < 30.4) CHECK((s.mode == GraspPhase::StopperEngaged || s.mode == GraspPhase::Scooping));
    else CHECK(s.mode == GraspPhase::ScoopComplete);
    if (d <= 15.8) CHECK(s.distal_rotation == 0.0);
    // Passivity: same inputs, same state.
    const auto again = descend(kDefaults, {}, d);
    CHECK(again.distal_rotation == s.distal_rotation);
    CHECK(again.mode == s.mode);
    prev = s.distal_rotation;
  }
}

TEST_CASE("mode_trace: 100 samples to full depth") {
  const auto t = mode_trace(kDefaults, {}, 30.4, 100);
  REQUIRE(t.size() == 100);
  CHECK(t.front().depth == 0.0);
  CHECK(t.back().depth == 30.4);
  for (std::size_t i = 1; i < t.size(); ++i) {
    CHECK(t[i].depth > t[i - 1].depth);
    CHECK(t[i].distal_rotation >= t[i - 1].distal_rotation);
  }
  CHECK(t.back().distal_rotation == doctest::Approx(22.8).epsilon(1e-12));
}

TEST_CASE("mode_trace: shallow trace never leaves pinch") {
  for (const auto& s : mode_trace(kDefaults, {}, 10.0, 50)) CHECK(s.mode == GraspPhase::PinchContact);
}

TEST_CASE("mode_trace: reversing the depths restores the rotation") {
  const auto down = trace_depths(30.4, 64);
  std::vector<double> up(down.rbegin(), down.rend());
  const auto fwd = mode_trace(kDefaults, {}, 30.4, 64);
  for (std::size_t i = 0; i < up.size(); ++i) {
    const auto s = descend(kDefaults, {}, up[i]);
    CHECK(s.distal_rotation == fwd[fwd.size() - 1 - i].distal_rotation);
  }
  CHECK(descend(kDefaults, {}, up.back()).distal_rotation == 0.0);
}

TEST_CASE("mode_trace: bad sample counts") {
  CHECK_THROWS_AS(mode_trace(kDefaults, {}, 30.4, 1), InvalidArgument);
  CHECK_THROWS_AS(mode_trace(kDefaults, {}, -1.0, 10), InvalidArgument);
}

TEST_CASE("asymmetric: zero tilt is symmetric") {
  SurfaceScenario sc;
  sc.asymmetric = true;
  for (double d : {0.0, 10.0, 20.0, 30.4}) {
    const auto [a, b] = asymmetric_pose(kDefaults, sc, d);
    CHECK(a.mode == b.mode);
    CHECK(a.depth == b.depth);
    CHECK(a.distal_rotation == b.distal_rotation);
  }
  const auto [a, b] = asymmetric_pose(kDefaults, sc, 30.4);
  CHECK(a.mode == GraspPhase::ScoopComplete);
  CHECK(b.mode == GraspPhase::ScoopComplete);
}

TEST_CASE("asymmetric: one finger scoops while the other pinches") {
  SurfaceScenario sc;
  sc.asymmetric = true;
  // Centre depth 15.2 with offset 15.2 puts A at 30.4 and B at the surface.
  const double centre = 15.2;
  sc.tilt = std::asin(15.2 / sc.half_span) * 180 / std::numbers::pi;
  while (centre + sc.half_span * std::sin(sc.tilt * std::numbers::pi / 180) < 30.4)
    sc.tilt = std::nextafter(sc.tilt, 90.0);
  const auto [a, b] = asymmetric_pose(kDefaults, sc, centre);
  CHECK(a.depth >= 30.4);
  CHECK(a.mode == GraspPhase::ScoopComplete);
  CHECK(b.depth < 15.8);
  CHECK(b.mode == GraspPhase::PinchContact);
  CHECK(b.distal_rotation == 0.0);
}

TEST_CASE("asymmetric: tilt envelope") {
  SurfaceScenario sc;
  sc.tilt = 45.0;
  CHECK_NOTHROW(asymmetric_pose(kDefaults, sc, 10));
  sc.tilt = 45.5;
  CHECK_THROWS_AS(asymmetric_pose(kDefaults, sc, 10), EnvelopeViolation);
  sc.tilt = -1;
  CHECK_THROWS_AS(asymmetric_pose(kDefaults, sc, 10), EnvelopeViolation);
}

TEST_CASE("spring moments") {
  const auto rest = spring_moments(kDefaults, descend(kDefaults, {}, 0.0));
  CHECK(rest.k1 == 0.0);
  CHECK(rest.k2 == 0.0);
  const auto full = descend(kDefaults, {}, 30.4);
  // 22.8 deg in rad, frozen.
  CHECK(spring_moments(kDefaults, full).k2 == doctest::Approx(50 * 0.39793506945470713).epsilon(1e-12));
  FingerParams stiff = kDefaults;
  stiff.k2 = 100;
  CHECK(spring_moments(stiff, full).k2 == 2 * spring_moments(kDefaults, full).k2);
  CHECK(spring_moments(stiff, full).k1 == spring_moments(kDefaults, full).k1);
  const auto mid = descend(kDefaults, {}, 8.0);
  CHECK(spring_moments(kDefaults, mid).k1 == doctest::Approx(50 * mid.spring1_deflection));
  CHECK(spring_moments(kDefaults, mid).k1 > 0);
}

TEST_CASE("stopper holds the distal segment straight while pinching") {
  for (double d : {0.0, 3.0, 10.0, 15.0})
    CHECK(distal_joint_angle(kDefaults, descend(kDefaults, {}, d)) == kDefaults.q2);
  CHECK(distal_joint_angle(kDefaults, descend(kDefaults, {}, 30.4)) ==
        doctest::Approx(kDefaults.q2 - 22.8).epsilon(1e-12));
}

TEST_CASE("mode trace CSV") {
  std::ostringstream os;
  write_mode_trace_csv(os, kDefaults, mode_trace(kDefaults, {}, 30.4, 5));
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "depth_mm,mode,distal_rotation_deg,k1_moment_Nmm,k2_moment_Nmm");
  int rows = 0;
  std::string last;
  while (std::getline(is, line)) {
    CHECK(count_commas(line) == 4);
    last = line;
    ++rows;
  }
  CHECK(rows == 5);
  CHECK(last.rfind("30.399999999999999,ScoopComplete,", 0) == 0);
}

TEST_CASE("phase names") {
  CHECK(to_string(GraspPhase::PinchContact) == "PinchContact");
  CHECK(to_string(GraspPhase::StopperEngaged) == "StopperEngaged");
  CHECK(to_string(GraspPhase::Scooping) == "Scooping");
  CHECK(to_string(GraspPhase::ScoopComplete) == "ScoopComplete");
}
