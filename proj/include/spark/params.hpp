#pragma once

#include <numbers>

namespace spark {

inline constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

// Geometry in mm, angles in degrees (as tabulated), stiffness in N*mm/rad,
// masses in kg, gravity in mm/s^2.
struct FingerParams {
  double L1 = 80.0;
  double L2 = 40.0;
  double L3 = 20.0;
  double CJ = 28.8;
  double CG = 40.0;
  double FG = 40.0;
  double dh1 = 15.8;
  double dh2 = 14.6;
  double dtheta_c1 = 22.8;
  double q1 = 113.2;
  double q2 = 90.0;
  double q3 = 83.0;
  double k1 = 50.0;
  double k2 = 50.0;
  double m1 = 0.030;
  double m2 = 0.020;
  double m3 = 0.010;
  // Negative means "midpoint of the link".
  double lc1 = -1.0;
  double lc2 = -1.0;
  double lc3 = -1.0;
  double g = 9810.0;

  double com1() const { return lc1 < 0 ? L1 / 2 : lc1; }
  double com2() const { return lc2 < 0 ? L2 / 2 : lc2; }
  double com3() const { return lc3 < 0 ? L3 / 2 : lc3; }
};

}  // namespace spark
