#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "spark/error.hpp"

namespace spark {

// Contact distances from each phalanx's proximal joint (mm) and phalanx angles
// measured from the vertical (rad).
template <typename Scalar>
struct ContactGeometry {
  Scalar d1{0}, d2{0}, d3{0};
  Scalar theta1{0}, theta2{0}, theta3{0};
};

// Positive pushes into the object; F1 is never computed.
template <typename Scalar>
struct ForceResult {
  std::optional<Scalar> F1;
  Scalar F2{0};
  Scalar F3{0};

  // Contact force vectors (F cos(theta), -F sin(theta)).
  Eigen::Matrix<Scalar, 2, 1> vector2(Scalar theta2) const {
    using std::cos;
    using std::sin;
    return {F2 * cos(theta2), -F2 * sin(theta2)};
  }
  Eigen::Matrix<Scalar, 2, 1> vector3(Scalar theta3) const {
    using std::cos;
    using std::sin;
    return {F3 * cos(theta3), -F3 * sin(theta3)};
  }
};

// T: actuator torque on the drive rod (N*mm); k: limiting spring (N*mm/rad).
template <typename Scalar>
struct ActuationInput {
  Scalar T{0};
  Scalar k{0};
};

template <typename Scalar>
Scalar pinch_force(Scalar T, const ContactGeometry<Scalar>& g, Scalar L2) {
  using std::cos;
  const Scalar lever = g.d3 + L2 * cos(g.theta2);
  if (!(lever > Scalar(1e-9))) throw DegenerateLever("pinch lever arm d3 + L2*cos(theta2) is not positive");
  return T / lever;
}

template <typename Scalar>
ForceResult<Scalar> scoop_forces(const ActuationInput<Scalar>& act, const ContactGeometry<Scalar>& g, Scalar L2) {
  using std::cos;
  if (g.d2 == Scalar(0) || g.d3 == Scalar(0)) throw InvalidArgument("zero contact distance");
  const Scalar spring = act.k * g.theta3;
  ForceResult<Scalar> f;
  f.F2 = act.T / g.d2 + spring * L2 * cos(g.theta2 - g.theta3) / (g.d2 * g.d3);
  f.F3 = -spring / g.d3;
  return f;
}

// Contact Jacobian relating phalanx rotations to contact-point work.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> scoop_jacobian(const ContactGeometry<Scalar>& g, Scalar L2) {
  using std::cos;
  Eigen::Matrix<Scalar, 2, 2> J;
  J << g.d2, Scalar(0), L2 * cos(g.theta2 - g.theta3), g.d3;
  return J;
}

// Solves [T, -k*theta3] = [F2, F3] * J directly.
template <typename Scalar>
ForceResult<Scalar> scoop_forces_via_system(const ActuationInput<Scalar>& act, const ContactGeometry<Scalar>& g,
                                            Scalar L2) {
  const Eigen::Matrix<Scalar, 2, 2> J = scoop_jacobian(g, L2);
  Eigen::FullPivLU<Eigen::Matrix<Scalar, 2, 2>> lu(J.transpose());
  if (!lu.isInvertible()) throw SingularConfiguration("singular scoop contact system");
  const Eigen::Matrix<Scalar, 2, 1> rhs(act.T, -act.k * g.theta3);
  const Eigen::Matrix<Scalar, 2, 1> f = lu.solve(rhs);
  ForceResult<Scalar> out;
  out.F2 = f[0];
  out.F3 = f[1];
  return out;
}

namespace detail {

// G(theta + h*e) - G(theta - h*e) for a + r*(sin t, cos t), via product-to-sum.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> arm_difference(Scalar r, Scalar theta, Scalar h) {
  using std::cos;
  using std::sin;
  const Scalar s = Scalar(2) * sin(h);
  return {r * cos(theta) * s, -r * sin(theta) * s};
}

}  // namespace detail

// Contact points of phalanges 2 and 3.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> contact_point2(const ContactGeometry<Scalar>& g) {
  using std::cos;
  using std::sin;
  return {g.d2 * sin(g.theta2), g.d2 * cos(g.theta2)};
}

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> contact_point3(const ContactGeometry<Scalar>& g, Scalar L2) {
  using std::cos;
  using std::sin;
  return {L2 * sin(g.theta2) + g.d3 * sin(g.theta3), L2 * cos(g.theta2) + g.d3 * cos(g.theta3)};
}

// Perturbs (theta2, theta3) by +-1e-7 along each axis, compares actuator and
// spring work with contact-force work, and returns the largest imbalance per
// unit perturbation (N*mm).
template <typename Scalar>
Scalar virtual_work_check(const ActuationInput<Scalar>& act, const ContactGeometry<Scalar>& g, Scalar L2,
                          const ForceResult<Scalar>& forces) {
  using std::abs;
  const Scalar h(1e-7);
  const auto f2 = forces.vector2(g.theta2);
  const auto f3 = forces.vector3(g.theta3);
  Scalar worst(0);
  for (int axis = 0; axis < 2; ++axis) {
    const Scalar dt2 = axis == 0 ? Scalar(2) * h : Scalar(0);
    const Scalar dt3 = axis == 1 ? Scalar(2) * h : Scalar(0);
    Eigen::Matrix<Scalar, 2, 1> dG2 = Eigen::Matrix<Scalar, 2, 1>::Zero();
    Eigen::Matrix<Scalar, 2, 1> dG3 = Eigen::Matrix<Scalar, 2, 1>::Zero();
    if (axis == 0) {
      dG2 = detail::arm_difference(g.d2, g.theta2, h);
      dG3 = detail::arm_difference(L2, g.theta2, h);
    } else {
      dG3 = detail::arm_difference(g.d3, g.theta3, h);
    }
    const Scalar input = act.T * dt2 - act.k * g.theta3 * dt3;
    const Scalar output = f2.dot(dG2) + f3.dot(dG3);
    worst = std::max(worst, abs(input - output) / (Scalar(2) * h));
  }
  return worst;
}

enum class GraspMode { Pinch, Scoop };

struct SweepRow {
  std::string variable;
  double value;             // degrees for angles
  std::optional<double> F2;  // absent in pinch mode
  std::optional<double> F3;
  std::string status;  // "ok" or the error message
};

struct SweepSpec {
  std::string variable = "theta2";  // theta2 | theta3 (scoop) | d3
  double from = 0.0;                // degrees for angles, mm for d3
  double to = 90.0;
  std::size_t samples = 91;
};

// Pinch: F3 from the moment balance; scoop: (F2, F3) closed forms.
std::vector<SweepRow> force_sweep(GraspMode mode, const ActuationInput<double>& act, const SweepSpec& spec,
                                  const ContactGeometry<double>& fixed, double L2);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace spark
