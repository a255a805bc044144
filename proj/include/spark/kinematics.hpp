#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "spark/error.hpp"
#include "spark/params.hpp"

namespace spark {

// Standard D-H row; `theta` is the joint offset added to the joint variable.
template <typename Scalar>
struct DhRow {
  Scalar a{0};
  Scalar alpha{0};
  Scalar d{0};
  Scalar theta{0};
};

template <typename Scalar>
using Transform = Eigen::Matrix<Scalar, 4, 4>;

template <typename Scalar>
using JointAngles = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
Transform<Scalar> dh_transform(const DhRow<Scalar>& row) {
  using std::cos;
  using std::sin;
  const Scalar ct = cos(row.theta), st = sin(row.theta);
  const Scalar ca = cos(row.alpha), sa = sin(row.alpha);
  Transform<Scalar> A;
  A << ct, -st * ca, st * sa, row.a * ct,
       st, ct * ca, -ct * sa, row.a * st,
       Scalar(0), sa, ca, row.d,
       Scalar(0), Scalar(0), Scalar(0), Scalar(1);
  return A;
}

template <typename Scalar>
struct ForwardKinematics {
  Eigen::Matrix<Scalar, 2, 1> tip;
  Scalar orientation;
  // frames[i] is T_i^0; frames[0] is the identity base frame.
  std::vector<Transform<Scalar>> frames;
};

template <typename Scalar>
std::vector<DhRow<Scalar>> finger_chain(const FingerParams& p) {
  return {{Scalar(p.L1), Scalar(0), Scalar(0), Scalar(0)},
          {Scalar(p.L2), Scalar(0), Scalar(0), Scalar(0)},
          {Scalar(p.L3), Scalar(0), Scalar(0), Scalar(0)}};
}

template <typename Scalar, typename Derived>
ForwardKinematics<Scalar> forward_kinematics(const std::vector<DhRow<Scalar>>& chain,
                                             const Eigen::MatrixBase<Derived>& q) {
  if (chain.empty()) throw InvalidArgument("empty kinematic chain");
  if (static_cast<std::size_t>(q.size()) != chain.size())
    throw InvalidArgument("joint vector size does not match the chain");
  ForwardKinematics<Scalar> fk;
  fk.frames.reserve(chain.size() + 1);
  fk.frames.push_back(Transform<Scalar>::Identity());
  fk.orientation = Scalar(0);
  for (std::size_t i = 0; i < chain.size(); ++i) {
    DhRow<Scalar> row = chain[i];
    row.theta += q[static_cast<Eigen::Index>(i)];
    fk.orientation += row.theta;
    fk.frames.push_back(fk.frames.back() * dh_transform(row));
  }
  fk.tip = fk.frames.back().template block<2, 1>(0, 3);
  return fk;
}

// Columns: [z_{i-1} x (O_n - O_{i-1}); z_{i-1}].
template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, 6, Eigen::Dynamic> jacobian(const std::vector<DhRow<Scalar>>& chain,
                                                  const Eigen::MatrixBase<Derived>& q) {
  const auto fk = forward_kinematics(chain, q);
  const Eigen::Matrix<Scalar, 3, 1> on = fk.frames.back().template block<3, 1>(0, 3);
  Eigen::Matrix<Scalar, 6, Eigen::Dynamic> J(6, chain.size());
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const Eigen::Matrix<Scalar, 3, 1> z = fk.frames[i].template block<3, 1>(0, 2);
    const Eigen::Matrix<Scalar, 3, 1> o = fk.frames[i].template block<3, 1>(0, 3);
    J.col(static_cast<Eigen::Index>(i)) << z.cross(on - o), z;
  }
  return J;
}

template <typename Scalar>
JointAngles<Scalar> reference_configuration() {
  return {Scalar(deg2rad(60.0)), Scalar(deg2rad(-60.0)), Scalar(deg2rad(-90.0))};
}

struct ConstrainedMotionOptions {
  JointAngles<double> reference = reference_configuration<double>();
  double tolerance = 1e-10;
  int max_iterations = 100;
  double max_height_step = 1.0;  // continuation step in mm
};

// Holds tip x and orientation at their values in the reference configuration
// and places the tip at `tip_height` (chain base frame).
JointAngles<double> constrained_motion(const FingerParams& params, double tip_height,
                                       const ConstrainedMotionOptions& options = {});

// Height range over which constrained_motion has a solution (open interval).
std::pair<double, double> constrained_height_range(const FingerParams& params,
                                                   const ConstrainedMotionOptions& options = {});

}  // namespace spark
