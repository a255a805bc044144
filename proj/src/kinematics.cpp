#include "spark/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace spark {

namespace {

struct Target {
  double x, y, orientation;
};

Target reference_target(const std::vector<DhRow<double>>& chain, const JointAngles<double>& q) {
  const auto fk = forward_kinematics(chain, q);
  return {fk.tip.x(), fk.tip.y(), fk.orientation};
}

JointAngles<double> newton(const std::vector<DhRow<double>>& chain, JointAngles<double> q,
                           const Target& target, const ConstrainedMotionOptions& opt) {
  double norm = 0.0;
  for (int it = 0; it <= opt.max_iterations; ++it) {
    const auto fk = forward_kinematics(chain, q);
    const Eigen::Vector3d r(fk.tip.x() - target.x, fk.tip.y() - target.y,
                            fk.orientation - target.orientation);
    norm = r.norm();
    if (norm <= opt.tolerance) return q;
    if (it == opt.max_iterations) break;
    const auto J6 = jacobian(chain, q);
    Eigen::Matrix3d J;
    J.row(0) = J6.row(0);
    J.row(1) = J6.row(1);
    J.row(2) = J6.row(5);
    Eigen::FullPivLU<Eigen::Matrix3d> lu(J);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) throw SingularConfiguration("singular chain Jacobian in constrained motion");
    q -= lu.solve(r);
  }
  throw NonConvergence("constrained motion did not converge", norm);
}

}  // namespace

std::pair<double, double> constrained_height_range(const FingerParams& p,
                                                   const ConstrainedMotionOptions& opt) {
  const auto chain = finger_chain<double>(p);
  const Target ref = reference_target(chain, opt.reference);
  // The wrist (distal joint) stays on a vertical line while the tip keeps x and orientation.
  const double wx = ref.x - p.L3 * std::cos(ref.orientation);
  const double dy = p.L3 * std::sin(ref.orientation);
  const double wy_ref = ref.y - dy;
  const double outer = p.L1 + p.L2, inner = std::abs(p.L1 - p.L2);
  const double reach = std::sqrt(std::max(0.0, outer * outer - wx * wx));
  double lo = -reach, hi = reach;
  if (inner > std::abs(wx)) {
    const double hole = std::sqrt(inner * inner - wx * wx);
    if (wy_ref > 0) lo = hole;
    else hi = -hole;
  }
  return {lo + dy, hi + dy};
}

JointAngles<double> constrained_motion(const FingerParams& p, double tip_height,
                                       const ConstrainedMotionOptions& opt) {
  const auto [lo, hi] = constrained_height_range(p, opt);
  if (!(tip_height > lo && tip_height < hi)) {
    std::ostringstream msg;
    msg << "tip height " << tip_height << " mm outside reachable range (" << lo << ", " << hi << ")";
    throw Unreachable(msg.str());
  }
  const auto chain = finger_chain<double>(p);
  Target target = reference_target(chain, opt.reference);
  const double y0 = target.y;
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(tip_height - y0) / opt.max_height_step)));
  JointAngles<double> q = opt.reference;
  for (int k = 1; k <= steps; ++k) {
    target.y = k == steps ? tip_height : y0 + (tip_height - y0) * k / steps;
    q = newton(chain, q, target, opt);
  }
  return q;
}

}  // namespace spark
