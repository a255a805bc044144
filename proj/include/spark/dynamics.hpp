#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <vector>

#include "spark/error.hpp"
#include "spark/params.hpp"

namespace spark {

// Units: kg, mm, s. Energies and joint torques are in kg*mm^2/s^2 (1e-3 N*mm).
template <typename Scalar>
struct DynamicsParams {
  using Vec = Eigen::Matrix<Scalar, 3, 1>;
  Vec mass;
  Vec length;
  Vec com;      // distance of each COM from its proximal joint, along the link
  Vec inertia;  // about the COM
  Scalar g;

  static DynamicsParams from(const FingerParams& p) {
    DynamicsParams d;
    d.mass << Scalar(p.m1), Scalar(p.m2), Scalar(p.m3);
    d.length << Scalar(p.L1), Scalar(p.L2), Scalar(p.L3);
    d.com << Scalar(p.com1()), Scalar(p.com2()), Scalar(p.com3());
    d.inertia = (d.mass.array() * d.length.array().square() / Scalar(12)).matrix();
    d.g = Scalar(p.g);
    return d;
  }

  void check() const {
    for (int i = 0; i < 3; ++i) {
      if (!(mass[i] > 0) || !(inertia[i] > 0)) throw InvalidArgument("masses and inertias must be positive");
      if (!(com[i] >= 0 && com[i] <= length[i])) throw InvalidArgument("COM offset must lie on its link");
    }
  }
};

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;

namespace detail {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
Vec2<Scalar> perp(const Vec2<Scalar>& v) {
  return {-v.y(), v.x()};
}

// r[l][i] = COM of link l minus the origin of joint i (i <= l), planar.
template <typename Scalar>
struct Lever {
  std::array<std::array<Vec2<Scalar>, 3>, 3> r;
};

template <typename Scalar>
Lever<Scalar> levers(const DynamicsParams<Scalar>& p, const Vec3<Scalar>& q) {
  using std::cos;
  using std::sin;
  std::array<Vec2<Scalar>, 3> origin;
  std::array<Vec2<Scalar>, 3> com;
  Vec2<Scalar> o = Vec2<Scalar>::Zero();
  Scalar sigma(0);
  for (int l = 0; l < 3; ++l) {
    sigma += q[l];
    const Vec2<Scalar> dir(cos(sigma), sin(sigma));
    origin[l] = o;
    com[l] = o + p.com[l] * dir;
    o = o + p.length[l] * dir;
  }
  Lever<Scalar> lv;
  for (int l = 0; l < 3; ++l)
    for (int i = 0; i < 3; ++i)
      lv.r[l][i] = i <= l ? Vec2<Scalar>(com[l] - origin[i]) : Vec2<Scalar>::Zero();
  return lv;
}

}  // namespace detail

template <typename Scalar>
Scalar kinetic_energy(const DynamicsParams<Scalar>& p, const Vec3<Scalar>& q, const Vec3<Scalar>& qdot) {
  const auto lv = detail::levers(p, q);
  Scalar k(0);
  Scalar omega(0);
  for (int l = 0; l < 3; ++l) {
    omega += qdot[l];
    detail::Vec2<Scalar> v = detail::Vec2<Scalar>::Zero();
    for (int i = 0; i <= l; ++i) v += qdot[i] * detail::perp(lv.r[l][i]);
    k += Scalar(0.5) * p.mass[l] * v.squaredNorm() + Scalar(0.5) * p.inertia[l] * omega * omega;
  }
  return k;
}

template <typename Scalar>
Scalar potential_energy(const DynamicsParams<Scalar>& p, const Vec3<Scalar>& q) {
  using std::sin;
  const Scalar s1 = sin(q[0]), s12 = sin(q[0] + q[1]), s123 = sin(q[0] + q[1] + q[2]);
  return p.mass[0] * p.g * p.com[0] * s1 +
         p.mass[1] * p.g * (p.length[0] * s1 + p.com[1] * s12) +
         p.mass[2] * p.g * (p.length[0] * s1 + p.length[1] * s12 + p.com[2] * s123);
}

template <typename Scalar>
Mat3<Scalar> mass_matrix(const DynamicsParams<Scalar>& p, const Vec3<Scalar>& q) {
  const auto lv = detail::levers(p, q);
  Mat3<Scalar> M = Mat3<Scalar>::Zero();
  for (int l = 0; l < 3; ++l)
    for (int i = 0; i <= l; ++i)
      for (int j = 0; j <= l; ++j)
        M(i, j) += p.mass[l] * lv.r[l][i].dot(lv.r[l][j]) + p.inertia[l];
  return M;
}

// dM[k] = dM/dq_k
template <typename Scalar>
std::array<Mat3<Scalar>, 3> mass_matrix_derivatives(const DynamicsParams<Scalar>& p, const Vec3<Scalar>& q) {
  const auto lv = detail::levers(p, q);
  std::array<Mat3<Scalar>, 3> dM;
  for (int k = 0; k < 3; ++k) {
    dM[k].setZero();
    for (int l = k; l < 3; ++l) {
      for (int i = 0; i <= l; ++i) {
        const auto dri = detail::perp(lv.r[l][std::max(i, k)]);
        for (int j = 0; j <= l; ++j) {
          const auto drj = detail::perp(lv.r[l][std::max(j, k)]);
          dM[k](i, j) += p.mass[l] * (dri.dot(lv.r[l][j]) + lv.r[l][i].dot(drj));
        }
      }
    }
  }
  return dM;
}

template <typename Scalar>
struct DynamicsTerms {
  Mat3<Scalar> M;
  Mat3<Scalar> C;
  Vec3<Scalar> G;
};

template <typename Scalar>
Vec3<Scalar> gravity_vector(const DynamicsParams<Scalar>& p, const Vec3<Scalar>& q) {
  const auto lv = detail::levers(p, q);
  Vec3<Scalar> G = Vec3<Scalar>::Zero();
  for (int k = 0; k < 3; ++k)
    for (int l = k; l < 3; ++l) G[k] += p.g * p.mass[l] * lv.r[l][k].x();
  return G;
}

// C from Christoffel symbols of the first kind.
template <typename Scalar>
DynamicsTerms<Scalar> dynamics_terms(const DynamicsParams<Scalar>& p, const Vec3<Scalar>& q,
                                     const Vec3<Scalar>& qdot) {
  DynamicsTerms<Scalar> t;
  t.M = mass_matrix(p, q);
  const auto dM = mass_matrix_derivatives(p, q);
  t.C.setZero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        t.C(i, j) += Scalar(0.5) * (dM[k](i, j) + dM[j](i, k) - dM[i](j, k)) * qdot[k];
  t.G = gravity_vector(p, q);
  return t;
}

template <typename Scalar>
Vec3<Scalar> inverse_dynamics(const DynamicsParams<Scalar>& p, const Vec3<Scalar>& q,
                              const Vec3<Scalar>& qdot, const Vec3<Scalar>& qddot) {
  const auto t = dynamics_terms(p, q, qdot);
  return t.M * qddot + t.C * qdot + t.G;
}

template <typename Scalar>
Vec3<Scalar> forward_dynamics(const DynamicsParams<Scalar>& p, const Vec3<Scalar>& q,
                              const Vec3<Scalar>& qdot, const Vec3<Scalar>& tau) {
  const auto t = dynamics_terms(p, q, qdot);
  Eigen::LDLT<Mat3<Scalar>> ldlt(t.M);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw Error("mass matrix factorisation failed");
  return ldlt.solve(tau - t.C * qdot - t.G);
}

template <typename Scalar>
struct FreeMotionSample {
  Scalar t;
  Vec3<Scalar> q;
  Vec3<Scalar> qdot;
  Scalar kinetic;
  Scalar potential;
  Scalar total() const { return kinetic + potential; }
};

// Unforced motion, classical RK4. Records the initial state and every step.
template <typename Scalar>
std::vector<FreeMotionSample<Scalar>> simulate_free(const DynamicsParams<Scalar>& p, const Vec3<Scalar>& q0,
                                                    const Vec3<Scalar>& qdot0, Scalar duration, Scalar dt) {
  using std::llround;
  if (!(dt > 0)) throw InvalidArgument("time step must be positive");
  if (!(duration >= dt)) throw InvalidArgument("duration must be at least one time step");
  p.check();
  const long steps = llround(duration / dt);
  const Vec3<Scalar> zero = Vec3<Scalar>::Zero();
  auto accel = [&](const Vec3<Scalar>& q, const Vec3<Scalar>& v, long step) {
    try {
      return forward_dynamics(p, q, v, zero);
    } catch (const Error& e) {
      throw SampleFailure(std::string(e.what()) + " at step " + std::to_string(step),
                          static_cast<std::size_t>(step));
    }
  };
  std::vector<FreeMotionSample<Scalar>> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  Vec3<Scalar> q = q0, v = qdot0;
  out.push_back({Scalar(0), q, v, kinetic_energy(p, q, v), potential_energy(p, q)});
  for (long n = 1; n <= steps; ++n) {
    const Vec3<Scalar> k1q = v;
    const Vec3<Scalar> k1v = accel(q, v, n);
    const Vec3<Scalar> k2q = v + dt / 2 * k1v;
    const Vec3<Scalar> k2v = accel(q + dt / 2 * k1q, k2q, n);
    const Vec3<Scalar> k3q = v + dt / 2 * k2v;
    const Vec3<Scalar> k3v = accel(q + dt / 2 * k2q, k3q, n);
    const Vec3<Scalar> k4q = v + dt * k3v;
    const Vec3<Scalar> k4v = accel(q + dt * k3q, k4q, n);
    q += dt / 6 * (k1q + 2 * k2q + 2 * k3q + k4q);
    v += dt / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
    out.push_back({Scalar(n) * dt, q, v, kinetic_energy(p, q, v), potential_energy(p, q)});
  }
  return out;
}

// max_t |E(t) - E(0)| / |E(0)|, absolute when E(0) == 0.
template <typename Scalar>
Scalar energy_drift(const std::vector<FreeMotionSample<Scalar>>& trace) {
  using std::abs;
  if (trace.empty()) return Scalar(0);
  const Scalar e0 = trace.front().total();
  Scalar worst(0);
  for (const auto& s : trace) worst = std::max(worst, abs(s.total() - e0));
  return e0 == Scalar(0) ? worst : worst / abs(e0);
}

}  // namespace spark
