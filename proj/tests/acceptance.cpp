// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
// argv[1] is the path of the spark executable used for the determinism check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>

#include "csv_reader.hpp"
#include "oracles.hpp"
#include "spark/dynamics.hpp"
#include "spark/kinematics.hpp"
#include "spark/mechanism.hpp"
#include "spark/modeswitch.hpp"
#include "spark/statics.hpp"

using namespace spark;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;
int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] %2d %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  if (!ok) ++failures;
}

template <typename F>
double millis(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

void geometry() {
  bool ok = true;
  const double ms = millis([&] {
    ok = validate_kempe_constraints(FingerParams{}).ok();
    for (int which = 0; which < 3; ++which)
      for (double f : {1.01, 0.99}) {
        FingerParams p;
        double* len[] = {&p.L1, &p.L2, &p.L3};
        *len[which] *= f;
        ok = ok && !validate_kempe_constraints(p).ok();
      }
  });
  report(1, "geometry validation", ok && ms < 1.0, fmt("default values valid, 1%% perturbations rejected, %.3f ms", ms));
}

void straight_line_and_orientation() {
  const FingerParams p;
  const auto t = spark_preset(p);
  Straightness s{};
  double orient = 0;
  std::size_t n = 0;
  bool solved = true;
  const double ms = millis([&] {
    try {
      const auto limits = discover_stroke(t);
      const auto traj = fingertip_trajectory(t, limits.lower, limits.upper, 1000);
      s = straightness_metric(traj);
      double lo = traj.front().orientation, hi = lo;
      for (const auto& x : traj) {
        lo = std::min(lo, x.orientation);
        hi = std::max(hi, x.orientation);
      }
      orient = hi - lo;
      n = traj.size();
    } catch (const Error&) {
      solved = false;
    }
  });
  const double tol = 1e-6 * p.L1;
  report(2, "straight-line fingertip path", solved && n == 1000 && s.max_dev <= tol && ms < 1000,
         fmt("max deviation %.3g mm (limit %.3g), %.1f ms", s.max_dev, tol, ms));
  report(3, "fixed fingertip orientation", solved && orient <= 1e-9, fmt("orientation variation %.3g rad", orient));
}

void jacobian_check() {
  const auto chain = finger_chain<double>({});
  auto rng = oracle::rng(4);
  std::uniform_real_distribution<double> u(-pi, pi);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const JointAngles<double> q(u(rng), u(rng), u(rng));
    const auto J = jacobian(chain, q);
    auto tip = [&](const Eigen::VectorXd& x) {
      const auto fk = forward_kinematics(chain, JointAngles<double>(x));
      return Eigen::VectorXd(Eigen::Vector3d(fk.tip.x(), fk.tip.y(), fk.orientation));
    };
    const Eigen::MatrixXd F = oracle::central_jacobian(tip, q, 1e-6);
    Eigen::Matrix<double, 3, 3> A;
    A << J.row(0), J.row(1), J.row(5);
    worst = std::max(worst, (A - F).cwiseAbs().maxCoeff() / A.cwiseAbs().maxCoeff());
  }
  report(4, "jacobian vs finite differences", worst <= 1e-6, fmt("max relative error %.3g", worst));
}

void dynamics_structure() {
  const auto p = DynamicsParams<double>::from(FingerParams{});
  auto rng = oracle::rng(5);
  std::uniform_real_distribution<double> u(-pi, pi), w(-5, 5);
  double sym = 0, skew = 0, grav = 0, min_eig = 1e300;
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d q(u(rng), u(rng), u(rng)), qd(w(rng), w(rng), w(rng));
    const auto t = dynamics_terms(p, q, qd);
    sym = std::max(sym, (t.M - t.M.transpose()).cwiseAbs().maxCoeff());
    min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(t.M).eigenvalues().minCoeff());
    const auto dM = mass_matrix_derivatives(p, q);
    const Eigen::Matrix3d S = dM[0] * qd[0] + dM[1] * qd[1] + dM[2] * qd[2] - 2 * t.C;
    skew = std::max(skew, (S + S.transpose()).cwiseAbs().maxCoeff());
    const Eigen::VectorXd g =
        oracle::central_gradient([&](const Eigen::VectorXd& x) { return potential_energy(p, Eigen::Vector3d(x)); },
                                 q, 1e-6);
    grav = std::max(grav, (t.G - g).norm() / std::max(1.0, g.norm()));
  }
  const Eigen::Vector3d q0 = Eigen::Vector3d(30, 20, 10) * pi / 180, v0 = Eigen::Vector3d(60, -30, 45) * pi / 180;
  const double drift_g = energy_drift(simulate_free(p, q0, v0, 1.0, 1e-4));
  auto flat = p;
  flat.g = 0;
  const double drift_0 = energy_drift(simulate_free(flat, q0, v0, 1.0, 1e-4));
  const bool ok = sym <= 1e-12 && min_eig > 0 && skew <= 1e-8 && grav <= 1e-6 && drift_g <= 1e-6 && drift_0 <= 1e-6;
  report(5, "dynamics structure", ok,
         fmt("asymmetry %.2g, skew residual %.2g, gravity FD error %.2g", sym, skew, grav) +
             fmt("; drift %.2g with gravity, %.2g without", drift_g, drift_0));
}

void statics_equivalence() {
  auto rng = oracle::rng(6);
  std::uniform_real_distribution<double> T(-50, 50), k(0, 100), th(-pi / 2, pi / 2), d2(1, 40), d3(1, 28.8);
  double rel = 0, vw = 0;
  for (int i = 0; i < 1000; ++i) {
    const ActuationInput<double> a{T(rng), k(rng)};
    ContactGeometry<double> g;
    g.theta2 = th(rng);
    g.theta3 = th(rng);
    g.d2 = d2(rng);
    g.d3 = d3(rng);
    const auto c = scoop_forces(a, g, 40.0);
    const auto s = scoop_forces_via_system(a, g, 40.0);
    rel = std::max({rel, std::abs(c.F2 - s.F2) / std::max(1.0, std::abs(s.F2)),
                    std::abs(c.F3 - s.F3) / std::max(1.0, std::abs(s.F3))});
    vw = std::max({vw, virtual_work_check(a, g, 40.0, c), virtual_work_check(a, g, 40.0, s)});
  }
  report(6, "statics equivalence", rel <= 1e-10 && vw <= 1e-8,
         fmt("closed form vs system %.2g relative, virtual-work residual %.2g N*mm", rel, vw));
}

void pinch_curve() {
  const double d3 = 14.4;
  ContactGeometry<double> g;
  g.d3 = d3;
  bool increasing = true;
  double prev = -1;
  for (int i = 0; i < 9000; ++i) {
    g.theta2 = i * pi / 18000;
    const double f = pinch_force(20.0, g, 40.0);
    increasing = increasing && f > prev;
    prev = f;
  }
  g.theta2 = 0;
  const bool exact = pinch_force(20.0, g, 40.0) == 20.0 / (d3 + 40.0);
  report(7, "pinch force curve", increasing && exact,
         std::string("strictly increasing on [0, 90) deg: ") + (increasing ? "yes" : "no") +
             ", F3(0) = T/(d3+L2) exactly: " + (exact ? "yes" : "no"));
}

void mode_endpoints() {
  const FingerParams p;
  bool flat = true, monotone = true;
  double prev = 0;
  for (int i = 0; i <= 3040; ++i) {
    const auto s = descend(p, {}, i * 0.01);
    if (i * 0.01 <= 15.8) flat = flat && s.distal_rotation == 0.0;
    monotone = monotone && s.distal_rotation >= prev;
    prev = s.distal_rotation;
  }
  const double end = descend(p, {}, 30.4).distal_rotation;
  report(8, "mode-switch endpoints", flat && monotone && std::abs(end - 22.8) <= 1e-9,
         fmt("rotation at 30.4 mm = %.12g deg", end) + (flat ? ", zero up to 15.8 mm" : ", NONZERO before 15.8 mm"));
}

void cross_model() {
  const FingerParams p;
  const auto chain = finger_chain<double>(p);
  const auto ref = forward_kinematics(chain, reference_configuration<double>());
  const auto t = spark_preset(p);
  const Point j0 = t.reference.at("J");
  const Point shift = j0 - ref.tip;
  const auto limits = discover_stroke(t);
  const auto [lo, hi] = constrained_height_range(p);
  const double lower = std::max(limits.lower, lo + shift.y() - j0.y());
  const double upper = std::min(limits.upper, hi + shift.y() - j0.y());
  double worst = 0;
  bool ok = lower < upper;
  if (ok) {
    for (const auto& s : fingertip_trajectory(t, lower, upper, 500)) {
      const auto fk = forward_kinematics(chain, constrained_motion(p, s.tip.y() - shift.y()));
      worst = std::max(worst, (fk.tip + shift - s.tip).norm());
    }
  }
  report(9, "cross-model consistency", ok && worst <= 1e-6,
         fmt("max tip distance %.3g mm over driver [%.4g, %.4g] mm", worst, lower, upper));
}

void determinism(const std::string& exe) {
  if (exe.empty() || !fs::exists(exe)) {
    report(10, "determinism", false, "spark executable not found");
    return;
  }
  const fs::path root = fs::temp_directory_path() / "spark_acceptance";
  fs::remove_all(root);
  const char* commands[] = {"validate", "traj", "forces --mode pinch", "forces --mode scoop", "descend",
                            "descend --tilt 15", "dynamics", "fk --q 10,20,30", "jac --q 10,20,30"};
  bool ok = true;
  std::size_t files = 0;
  for (int i = 0; i < 9 && ok; ++i) {
    const fs::path a = root / ("a" + std::to_string(i)), b = root / ("b" + std::to_string(i));
    for (const auto& d : {a, b}) {
      fs::create_directories(d);
      const std::string cmd = "\"" + exe + "\" " + commands[i] + " --quiet --out \"" + d.string() + "\"";
      ok = ok && std::system(cmd.c_str()) == 0;
    }
    for (const auto& e : fs::directory_iterator(a)) {
      ok = ok && testcsv::slurp(e.path().string()) == testcsv::slurp((b / e.path().filename()).string());
      ++files;
    }
  }
  fs::remove_all(root);
  report(10, "determinism", ok && files > 0, fmt("%.0f output files compared byte for byte", double(files)));
}

void guarded(const std::function<void()>& f, int id) {
  try {
    f();
  } catch (const std::exception& e) {
    report(id, "unexpected exception", false, e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  guarded(geometry, 1);
  guarded(straight_line_and_orientation, 2);
  guarded(jacobian_check, 4);
  guarded(dynamics_structure, 5);
  guarded(statics_equivalence, 6);
  guarded(pinch_curve, 7);
  guarded(mode_endpoints, 8);
  guarded(cross_model, 9);
  guarded([&] { determinism(argc > 1 ? argv[1] : ""); }, 10);
  std::printf("%s\n", failures == 0 ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  return failures == 0 ? 0 : 1;
}
