#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "spark/config.hpp"
#include "spark/csv.hpp"
#include "spark/dynamics.hpp"
#include "spark/kinematics.hpp"
#include "spark/mechanism.hpp"
#include "spark/modeswitch.hpp"
#include "spark/statics.hpp"

namespace spark::cli {

namespace {

namespace fs = std::filesystem;

struct UsageError : Error {
  using Error::Error;
};

struct Globals {
  std::string config_path;
  std::string out_dir;
  std::optional<std::size_t> samples;
  bool quiet = false;
};

struct Context {
  const Globals& globals;
  RunConfig config;
  fs::path out_dir;
  std::ostream& out;

  std::ofstream create(const std::string& name) const {
    fs::create_directories(out_dir);
    std::ofstream f(out_dir / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (out_dir / name).string());
    f.imbue(std::locale::classic());
    return f;
  }

  void say(const std::string& line) const {
    if (!globals.quiet) out << line << '\n';
  }

  std::size_t samples(std::size_t fallback) const { return globals.samples.value_or(fallback); }
};

fs::path resolve_out_dir(const Globals& g, const RunConfig& c) {
  if (!g.out_dir.empty()) return g.out_dir;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  if (c.output_dir) return *c.output_dir;
  return ".";
}

JointAngles<double> degrees_to_q(const std::vector<double>& deg) {
  if (deg.size() != 3) throw UsageError("--q expects three angles in degrees");
  return {deg2rad(deg[0]), deg2rad(deg[1]), deg2rad(deg[2])};
}

int cmd_validate(const Context& ctx) {
  const auto& f = ctx.config.finger;
  const auto report = validate_kempe_constraints(f);
  if (!report) {
    ctx.say("invalid geometry:");
    for (const auto& v : report.violations)
      ctx.say("  " + v.relation + " (measured " + format_number(v.measured) + ", expected " +
              format_number(v.expected) + ")");
    return kExitDomain;
  }
  ctx.say("valid: L1:L2:L3 = " + format_number(f.L1) + ":" + format_number(f.L2) + ":" + format_number(f.L3));
  ctx.say("stoppers Q1 Q2 Q3 (deg): " + format_number(f.q1) + " " + format_number(f.q2) + " " +
          format_number(f.q3));
  const auto t = spark_preset(f);
  ctx.say("preset: " + std::to_string(t.joints.size()) + " joints, " + std::to_string(t.bars.size()) + " bars, " +
          std::to_string(t.attachments.size()) + " attachments, mobility " + std::to_string(t.mobility()));
  return kExitOk;
}

int cmd_traj(const Context& ctx, std::optional<double> lower, std::optional<double> upper) {
  const auto& c = ctx.config;
  const auto topology = spark_preset(c.finger);
  if (!lower) lower = c.stroke_lower;
  if (!upper) upper = c.stroke_upper;
  if (!lower || !upper) {
    const auto limits = discover_stroke(topology, c.solver);
    if (!lower) lower = limits.lower;
    if (!upper) upper = limits.upper;
  }
  const std::size_t n = ctx.samples(c.traj_samples);
  if (n < 2) throw UsageError("trajectory needs at least 2 samples");

  std::vector<TrajectorySample> samples;
  std::optional<std::string> failure;
  try {
    samples = fingertip_trajectory(topology, *lower, *upper, n, c.solver);
  } catch (const TrajectoryFailure& e) {
    samples = e.completed;
    failure = e.what();
  }
  {
    auto f = ctx.create("trajectory.csv");
    write_trajectory_csv(f, samples);
    if (failure) f << "# incomplete: " << *failure << '\n';
  }
  {
    auto f = ctx.create("trajectory_displacement.csv");
    f << "driver_mm,vertical_disp_mm,horizontal_disp_mm\n";
    for (const auto& s : samples) {
      const Point d = s.tip - samples.front().tip;
      f << format_number(s.driver) << ',' << format_number(d.y()) << ',' << format_number(d.x()) << '\n';
    }
    if (failure) f << "# incomplete: " << *failure << '\n';
  }
  if (failure) {
    ctx.say("trajectory failed: " + *failure);
    return kExitDomain;
  }
  const auto m = straightness_metric(samples);
  {
    auto f = ctx.create("trajectory_summary.csv");
    f << "max_dev_mm,rms_dev_mm\n" << format_number(m.max_dev) << ',' << format_number(m.rms_dev) << '\n';
  }
  ctx.say("stroke_mm," + format_number(*lower) + ',' + format_number(*upper));
  ctx.say("max_dev_mm,rms_dev_mm");
  ctx.say(format_number(m.max_dev) + ',' + format_number(m.rms_dev));
  return kExitOk;
}

int cmd_forces(const Context& ctx, const std::string& mode_name, std::optional<std::string> variable,
               std::optional<double> from, std::optional<double> to) {
  const auto& c = ctx.config;
  GraspMode mode;
  if (mode_name == "pinch") mode = GraspMode::Pinch;
  else if (mode_name == "scoop") mode = GraspMode::Scoop;
  else throw UsageError("--mode must be pinch or scoop");

  SweepSpec spec = c.sweep.value_or(mode == GraspMode::Pinch ? SweepSpec{"theta2", 0.0, 90.0, 91}
                                                             : SweepSpec{"theta3", 0.0, 30.0, 31});
  if (variable) spec.variable = *variable;
  if (from) spec.from = *from;
  if (to) spec.to = *to;
  spec.samples = ctx.samples(spec.samples);
  std::vector<SweepRow> rows;
  try {
    rows = force_sweep(mode, {c.torque, c.spring}, spec, c.contact(), c.finger.L2);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  auto f = ctx.create("forces_" + mode_name + ".csv");
  write_sweep_csv(f, rows);
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.status == "ok" ? 0 : 1;
  ctx.say(mode_name + " sweep over " + spec.variable + ": " + std::to_string(rows.size()) + " rows, " +
          std::to_string(failed) + " failed");
  return failed == 0 ? kExitOk : kExitDomain;
}

int cmd_descend(const Context& ctx, std::optional<double> max_depth, std::optional<double> tilt) {
  const auto& c = ctx.config;
  SurfaceScenario scenario;
  scenario.tilt = tilt.value_or(c.tilt_deg);
  scenario.half_span = c.half_span;
  scenario.asymmetric = scenario.tilt != 0.0;
  const double depth = max_depth.value_or(c.max_depth);
  const std::size_t n = ctx.samples(c.descent_samples);
  auto f = ctx.create("descend.csv");
  if (!scenario.asymmetric) {
    const auto trace = mode_trace(c.finger, scenario, depth, n);
    write_mode_trace_csv(f, c.finger, trace);
    ctx.say("final mode " + to_string(trace.back().mode) + ", rotation " +
            format_number(trace.back().distal_rotation) + " deg");
  } else {
    const auto depths = trace_depths(depth, n);
    std::vector<std::pair<DescentState, DescentState>> trace;
    for (double d : depths) trace.push_back(asymmetric_pose(c.finger, scenario, d));
    write_asymmetric_trace_csv(f, c.finger, depths, trace);
    ctx.say("final modes " + to_string(trace.back().first.mode) + " / " + to_string(trace.back().second.mode));
  }
  return kExitOk;
}

int cmd_dynamics(const Context& ctx, std::optional<double> duration, std::optional<double> dt, bool no_gravity) {
  const auto& c = ctx.config;
  auto p = c.dynamics();
  if (no_gravity) p.g = 0.0;
  const Vec3<double> q0(deg2rad(c.q0_deg[0]), deg2rad(c.q0_deg[1]), deg2rad(c.q0_deg[2]));
  const Vec3<double> v0(deg2rad(c.dq0_deg_s[0]), deg2rad(c.dq0_deg_s[1]), deg2rad(c.dq0_deg_s[2]));
  const double step = dt.value_or(c.dt_s);
  const double span = duration.value_or(c.duration_s);
  if (!(step > 0) || !(span >= step)) throw UsageError("need dt > 0 and duration >= dt");
  try {
    p.check();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  const auto trace = simulate_free(p, q0, v0, span, step);
  const double drift = energy_drift(trace);
  {
    auto f = ctx.create("dynamics.csv");
    f << "t_s,theta1_rad,theta2_rad,theta3_rad,dtheta1_rads,dtheta2_rads,dtheta3_rads,K,P,E_total\n";
    for (const auto& s : trace) {
      f << format_number(s.t);
      for (int i = 0; i < 3; ++i) f << ',' << format_number(s.q[i]);
      for (int i = 0; i < 3; ++i) f << ',' << format_number(s.qdot[i]);
      f << ',' << format_number(s.kinetic) << ',' << format_number(s.potential) << ',' << format_number(s.total())
        << '\n';
    }
  }
  {
    auto f = ctx.create("dynamics_summary.csv");
    f << "steps,max_rel_energy_drift\n" << trace.size() - 1 << ',' << format_number(drift) << '\n';
  }
  ctx.say("energy units kg*mm^2/s^2; max relative drift " + format_number(drift));
  return kExitOk;
}

int cmd_fk(const Context& ctx, const std::vector<double>& deg) {
  const auto q = degrees_to_q(deg);
  const auto fk = forward_kinematics(finger_chain<double>(ctx.config.finger), q);
  auto f = ctx.create("fk.csv");
  f << "theta1_deg,theta2_deg,theta3_deg,theta1_rad,theta2_rad,theta3_rad,tip_x_mm,tip_y_mm,orientation_deg,"
       "orientation_rad\n";
  for (int i = 0; i < 3; ++i) f << format_number(deg[static_cast<std::size_t>(i)]) << ',';
  for (int i = 0; i < 3; ++i) f << format_number(q[i]) << ',';
  f << format_number(fk.tip.x()) << ',' << format_number(fk.tip.y()) << ',' << format_number(rad2deg(fk.orientation))
    << ',' << format_number(fk.orientation) << '\n';
  ctx.say("tip " + format_number(fk.tip.x()) + ", " + format_number(fk.tip.y()) + " mm, orientation " +
          format_number(rad2deg(fk.orientation)) + " deg");
  return kExitOk;
}

int cmd_jac(const Context& ctx, const std::vector<double>& deg) {
  const auto q = degrees_to_q(deg);
  const auto J = jacobian(finger_chain<double>(ctx.config.finger), q);
  auto f = ctx.create("jac.csv");
  f << "row,theta1,theta2,theta3\n";
  const char* names[] = {"vx_mm", "vy_mm", "vz_mm", "wx", "wy", "wz"};
  for (int r = 0; r < 6; ++r) {
    f << names[r];
    for (int c = 0; c < 3; ++c) f << ',' << format_number(J(r, c));
    f << '\n';
  }
  ctx.say("jacobian written (per rad)");
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"SPARK finger mechanism toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "YAML configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", g.out_dir, std::string("output directory (default $") + kOutDirEnv + " or .)");
  app.add_option("--samples", g.samples, "sample count for the selected command")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", g.quiet, "suppress the console summary");

  auto* validate = app.add_subcommand("validate", "check link ratios and equalities");
  validate->fallthrough();

  std::optional<double> lower, upper;
  auto* traj = app.add_subcommand("traj", "fingertip trajectory over the stroke");
  traj->add_option("--lower", lower, "driver start (mm)");
  traj->add_option("--upper", upper, "driver end (mm)");
  traj->fallthrough();

  std::string mode = "pinch";
  std::optional<std::string> variable;
  std::optional<double> from, to;
  auto* forces = app.add_subcommand("forces", "grasp force sweep");
  forces->add_option("--mode", mode, "pinch or scoop");
  forces->add_option("--var", variable, "theta2, theta3, d2 or d3");
  forces->add_option("--from", from, "sweep start (deg or mm)");
  forces->add_option("--to", to, "sweep end (deg or mm)");
  forces->fallthrough();

  std::optional<double> max_depth, tilt;
  auto* descend_cmd = app.add_subcommand("descend", "pinch to scoop mode trace");
  descend_cmd->add_option("--max-depth", max_depth, "depth past first contact (mm)");
  descend_cmd->add_option("--tilt", tilt, "wrist tilt (deg)");
  descend_cmd->fallthrough();

  std::optional<double> duration, dt;
  bool no_gravity = false;
  auto* dyn = app.add_subcommand("dynamics", "free-motion simulation and energy drift");
  dyn->add_option("--duration", duration, "seconds");
  dyn->add_option("--dt", dt, "seconds");
  dyn->add_flag("--no-gravity", no_gravity);
  dyn->fallthrough();

  std::vector<double> q_deg{0.0, 0.0, 0.0};
  auto* fk = app.add_subcommand("fk", "forward kinematics");
  fk->add_option("--q", q_deg, "three joint angles (deg)")->expected(3)->delimiter(',');
  fk->fallthrough();
  auto* jac = app.add_subcommand("jac", "6x3 Jacobian");
  jac->add_option("--q", q_deg, "three joint angles (deg)")->expected(3)->delimiter(',');
  jac->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  RunConfig config;
  try {
    if (!g.config_path.empty()) config = load_config(g.config_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  }

  Context ctx{g, config, resolve_out_dir(g, config), out};
  try {
    if (*validate) return cmd_validate(ctx);
    if (*traj) return cmd_traj(ctx, lower, upper);
    if (*forces) return cmd_forces(ctx, mode, variable, from, to);
    if (*descend_cmd) return cmd_descend(ctx, max_depth, tilt);
    if (*dyn) return cmd_dynamics(ctx, duration, dt, no_gravity);
    if (*fk) return cmd_fk(ctx, q_deg);
    if (*jac) return cmd_jac(ctx, q_deg);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitUsage;
}

}  // namespace spark::cli
