#include "spark/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <set>
#include <sstream>
#include <unordered_map>

#include "spark/csv.hpp"
#include "spark/error.hpp"

namespace spark {

namespace {

Eigen::Matrix2d quarter_turn() {
  Eigen::Matrix2d r;
  r << 0, -1, 1, 0;
  return r;
}

Point unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

// Intersections of circle (p, rp) and circle (q, rq); first is left of p->q.
std::pair<Point, Point> circle_intersections(const Point& p, double rp, const Point& q, double rq) {
  const Point pq = q - p;
  const double d = pq.norm();
  const double a = (rp * rp - rq * rq + d * d) / (2 * d);
  const double h2 = rp * rp - a * a;
  if (!(d > 0) || h2 < 0) throw ConstraintViolation("circles do not intersect while assembling preset");
  const Point e = pq / d;
  const Point n = quarter_turn() * e;
  const double h = std::sqrt(h2);
  return {p + a * e + h * n, p + a * e - h * n};
}

bool near(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

// Dense indexing of the unknowns: two coordinates per free joint.
struct Layout {
  std::unordered_map<std::string, int> slot;  // joint -> first unknown, -1 when grounded
  std::unordered_map<std::string, Point> fixed;
  int unknowns = 0;
  int equations = 0;
  std::vector<const Bar*> bars;

  explicit Layout(const LinkageTopology& t) {
    for (const auto& g : t.grounded) fixed[g.joint] = g.at;
    for (const auto& j : t.joints) {
      if (fixed.count(j)) {
        slot[j] = -1;
      } else {
        slot[j] = unknowns;
        unknowns += 2;
      }
    }
    for (const auto& b : t.bars)
      if (!(fixed.count(b.a) && fixed.count(b.b))) bars.push_back(&b);
    equations = static_cast<int>(bars.size() + 2 * t.attachments.size()) + 1;
  }

  Point point(const Eigen::VectorXd& x, const std::string& j) const {
    const int s = slot.at(j);
    return s < 0 ? fixed.at(j) : Point(x.segment<2>(s));
  }

  Eigen::VectorXd pack(const LinkageState& state) const {
    Eigen::VectorXd x(unknowns);
    for (const auto& [j, s] : slot) {
      if (s < 0) continue;
      auto it = state.coordinates.find(j);
      if (it == state.coordinates.end())
        throw InvalidArgument("initial guess has no entry for joint " + j);
      x.segment<2>(s) = it->second;
    }
    return x;
  }

  LinkageState unpack(const Eigen::VectorXd& x) const {
    LinkageState s;
    for (const auto& [j, k] : slot) s.coordinates[j] = point(x, j);
    return s;
  }
};

Eigen::VectorXd residual(const LinkageTopology& t, const Layout& lay, double value,
                         const Eigen::VectorXd& x) {
  Eigen::VectorXd r(lay.equations);
  int row = 0;
  for (const Bar* b : lay.bars)
    r[row++] = (lay.point(x, b->a) - lay.point(x, b->b)).norm() - b->rest_length;
  const Eigen::Matrix2d R = quarter_turn();
  for (const auto& a : t.attachments) {
    const Point base = lay.point(x, a.base);
    const Point seg = lay.point(x, a.tip) - base;
    r.segment<2>(row) = lay.point(x, a.joint) - base - a.along * seg - a.across * (R * seg);
    row += 2;
  }
  const Point p = lay.point(x, t.driver.joint);
  r[row] = (t.driver.axis == Axis::X ? p.x() : p.y()) - (t.driver.origin + value);
  return r;
}

Eigen::MatrixXd jacobian(const LinkageTopology& t, const Layout& lay, const Eigen::VectorXd& x) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(lay.equations, lay.unknowns);
  auto put = [&](int row, const std::string& j, const Eigen::Matrix<double, Eigen::Dynamic, 2>& block) {
    const int s = lay.slot.at(j);
    if (s >= 0) J.block(row, s, block.rows(), 2) += block;
  };
  int row = 0;
  for (const Bar* b : lay.bars) {
    const Point d = lay.point(x, b->a) - lay.point(x, b->b);
    const double len = d.norm();
    if (len == 0.0) throw SingularConfiguration("bar " + b->a + b->b + " collapsed to zero length");
    const Eigen::RowVector2d e = (d / len).transpose();
    put(row, b->a, e);
    put(row, b->b, -e);
    ++row;
  }
  const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
  const Eigen::Matrix2d R = quarter_turn();
  for (const auto& a : t.attachments) {
    put(row, a.joint, I);
    put(row, a.base, -(1 - a.along) * I + a.across * R);
    put(row, a.tip, -a.along * I - a.across * R);
    row += 2;
  }
  Eigen::RowVector2d sel = t.driver.axis == Axis::X ? Eigen::RowVector2d(1, 0) : Eigen::RowVector2d(0, 1);
  put(row, t.driver.joint, sel);
  return J;
}

struct Solved {
  Eigen::VectorXd x;
  double residual;
  int det_sign;
};

Solved newton(const LinkageTopology& t, const Layout& lay, double value, Eigen::VectorXd x,
              const SolverOptions& opt) {
  if (lay.equations != lay.unknowns)
    throw InvalidArgument("position solve needs mobility 1, topology has " +
                          std::to_string(lay.unknowns - lay.equations + 1));
  Eigen::VectorXd r = residual(t, lay, value, x);
  double norm = r.norm();
  for (int it = 0; it <= opt.max_iterations; ++it) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jacobian(t, lay, x));
    lu.setThreshold(opt.singular_threshold);
    if (!lu.isInvertible())
      throw SingularConfiguration("singular constraint Jacobian (rank " + std::to_string(lu.rank()) +
                                  " of " + std::to_string(lay.unknowns) + ")");
    if (norm <= opt.tolerance) {
      const double det = lu.determinant();
      return {x, norm, det > 0 ? 1 : -1};
    }
    if (it == opt.max_iterations) break;
    const Eigen::VectorXd dx = lu.solve(-r);
    double step = 1.0;
    Eigen::VectorXd xn = x + dx;
    Eigen::VectorXd rn = residual(t, lay, value, xn);
    for (int h = 0; h < opt.max_halvings && !(rn.norm() < norm); ++h) {
      step *= 0.5;
      xn = x + step * dx;
      rn = residual(t, lay, value, xn);
    }
    x = std::move(xn);
    r = std::move(rn);
    norm = r.norm();
    if (!std::isfinite(norm)) break;
  }
  std::ostringstream msg;
  msg << "no convergence after " << opt.max_iterations << " iterations, residual " << norm;
  throw NonConvergence(msg.str(), norm);
}

std::string signature(const LinkageTopology& t, const SolverOptions& o) {
  std::ostringstream s;
  s.precision(17);
  for (const auto& j : t.joints) s << j << ',';
  for (const auto& b : t.bars) s << b.a << b.b << b.rest_length << ';';
  for (const auto& a : t.attachments) s << a.joint << a.base << a.tip << a.along << a.across << ';';
  for (const auto& g : t.grounded) s << g.joint << g.at.x() << g.at.y() << ';';
  s << t.driver.joint << int(t.driver.axis) << t.driver.origin << '|';
  for (const auto& [j, p] : t.reference.coordinates) s << j << p.x() << p.y() << ';';
  s << o.tolerance << o.max_iterations << o.max_halvings << o.singular_threshold;
  return s.str();
}

double max_coordinate_change(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

double characteristic_step(const LinkageTopology& t) {
  double longest = 0;
  for (const auto& b : t.bars) longest = std::max(longest, b.rest_length);
  return longest / 160.0;
}

// One continuation step; rejects branch jumps and passages through singular configurations.
Solved step_to(const LinkageTopology& t, const Layout& lay, const Solved& from, double from_value,
               double value, const SolverOptions& opt) {
  Solved next = newton(t, lay, value, from.x, opt);
  const double dv = std::abs(value - from_value);
  if (max_coordinate_change(next.x, from.x) > 10 * dv + 1e-9)
    throw SingularConfiguration("branch jump between driver values " + format_number(from_value) +
                                " and " + format_number(value));
  if (next.det_sign != from.det_sign)
    throw SingularConfiguration("passed through a singular configuration between driver values " +
                                format_number(from_value) + " and " + format_number(value));
  return next;
}

Solved walk(const LinkageTopology& t, const Layout& lay, Solved from, double from_value,
            double target, double max_step, const SolverOptions& opt) {
  const double span = target - from_value;
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(span) / max_step)));
  double v = from_value;
  for (int k = 1; k <= n; ++k) {
    const double next = k == n ? target : from_value + span * k / n;
    from = step_to(t, lay, from, v, next, opt);
    v = next;
  }
  return from;
}

Solved solved_reference(const LinkageTopology& t, const Layout& lay, const SolverOptions& opt) {
  return newton(t, lay, 0.0, lay.pack(t.reference), opt);
}

double edge(const LinkageTopology& t, const Layout& lay, const Solved& ref, double direction,
            const SolverOptions& opt) {
  const double h = characteristic_step(t) * direction;
  Solved good = ref;
  double good_v = 0.0;
  double bad_v = 0.0;
  bool failed = false;
  for (int k = 0; k < 100000; ++k) {
    const double v = good_v + h;
    try {
      good = step_to(t, lay, good, good_v, v, opt);
      good_v = v;
    } catch (const Error&) {
      bad_v = v;
      failed = true;
      break;
    }
  }
  if (!failed) return good_v;
  for (int k = 0; k < 48; ++k) {
    const double mid = 0.5 * (good_v + bad_v);
    try {
      good = step_to(t, lay, good, good_v, mid, opt);
      good_v = mid;
    } catch (const Error&) {
      bad_v = mid;
    }
  }
  return good_v;
}

}  // namespace

std::string ValidationReport::describe() const {
  if (ok()) return "valid";
  std::ostringstream s;
  for (const auto& v : violations)
    s << v.relation << " (measured " << format_number(v.measured) << ", expected "
      << format_number(v.expected) << ")\n";
  return s.str();
}

ValidationReport validate_kempe_constraints(const FingerParams& p) {
  ValidationReport report;
  const std::pair<const char*, double> lengths[] = {{"L1", p.L1}, {"L2", p.L2}, {"L3", p.L3},
                                                    {"CJ", p.CJ}, {"CG", p.CG}, {"FG", p.FG}};
  bool positive = true;
  for (const auto& [name, v] : lengths) {
    if (!(std::isfinite(v) && v > 0)) {
      report.violations.push_back({std::string(name) + " must be a positive length", v, 0.0});
      positive = false;
    }
  }
  for (const auto& [name, v] : {std::pair<const char*, double>{"k1", p.k1}, {"k2", p.k2}})
    if (!(std::isfinite(v) && v >= 0))
      report.violations.push_back({std::string(name) + " must be non-negative", v, 0.0});
  if (!positive) return report;

  constexpr double tol = 1e-9;
  auto ratio = [&](const char* rel, double num, double den, double expected) {
    if (!near(num / den, expected, tol)) report.violations.push_back({rel, num / den, expected});
  };
  ratio("L1:L2 != 2:1", p.L1, p.L2, 2.0);
  ratio("L2:L3 != 2:1", p.L2, p.L3, 2.0);
  ratio("L1:L3 != 4:1", p.L1, p.L3, 4.0);
  // The shortened links hang from the midpoint of BC and must close a triangle over it.
  if (!(p.CG + p.FG > p.L2 / 2 && std::abs(p.CG - p.FG) < p.L2 / 2))
    report.violations.push_back({"CG, FG cannot close a triangle over half of BC", p.CG + p.FG, p.L2 / 2});
  return report;
}

const Point& LinkageState::at(const std::string& joint) const {
  auto it = coordinates.find(joint);
  if (it == coordinates.end()) throw InvalidArgument("no coordinates for joint " + joint);
  return it->second;
}

bool LinkageTopology::is_grounded(const std::string& joint) const {
  return std::any_of(grounded.begin(), grounded.end(), [&](const Grounding& g) { return g.joint == joint; });
}

int LinkageTopology::mobility() const {
  int free = 0;
  for (const auto& j : joints) free += is_grounded(j) ? 0 : 1;
  int bar_count = 0;
  for (const auto& b : bars) bar_count += (is_grounded(b.a) && is_grounded(b.b)) ? 0 : 1;
  return 2 * free - bar_count - 2 * static_cast<int>(attachments.size());
}

bool LinkageTopology::connected() const {
  if (joints.empty()) return false;
  std::unordered_map<std::string, std::vector<std::string>> adj;
  for (const auto& b : bars) {
    adj[b.a].push_back(b.b);
    adj[b.b].push_back(b.a);
  }
  for (const auto& a : attachments) {
    for (const auto* o : {&a.base, &a.tip}) {
      adj[a.joint].push_back(*o);
      adj[*o].push_back(a.joint);
    }
  }
  std::set<std::string> seen{joints.front()};
  std::vector<std::string> stack{joints.front()};
  while (!stack.empty()) {
    auto j = stack.back();
    stack.pop_back();
    for (const auto& n : adj[j])
      if (seen.insert(n).second) stack.push_back(n);
  }
  return seen.size() == joints.size();
}

const Bar* LinkageTopology::find_bar(const std::string& a, const std::string& b) const {
  for (const auto& bar : bars)
    if ((bar.a == a && bar.b == b) || (bar.a == b && bar.b == a)) return &bar;
  return nullptr;
}

void LinkageTopology::check() const {
  std::set<std::string> names;
  for (const auto& j : joints)
    if (!names.insert(j).second) throw InvalidArgument("duplicate joint " + j);
  auto known = [&](const std::string& j, const char* where) {
    if (!names.count(j)) throw InvalidArgument(std::string(where) + " references unknown joint '" + j + "'");
  };
  for (const auto& b : bars) {
    known(b.a, "bar");
    known(b.b, "bar");
    if (b.a == b.b) throw InvalidArgument("bar joins joint " + b.a + " to itself");
    if (!(b.rest_length > 0)) throw InvalidArgument("bar " + b.a + b.b + " has non-positive rest length");
  }
  for (const auto& a : attachments) {
    known(a.joint, "attachment");
    known(a.base, "attachment");
    known(a.tip, "attachment");
  }
  for (const auto& g : grounded) known(g.joint, "grounding");
  known(driver.joint, "driver");
  known(output, "output");
  known(output_base, "output");
  for (const auto& j : joints)
    if (!reference.coordinates.count(j)) throw InvalidArgument("reference pose lacks joint " + j);
  if (!connected()) throw InvalidArgument("bar graph is not connected");
}

LinkageTopology spark_preset(const FingerParams& p) {
  const auto report = validate_kempe_constraints(p);
  if (!report) throw ConstraintViolation("invalid finger geometry: " + report.describe());

  // Reference pose: proximal link AB at 15 degrees above the base AD.
  const double phi = deg2rad(15.0);
  const double input_reach = p.L1 * p.L1 / p.L2;  // reversor input arm, EK

  std::map<std::string, Point> X;
  X["A"] = {0, 0};
  X["D"] = {p.L1, 0};
  X["B"] = p.L2 * unit(phi);
  X["E"] = X["D"] + X["B"];
  X["C"] = X["B"] + p.L2 * unit(std::numbers::pi - phi);
  X["I"] = X["E"] + (X["C"] - X["B"]);
  const Point ci = (X["I"] - X["C"]).normalized();
  X["J"] = X["C"] - p.CJ * (quarter_turn() * ci);
  {
    const Point mid = 0.5 * (X["D"] + X["I"]);
    const double half = 0.5 * (X["I"] - X["D"]).norm();
    const Point away = quarter_turn() * (X["I"] - X["D"]).normalized();
    X["H"] = mid + std::sqrt(p.L3 * p.L3 - half * half) * away;
  }
  X["F"] = 0.5 * (X["B"] + X["C"]);
  X["G"] = circle_intersections(X["C"], p.CG, X["F"], p.FG).first;
  // Kempe reversor holding BC and EI mirrored about the horizontal through E.
  X["K"] = X["E"] + (input_reach / p.L2) * (X["D"] - X["E"]);
  {
    const auto [l1, l2] = circle_intersections(X["B"], input_reach, X["K"], p.L1);
    const Point parallel = X["B"] + (X["K"] - X["E"]);
    X["L"] = (l1 - parallel).norm() > (l2 - parallel).norm() ? l1 : l2;
  }
  X["M"] = X["B"] + (p.L2 / input_reach) * (X["L"] - X["B"]);

  LinkageTopology t;
  t.joints = {"A", "B", "C", "D", "E", "F", "G", "H", "I", "J", "K", "L", "M"};
  t.bars = {
      {"A", "D", p.L1},
      {"A", "B", p.L2},
      {"D", "E", p.L2},
      {"B", "E", p.L1},
      {"B", "C", p.L2},
      {"E", "I", p.L2},
      {"C", "I", p.L1},
      {"C", "J", p.CJ},
      {"I", "J", std::hypot(p.L1, p.CJ)},
      {"D", "H", p.L3},
      {"H", "I", p.L3},
      {"C", "G", p.CG},
      {"F", "G", p.FG},
      {"B", "L", input_reach},
      {"L", "K", p.L1},
      {"M", "I", p.L1},
  };
  t.attachments = {
      {"F", "B", "C", 0.5, 0.0},
      {"K", "E", "D", input_reach / p.L2, 0.0},
      {"M", "B", "L", p.L2 / input_reach, 0.0},
  };
  t.grounded = {{"A", X["A"]}, {"D", X["D"]}};
  t.driver = {"J", Axis::Y, X["J"].y()};
  t.reference.coordinates = X;
  t.output = "J";
  t.output_base = "C";
  return t;
}

Eigen::VectorXd constraint_residual(const LinkageTopology& topology, double driver_value,
                                    const LinkageState& state) {
  Layout lay(topology);
  return residual(topology, lay, driver_value, lay.pack(state));
}

LinkageState solve_position(const LinkageTopology& topology, double driver_value,
                            const LinkageState& initial_guess, const SolverOptions& options) {
  Layout lay(topology);
  const Solved s = newton(topology, lay, driver_value, lay.pack(initial_guess), options);
  LinkageState out = lay.unpack(s.x);
  out.residual_norm = s.residual;
  return out;
}

LinkageState continue_to(const LinkageTopology& topology, const LinkageState& from,
                         double from_value, double target, double max_step,
                         const SolverOptions& options) {
  if (!(max_step > 0)) throw InvalidArgument("continuation step must be positive");
  Layout lay(topology);
  const Solved start = newton(topology, lay, from_value, lay.pack(from), options);
  const Solved s = walk(topology, lay, start, from_value, target, max_step, options);
  LinkageState out = lay.unpack(s.x);
  out.residual_norm = s.residual;
  return out;
}

StrokeLimits discover_stroke(const LinkageTopology& topology, const SolverOptions& options) {
  static std::mutex mutex;
  static std::unordered_map<std::string, StrokeLimits> cache;
  const std::string key = signature(topology, options);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  Layout lay(topology);
  const Solved ref = solved_reference(topology, lay, options);
  const double lo = edge(topology, lay, ref, -1.0, options);
  const double hi = edge(topology, lay, ref, +1.0, options);
  const double margin = 1e-3 * (hi - lo);
  const StrokeLimits limits{lo + margin, hi - margin};
  std::lock_guard lock(mutex);
  cache.emplace(key, limits);
  return limits;
}

std::vector<TrajectorySample> fingertip_trajectory(const LinkageTopology& topology, double lower,
                                                   double upper, std::size_t n_samples,
                                                   const SolverOptions& options) {
  if (n_samples < 2) throw InvalidArgument("trajectory needs at least 2 samples");
  if (!std::isfinite(lower) || !std::isfinite(upper)) throw InvalidArgument("stroke bounds must be finite");
  Layout lay(topology);
  const double max_step = characteristic_step(topology);
  auto output = [&](double v, const Solved& s) {
    const Point tip = lay.point(s.x, topology.output);
    const Point d = tip - lay.point(s.x, topology.output_base);
    return TrajectorySample{v, tip, std::atan2(d.y(), d.x())};
  };

  std::vector<TrajectorySample> out;
  out.reserve(n_samples);
  Solved s;
  try {
    s = walk(topology, lay, solved_reference(topology, lay, options), 0.0, lower, max_step, options);
  } catch (const Error& e) {
    throw TrajectoryFailure(std::string("sample 0: ") + e.what(), 0, {});
  }
  out.push_back(output(lower, s));
  double v = lower;
  for (std::size_t k = 1; k < n_samples; ++k) {
    const double next = lower + (upper - lower) * static_cast<double>(k) / static_cast<double>(n_samples - 1);
    try {
      s = walk(topology, lay, s, v, next, max_step, options);
    } catch (const Error& e) {
      throw TrajectoryFailure("sample " + std::to_string(k) + ": " + e.what(), k, std::move(out));
    }
    v = next;
    out.push_back(output(v, s));
  }
  return out;
}

Straightness straightness_metric(const std::vector<TrajectorySample>& trajectory) {
  if (trajectory.empty()) throw InvalidArgument("empty trajectory");
  const double x0 = trajectory.front().tip.x();
  double max_dev = 0;
  double sum_sq = 0;
  for (const auto& s : trajectory) {
    const double d = std::abs(s.tip.x() - x0);
    max_dev = std::max(max_dev, d);
    sum_sq += d * d;
  }
  return {max_dev, std::sqrt(sum_sq / static_cast<double>(trajectory.size()))};
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectorySample>& trajectory) {
  out << "driver_mm,tip_x_mm,tip_y_mm,orientation_rad\n";
  for (const auto& s : trajectory)
    out << format_number(s.driver) << ',' << format_number(s.tip.x()) << ','
        << format_number(s.tip.y()) << ',' << format_number(s.orientation) << '\n';
}

}  // namespace spark
