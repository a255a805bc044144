#include "spark/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace spark {

namespace {

[[noreturn]] void fail(const std::string& what, const YAML::Mark& mark) {
  if (mark.is_null()) throw ConfigError(what, 0, 0);
  std::ostringstream msg;
  msg << "line " << mark.line + 1 << ", column " << mark.column + 1 << ": " << what;
  throw ConfigError(msg.str(), mark.line + 1, mark.column + 1);
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) fail("'" + key + "' must be a scalar", node.Mark());
  try {
    return node.as<T>();
  } catch (const YAML::BadConversion&) {
    fail("'" + key + "' has an invalid value '" + node.Scalar() + "'", node.Mark());
  }
}

double number(const YAML::Node& node, const std::string& key) {
  const double v = scalar<double>(node, key);
  if (!std::isfinite(v)) fail("'" + key + "' must be finite", node.Mark());
  return v;
}

std::size_t count(const YAML::Node& node, const std::string& key) {
  const long long v = scalar<long long>(node, key);
  if (v < 1) fail("'" + key + "' must be a positive integer", node.Mark());
  return static_cast<std::size_t>(v);
}

std::array<double, 3> triple(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence() || node.size() != 3) fail("'" + key + "' must be a list of 3 numbers", node.Mark());
  return {number(node[0], key), number(node[1], key), number(node[2], key)};
}

using Handler = std::function<void(const YAML::Node&, const std::string&)>;

void section(const YAML::Node& node, const std::string& name, const std::map<std::string, Handler>& handlers) {
  if (!node.IsMap()) fail("section '" + name + "' must be a mapping", node.Mark());
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    auto it = handlers.find(key);
    if (it == handlers.end()) fail("unknown key '" + name + "." + key + "'", kv.first.Mark());
    it->second(kv.second, name + "." + key);
  }
}

Handler set(double& target) {
  return [&target](const YAML::Node& n, const std::string& k) { target = number(n, k); };
}

Handler set_opt(std::optional<double>& target) {
  return [&target](const YAML::Node& n, const std::string& k) { target = number(n, k); };
}

Handler set_count(std::size_t& target) {
  return [&target](const YAML::Node& n, const std::string& k) { target = count(n, k); };
}

Handler set_triple(std::array<double, 3>& target) {
  return [&target](const YAML::Node& n, const std::string& k) { target = triple(n, k); };
}

RunConfig from_yaml(const YAML::Node& root) {
  RunConfig c;
  if (root.IsNull()) return c;
  if (!root.IsMap()) fail("configuration must be a mapping", root.Mark());
  auto& f = c.finger;
  std::map<std::string, Handler> top;
  top["schema_version"] = [](const YAML::Node& n, const std::string& k) {
    const int v = scalar<int>(n, k);
    if (v != kSchemaVersion) fail("unsupported schema_version " + std::to_string(v), n.Mark());
  };
  top["finger"] = [&](const YAML::Node& n, const std::string& k) {
    section(n, k, {{"L1", set(f.L1)}, {"L2", set(f.L2)}, {"L3", set(f.L3)}, {"CJ", set(f.CJ)},
                   {"CG", set(f.CG)}, {"FG", set(f.FG)}, {"dh1", set(f.dh1)}, {"dh2", set(f.dh2)},
                   {"dtheta_c1", set(f.dtheta_c1)}, {"q1", set(f.q1)}, {"q2", set(f.q2)}, {"q3", set(f.q3)},
                   {"k1", set(f.k1)}, {"k2", set(f.k2)}});
  };
  top["dynamics"] = [&](const YAML::Node& n, const std::string& k) {
    section(n, k,
            {{"m1", set(f.m1)}, {"m2", set(f.m2)}, {"m3", set(f.m3)}, {"lc1", set(f.lc1)}, {"lc2", set(f.lc2)},
             {"lc3", set(f.lc3)}, {"I1", set_opt(c.inertia[0])}, {"I2", set_opt(c.inertia[1])},
             {"I3", set_opt(c.inertia[2])}, {"g", set(f.g)}, {"q0_deg", set_triple(c.q0_deg)},
             {"dq0_deg_s", set_triple(c.dq0_deg_s)}, {"duration_s", set(c.duration_s)}, {"dt_s", set(c.dt_s)},
             {"gravity", [&](const YAML::Node& v, const std::string& key) { c.gravity = scalar<bool>(v, key); }}});
  };
  top["statics"] = [&](const YAML::Node& n, const std::string& k) {
    section(n, k,
            {{"T", set(c.torque)}, {"k", set(c.spring)}, {"d2", set_opt(c.d2)}, {"d3", set_opt(c.d3)},
             {"theta2_deg", set(c.theta2_deg)}, {"theta3_deg", set(c.theta3_deg)},
             {"sweep", [&](const YAML::Node& s, const std::string& key) {
                SweepSpec spec;
                section(s, key,
                        {{"variable", [&](const YAML::Node& v, const std::string& kk) {
                            spec.variable = scalar<std::string>(v, kk);
                            if (spec.variable != "theta2" && spec.variable != "theta3" && spec.variable != "d2" &&
                                spec.variable != "d3")
                              fail("'" + kk + "' must be theta2, theta3, d2 or d3", v.Mark());
                          }},
                         {"from", set(spec.from)},
                         {"to", set(spec.to)},
                         {"samples", set_count(spec.samples)}});
                c.sweep = spec;
              }}});
  };
  top["descent"] = [&](const YAML::Node& n, const std::string& k) {
    section(n, k, {{"max_depth", set(c.max_depth)}, {"tilt_deg", set(c.tilt_deg)}, {"half_span", set(c.half_span)},
                   {"samples", set_count(c.descent_samples)}});
  };
  top["trajectory"] = [&](const YAML::Node& n, const std::string& k) {
    section(n, k, {{"samples", set_count(c.traj_samples)}, {"lower", set_opt(c.stroke_lower)},
                   {"upper", set_opt(c.stroke_upper)}});
  };
  top["solver"] = [&](const YAML::Node& n, const std::string& k) {
    section(n, k, {{"tolerance", set(c.solver.tolerance)},
                   {"max_iterations",
                    [&](const YAML::Node& v, const std::string& key) {
                      c.solver.max_iterations = static_cast<int>(count(v, key));
                    }},
                   {"max_halvings", [&](const YAML::Node& v, const std::string& key) {
                      c.solver.max_halvings = scalar<int>(v, key);
                      if (c.solver.max_halvings < 0) fail("'" + key + "' must be non-negative", v.Mark());
                    }}});
  };
  top["kinematics"] = [&](const YAML::Node& n, const std::string& k) {
    section(n, k, {{"reference_deg", set_triple(c.reference_deg)}});
  };
  top["output"] = [&](const YAML::Node& n, const std::string& k) {
    section(n, k, {{"dir", [&](const YAML::Node& v, const std::string& key) {
                      c.output_dir = scalar<std::string>(v, key);
                    }}});
  };
  for (const auto& kv : root) {
    const std::string key = kv.first.as<std::string>();
    auto it = top.find(key);
    if (it == top.end()) fail("unknown key '" + key + "'", kv.first.Mark());
    it->second(kv.second, key);
  }
  return c;
}

}  // namespace

DynamicsParams<double> RunConfig::dynamics() const {
  auto d = DynamicsParams<double>::from(finger);
  for (int i = 0; i < 3; ++i)
    if (inertia[static_cast<std::size_t>(i)]) d.inertia[i] = *inertia[static_cast<std::size_t>(i)];
  if (!gravity) d.g = 0.0;
  return d;
}

ContactGeometry<double> RunConfig::contact() const {
  ContactGeometry<double> g;
  g.d2 = d2.value_or(finger.L2 / 2);
  g.d3 = d3.value_or(finger.CJ / 2);
  g.theta2 = deg2rad(theta2_deg);
  g.theta3 = deg2rad(theta3_deg);
  return g;
}

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    fail(e.msg, e.mark);
  }
  return from_yaml(root);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'", 0, 0);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace spark
