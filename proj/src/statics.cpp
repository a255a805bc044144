#include "spark/statics.hpp"

#include "spark/csv.hpp"
#include "spark/params.hpp"

namespace spark {

std::vector<SweepRow> force_sweep(GraspMode mode, const ActuationInput<double>& act, const SweepSpec& spec,
                                  const ContactGeometry<double>& fixed, double L2) {
  if (spec.samples == 0) throw InvalidArgument("empty sweep range");
  const bool angle = spec.variable == "theta2" || spec.variable == "theta3";
  if (!angle && spec.variable != "d2" && spec.variable != "d3")
    throw InvalidArgument("unknown sweep variable '" + spec.variable + "'");
  if (mode == GraspMode::Pinch && (spec.variable == "theta3" || spec.variable == "d2"))
    throw InvalidArgument("pinch force does not depend on " + spec.variable);

  std::vector<SweepRow> rows;
  rows.reserve(spec.samples);
  for (std::size_t i = 0; i < spec.samples; ++i) {
    const double value = spec.samples == 1
                             ? spec.from
                             : spec.from + (spec.to - spec.from) * static_cast<double>(i) /
                                               static_cast<double>(spec.samples - 1);
    ContactGeometry<double> g = fixed;
    if (spec.variable == "theta2") g.theta2 = deg2rad(value);
    else if (spec.variable == "theta3") g.theta3 = deg2rad(value);
    else if (spec.variable == "d2") g.d2 = value;
    else g.d3 = value;

    SweepRow row{spec.variable + (angle ? "_deg" : "_mm"), value, std::nullopt, std::nullopt, "ok"};
    try {
      if (mode == GraspMode::Pinch) {
        row.F3 = pinch_force(act.T, g, L2);
      } else {
        const auto f = scoop_forces(act, g, L2);
        row.F2 = f.F2;
        row.F3 = f.F3;
      }
    } catch (const Error& e) {
      row.status = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "sweep_var,value,F2_N,F3_N,status\n";
  for (const auto& r : rows) {
    out << r.variable << ',' << format_number(r.value) << ',' << (r.F2 ? format_number(*r.F2) : "") << ','
        << (r.F3 ? format_number(*r.F3) : "") << ',';
    // Status may carry an error message; keep the row a single CSV record.
    std::string status = r.status;
    for (char& c : status)
      if (c == ',' || c == '\n') c = ';';
    out << status << '\n';
  }
}

}  // namespace spark
