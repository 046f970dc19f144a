#include "fdde/io.hpp"

#include <cstdio>

namespace fdde {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

Json to_json(const SystemParams& p) {
    return Json{{"alpha", p.alpha},
                {"k", p.k},
                {"gamma", p.gamma},
                {"tau1", p.tau1},
                {"tau2", p.tau2}};
}

Json to_json(const SwitchPattern& pattern) {
    Json verdicts = Json::array();
    for (Verdict v : pattern.verdicts) verdicts.push_back(to_string(v));
    return Json{{"tag", to_string(pattern.tag)},
                {"critical_delays", pattern.critical_delays},
                {"verdicts", verdicts}};
}

Json to_json(const CurvePoint& pt) {
    return Json{{"k", pt.k}, {"gamma", pt.gamma}, {"tau", pt.tau_tangency}};
}

Json to_json(const BoundaryPoint& pt) {
    return Json{{"v", pt.v}, {"tau1", pt.tau1}, {"tau2", pt.tau2}, {"branch", pt.branch}};
}

Json to_json(const Tau2SliceReport& report) {
    Json intervals = Json::array();
    for (const SliceInterval& iv : report.intervals) {
        intervals.push_back(Json{{"tau1_lo", iv.tau1_lo},
                                 {"tau1_hi", iv.tau1_hi},
                                 {"verdict", to_string(iv.verdict)}});
    }
    return Json{{"tau2", report.tau2}, {"intervals", intervals}};
}

Json to_json(const Trajectory& traj, bool include_samples) {
    Json j{{"verdict", to_string(traj.verdict)},
           {"truncated", traj.truncated},
           {"samples", traj.values.size()}};
    if (!traj.times.empty()) j["t_final"] = traj.times.back();
    if (include_samples) {
        j["times"] = traj.times;
        j["values"] = traj.values;
    }
    return j;
}

void write_provenance(std::ostream& os, const Json& config) {
    os << "# fdde-stab artifact\n";
    for (const auto& [key, value] : config.items()) {
        os << "# " << key << "=";
        if (value.is_number_float())
            os << format_number(value.get<double>());
        else
            os << value.dump();
        os << "\n";
    }
}

void write_curves_csv(std::ostream& os, const std::vector<CurvePoint>& h1,
                      const std::vector<CurvePoint>& h2, const Json& config) {
    write_provenance(os, config);
    os << "k,gamma,tau,curve_id\n";
    for (const CurvePoint& p : h1)
        os << format_number(p.k) << ',' << format_number(p.gamma) << ','
           << format_number(p.tau_tangency) << ",h1\n";
    for (const CurvePoint& p : h2)
        os << format_number(p.k) << ',' << format_number(p.gamma) << ','
           << format_number(p.tau_tangency) << ",h2\n";
}

void write_boundary_csv(std::ostream& os, const std::vector<BoundaryPoint>& points,
                        const Json& config) {
    write_provenance(os, config);
    os << "v,tau1,tau2,branch\n";
    for (const BoundaryPoint& p : points)
        os << format_number(p.v) << ',' << format_number(p.tau1) << ',' << format_number(p.tau2)
           << ',' << p.branch << "\n";
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const Json& config) {
    write_provenance(os, config);
    os << "t,x\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        os << format_number(traj.times[i]) << ',' << format_number(traj.values[i]) << "\n";
}

}  // namespace fdde
