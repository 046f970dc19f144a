#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fdde/case_tau1_zero.hpp"
#include "fdde/sim.hpp"
#include "fdde/two_delay.hpp"
#include "fdde/types.hpp"

namespace fdde {

using Json = nlohmann::ordered_json;

/// Fixed-precision decimal rendering shared by every writer, so identical
/// configs produce byte-identical artifacts.
std::string format_number(double v);

Json to_json(const SystemParams& p);
Json to_json(const SwitchPattern& pattern);
Json to_json(const CurvePoint& pt);
Json to_json(const BoundaryPoint& pt);
Json to_json(const Tau2SliceReport& report);
Json to_json(const Trajectory& traj, bool include_samples = true);

/// Leading '#' provenance lines embedding the resolved config.
void write_provenance(std::ostream& os, const Json& config);

/// CSV columns: k, gamma, tau, curve_id.
void write_curves_csv(std::ostream& os, const std::vector<CurvePoint>& h1,
                      const std::vector<CurvePoint>& h2, const Json& config);

/// CSV columns: v, tau1, tau2, branch.
void write_boundary_csv(std::ostream& os, const std::vector<BoundaryPoint>& points,
                        const Json& config);

/// CSV columns: t, x.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const Json& config);

}  // namespace fdde
