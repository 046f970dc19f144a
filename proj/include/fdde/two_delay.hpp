#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "fdde/types.hpp"

namespace fdde {

/// Delta(0) = gamma - k + k e^{-gamma tau2}; its sign decides existence of a
/// real positive characteristic root.
double delta_zero(double k, double gamma, double tau2);

/// The tau2 threshold -(1/gamma) log((k - gamma)/k) of the delay-independent
/// instability test. Valid for 0 < gamma < k and for gamma < 0 < k; the caller
/// applies the direction (unstable above it in the first case, below it in the
/// second).
double instability_threshold(double k, double gamma);

/// True iff Delta(0) < 0: a certificate of instability for every tau1 >= 0 and
/// every alpha in (0, 1]. False is NOT a stability certificate.
bool is_unstable_all_tau1(double k, double gamma, double tau2);

/// Real and imaginary parts of Delta(i v) written out as the two real
/// equations of the imaginary-axis crossing system.
std::pair<double, double> imaginary_axis_residuals(double v, double alpha, double k, double gamma,
                                                   double tau1, double tau2);

/// One point of the imaginary-axis crossing set in the (tau1, tau2)-plane.
struct BoundaryPoint {
    double v = 0.0;     // crossing frequency, > 0
    double tau1 = 0.0;  // >= 0 after wrapping
    double tau2 = 0.0;  // >= 0
    int branch = 0;     // number of 2 pi / v wraps applied to tau1
};

/// 2D damped Newton on the crossing system at fixed v from the given
/// (tau1, tau2) seed. Negative converged tau1 is wrapped up by multiples of
/// 2 pi / v; nullopt on non-convergence or negative tau2.
std::optional<BoundaryPoint> solve_boundary_point(double v, double alpha, double k, double gamma,
                                                  std::pair<double, double> seed);

struct BoundaryTrace {
    std::vector<BoundaryPoint> points;
    std::vector<double> failed_v;  // grid values with no converged solution
};

/// Continuation of the crossing set over the v grid: each solve seeds from the
/// previous converged point (the first from a coarse scan), and wrapped copies
/// tau1 + m 2pi/v for m = 1..max_branch are appended. Sorted by v, deduplicated
/// within 1e-6.
BoundaryTrace trace_boundary(double alpha, double k, double gamma,
                             const std::vector<double>& v_grid, int max_branch);

/// Uniform grid of v values strictly inside (0, v_max).
std::vector<double> default_v_grid(double v_max, int samples);

/// Groups traced boundary points into polyline chains by nearest-neighbor
/// continuation in v, so interleaved solution families separate cleanly.
std::vector<std::vector<BoundaryPoint>> boundary_chains(const std::vector<BoundaryPoint>& points,
                                                        double join_tol = 0.3);

/// Raw lambda = 0 branch value (-1/gamma) log((k - gamma)/k), sign and all.
/// Throws DomainError when (k - gamma)/k <= 0 or k = 0; gamma = 0 returns 1/k.
double zero_root_delay_raw(double k, double gamma);

/// The lambda = 0 critical delay when it is positive; nullopt when the raw
/// value is non-positive and the branch does not influence stability.
std::optional<double> zero_root_branch(double k, double gamma);

struct SliceInterval {
    double tau1_lo = 0.0;
    double tau1_hi = 0.0;
    Verdict verdict = Verdict::Stable;
};

struct Tau2SliceReport {
    double tau2 = 0.0;
    std::vector<SliceInterval> intervals;  // partition of [0, tau1_max]
};

/// Cuts the horizontal line tau2 = const through the traced boundary and
/// assigns each tau1 interval a verdict from the root-scan oracle at its
/// midpoint. Throws InconclusiveVerdict when a midpoint root sits within 1e-5
/// of the imaginary axis.
Tau2SliceReport classify_tau2_slice(double alpha, double k, double gamma, double tau2,
                                    double tau1_max, const std::vector<BoundaryPoint>& boundary);

}  // namespace fdde
