#pragma once

#include <optional>
#include <vector>

#include "fdde/types.hpp"

namespace fdde {

/// Switch-pattern catalog over the (k, gamma)-plane for tau1 = 0.
enum class PatternTag { StableAll, UnstableAll, SSR, SUS, SUSU, USU };

const char* to_string(PatternTag t);

struct SwitchPattern {
    PatternTag tag = PatternTag::StableAll;
    std::vector<double> critical_delays;  // strictly increasing, all > 0
    std::vector<Verdict> verdicts;        // alternating, size = delays + 1
};

/// A point on one of the bifurcation curves gamma = h1(k) or gamma = h2(k),
/// together with the delay at which the defining condition holds.
struct CurvePoint {
    double k = 0.0;
    double gamma = 0.0;
    double tau_tangency = 0.0;
};

/// Delay-dependent coefficient b(tau) = -k e^{-gamma tau} of the standard form
/// D^a x = a x + b(tau) x(t - tau) with a = k - gamma.
double b_of_tau(double k, double gamma, double tau);

/// Delay at which |b(tau)| crosses |a|: (-1/gamma) log(|k - gamma| / k).
/// Returns the limit 1/k at gamma = 0. Throws DomainError when the log argument
/// is not positive or the result not positive.
double tau_star_pp(double k, double gamma);

/// The moving Hopf critical value tau*'(tau): hopf_delay(k - gamma, b(tau), alpha),
/// or nullopt where the formula takes complex values.
std::optional<double> hopf_curve(double k, double gamma, double alpha, double tau);

/// All fixed points of tau*'(tau) = tau on the curve's domain, ascending.
std::vector<double> find_intersections(double k, double gamma, double alpha);

/// Full switch-pattern classification per the tau1 = 0 case analysis.
/// Throws DegenerateInput on the lines gamma = 0, k = 0, gamma = k, gamma = 2k
/// and on tie configurations (tangency, intersection at tau*'').
SwitchPattern classify_pattern(double k, double gamma, double alpha);

/// Tangency curve h1: points where the diagonal is tangent to tau*'(tau).
/// One point attempted per k sample; non-converged samples are skipped.
std::vector<CurvePoint> trace_h1(double alpha, Interval k_range, int samples);

enum class GammaSide { FirstQuadrant, FourthQuadrant };

/// Curve h2: points where tau*'(tau*'') = tau*''. The side selects the gamma
/// search window (0 < gamma < k, or gamma < 0).
std::vector<CurvePoint> trace_h2(double alpha, Interval k_range, int samples, GammaSide side);

}  // namespace fdde
