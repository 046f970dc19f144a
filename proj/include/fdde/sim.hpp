#pragma once

#include <span>
#include <vector>

#include "fdde/types.hpp"

namespace fdde {

/// Feedback nonlinearity g with g(0) = 0 and g'(0) = k.
struct Nonlinearity {
    enum class Kind { Linear, Tanh } kind = Kind::Linear;
    double k = 0.0;

    double operator()(double x) const;
    double derivative(double x) const;

    static Nonlinearity linear(double k) { return {Kind::Linear, k}; }
    static Nonlinearity tanh(double k) { return {Kind::Tanh, k}; }
};

const char* to_string(Nonlinearity::Kind k);

struct SimConfig {
    double step = 1e-2;
    double horizon = 50.0;
    double history_value = 0.1;  // constant initial function on [-tau1-tau2, 0]
    double tail_fraction = 0.2;  // window width used by the verdict heuristic
};

/// Horizon default: fractional tails decay algebraically, so scale with the delays.
double default_horizon(const SystemParams& p);

/// Step and horizon defaults for the given delays: step 1e-2 and horizon
/// max(50, 20(tau1+tau2)), except that sub-0.1 delays shrink the step to a
/// tenth of the smallest nonzero delay (whose fast dynamics also shorten the
/// horizon).
SimConfig default_sim_config(const SystemParams& p);

struct Trajectory {
    std::vector<double> times;   // uniform grid from 0
    std::vector<double> values;  // same length
    Verdict verdict = Verdict::Inconclusive;
    bool truncated = false;  // |x| exceeded the blowup guard and the run stopped
};

/// Time-domain integration of D^a x = -gamma x + g(x(t-tau1)) - e^{-gamma tau2} g(x(t-tau1-tau2))
/// by the fractional Adams predictor-corrector on the Volterra form, with linear
/// interpolation of off-grid delayed states. Throws DomainError when the step
/// exceeds the smallest nonzero delay (StepTooLarge).
Trajectory simulate(const SystemParams& p, const Nonlinearity& g, const SimConfig& cfg);

/// Verdict for a computed trajectory: tail-window versus early-window amplitude
/// ratio, with log-log envelope and window-trend tie-breakers for the algebraic
/// and quasi-static regimes of fractional decay.
Verdict assess_verdict(std::span<const double> values, std::span<const double> times,
                       bool truncated, double tail_fraction = 0.2);

Verdict verdict(const Trajectory& traj, double tail_fraction = 0.2);

/// simulate(), doubling the horizon on an Inconclusive verdict up to max_doublings times.
Trajectory simulate_extending(const SystemParams& p, const Nonlinearity& g, SimConfig cfg,
                              int max_doublings = 4);

/// Empirical convergence order from successively halved steps against a
/// step/16 reference at a fixed final time. Throws ConvergenceError when the
/// error sequence fails to decrease.
double convergence_order(const SystemParams& p, const Nonlinearity& g,
                         const std::vector<double>& steps);

}  // namespace fdde
