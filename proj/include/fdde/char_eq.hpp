#pragma once

#include <optional>
#include <vector>

#include "fdde/types.hpp"

namespace fdde {

/// Principal-branch fractional power z^alpha with arg z in (-pi, pi]; 0^alpha = 0.
Complex frac_pow(Complex z, double alpha);

/// Characteristic function of the linearized two-delay system,
///   Delta(lambda) = lambda^alpha + gamma - k e^{-lambda tau1}
///                   + k e^{-gamma tau2} e^{-lambda (tau1 + tau2)}.
Complex char_value(Complex lambda, const SystemParams& p);

/// Analytic derivative of char_value with respect to lambda.
Complex char_derivative(Complex lambda, const SystemParams& p);

/// Characteristic function of the single-delay system D^a x = a x + b x(t - tau):
///   lambda^alpha - a - b e^{-lambda tau}.
Complex char_value_single(Complex lambda, double a, double b, double tau, double alpha);

/// char_value restricted to the real axis (lambda >= 0); avoids complex round-trips.
double char_value_real(double lambda, const SystemParams& p);

/// Locates a real positive root of Delta by dense scan plus bisection.
/// Returns nullopt when Delta(0) >= 0 and no sign change shows up below lambda_max.
/// Throws ConvergenceError when Delta(0) < 0 but the bracket never closes
/// (caller should enlarge lambda_max).
std::optional<double> find_real_positive_root(const SystemParams& p, double lambda_max);

struct RootReport {
    Complex root;
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    enum class Failure { None, DerivativeNearZero, IterationLimit } failure = Failure::None;
};

/// Damped Newton iteration on Delta from the given seed. Non-converged reports
/// are flagged, never silently returned as roots.
RootReport newton_root(const SystemParams& p, Complex seed);

/// Brute-force root sweep: Newton from every node of a grid x grid seed lattice,
/// deduplicated within 1e-6, sorted by decreasing real part. The independent
/// oracle behind every stability verdict.
std::vector<RootReport> scan_roots(const SystemParams& p, Interval re_range, Interval im_range,
                                   int grid);

/// Instability certificate: a verified root of Delta with Re > re_threshold, or
/// nullopt if none was found. Combines the real-axis scan with a windowed
/// complex scan sized from the right-half-plane modulus bound, plus optional
/// caller-supplied seed frequencies for the pure-imaginary axis.
std::optional<Complex> find_unstable_root(const SystemParams& p, double re_threshold = 1e-5,
                                          const std::vector<double>& seed_frequencies = {});

}  // namespace fdde
