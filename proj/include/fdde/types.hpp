#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace fdde {

using Complex = std::complex<double>;

/// Parameters of the linearized two-delay system
///   D^a x(t) = -gamma x(t) + k x(t - tau1) - k e^{-gamma tau2} x(t - tau1 - tau2).
struct SystemParams {
    double alpha = 1.0;  // fractional order, in (0, 1]
    double k = 0.0;      // slope of the feedback nonlinearity at the origin
    double gamma = 0.0;  // decay coefficient
    double tau1 = 0.0;   // first delay, >= 0
    double tau2 = 0.0;   // second delay, >= 0

    void validate() const;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

enum class Verdict { Stable, Unstable, Inconclusive };

const char* to_string(Verdict v);

/// A requested evaluation lies outside the formula's mathematical domain.
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Input sits on a measure-zero boundary where the classification is undefined.
struct DegenerateInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// An iterative solve failed to converge within its budget.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A verdict could not be assigned because the oracle sees a near-boundary root.
struct InconclusiveVerdict : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Worker count for parallel sweeps: FDDE_STAB_THREADS if set, else hardware concurrency.
int worker_thread_count();

}  // namespace fdde
