#include "fdde/single_delay.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace fdde {

const char* to_string(DelayClass c) {
    switch (c) {
        case DelayClass::StableAllDelays: return "stable-all-delays";
        case DelayClass::UnstableAllDelays: return "unstable-all-delays";
        case DelayClass::SingleStableRegion: return "single-stable-region";
        case DelayClass::Boundary: return "boundary";
    }
    return "unknown";
}

DelayClass classify(double a, double b) {
    const double abs_a = std::abs(a);
    if (b == -abs_a || b == -a || b == a) return DelayClass::Boundary;
    if (b < -abs_a) return DelayClass::SingleStableRegion;
    if (b > -a) return DelayClass::UnstableAllDelays;
    // remaining: a < 0 and a < b < -a
    return DelayClass::StableAllDelays;
}

double crossing_frequency(double a, double b, double alpha) {
    const double half = std::numbers::pi / 2.0;
    const double c = std::cos(alpha * half);
    const double s = std::sin(alpha * half);
    const double disc = b * b - a * a * s * s;
    if (disc < 0.0)
        throw DomainError("crossing_frequency: b^2 < a^2 sin^2(alpha pi/2), no imaginary-axis "
                          "crossing");
    const double base = a * c + std::sqrt(disc);
    if (!(base > 0.0))
        throw DomainError("crossing_frequency: nonpositive power base, crossing frequency "
                          "undefined");
    return std::pow(base, 1.0 / alpha);
}

double hopf_delay(double a, double b, double alpha) {
    const double half = std::numbers::pi / 2.0;
    const double c = std::cos(alpha * half);
    const double s = std::sin(alpha * half);
    const double disc = b * b - a * a * s * s;
    if (disc < 0.0)
        throw DomainError("hopf_delay: b^2 < a^2 sin^2(alpha pi/2), outside the formula domain");
    const double base = a * c + std::sqrt(disc);
    if (!(base > 0.0)) throw DomainError("hopf_delay: nonpositive power base");
    const double omega = std::pow(base, 1.0 / alpha);

    double cos_arg = (base * c - a) / b;
    // Clamp only genuine round-off; a real domain exit signals leaving the
    // switch regime and must surface.
    if (cos_arg > 1.0) {
        if (cos_arg > 1.0 + 1e-12)
            throw DomainError("hopf_delay: arccos argument " + std::to_string(cos_arg) +
                              " outside [-1, 1]");
        cos_arg = 1.0;
    } else if (cos_arg < -1.0) {
        if (cos_arg < -1.0 - 1e-12)
            throw DomainError("hopf_delay: arccos argument " + std::to_string(cos_arg) +
                              " outside [-1, 1]");
        cos_arg = -1.0;
    }
    return std::acos(cos_arg) / omega;
}

}  // namespace fdde
