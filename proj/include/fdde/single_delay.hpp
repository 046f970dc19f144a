#pragma once

#include "fdde/types.hpp"

namespace fdde {

/// Stability classes of D^a x = a x + b x(t - tau) over the (a, b)-plane.
/// SingleStableRegion (SSR) means stable exactly for delays below one critical
/// value; Boundary marks the measure-zero lines b = -|a|, b = -a, b = a on
/// which the classification is undefined.
enum class DelayClass { StableAllDelays, UnstableAllDelays, SingleStableRegion, Boundary };

const char* to_string(DelayClass c);

DelayClass classify(double a, double b);

/// Crossing frequency omega = (a cos(a_pi_2) + sqrt(b^2 - a^2 sin^2(a_pi_2)))^(1/alpha)
/// of the purely imaginary root i*omega at the first stability switch.
/// Throws DomainError when the square root or the power base leaves its domain.
double crossing_frequency(double a, double b, double alpha);

/// First Hopf critical delay of the single-delay system.
/// Throws DomainError when the arccos argument leaves [-1, 1] beyond round-off
/// or crossing_frequency is undefined.
double hopf_delay(double a, double b, double alpha);

}  // namespace fdde
