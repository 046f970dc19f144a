#include "fdde/char_eq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fdde {

Complex frac_pow(Complex z, double alpha) {
    const double mod = std::abs(z);
    if (mod == 0.0) return Complex(0.0, 0.0);
    const double arg = std::arg(z);  // principal branch, arg in (-pi, pi]
    const double r = std::pow(mod, alpha);
    return Complex(r * std::cos(alpha * arg), r * std::sin(alpha * arg));
}

Complex char_value(Complex lambda, const SystemParams& p) {
    const Complex lam_a = frac_pow(lambda, p.alpha);
    const Complex e1 = std::exp(-lambda * p.tau1);
    const Complex e2 = std::exp(-lambda * (p.tau1 + p.tau2));
    const double decay = std::exp(-p.gamma * p.tau2);
    return lam_a + p.gamma - p.k * e1 + (p.k * decay) * e2;
}

Complex char_derivative(Complex lambda, const SystemParams& p) {
    if (std::abs(lambda) < 1e-300) {
        // alpha*lambda^(alpha-1) blows up at the origin for alpha < 1
        if (p.alpha < 1.0) return Complex(1e300, 0.0);
        lambda = Complex(0.0, 0.0);
    }
    const double decay = std::exp(-p.gamma * p.tau2);
    const Complex e1 = std::exp(-lambda * p.tau1);
    const Complex e2 = std::exp(-lambda * (p.tau1 + p.tau2));
    return p.alpha * frac_pow(lambda, p.alpha - 1.0) + p.k * p.tau1 * e1 -
           (p.k * decay) * (p.tau1 + p.tau2) * e2;
}

Complex char_value_single(Complex lambda, double a, double b, double tau, double alpha) {
    return frac_pow(lambda, alpha) - a - b * std::exp(-lambda * tau);
}

double char_value_real(double lambda, const SystemParams& p) {
    const double lam_a = lambda == 0.0 ? 0.0 : std::pow(lambda, p.alpha);
    const double decay = std::exp(-p.gamma * p.tau2);
    return lam_a + p.gamma - p.k * std::exp(-lambda * p.tau1) +
           (p.k * decay) * std::exp(-lambda * (p.tau1 + p.tau2));
}

namespace {

double char_derivative_real(double lambda, const SystemParams& p) {
    const double decay = std::exp(-p.gamma * p.tau2);
    const double pw = lambda == 0.0 ? 0.0 : std::pow(lambda, p.alpha - 1.0);
    return p.alpha * pw + p.k * p.tau1 * std::exp(-lambda * p.tau1) -
           (p.k * decay) * (p.tau1 + p.tau2) * std::exp(-lambda * (p.tau1 + p.tau2));
}

// Bisection on [a, b] with f(a), f(b) of opposite sign, then a short Newton polish.
double refine_real_root(const SystemParams& p, double a, double b, double fa) {
    double mid = 0.5 * (a + b);
    for (int i = 0; i < 200; ++i) {
        mid = 0.5 * (a + b);
        const double fm = char_value_real(mid, p);
        if (fm == 0.0 || (b - a) < 1e-15 * std::max(1.0, std::abs(mid))) break;
        if ((fm < 0.0) == (fa < 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    for (int i = 0; i < 8; ++i) {
        const double f = char_value_real(mid, p);
        if (std::abs(f) <= 1e-13) break;
        const double d = char_derivative_real(mid, p);
        if (std::abs(d) < 1e-14) break;
        const double next = mid - f / d;
        if (!(next > a && next < b)) break;  // keep the polish inside the bracket
        mid = next;
    }
    return mid;
}

}  // namespace

std::optional<double> find_real_positive_root(const SystemParams& p, double lambda_max) {
    p.validate();
    if (!(lambda_max > 0.0)) throw DomainError("find_real_positive_root: lambda_max must be > 0");

    const double delta0 = char_value_real(0.0, p);
    const int n_scan = 10000;
    // Log-spaced scan so that both tiny roots (Delta(0) barely negative) and
    // far-out dips of the exponential terms are resolved.
    const double lam_lo = std::max(lambda_max * 1e-14, 1e-300);
    const double log_lo = std::log(lam_lo);
    const double log_hi = std::log(lambda_max);

    double prev_lam = 0.0;
    double prev_f = delta0;
    for (int i = 0; i < n_scan; ++i) {
        const double lam = std::exp(log_lo + (log_hi - log_lo) * i / (n_scan - 1.0));
        const double f = char_value_real(lam, p);
        if (f == 0.0) return lam;
        if ((f < 0.0) != (prev_f < 0.0)) return refine_real_root(p, prev_lam, lam, prev_f);
        prev_lam = lam;
        prev_f = f;
    }
    if (delta0 < 0.0)
        throw ConvergenceError(
            "find_real_positive_root: Delta(0) < 0 but no sign change below lambda_max; "
            "enlarge lambda_max");
    return std::nullopt;
}

RootReport newton_root(const SystemParams& p, Complex seed) {
    p.validate();
    RootReport rep;
    rep.root = seed;
    Complex f = char_value(seed, p);
    rep.residual_norm = std::abs(f);

    constexpr double tol = 1e-10;
    constexpr int max_iter = 100;
    for (int iter = 1; iter <= max_iter; ++iter) {
        if (rep.residual_norm <= tol) {
            rep.iterations = iter - 1;
            rep.converged = true;
            return rep;
        }
        const Complex d = char_derivative(rep.root, p);
        if (std::abs(d) < 1e-14) {
            rep.iterations = iter - 1;
            rep.failure = RootReport::Failure::DerivativeNearZero;
            return rep;
        }
        const Complex step = f / d;
        // Halve the step until the residual decreases; quasi-polynomial
        // derivative scales vary wildly across the plane.
        double s = 1.0;
        bool accepted = false;
        for (int h = 0; h <= 20; ++h) {
            const Complex cand = rep.root - s * step;
            const Complex fc = char_value(cand, p);
            if (std::abs(fc) < rep.residual_norm) {
                rep.root = cand;
                f = fc;
                rep.residual_norm = std::abs(fc);
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted) {
            rep.iterations = iter;
            rep.failure = RootReport::Failure::IterationLimit;
            return rep;
        }
    }
    rep.iterations = max_iter;
    if (rep.residual_norm <= tol) {
        rep.converged = true;
    } else {
        rep.failure = RootReport::Failure::IterationLimit;
    }
    return rep;
}

std::vector<RootReport> scan_roots(const SystemParams& p, Interval re_range, Interval im_range,
                                   int grid) {
    p.validate();
    if (grid < 2) throw DomainError("scan_roots: grid must be >= 2 per axis");

    std::vector<RootReport> found;
    for (int i = 0; i < grid; ++i) {
        const double re = re_range.lo + (re_range.hi - re_range.lo) * i / (grid - 1.0);
        for (int j = 0; j < grid; ++j) {
            const double im = im_range.lo + (im_range.hi - im_range.lo) * j / (grid - 1.0);
            RootReport rep = newton_root(p, Complex(re, im));
            if (!rep.converged) continue;
            // Conjugate-symmetric problem: report the upper-half representative
            // when only im >= 0 was requested.
            if (im_range.lo >= 0.0 && rep.root.imag() < 0.0)
                rep.root = std::conj(rep.root);
            found.push_back(rep);
        }
    }
    std::sort(found.begin(), found.end(), [](const RootReport& a, const RootReport& b) {
        if (a.root.real() != b.root.real()) return a.root.real() > b.root.real();
        return a.root.imag() < b.root.imag();
    });
    std::vector<RootReport> unique;
    for (const RootReport& r : found) {
        bool dup = false;
        for (const RootReport& u : unique) {
            if (std::abs(r.root - u.root) < 1e-6) {
                dup = true;
                break;
            }
        }
        if (!dup) unique.push_back(r);
    }
    return unique;
}

std::optional<Complex> find_unstable_root(const SystemParams& p, double re_threshold,
                                          const std::vector<double>& seed_frequencies) {
    p.validate();
    // Any root in the closed right half-plane obeys
    //   |lambda|^alpha <= |gamma| + |k| (1 + e^{-gamma tau2}).
    const double decay = std::exp(-p.gamma * p.tau2);
    const double bound_base = std::abs(p.gamma) + std::abs(p.k) * (1.0 + decay) + 1.0;
    const double radius = std::pow(bound_base, 1.0 / p.alpha);

    std::optional<Complex> best;
    auto offer = [&](const RootReport& rep) {
        if (!rep.converged) return;
        if (!best || rep.root.real() > best->real()) best = rep.root;
    };

    try {
        if (auto r = find_real_positive_root(p, radius * 1.05)) {
            if (!best || *r > best->real()) best = Complex(*r, 0.0);
        }
    } catch (const ConvergenceError&) {
        // Bound violated numerically; the complex scan below still runs.
    }
    if (best && best->real() > re_threshold) return best;

    if (radius <= 2e4) {
        const int grid = 40;
        const Interval re{-0.02 * radius - 0.05, radius};
        const Interval im{0.0, radius};
        for (const RootReport& rep : scan_roots(p, re, im, grid)) offer(rep);
    }

    for (double w : seed_frequencies) {
        if (!(w > 0.0)) continue;
        const double s = std::max(0.01, 0.02 * w);
        const Complex probes[] = {
            Complex(0.0, w),          Complex(s, w),           Complex(-s, w),
            Complex(0.0, 0.97 * w),   Complex(0.0, 1.03 * w),  Complex(2.0 * s, 1.01 * w),
            Complex(0.5 * s, 0.9 * w), Complex(0.5 * s, 1.1 * w)};
        for (Complex seed : probes) offer(newton_root(p, seed));
    }
    return best;
}

}  // namespace fdde
