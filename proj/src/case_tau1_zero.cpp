#include "fdde/case_tau1_zero.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <string>

#include "fdde/single_delay.hpp"

namespace fdde {

const char* to_string(PatternTag t) {
    switch (t) {
        case PatternTag::StableAll: return "StableAll";
        case PatternTag::UnstableAll: return "UnstableAll";
        case PatternTag::SSR: return "SSR";
        case PatternTag::SUS: return "SUS";
        case PatternTag::SUSU: return "SUSU";
        case PatternTag::USU: return "USU";
    }
    return "unknown";
}

double b_of_tau(double k, double gamma, double tau) {
    if (!(tau >= 0.0)) throw DomainError("b_of_tau: tau must be >= 0");
    return -k * std::exp(-gamma * tau);
}

double tau_star_pp(double k, double gamma) {
    if (!(k > 0.0)) throw DomainError("tau_star_pp: requires k > 0");
    if (gamma == 0.0) return 1.0 / k;  // removable singularity of the log formula
    if (gamma == k) throw DomainError("tau_star_pp: undefined on the line gamma = k");
    double value;
    if (gamma < k) {
        // (k - gamma)/k = 1 - gamma/k, kept accurate near gamma = 0
        value = -std::log1p(-gamma / k) / gamma;
    } else {
        value = -std::log((gamma - k) / k) / gamma;
    }
    if (!(value > 0.0))
        throw DomainError("tau_star_pp: no positive crossing delay for k=" + std::to_string(k) +
                          ", gamma=" + std::to_string(gamma));
    return value;
}

namespace {

// Exception-free core of hopf_delay/hopf_curve; nullopt where the closed form
// leaves the real domain.
std::optional<double> hopf_value(double a, double b, double alpha) {
    const double half = std::numbers::pi / 2.0;
    const double c = std::cos(alpha * half);
    const double s = std::sin(alpha * half);
    const double disc = b * b - a * a * s * s;
    if (disc < 0.0) return std::nullopt;
    const double base = a * c + std::sqrt(disc);
    if (!(base > 0.0)) return std::nullopt;
    const double omega = std::pow(base, 1.0 / alpha);
    double cos_arg = (base * c - a) / b;
    if (cos_arg > 1.0) {
        if (cos_arg > 1.0 + 1e-12) return std::nullopt;
        cos_arg = 1.0;
    } else if (cos_arg < -1.0) {
        if (cos_arg < -1.0 - 1e-12) return std::nullopt;
        cos_arg = -1.0;
    }
    return std::acos(cos_arg) / omega;
}

std::optional<double> hopf_curve_value(double k, double gamma, double alpha, double tau) {
    return hopf_value(k - gamma, -k * std::exp(-gamma * tau), alpha);
}

// Domain of tau*'(tau) in tau, derived from |b(tau)| = k e^{-gamma tau}:
// the formula needs |b| >= |a| sin(alpha pi/2) and, when a < 0, |b| > |a|.
struct CurveDomain {
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    bool empty = false;
};

CurveDomain curve_domain(double k, double gamma, double alpha) {
    CurveDomain d;
    if (!(k > 0.0)) {
        d.empty = true;
        return d;
    }
    const double a = k - gamma;
    const double s = std::sin(alpha * std::numbers::pi / 2.0);
    const double floor_mod = a < 0.0 ? -a : std::abs(a) * s;  // required |b| level
    if (floor_mod <= 0.0) return d;                           // a == 0: whole half-line
    // |b(tau)| = k e^{-gamma tau} crosses floor_mod at tau_c.
    if (gamma > 0.0) {
        if (k <= floor_mod) {
            d.empty = true;  // starts below the floor and keeps decreasing
            return d;
        }
        d.hi = -std::log(floor_mod / k) / gamma;
    } else if (gamma < 0.0) {
        if (k < floor_mod) d.lo = std::log(floor_mod / k) / (-gamma);
    } else {
        if (k <= floor_mod) d.empty = true;
    }
    return d;
}

struct FixedPointScan {
    std::vector<double> roots;
    double tau_max_gap = 0.0;  // tau of the max of tau*'(tau) - tau over the scan
    double max_gap = -std::numeric_limits<double>::infinity();
};

// Dense scan of F(tau) = tau*'(tau) - tau over the curve domain plus bisection
// on each sign change. step_hint <= 0 selects the default resolution.
FixedPointScan scan_fixed_points(double k, double gamma, double alpha, double step_hint) {
    FixedPointScan out;
    const CurveDomain dom = curve_domain(k, gamma, alpha);
    if (dom.empty) return out;

    double scale = 1.0;
    try {
        scale = tau_star_pp(k, gamma);
    } catch (const DomainError&) {
        // gamma >= 2k: no crossing delay; fall back to the domain extent
        scale = std::isfinite(dom.hi) ? dom.hi : 1.0;
    }
    const double step = step_hint > 0.0 ? step_hint : std::max(1e-4, scale / 1e4);

    auto F = [&](double tau) -> std::optional<double> {
        auto h = hopf_curve_value(k, gamma, alpha, tau);
        if (!h) return std::nullopt;
        return *h - tau;
    };

    auto bisect = [&](double a, double b, double fa) {
        for (int i = 0; i < 80; ++i) {
            const double mid = 0.5 * (a + b);
            const auto fm = F(mid);
            if (!fm) break;
            if (*fm == 0.0) return mid;
            if ((*fm < 0.0) == (fa < 0.0)) {
                a = mid;
                fa = *fm;
            } else {
                b = mid;
            }
            if (b - a < 1e-13 * std::max(1.0, std::abs(mid))) break;
        }
        return 0.5 * (a + b);
    };

    double window_hi = std::isfinite(dom.hi) ? dom.hi : std::max({2.0 * scale, 2.0 * dom.lo, 1.0});
    const bool unbounded = !std::isfinite(dom.hi);
    double tau = dom.lo;
    double prev_tau = 0.0;
    double prev_f = 0.0;
    bool have_prev = false;
    int doublings = 0;
    for (long iter = 0; iter < 20'000'000; ++iter) {
        if (tau > window_hi) {
            if (!unbounded) break;
            // Keep going while the curve still sits above the diagonal; the
            // fourth-quadrant curve decays to zero, so a crossing must appear.
            if (have_prev && prev_f < 0.0) break;
            if (doublings++ > 24) break;
            window_hi *= 2.0;
        }
        const auto f = F(tau);
        if (f) {
            if (*f == 0.0) {
                out.roots.push_back(tau);
            } else if (have_prev && (prev_f < 0.0) != (*f < 0.0)) {
                out.roots.push_back(bisect(prev_tau, tau, prev_f));
            }
            if (*f > out.max_gap) {
                out.max_gap = *f;
                out.tau_max_gap = tau;
            }
            prev_tau = tau;
            prev_f = *f;
            have_prev = true;
        } else if (have_prev && gamma > 0.0) {
            break;  // left the bounded domain
        }
        tau += step;
    }
    std::sort(out.roots.begin(), out.roots.end());
    return out;
}

std::vector<Verdict> verdicts_for(PatternTag tag) {
    using enum Verdict;
    switch (tag) {
        case PatternTag::StableAll: return {Stable};
        case PatternTag::UnstableAll: return {Unstable};
        case PatternTag::SSR: return {Stable, Unstable};
        case PatternTag::SUS: return {Stable, Unstable, Stable};
        case PatternTag::SUSU: return {Stable, Unstable, Stable, Unstable};
        case PatternTag::USU: return {Unstable, Stable, Unstable};
    }
    return {};
}

SwitchPattern make_pattern(PatternTag tag, std::vector<double> delays) {
    SwitchPattern p;
    p.tag = tag;
    p.critical_delays = std::move(delays);
    p.verdicts = verdicts_for(tag);
    return p;
}

}  // namespace

std::optional<double> hopf_curve(double k, double gamma, double alpha, double tau) {
    if (!(tau >= 0.0)) throw DomainError("hopf_curve: tau must be >= 0");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("hopf_curve: alpha must lie in (0, 1]");
    return hopf_curve_value(k, gamma, alpha, tau);
}

std::vector<double> find_intersections(double k, double gamma, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw DomainError("find_intersections: alpha must lie in (0, 1]");
    return scan_fixed_points(k, gamma, alpha, 0.0).roots;
}

SwitchPattern classify_pattern(double k, double gamma, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw DomainError("classify_pattern: alpha must lie in (0, 1]");
    const double scale = std::max({1.0, std::abs(k), std::abs(gamma)});
    const double line_tol = 1e-9 * scale;
    if (std::abs(gamma) <= line_tol)
        throw DegenerateInput("classify_pattern: gamma = 0 is a degenerate line");
    if (std::abs(k) <= line_tol)
        throw DegenerateInput("classify_pattern: k = 0 is a degenerate line");
    if (std::abs(gamma - k) <= line_tol)
        throw DegenerateInput("classify_pattern: gamma = k is a degenerate line");
    if (std::abs(gamma - 2.0 * k) <= line_tol)
        throw DegenerateInput("classify_pattern: gamma = 2k is a degenerate line");

    // Delay-independent quadrants first.
    if (k < 0.0) {
        return gamma > 0.0 ? make_pattern(PatternTag::StableAll, {})
                           : make_pattern(PatternTag::UnstableAll, {});
    }
    if (gamma > 2.0 * k) return make_pattern(PatternTag::StableAll, {});

    const double tpp = tau_star_pp(k, gamma);
    const std::vector<double> ints = find_intersections(k, gamma, alpha);
    for (double t : ints) {
        if (std::abs(t - tpp) <= 1e-9 * std::max(1.0, tpp))
            throw DegenerateInput(
                "classify_pattern: intersection coincides with tau*'' (h2 locus)");
    }

    if (gamma > 0.0) {
        const double a = k - gamma;
        if (a > 0.0) {
            // 0 < gamma < k: only intersections before tau*'' switch stability.
            std::vector<double> before;
            for (double t : ints)
                if (t < tpp) before.push_back(t);
            if (before.empty()) return make_pattern(PatternTag::SSR, {tpp});
            if (before.size() == 1) return make_pattern(PatternTag::SSR, {before[0]});
            if (before.size() == 2)
                return make_pattern(PatternTag::SUSU, {before[0], before[1], tpp});
            throw DegenerateInput(
                "classify_pattern: more than two intersections before tau*'', outside the case "
                "catalog");
        }
        // k < gamma < 2k: the curve domain ends at tau*''; beyond it the system
        // is delay-independently stable.
        if (ints.empty()) return make_pattern(PatternTag::StableAll, {});
        if (ints.size() == 2) return make_pattern(PatternTag::SUS, {ints[0], ints[1]});
        throw DegenerateInput(
            "classify_pattern: tangent or uncataloged intersection layout for k < gamma < 2k");
    }

    // Fourth quadrant: k > 0, gamma < 0.
    if (ints.empty()) return make_pattern(PatternTag::UnstableAll, {});
    if (ints.size() > 1)
        throw DegenerateInput(
            "classify_pattern: multiple diagonal intersections in the fourth quadrant, outside "
            "the case catalog");
    const double ta = ints.front();
    if (ta > tpp) return make_pattern(PatternTag::USU, {tpp, ta});
    return make_pattern(PatternTag::UnstableAll, {});
}

namespace {

// Central-difference slope of tau*'(tau); nullopt if either sample leaves the domain.
std::optional<double> hopf_curve_slope(double k, double gamma, double alpha, double tau) {
    const double h = 1e-6;
    const auto up = hopf_curve_value(k, gamma, alpha, tau + h);
    const auto dn = hopf_curve_value(k, gamma, alpha, tau > h ? tau - h : 0.0);
    if (!up || !dn) return std::nullopt;
    const double width = tau > h ? 2.0 * h : tau + h;
    return (*up - *dn) / width;
}

struct TangencySystem {
    double k, alpha;
    // F1 = tau*'(tau) - tau, F2 = d tau*'/d tau - 1, unknowns (gamma, tau)
    std::optional<std::pair<double, double>> eval(double gamma, double tau) const {
        if (!(tau >= 0.0)) return std::nullopt;
        const auto v = hopf_curve_value(k, gamma, alpha, tau);
        const auto sl = hopf_curve_slope(k, gamma, alpha, tau);
        if (!v || !sl) return std::nullopt;
        return std::make_pair(*v - tau, *sl - 1.0);
    }
};

std::optional<CurvePoint> solve_tangency(double k, double alpha, double gamma0, double tau0) {
    TangencySystem sys{k, alpha};
    double g = gamma0, t = tau0;
    auto f = sys.eval(g, t);
    if (!f) return std::nullopt;
    double norm = std::max(std::abs(f->first), std::abs(f->second));
    for (int iter = 0; iter < 80; ++iter) {
        if (norm <= 1e-10) break;
        const double hg = 1e-7 * std::max(1.0, std::abs(g));
        const double ht = 1e-7 * std::max(1.0, std::abs(t));
        const auto fg = sys.eval(g + hg, t);
        const auto ft = sys.eval(g, t + ht);
        if (!fg || !ft) return std::nullopt;
        const double j11 = (fg->first - f->first) / hg;
        const double j12 = (ft->first - f->first) / ht;
        const double j21 = (fg->second - f->second) / hg;
        const double j22 = (ft->second - f->second) / ht;
        const double det = j11 * j22 - j12 * j21;
        if (std::abs(det) < 1e-18) return std::nullopt;
        const double dg = (f->first * j22 - f->second * j12) / det;
        const double dt = (f->second * j11 - f->first * j21) / det;
        double s = 1.0;
        bool accepted = false;
        for (int h = 0; h <= 12; ++h) {
            const double gc = g - s * dg;
            const double tc = t - s * dt;
            const auto fc = sys.eval(gc, tc);
            if (fc) {
                const double nc = std::max(std::abs(fc->first), std::abs(fc->second));
                if (nc < norm) {
                    g = gc;
                    t = tc;
                    f = fc;
                    norm = nc;
                    accepted = true;
                    break;
                }
            }
            s *= 0.5;
        }
        if (!accepted) break;
    }
    if (std::abs(f->first) <= 1e-8 && std::abs(f->second) <= 1e-6 && t > 0.0)
        return CurvePoint{k, g, t};
    return std::nullopt;
}

// Number of diagonal crossings at coarse resolution, plus the merged-pair seed.
struct CoarseCount {
    int count = 0;
    double pair_mid = 0.0;
};

CoarseCount coarse_count(double k, double gamma, double alpha) {
    const CurveDomain dom = curve_domain(k, gamma, alpha);
    CoarseCount cc;
    if (dom.empty) return cc;
    double hi = std::isfinite(dom.hi) ? dom.hi : 0.0;
    if (hi <= dom.lo) {
        double scale = 1.0;
        try {
            scale = tau_star_pp(k, gamma);
        } catch (const DomainError&) {
        }
        hi = std::max({4.0 * scale, 2.0 * dom.lo, 1.0});
    }
    const double step = std::max((hi - dom.lo) / 4000.0, 1e-9);
    const auto scan = scan_fixed_points(k, gamma, alpha, step);
    cc.count = static_cast<int>(scan.roots.size());
    if (cc.count >= 2)
        cc.pair_mid = 0.5 * (scan.roots[cc.count - 2] + scan.roots[cc.count - 1]);
    else
        cc.pair_mid = scan.tau_max_gap;
    return cc;
}

template <typename Fn>
void parallel_over_samples(int n, Fn&& fn) {
    const int workers = std::min(worker_thread_count(), std::max(1, n));
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::future<void>> futs;
    futs.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        futs.push_back(std::async(std::launch::async, [&, w] {
            for (int i = w; i < n; i += workers) fn(i);
        }));
    }
    for (auto& f : futs) f.get();
}

}  // namespace

std::vector<CurvePoint> trace_h1(double alpha, Interval k_range, int samples) {
    if (samples < 1) throw DomainError("trace_h1: samples must be >= 1");
    std::vector<std::optional<CurvePoint>> slots(samples);

    parallel_over_samples(samples, [&](int i) {
        const double k = samples == 1
                             ? k_range.lo
                             : k_range.lo + (k_range.hi - k_range.lo) * i / (samples - 1.0);
        if (!(k > 0.0)) return;
        // Bracket a 2 <-> 0 crossing-count flip in gamma, then refine by
        // bisection on the count and hand the near-tangent pair to Newton.
        const int n_gamma = 140;
        int prev_count = -1;
        double prev_gamma = 0.0;
        CoarseCount prev_cc;
        for (int j = 0; j < n_gamma; ++j) {
            const double gamma = (0.02 + 1.96 * j / (n_gamma - 1.0)) * k;
            if (std::abs(gamma - k) < 1e-3 * k) continue;
            const CoarseCount cc = coarse_count(k, gamma, alpha);
            const bool flip = prev_count >= 0 && ((prev_count == 2 && cc.count == 0) ||
                                                  (prev_count == 0 && cc.count == 2));
            if (flip) {
                double g_two = prev_count == 2 ? prev_gamma : gamma;
                double g_zero = prev_count == 2 ? gamma : prev_gamma;
                CoarseCount two_side = prev_count == 2 ? prev_cc : cc;
                for (int b = 0; b < 30; ++b) {
                    const double mid = 0.5 * (g_two + g_zero);
                    const CoarseCount mc = coarse_count(k, mid, alpha);
                    if (mc.count >= 2) {
                        g_two = mid;
                        two_side = mc;
                    } else {
                        g_zero = mid;
                    }
                }
                if (auto pt = solve_tangency(k, alpha, g_two, two_side.pair_mid)) {
                    slots[i] = pt;
                    return;
                }
            }
            prev_count = cc.count;
            prev_gamma = gamma;
            prev_cc = cc;
        }
    });

    std::vector<CurvePoint> out;
    for (const auto& s : slots)
        if (s) out.push_back(*s);
    std::sort(out.begin(), out.end(), [](const CurvePoint& a, const CurvePoint& b) {
        return a.k < b.k;
    });
    return out;
}

std::vector<CurvePoint> trace_h2(double alpha, Interval k_range, int samples, GammaSide side) {
    if (samples < 1) throw DomainError("trace_h2: samples must be >= 1");
    std::vector<std::optional<CurvePoint>> slots(samples);

    parallel_over_samples(samples, [&](int i) {
        const double k = samples == 1
                             ? k_range.lo
                             : k_range.lo + (k_range.hi - k_range.lo) * i / (samples - 1.0);
        if (!(k > 0.0)) return;
        auto g_of = [&](double gamma) -> std::optional<double> {
            double tpp;
            try {
                tpp = tau_star_pp(k, gamma);
            } catch (const DomainError&) {
                return std::nullopt;
            }
            const auto h = hopf_curve_value(k, gamma, alpha, tpp);
            if (!h) return std::nullopt;
            return *h - tpp;
        };

        double lo, hi;
        if (side == GammaSide::FirstQuadrant) {
            lo = 1e-3 * k;
            hi = (1.0 - 1e-3) * k;
        } else {
            lo = -8.0 * std::max(1.0, k);
            hi = -1e-4 * std::max(1.0, k);
        }
        const int n_gamma = 400;
        double prev_gamma = 0.0, prev_g = 0.0;
        bool have_prev = false;
        double root_gamma = std::numeric_limits<double>::quiet_NaN();
        for (int j = 0; j < n_gamma; ++j) {
            const double gamma = lo + (hi - lo) * j / (n_gamma - 1.0);
            const auto g = g_of(gamma);
            if (!g) {
                have_prev = false;
                continue;
            }
            if (have_prev && (prev_g < 0.0) != (*g < 0.0)) {
                double a = prev_gamma, b = gamma, fa = prev_g;
                for (int it = 0; it < 90; ++it) {
                    const double mid = 0.5 * (a + b);
                    const auto fm = g_of(mid);
                    if (!fm) break;
                    if ((*fm < 0.0) == (fa < 0.0)) {
                        a = mid;
                        fa = *fm;
                    } else {
                        b = mid;
                    }
                }
                root_gamma = 0.5 * (a + b);
                break;
            }
            prev_gamma = gamma;
            prev_g = *g;
            have_prev = true;
        }
        if (std::isnan(root_gamma)) return;
        const auto res = g_of(root_gamma);
        if (!res || std::abs(*res) > 1e-8) return;
        slots[i] = CurvePoint{k, root_gamma, tau_star_pp(k, root_gamma)};
    });

    std::vector<CurvePoint> out;
    for (const auto& s : slots)
        if (s) out.push_back(*s);
    std::sort(out.begin(), out.end(), [](const CurvePoint& a, const CurvePoint& b) {
        return a.k < b.k;
    });
    return out;
}

}  // namespace fdde
