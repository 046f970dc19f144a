#include "fdde/two_delay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fdde/char_eq.hpp"

namespace fdde {

double delta_zero(double k, double gamma, double tau2) {
    if (!(tau2 >= 0.0)) throw DomainError("delta_zero: tau2 must be >= 0");
    return gamma - k + k * std::exp(-gamma * tau2);
}

double instability_threshold(double k, double gamma) {
    const bool case_i = (0.0 < gamma && gamma < k);
    const bool case_ii = (gamma < 0.0 && 0.0 < k);
    if (!case_i && !case_ii)
        throw DomainError("instability_threshold: requires 0 < gamma < k or gamma < 0 < k");
    return -std::log((k - gamma) / k) / gamma;
}

bool is_unstable_all_tau1(double k, double gamma, double tau2) {
    return delta_zero(k, gamma, tau2) < 0.0;
}

std::pair<double, double> imaginary_axis_residuals(double v, double alpha, double k, double gamma,
                                                   double tau1, double tau2) {
    if (!(v > 0.0)) throw DomainError("imaginary_axis_residuals: v must be > 0");
    const double half = std::numbers::pi / 2.0;
    const double va = std::pow(v, alpha);
    const double decay = std::exp(-gamma * tau2);
    const double th1 = v * tau1;
    const double th2 = v * (tau1 + tau2);
    const double re = va * std::cos(alpha * half) + gamma - k * std::cos(th1) +
                      (k * decay) * std::cos(th2);
    const double im = va * std::sin(alpha * half) + k * std::sin(th1) -
                      (k * decay) * std::sin(th2);
    return {re, im};
}

namespace {

struct RawSolution {
    double tau1 = 0.0;  // possibly negative before wrapping
    double tau2 = 0.0;
    int iterations = 0;
};

// Damped 2D Newton on the crossing system at fixed v; analytic Jacobian.
std::optional<RawSolution> solve_raw(double v, double alpha, double k, double gamma,
                                     double tau1, double tau2) {
    const double half = std::numbers::pi / 2.0;
    const double va_cos = std::pow(v, alpha) * std::cos(alpha * half);
    const double va_sin = std::pow(v, alpha) * std::sin(alpha * half);

    auto residual = [&](double t1, double t2, double& f1, double& f2) {
        const double decay = std::exp(-gamma * t2);
        const double th1 = v * t1;
        const double th2 = v * (t1 + t2);
        f1 = va_cos + gamma - k * std::cos(th1) + k * decay * std::cos(th2);
        f2 = va_sin + k * std::sin(th1) - k * decay * std::sin(th2);
    };

    double f1, f2;
    residual(tau1, tau2, f1, f2);
    double norm = std::hypot(f1, f2);
    constexpr double tol = 1e-10;
    for (int iter = 1; iter <= 100; ++iter) {
        if (norm <= tol) return RawSolution{tau1, tau2, iter - 1};
        const double decay = std::exp(-gamma * tau2);
        const double th1 = v * tau1;
        const double th2 = v * (tau1 + tau2);
        const double j11 = k * v * std::sin(th1) - k * decay * v * std::sin(th2);
        const double j12 = -gamma * k * decay * std::cos(th2) - k * decay * v * std::sin(th2);
        const double j21 = k * v * std::cos(th1) - k * decay * v * std::cos(th2);
        const double j22 = gamma * k * decay * std::sin(th2) - k * decay * v * std::cos(th2);
        const double det = j11 * j22 - j12 * j21;
        if (std::abs(det) < 1e-16) return std::nullopt;
        const double d1 = (f1 * j22 - f2 * j12) / det;
        const double d2 = (f2 * j11 - f1 * j21) / det;
        double s = 1.0;
        bool accepted = false;
        for (int h = 0; h <= 20; ++h) {
            const double c1 = tau1 - s * d1;
            const double c2 = tau2 - s * d2;
            double g1, g2;
            residual(c1, c2, g1, g2);
            const double cand_norm = std::hypot(g1, g2);
            if (cand_norm < norm) {
                tau1 = c1;
                tau2 = c2;
                f1 = g1;
                f2 = g2;
                norm = cand_norm;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted) return std::nullopt;
    }
    if (norm <= tol) return RawSolution{tau1, tau2, 100};
    return std::nullopt;
}

std::optional<BoundaryPoint> wrap_and_verify(double v, double alpha, double k, double gamma,
                                             const RawSolution& raw, int extra_wraps = 0) {
    if (raw.tau2 < 0.0) return std::nullopt;
    const double period = 2.0 * std::numbers::pi / v;
    BoundaryPoint pt;
    pt.v = v;
    pt.tau1 = raw.tau1;
    pt.tau2 = raw.tau2;
    pt.branch = 0;
    while (pt.tau1 < 0.0) {
        pt.tau1 += period;
        ++pt.branch;
    }
    pt.tau1 += extra_wraps * period;
    pt.branch += extra_wraps;
    // Never trust the solver: re-check the characteristic residual directly.
    const SystemParams p{alpha, k, gamma, pt.tau1, pt.tau2};
    if (std::abs(char_value(Complex(0.0, v), p)) > 1e-8) return std::nullopt;
    return pt;
}

// Fundamental representative with tau1 reduced into [0, 2 pi / v).
RawSolution canonical(double v, const RawSolution& raw) {
    const double period = 2.0 * std::numbers::pi / v;
    RawSolution c = raw;
    c.tau1 = std::fmod(c.tau1, period);
    if (c.tau1 < 0.0) c.tau1 += period;
    return c;
}

// Residual-norm coarse scan over one tau1 period and a tau2 window; returns the
// most promising seeds in increasing residual order.
std::vector<std::pair<double, double>> coarse_seeds(double v, double alpha, double k, double gamma,
                                                    double tau2_cap) {
    const double period = 2.0 * std::numbers::pi / v;
    struct Node {
        double res;
        double t1, t2;
    };
    std::vector<Node> nodes;
    const int n1 = 48, n2 = 48;
    for (int i = 0; i < n1; ++i) {
        const double t1 = period * i / n1;
        for (int j = 0; j < n2; ++j) {
            const double t2 = tau2_cap * j / (n2 - 1.0);
            auto [f1, f2] = imaginary_axis_residuals(v, alpha, k, gamma, t1, t2);
            nodes.push_back({std::hypot(f1, f2), t1, t2});
        }
    }
    std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) {
        return a.res < b.res;
    });
    std::vector<std::pair<double, double>> seeds;
    for (int i = 0; i < 8 && i < static_cast<int>(nodes.size()); ++i)
        seeds.emplace_back(nodes[i].t1, nodes[i].t2);
    return seeds;
}

}  // namespace

std::optional<BoundaryPoint> solve_boundary_point(double v, double alpha, double k, double gamma,
                                                  std::pair<double, double> seed) {
    if (!(v > 0.0)) throw DomainError("solve_boundary_point: v must be > 0");
    const auto raw = solve_raw(v, alpha, k, gamma, seed.first, seed.second);
    if (!raw) return std::nullopt;
    return wrap_and_verify(v, alpha, k, gamma, *raw);
}

std::vector<double> default_v_grid(double v_max, int samples) {
    if (!(v_max > 0.0) || samples < 1) throw DomainError("default_v_grid: bad arguments");
    std::vector<double> grid(samples);
    for (int i = 0; i < samples; ++i) grid[i] = v_max * (i + 1.0) / (samples + 1.0);
    return grid;
}

BoundaryTrace trace_boundary(double alpha, double k, double gamma,
                             const std::vector<double>& v_grid, int max_branch) {
    if (max_branch < 0) throw DomainError("trace_boundary: max_branch must be >= 0");
    BoundaryTrace out;
    if (v_grid.empty()) return out;

    std::vector<double> grid = v_grid;
    std::sort(grid.begin(), grid.end());

    double tau2_cap = 5.0;
    try {
        tau2_cap = std::max(5.0, 3.0 * std::abs(zero_root_delay_raw(k, gamma)));
    } catch (const DomainError&) {
    }

    bool have_seed = false;
    double seed1 = 0.0, seed2 = 0.0;
    for (double v : grid) {
        // Continuation solution plus a coarse sweep: at a given v the crossing
        // system has several fundamental solutions (the two arms around a
        // fold); capture each distinct one.
        std::vector<RawSolution> found;
        auto offer = [&](const std::optional<RawSolution>& cand) {
            if (!cand || cand->tau2 < 0.0) return;
            const RawSolution c = canonical(v, *cand);
            // Distinct solution families at one v sit O(0.1) apart; anything
            // closer is Newton scatter on the same solution.
            for (const RawSolution& f : found) {
                if (std::abs(f.tau1 - c.tau1) < 1e-2 && std::abs(f.tau2 - c.tau2) < 1e-2) return;
            }
            found.push_back(c);
        };
        std::optional<RawSolution> cont;
        if (have_seed) {
            cont = solve_raw(v, alpha, k, gamma, seed1, seed2);
            offer(cont);
        }
        for (auto [t1, t2] : coarse_seeds(v, alpha, k, gamma, tau2_cap))
            offer(solve_raw(v, alpha, k, gamma, t1, t2));

        if (found.empty()) {
            out.failed_v.push_back(v);
            continue;
        }
        if (cont && cont->tau2 >= 0.0) {
            have_seed = true;
            seed1 = cont->tau1;
            seed2 = cont->tau2;
        } else {
            have_seed = true;
            seed1 = found.front().tau1;
            seed2 = found.front().tau2;
        }
        for (const RawSolution& sol : found) {
            for (int m = 0; m <= max_branch; ++m) {
                if (auto pt = wrap_and_verify(v, alpha, k, gamma, sol, m))
                    out.points.push_back(*pt);
            }
        }
    }

    std::sort(out.points.begin(), out.points.end(), [](const BoundaryPoint& a,
                                                       const BoundaryPoint& b) {
        if (a.v != b.v) return a.v < b.v;
        if (a.branch != b.branch) return a.branch < b.branch;
        return a.tau1 < b.tau1;
    });
    std::vector<BoundaryPoint> unique;
    for (const BoundaryPoint& p : out.points) {
        bool dup = false;
        for (auto it = unique.rbegin(); it != unique.rend() && std::abs(it->v - p.v) < 1e-6;
             ++it) {
            if (std::abs(it->tau1 - p.tau1) < 1e-6 && std::abs(it->tau2 - p.tau2) < 1e-6) {
                dup = true;
                break;
            }
        }
        if (!dup) unique.push_back(p);
    }
    out.points = std::move(unique);
    return out;
}

double zero_root_delay_raw(double k, double gamma) {
    if (k == 0.0) throw DomainError("zero_root_delay_raw: k must be nonzero");
    const double arg = (k - gamma) / k;
    if (!(arg > 0.0))
        throw DomainError("zero_root_delay_raw: (k - gamma)/k <= 0, no real lambda = 0 crossing");
    if (gamma == 0.0) return 1.0 / k;  // removable singularity
    return -std::log(arg) / gamma;
}

std::optional<double> zero_root_branch(double k, double gamma) {
    const double raw = zero_root_delay_raw(k, gamma);
    if (raw > 0.0) return raw;
    return std::nullopt;
}

std::vector<std::vector<BoundaryPoint>> boundary_chains(const std::vector<BoundaryPoint>& points,
                                                        double join_tol) {
    std::vector<BoundaryPoint> pts = points;
    std::sort(pts.begin(), pts.end(), [](const BoundaryPoint& a, const BoundaryPoint& b) {
        if (a.v != b.v) return a.v < b.v;
        if (a.branch != b.branch) return a.branch < b.branch;
        return a.tau1 < b.tau1;
    });
    std::vector<std::vector<BoundaryPoint>> chains;
    for (const BoundaryPoint& p : pts) {
        std::size_t best = chains.size();
        double best_d = join_tol;
        for (std::size_t c = 0; c < chains.size(); ++c) {
            const BoundaryPoint& last = chains[c].back();
            if (last.branch != p.branch) continue;
            if (last.v >= p.v) continue;  // one point per v per chain
            const double d = std::hypot(last.tau1 - p.tau1, last.tau2 - p.tau2);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        if (best == chains.size())
            chains.push_back({p});
        else
            chains[best].push_back(p);
    }
    return chains;
}

Tau2SliceReport classify_tau2_slice(double alpha, double k, double gamma, double tau2,
                                    double tau1_max, const std::vector<BoundaryPoint>& boundary) {
    if (!(tau1_max > 0.0)) throw DomainError("classify_tau2_slice: tau1_max must be > 0");
    if (!(tau2 >= 0.0)) throw DomainError("classify_tau2_slice: tau2 must be >= 0");

    // Cut the horizontal line tau2 = const with each polyline chain.
    std::vector<double> cuts;
    std::vector<double> cut_freqs;
    for (const auto& chain : boundary_chains(boundary)) {
        for (std::size_t i = 1; i < chain.size(); ++i) {
            const BoundaryPoint& a = chain[i - 1];
            const BoundaryPoint& b = chain[i];
            const double lo = std::min(a.tau2, b.tau2);
            const double hi = std::max(a.tau2, b.tau2);
            if (tau2 < lo || tau2 > hi || lo == hi) continue;
            const double t = (tau2 - a.tau2) / (b.tau2 - a.tau2);
            const double cut = a.tau1 + t * (b.tau1 - a.tau1);
            if (cut >= 0.0 && cut <= tau1_max) {
                cuts.push_back(cut);
                cut_freqs.push_back(a.v + t * (b.v - a.v));
            }
        }
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> dedup;
    for (double c : cuts) {
        if (dedup.empty() || c - dedup.back() > 1e-2) dedup.push_back(c);
    }

    std::vector<double> edges{0.0};
    edges.insert(edges.end(), dedup.begin(), dedup.end());
    edges.push_back(tau1_max);

    std::vector<double> seed_freqs = cut_freqs;
    for (const BoundaryPoint& p : boundary)
        if (std::abs(p.tau2 - tau2) < 0.25) seed_freqs.push_back(p.v);
    std::sort(seed_freqs.begin(), seed_freqs.end());
    seed_freqs.erase(std::unique(seed_freqs.begin(), seed_freqs.end()), seed_freqs.end());
    if (seed_freqs.size() > 32) {
        std::vector<double> thin;
        for (std::size_t i = 0; i < seed_freqs.size(); i += seed_freqs.size() / 32 + 1)
            thin.push_back(seed_freqs[i]);
        seed_freqs = std::move(thin);
    }

    Tau2SliceReport report;
    report.tau2 = tau2;
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (edges[i] <= edges[i - 1]) continue;
        const double mid = 0.5 * (edges[i - 1] + edges[i]);
        const SystemParams p{alpha, k, gamma, mid, tau2};
        const auto root = find_unstable_root(p, 1e-5, seed_freqs);
        Verdict verdict = Verdict::Stable;
        if (root) {
            if (std::abs(root->real()) < 1e-5)
                throw InconclusiveVerdict(
                    "classify_tau2_slice: root within 1e-5 of the imaginary axis at tau1 = " +
                    std::to_string(mid));
            verdict = root->real() > 0.0 ? Verdict::Unstable : Verdict::Stable;
        }
        report.intervals.push_back({edges[i - 1], edges[i], verdict});
    }
    return report;
}

}  // namespace fdde
