#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fdde/char_eq.hpp"
#include "fdde/sim.hpp"
#include "fdde/two_delay.hpp"

using namespace fdde;

TEST_CASE("delta_zero closed form and reference values") {
    CHECK(delta_zero(1.7, -0.4, 0.0) == doctest::Approx(-0.4).epsilon(1e-14));
    CHECK(std::abs(delta_zero(1.02, 0.3, 1.16102)) < 1e-4);  // (1.02, 0.3) reference value
    CHECK(delta_zero(1.4, 0.8, 1.2) < 0.0);                  // unstable reference case (1.4, 0.8)
}

TEST_CASE("instability_threshold matches the delay-independent instability thresholds") {
    CHECK(std::abs(instability_threshold(1.4, 0.8) - 1.0591) < 1e-3);   // unstable reference case (1.4, 0.8)
    CHECK(std::abs(instability_threshold(3.4, -1.6) - 0.2410) < 1e-3);  // unstable reference case (3.4, -1.6)
    // Coincides with the lambda = 0 branch value
    CHECK(std::abs(instability_threshold(1.02, 0.3) - 1.16102) < 1e-4);
    CHECK_THROWS_AS(instability_threshold(1.0, 1.5), DomainError);
    CHECK_THROWS_AS(instability_threshold(-1.0, -0.5), DomainError);
}

TEST_CASE("threshold consistency: delta_zero vanishes at the threshold") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> kd(0.2, 6.0);
    std::uniform_real_distribution<double> frac(0.05, 0.95);
    std::uniform_real_distribution<double> neg(-3.0, -0.05);
    for (int i = 0; i < 300; ++i) {
        const double k = kd(rng);
        for (double gamma : {k * frac(rng), neg(rng)}) {
            const double t = instability_threshold(k, gamma);
            CHECK(std::abs(delta_zero(k, gamma, t)) <= 1e-12 * std::max(1.0, k));
        }
    }
}

TEST_CASE("is_unstable_all_tau1 on the reference cases") {
    CHECK(is_unstable_all_tau1(1.4, 0.8, 1.2));     // unstable reference case (1.4, 0.8)
    CHECK(is_unstable_all_tau1(3.4, -1.6, 0.15));   // unstable reference case (3.4, -1.6)
    CHECK(!is_unstable_all_tau1(1.02, 0.3, 1.04));  // stable slice of the (1.02, 0.3) configuration
}

TEST_CASE("delta-zero certificate soundness: a real positive root exists") {
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> tau1d(0.0, 20.0);
    for (auto [k, gamma, tau2] : {std::tuple{1.4, 0.8, 1.2}, {3.4, -1.6, 0.15}}) {
        REQUIRE(is_unstable_all_tau1(k, gamma, tau2));
        for (double alpha : {0.3, 0.6, 1.0}) {
            for (int i = 0; i < 10; ++i) {
                SystemParams p{alpha, k, gamma, tau1d(rng), tau2};
                const double radius =
                    std::pow(std::abs(gamma) + std::abs(k) * (1.0 + std::exp(-gamma * tau2)) + 1.0,
                             1.0 / alpha);
                const auto root = find_real_positive_root(p, radius);
                REQUIRE(root.has_value());
                CHECK(*root > 0.0);
                CHECK(std::abs(char_value_real(*root, p)) <= 1e-10);
            }
        }
    }
}

TEST_CASE("imaginary_axis_residuals: k = 0 closed form") {
    const double v = 1.7, alpha = 0.6, gamma = 0.9;
    const auto [re, im] = imaginary_axis_residuals(v, alpha, 0.0, gamma, 1.0, 2.0);
    const double half = std::numbers::pi / 2;
    CHECK(re == doctest::Approx(std::pow(v, alpha) * std::cos(alpha * half) + gamma)
                    .epsilon(1e-14));
    CHECK(im == doctest::Approx(std::pow(v, alpha) * std::sin(alpha * half)).epsilon(1e-14));
}

TEST_CASE("imaginary_axis_residuals equals char_value on the axis") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> kd(-3.0, 3.0);
    std::uniform_real_distribution<double> gd(-1.5, 2.0);
    std::uniform_real_distribution<double> td(0.0, 2.0);
    std::uniform_real_distribution<double> al(0.05, 1.0);
    std::uniform_real_distribution<double> vd(0.01, 2.0 * std::numbers::pi);
    for (int i = 0; i < 1000; ++i) {
        const double v = vd(rng), alpha = al(rng), k = kd(rng), gamma = gd(rng);
        const double tau1 = td(rng), tau2 = td(rng);
        const auto [re, im] = imaginary_axis_residuals(v, alpha, k, gamma, tau1, tau2);
        const Complex d = char_value(Complex(0.0, v), SystemParams{alpha, k, gamma, tau1, tau2});
        const double scale = std::max(1.0, std::abs(d));
        CHECK(std::abs(re - d.real()) <= 1e-14 * scale);
        CHECK(std::abs(im - d.imag()) <= 1e-14 * scale);
    }
}

TEST_CASE("solve_boundary_point lands on the (1.02, 0.3) boundary near tau2 = 1.1") {
    const auto pt = solve_boundary_point(2.10566, 0.4, 1.02, 0.3, {2.9, 1.1});
    REQUIRE(pt.has_value());
    CHECK(pt->tau2 == doctest::Approx(1.1).epsilon(0.05));
    const auto [re, im] =
        imaginary_axis_residuals(pt->v, 0.4, 1.02, 0.3, pt->tau1, pt->tau2);
    CHECK(std::hypot(re, im) <= 1e-8);
}

TEST_CASE("wrap invariance of boundary points") {
    const auto pt = solve_boundary_point(2.10566, 0.4, 1.02, 0.3, {2.9, 1.1});
    REQUIRE(pt.has_value());
    const SystemParams base{0.4, 1.02, 0.3, pt->tau1, pt->tau2};
    const double r0 = std::abs(char_value(Complex(0.0, pt->v), base));
    const double period = 2.0 * std::numbers::pi / pt->v;
    const SystemParams wrapped{0.4, 1.02, 0.3, pt->tau1 + period, pt->tau2};
    const double r1 = std::abs(char_value(Complex(0.0, pt->v), wrapped));
    CHECK(std::abs(r0 - r1) <= 1e-12);
}

TEST_CASE("zero_root_branch values and the irrelevance rule") {
    const auto b = zero_root_branch(1.02, 0.3);
    REQUIRE(b.has_value());
    CHECK(std::abs(*b - 1.16102) < 1e-4);  // (1.02, 0.3) reference value
    // (-1.02, 0.3): raw value -0.85943 < 0, branch irrelevant
    CHECK(std::abs(zero_root_delay_raw(-1.02, 0.3) - (-0.85943)) < 1e-4);
    CHECK(!zero_root_branch(-1.02, 0.3).has_value());
    // gamma -> 0 limit
    CHECK(zero_root_delay_raw(2.0, 0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS_AS(zero_root_delay_raw(1.0, 2.0), DomainError);  // (k-gamma)/k < 0
    CHECK_THROWS_AS(zero_root_delay_raw(0.0, 1.0), DomainError);
}

TEST_CASE("trace_boundary at (1.02, 0.3): curve shape and the deep minimum") {
    const auto grid = default_v_grid(2.0 * std::numbers::pi, 2000);
    const auto trace = trace_boundary(0.4, 1.02, 0.3, grid, 3);
    REQUIRE(!trace.points.empty());
    // The shallow local feature at tau2 = 1.0674 lies on the curve near
    // v = 2.14, but the crossing set continues below it and bottoms out near
    // tau2 = 1.0133 at v = 2.59 before folding; the root at
    // 0.0018940 + 2.4954219i for tau1 = 2.4, tau2 = 1.04 certifies the dip.
    double near_a = 1e300;
    double tau2_min = 1e300;
    for (const auto& p : trace.points) {
        tau2_min = std::min(tau2_min, p.tau2);
        if (p.v > 2.1 && p.v < 2.2) near_a = std::min(near_a, std::abs(p.tau2 - 1.0674));
    }
    CHECK(near_a < 5e-3);
    CHECK(std::abs(tau2_min - 1.0133) < 5e-3);
    {
        const SystemParams dip{0.4, 1.02, 0.3, 2.4, 1.04};
        const RootReport rep = newton_root(dip, Complex(0.002, 2.5));
        REQUIRE(rep.converged);
        CHECK(std::abs(rep.root - Complex(0.0018940, 2.4954219)) < 1e-4);
    }
    // every emitted point satisfies the characteristic residual bound
    for (const auto& p : trace.points) {
        const SystemParams sp{0.4, 1.02, 0.3, p.tau1, p.tau2};
        CHECK(std::abs(char_value(Complex(0.0, p.v), sp)) <= 1e-8);
        CHECK(p.tau1 >= 0.0);
        CHECK(p.tau2 >= 0.0);
    }
    // sorted by v
    CHECK(std::is_sorted(trace.points.begin(), trace.points.end(),
                         [](const BoundaryPoint& a, const BoundaryPoint& b) { return a.v < b.v; }));
}

TEST_CASE("trace_boundary with an empty grid is empty") {
    const auto trace = trace_boundary(0.4, 1.02, 0.3, {}, 3);
    CHECK(trace.points.empty());
    CHECK(trace.failed_v.empty());
}

TEST_CASE("the (-1.02, 0.3) boundary has interior minimum and maximum in tau2") {
    const auto grid = default_v_grid(2.0 * std::numbers::pi, 2000);
    const auto trace = trace_boundary(0.4, -1.02, 0.3, grid, 0);
    REQUIRE(trace.points.size() > 50);
    // look for slope sign changes along the longest polyline chain
    const auto chains = boundary_chains(trace.points);
    std::size_t longest = 0;
    for (std::size_t c = 0; c < chains.size(); ++c)
        if (chains[c].size() > chains[longest].size()) longest = c;
    const auto& chain = chains[longest];
    REQUIRE(chain.size() > 20);
    int min_turns = 0, max_turns = 0;
    const std::size_t stride = 10;  // smooth out solver-level jitter
    for (std::size_t i = stride; i + stride < chain.size(); i += stride) {
        const double d_prev = chain[i].tau2 - chain[i - stride].tau2;
        const double d_next = chain[i + stride].tau2 - chain[i].tau2;
        if (d_prev < 0.0 && d_next > 0.0) ++min_turns;
        if (d_prev > 0.0 && d_next < 0.0) ++max_turns;
    }
    CHECK(min_turns >= 1);
    CHECK(max_turns >= 1);
}

TEST_CASE("classify_tau2_slice reproduces the (1.02, 0.3) slice regimes") {
    const auto grid = default_v_grid(2.0 * std::numbers::pi, 2000);
    const auto trace = trace_boundary(0.4, 1.02, 0.3, grid, 3);
    {
        // The crossing-set dip below tau2 = 1.0674 puts a thin unstable
        // window (certified by the root oracle) inside this slice; outside
        // the window the slice is stable.
        const auto report = classify_tau2_slice(0.4, 1.02, 0.3, 1.04, 4.0, trace.points);
        REQUIRE(!report.intervals.empty());
        CHECK(report.intervals.front().verdict == Verdict::Stable);
        CHECK(report.intervals.back().verdict == Verdict::Stable);
        bool has_unstable_window = false;
        for (const auto& iv : report.intervals)
            if (iv.verdict == Verdict::Unstable && iv.tau1_lo > 2.0 && iv.tau1_hi < 2.9)
                has_unstable_window = true;
        CHECK(has_unstable_window);
    }
    {
        const auto report = classify_tau2_slice(0.4, 1.02, 0.3, 1.00, 4.0, trace.points);
        for (const auto& iv : report.intervals) CHECK(iv.verdict == Verdict::Stable);
    }
    {
        const auto report = classify_tau2_slice(0.4, 1.02, 0.3, 1.1, 4.0, trace.points);
        REQUIRE(report.intervals.size() == 3);
        CHECK(report.intervals[0].verdict == Verdict::Stable);
        CHECK(report.intervals[1].verdict == Verdict::Unstable);
        CHECK(report.intervals[2].verdict == Verdict::Stable);
        CHECK(std::abs(report.intervals[0].tau1_hi - 2.11) < 0.05);
        CHECK(std::abs(report.intervals[1].tau1_hi - 3.03) < 0.05);
        // partition structure
        CHECK(report.intervals[0].tau1_lo == 0.0);
        CHECK(report.intervals[1].tau1_lo == report.intervals[0].tau1_hi);
        CHECK(report.intervals[2].tau1_hi == 4.0);
    }
    {
        const auto report = classify_tau2_slice(0.4, 1.02, 0.3, 1.21, 4.0, trace.points);
        for (const auto& iv : report.intervals) CHECK(iv.verdict == Verdict::Unstable);
    }
}

TEST_CASE("slice verdicts agree with the simulation oracle away from the boundary") {
    const auto grid = default_v_grid(2.0 * std::numbers::pi, 1200);
    const auto trace = trace_boundary(0.4, 1.02, 0.3, grid, 3);
    struct Sample {
        double tau2;
        std::size_t interval;
    };
    // sampled interval midpoints with a clear margin from the crossing set
    for (const Sample s : {Sample{1.1, 0}, {1.21, 0}}) {
        const auto report = classify_tau2_slice(0.4, 1.02, 0.3, s.tau2, 4.0, trace.points);
        REQUIRE(s.interval < report.intervals.size());
        const auto& iv = report.intervals[s.interval];
        const double mid = 0.5 * (iv.tau1_lo + iv.tau1_hi);
        const SystemParams p{0.4, 1.02, 0.3, mid, s.tau2};
        const auto traj =
            simulate_extending(p, Nonlinearity::linear(1.02), default_sim_config(p));
        REQUIRE(traj.verdict != Verdict::Inconclusive);
        CHECK(traj.verdict == iv.verdict);
    }
}
