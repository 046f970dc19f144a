#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fdde/case_tau1_zero.hpp"
#include "fdde/char_eq.hpp"
#include "fdde/single_delay.hpp"

using namespace fdde;

TEST_CASE("b_of_tau basics") {
    CHECK(b_of_tau(2.0, 0.6, 0.0) == -2.0);
    // SUSU reference case: b(tau*'') = -a with a = k - gamma = 0.93
    CHECK(std::abs(b_of_tau(4.62, 3.69, 0.4344) - (-0.93)) < 1e-3);
}

TEST_CASE("b_of_tau slope equals k gamma e^{-gamma tau}") {
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> kd(0.1, 5.0);
    std::uniform_real_distribution<double> gd(-2.0, 2.0);
    std::uniform_real_distribution<double> td(0.0, 3.0);
    for (int i = 0; i < 300; ++i) {
        const double k = kd(rng), gamma = gd(rng), tau = td(rng);
        const double h = 1e-6;
        const double fd = (b_of_tau(k, gamma, tau + h) - b_of_tau(k, gamma, tau)) / h;
        const double analytic = k * gamma * std::exp(-gamma * tau);
        CHECK(std::abs(fd - analytic) <= 1e-4 * std::max(1.0, std::abs(analytic)));
        if (gamma > 0.0) CHECK(analytic > 0.0);
        if (gamma < 0.0) CHECK(analytic < 0.0);
    }
}

TEST_CASE("tau_star_pp reproduces the reference crossing delays") {
    CHECK(std::abs(tau_star_pp(4.62, 3.69) - 0.4344) < 1e-3);   // (4.62, 3.69)
    CHECK(std::abs(tau_star_pp(0.23, -0.12) - 3.4987) < 1e-3);  // (0.23, -0.12)
    CHECK(tau_star_pp(2.0, 0.6) ==
          doctest::Approx(-std::log(0.7) / 0.6).epsilon(1e-12));
    CHECK(tau_star_pp(2.0, 0.0) == doctest::Approx(0.5).epsilon(1e-12));  // gamma -> 0 limit
}

TEST_CASE("tau_star_pp satisfies its defining crossing condition") {
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> kd(0.2, 8.0);
    std::uniform_real_distribution<double> frac(0.05, 0.95);
    for (int i = 0; i < 200; ++i) {
        const double k = kd(rng);
        {
            const double gamma = k * frac(rng);  // 0 < gamma < k: b crosses -a
            const double t = tau_star_pp(k, gamma);
            CHECK(std::abs(b_of_tau(k, gamma, t) + (k - gamma)) <= 1e-12 * std::max(1.0, k));
        }
        {
            const double gamma = k * (1.0 + frac(rng));  // k < gamma < 2k: b crosses a
            const double t = tau_star_pp(k, gamma);
            CHECK(std::abs(b_of_tau(k, gamma, t) - (k - gamma)) <= 1e-12 * std::max(1.0, k));
        }
        {
            const double gamma = -frac(rng);  // fourth quadrant: b crosses -a downward
            const double t = tau_star_pp(k, gamma);
            CHECK(std::abs(b_of_tau(k, gamma, t) + (k - gamma)) <= 1e-12 * std::max(1.0, k));
        }
    }
}

TEST_CASE("tau_star_pp domain errors") {
    CHECK_THROWS_AS(tau_star_pp(2.0, 2.0), DomainError);   // gamma = k
    CHECK_THROWS_AS(tau_star_pp(-1.0, 0.5), DomainError);  // k <= 0
    CHECK_THROWS_AS(tau_star_pp(1.0, 3.0), DomainError);   // gamma > 2k: no crossing
}

TEST_CASE("hopf_curve domain behavior") {
    CHECK(hopf_curve(2.0, 0.6, 0.4, 0.0).has_value());
    // region III: the curve ends at tau*'' and never returns
    const double tpp = tau_star_pp(1.0, 1.35);
    CHECK(!hopf_curve(1.0, 1.35, 0.4, tpp + 1.0).has_value());
    CHECK(!hopf_curve(1.0, 1.35, 0.4, 100.0).has_value());
}

TEST_CASE("find_intersections reproduces the four reference cases") {
    {
        const auto v = find_intersections(2.0, 0.6, 0.4);  // (2, 0.6)
        REQUIRE(v.size() == 1);
        CHECK(std::abs(v[0] - 0.1630) < 5e-3);
    }
    {
        const auto v = find_intersections(4.62, 3.69, 0.4);  // (4.62, 3.69)
        REQUIRE(v.size() == 2);
        CHECK(std::abs(v[0] - 0.0560) < 5e-3);
        CHECK(std::abs(v[1] - 0.2925) < 5e-3);
    }
    {
        const auto v = find_intersections(9.8, 10.56, 0.4);  // (9.8, 10.56)
        REQUIRE(v.size() == 2);
        CHECK(std::abs(v[0] - 0.0157) < 5e-3);
        CHECK(std::abs(v[1] - 0.0619) < 5e-3);
    }
    {
        const auto v = find_intersections(0.23, -0.12, 0.4);  // (0.23, -0.12)
        REQUIRE(v.size() == 1);
        CHECK(std::abs(v[0] - 5.4386) < 5e-3);
    }
}

TEST_CASE("every intersection is a genuine fixed point of the Hopf curve") {
    for (auto [k, gamma] : {std::pair{2.0, 0.6}, {4.62, 3.69}, {9.8, 10.56}, {0.23, -0.12}}) {
        for (double t : find_intersections(k, gamma, 0.4)) {
            const auto h = hopf_curve(k, gamma, 0.4, t);
            REQUIRE(h.has_value());
            CHECK(std::abs(*h - t) <= 1e-7 * std::max(1.0, t));
        }
    }
}

TEST_CASE("classify_pattern reproduces the four reference cases") {
    {
        const auto p = classify_pattern(2.0, 0.6, 0.4);  // region IV
        CHECK(p.tag == PatternTag::SSR);
        REQUIRE(p.critical_delays.size() == 1);
        CHECK(std::abs(p.critical_delays[0] - 0.1630) < 5e-3);
        REQUIRE(p.verdicts.size() == 2);
        CHECK(p.verdicts[0] == Verdict::Stable);
        CHECK(p.verdicts[1] == Verdict::Unstable);
    }
    {
        const auto p = classify_pattern(4.62, 3.69, 0.4);  // region V
        CHECK(p.tag == PatternTag::SUSU);
        REQUIRE(p.critical_delays.size() == 3);
        CHECK(std::abs(p.critical_delays[0] - 0.0560) < 5e-3);
        CHECK(std::abs(p.critical_delays[1] - 0.2925) < 5e-3);
        CHECK(std::abs(p.critical_delays[2] - 0.4344) < 1e-3);
    }
    {
        const auto p = classify_pattern(9.8, 10.56, 0.4);  // region VI
        CHECK(p.tag == PatternTag::SUS);
        REQUIRE(p.critical_delays.size() == 2);
        CHECK(std::abs(p.critical_delays[0] - 0.0157) < 5e-3);
        CHECK(std::abs(p.critical_delays[1] - 0.0619) < 5e-3);
    }
    {
        const auto p = classify_pattern(0.23, -0.12, 0.4);  // fourth quadrant
        CHECK(p.tag == PatternTag::USU);
        REQUIRE(p.critical_delays.size() == 2);
        CHECK(std::abs(p.critical_delays[0] - 3.4987) < 1e-3);
        CHECK(std::abs(p.critical_delays[1] - 5.4386) < 5e-3);
        REQUIRE(p.verdicts.size() == 3);
        CHECK(p.verdicts[0] == Verdict::Unstable);
        CHECK(p.verdicts[1] == Verdict::Stable);
        CHECK(p.verdicts[2] == Verdict::Unstable);
    }
}

TEST_CASE("classify_pattern delay-independent regions and degenerate lines") {
    CHECK(classify_pattern(-1.0, 0.5, 0.4).tag == PatternTag::StableAll);   // Q2
    CHECK(classify_pattern(-1.0, -0.5, 0.4).tag == PatternTag::UnstableAll);  // Q3
    CHECK(classify_pattern(1.0, 2.5, 0.4).tag == PatternTag::StableAll);    // gamma > 2k
    CHECK_THROWS_AS(classify_pattern(1.0, 1.0, 0.4), DegenerateInput);
    CHECK_THROWS_AS(classify_pattern(0.0, 1.0, 0.4), DegenerateInput);
    CHECK_THROWS_AS(classify_pattern(1.0, 0.0, 0.4), DegenerateInput);
    CHECK_THROWS_AS(classify_pattern(1.0, 2.0, 0.4), DegenerateInput);
}

TEST_CASE("critical delays place a characteristic root on the imaginary axis or at zero") {
    for (auto [k, gamma] : {std::pair{2.0, 0.6}, {4.62, 3.69}, {9.8, 10.56}, {0.23, -0.12}}) {
        const auto pat = classify_pattern(k, gamma, 0.4);
        for (double tc : pat.critical_delays) {
            const SystemParams p{0.4, k, gamma, 0.0, tc};
            double best = std::abs(char_value(Complex(0.0, 0.0), p));
            try {
                const double w = crossing_frequency(k - gamma, b_of_tau(k, gamma, tc), 0.4);
                best = std::min(best, std::abs(char_value(Complex(0.0, w), p)));
            } catch (const DomainError&) {
            }
            CHECK(best <= 1e-7);
        }
    }
}

TEST_CASE("segment verdicts agree with the root-scan oracle on the reference cases") {
    for (auto [k, gamma] : {std::pair{2.0, 0.6}, {4.62, 3.69}, {9.8, 10.56}, {0.23, -0.12}}) {
        const auto pat = classify_pattern(k, gamma, 0.4);
        std::vector<double> mids;
        const auto& d = pat.critical_delays;
        if (d.empty()) {
            mids = {0.5, 2.0};
        } else {
            mids.push_back(0.5 * d.front());
            for (std::size_t i = 1; i < d.size(); ++i) mids.push_back(0.5 * (d[i - 1] + d[i]));
            mids.push_back(d.back() + std::max(1.0, 0.5 * d.back()));
        }
        for (std::size_t s = 0; s < mids.size(); ++s) {
            const Verdict claimed =
                d.empty() ? pat.verdicts[0] : pat.verdicts[std::min(s, pat.verdicts.size() - 1)];
            const SystemParams p{0.4, k, gamma, 0.0, mids[s]};
            std::vector<double> seeds;
            for (double tc : d) {
                try {
                    seeds.push_back(crossing_frequency(k - gamma, b_of_tau(k, gamma, tc), 0.4));
                } catch (const DomainError&) {
                }
            }
            const auto root = find_unstable_root(p, 1e-5, seeds);
            const bool unstable = root && root->real() > 1e-5;
            CHECK(unstable == (claimed == Verdict::Unstable));
        }
    }
}

TEST_CASE("oracle agreement holds across fractional orders, not just 0.4") {
    std::mt19937 rng(57);
    std::uniform_real_distribution<double> kd(0.3, 9.0);
    std::uniform_real_distribution<double> ratio(0.1, 1.9);
    const double alphas[] = {0.3, 0.55, 0.8, 1.0};
    int probes = 0;
    for (int trial = 0; trial < 12; ++trial) {
        const double k = kd(rng);
        double gamma = k * ratio(rng);
        if (std::abs(gamma - k) < 0.05 * k) gamma += 0.1 * k;
        const double alpha = alphas[trial % 4];
        SwitchPattern pat;
        try {
            pat = classify_pattern(k, gamma, alpha);
        } catch (const DegenerateInput&) {
            continue;
        }
        std::vector<double> mids;
        const auto& d = pat.critical_delays;
        if (d.empty()) {
            mids = {0.5, 2.0};
        } else {
            mids.push_back(0.5 * d.front());
            for (std::size_t i = 1; i < d.size(); ++i) mids.push_back(0.5 * (d[i - 1] + d[i]));
            mids.push_back(d.back() + std::max(1.0, 0.5 * d.back()));
        }
        std::vector<double> seeds;
        for (double tc : d) {
            try {
                seeds.push_back(crossing_frequency(k - gamma, b_of_tau(k, gamma, tc), alpha));
            } catch (const DomainError&) {
            }
        }
        for (std::size_t s = 0; s < mids.size(); ++s) {
            const Verdict claimed =
                d.empty() ? pat.verdicts[0] : pat.verdicts[std::min(s, pat.verdicts.size() - 1)];
            const SystemParams p{alpha, k, gamma, 0.0, mids[s]};
            const auto root = find_unstable_root(p, 1e-5, seeds);
            const bool unstable = root && root->real() > 1e-5;
            CHECK(unstable == (claimed == Verdict::Unstable));
            ++probes;
        }
    }
    CHECK(probes > 20);
}

TEST_CASE("trace_h1 emits genuine tangency points with the intersection-count flip") {
    const auto pts = trace_h1(0.4, {3.0, 6.0}, 4);
    REQUIRE(!pts.empty());
    for (const auto& pt : pts) {
        const auto h = hopf_curve(pt.k, pt.gamma, 0.4, pt.tau_tangency);
        REQUIRE(h.has_value());
        CHECK(std::abs(*h - pt.tau_tangency) <= 1e-8);
        const double step = 1e-6;
        const auto up = hopf_curve(pt.k, pt.gamma, 0.4, pt.tau_tangency + step);
        const auto dn = hopf_curve(pt.k, pt.gamma, 0.4, pt.tau_tangency - step);
        REQUIRE(up.has_value());
        REQUIRE(dn.has_value());
        CHECK(std::abs((*up - *dn) / (2.0 * step) - 1.0) <= 1e-6);
        // crossing the curve flips the intersection count between 2 and 0
        const int n_lo = static_cast<int>(find_intersections(pt.k, pt.gamma - 1e-3, 0.4).size());
        const int n_hi = static_cast<int>(find_intersections(pt.k, pt.gamma + 1e-3, 0.4).size());
        CHECK(((n_lo == 2 && n_hi == 0) || (n_lo == 0 && n_hi == 2)));
    }
}

TEST_CASE("h1 separates the two-intersection example from the intersection-free one") {
    CHECK(find_intersections(4.62, 3.69, 0.4).size() == 2);  // region V side
    CHECK(find_intersections(1.13, 0.83, 0.4).empty());      // region II side
}

TEST_CASE("trace_h2 in the first quadrant flips the SSR critical-value source") {
    // Moderate k: the first h2 zero separates regions I/II (critical value
    // tau*'') from region IV (critical value tau*a').
    const auto pts = trace_h2(0.4, {0.75, 1.3}, 3, GammaSide::FirstQuadrant);
    REQUIRE(!pts.empty());
    for (const auto& pt : pts) {
        const double tpp = tau_star_pp(pt.k, pt.gamma);
        const auto h = hopf_curve(pt.k, pt.gamma, 0.4, tpp);
        REQUIRE(h.has_value());
        CHECK(std::abs(*h - tpp) <= 1e-8);
        const auto lo = classify_pattern(pt.k, pt.gamma - 1e-3, 0.4);
        const auto hi = classify_pattern(pt.k, pt.gamma + 1e-3, 0.4);
        const double tpp_lo = tau_star_pp(pt.k, pt.gamma - 1e-3);
        const double tpp_hi = tau_star_pp(pt.k, pt.gamma + 1e-3);
        const bool lo_is_tpp = std::abs(lo.critical_delays.front() - tpp_lo) < 1e-6;
        const bool hi_is_tpp = std::abs(hi.critical_delays.front() - tpp_hi) < 1e-6;
        CHECK(lo_is_tpp != hi_is_tpp);
    }
}

TEST_CASE("trace_h2 at larger k bounds region IV against SUSU") {
    const auto pts = trace_h2(0.4, {2.0, 5.0}, 4, GammaSide::FirstQuadrant);
    REQUIRE(!pts.empty());
    for (const auto& pt : pts) {
        const double tpp = tau_star_pp(pt.k, pt.gamma);
        const auto h = hopf_curve(pt.k, pt.gamma, 0.4, tpp);
        REQUIRE(h.has_value());
        CHECK(std::abs(*h - tpp) <= 1e-8);
        const auto lo = classify_pattern(pt.k, pt.gamma - 1e-3, 0.4);
        const auto hi = classify_pattern(pt.k, pt.gamma + 1e-3, 0.4);
        CHECK(lo.tag != hi.tag);
        CHECK((lo.tag == PatternTag::SSR || hi.tag == PatternTag::SSR));
        CHECK((lo.tag == PatternTag::SUSU || hi.tag == PatternTag::SUSU));
    }
}

TEST_CASE("trace_h2 in the fourth quadrant separates USU from UnstableAll") {
    const auto pts = trace_h2(0.4, {0.23, 0.8}, 3, GammaSide::FourthQuadrant);
    REQUIRE(!pts.empty());
    for (const auto& pt : pts) {
        CHECK(pt.gamma < 0.0);
        const double tpp = tau_star_pp(pt.k, pt.gamma);
        const auto h = hopf_curve(pt.k, pt.gamma, 0.4, tpp);
        REQUIRE(h.has_value());
        CHECK(std::abs(*h - tpp) <= 1e-8);
        const auto above = classify_pattern(pt.k, pt.gamma + 1e-3, 0.4);
        const auto below = classify_pattern(pt.k, pt.gamma - 1e-3, 0.4);
        const bool above_usu = above.tag == PatternTag::USU;
        const bool below_usu = below.tag == PatternTag::USU;
        CHECK(above_usu != below_usu);
    }
    // the (0.23, -0.12) case sits on the USU side of the curve
    CHECK(classify_pattern(0.23, -0.12, 0.4).tag == PatternTag::USU);
}
