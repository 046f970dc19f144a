// Command-line front end: stability classification, critical delays,
// bifurcation curves, (tau1, tau2) stability diagrams, time-domain simulation,
// and cross-verification of analytic artifacts against the root and
// simulation oracles.
//
// Exit codes: 0 success, 1 domain/degenerate-input error, 2 numerical
// non-convergence or failed verification, 64 usage error, 66 missing artifact.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fdde/case_tau1_zero.hpp"
#include "fdde/char_eq.hpp"
#include "fdde/io.hpp"
#include "fdde/sim.hpp"
#include "fdde/single_delay.hpp"
#include "fdde/two_delay.hpp"

namespace {

using fdde::Json;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitUsage = 64;
constexpr int kExitNoInput = 66;

struct CommonOpts {
    double alpha = 0.4;
    double k = 1.0;
    double gamma = 0.5;
    double tau1 = 0.0;
    double tau2 = 0.0;
    std::string out;
    std::string format = "json";
};

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    os << text;
}

std::string default_out(const std::string& command, const std::string& format) {
    return command + "." + format;
}

Json config_json(const std::string& command, const CommonOpts& o) {
    Json j;
    j["command"] = command;
    j["alpha"] = o.alpha;
    j["k"] = o.k;
    j["gamma"] = o.gamma;
    j["tau1"] = o.tau1;
    j["tau2"] = o.tau2;
    j["format"] = o.format;
    return j;
}

int run_classify(const CommonOpts& o) {
    const fdde::SwitchPattern pattern = fdde::classify_pattern(o.k, o.gamma, o.alpha);
    Json config = config_json("classify", o);
    Json artifact{{"kind", "classification"},
                  {"config", config},
                  {"result", fdde::to_json(pattern)}};
    const std::string path = o.out.empty() ? default_out("classify", "json") : o.out;
    write_text_file(path, artifact.dump(2) + "\n");
    std::cout << fdde::to_json(pattern).dump(2) << "\n";
    return kExitOk;
}

int run_hopf(double a, double b, const CommonOpts& o) {
    Json result;
    result["class"] = fdde::to_string(fdde::classify(a, b));
    if (fdde::classify(a, b) == fdde::DelayClass::SingleStableRegion) {
        result["crossing_frequency"] = fdde::crossing_frequency(a, b, o.alpha);
        result["hopf_delay"] = fdde::hopf_delay(a, b, o.alpha);
    }
    Json config = config_json("hopf", o);
    config["a"] = a;
    config["b"] = b;
    Json artifact{{"kind", "hopf"}, {"config", config}, {"result", result}};
    const std::string path = o.out.empty() ? default_out("hopf", "json") : o.out;
    write_text_file(path, artifact.dump(2) + "\n");
    std::cout << result.dump(2) << "\n";
    return kExitOk;
}

int run_curves(const CommonOpts& o, double k_min, double k_max, int samples) {
    const fdde::Interval k_range{k_min, k_max};
    const auto h1 = fdde::trace_h1(o.alpha, k_range, samples);
    const auto h2_q1 = fdde::trace_h2(o.alpha, k_range, samples, fdde::GammaSide::FirstQuadrant);
    const auto h2_q4 = fdde::trace_h2(o.alpha, k_range, samples, fdde::GammaSide::FourthQuadrant);
    std::vector<fdde::CurvePoint> h2 = h2_q1;
    h2.insert(h2.end(), h2_q4.begin(), h2_q4.end());

    Json config = config_json("curves", o);
    config["k_min"] = k_min;
    config["k_max"] = k_max;
    config["samples"] = samples;

    const std::string path = o.out.empty() ? default_out("curves", o.format) : o.out;
    if (o.format == "csv") {
        std::ostringstream os;
        fdde::write_curves_csv(os, h1, h2, config);
        write_text_file(path, os.str());
    } else {
        Json jh1 = Json::array(), jh2 = Json::array();
        for (const auto& p : h1) jh1.push_back(fdde::to_json(p));
        for (const auto& p : h2) jh2.push_back(fdde::to_json(p));
        Json artifact{{"kind", "curves"}, {"config", config}, {"h1", jh1}, {"h2", jh2}};
        write_text_file(path, artifact.dump(2) + "\n");
    }
    Json summary{{"h1_points", h1.size()}, {"h2_points", h2.size()}, {"out", path}};
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

int run_tau_plane(const CommonOpts& o, double v_max, int v_samples, int max_branch) {
    const auto grid = fdde::default_v_grid(v_max, v_samples);
    const auto trace = fdde::trace_boundary(o.alpha, o.k, o.gamma, grid, max_branch);

    Json config = config_json("tau-plane", o);
    config["v_max"] = v_max;
    config["v_samples"] = v_samples;
    config["max_branch"] = max_branch;

    Json summary;
    try {
        if (auto z = fdde::zero_root_branch(o.k, o.gamma))
            summary["tau2a_star"] = *z;
        else
            summary["tau2a_star"] = nullptr;
    } catch (const fdde::DomainError&) {
        summary["tau2a_star"] = nullptr;
    }
    if (!trace.points.empty()) {
        double t2min = trace.points.front().tau2;
        for (const auto& p : trace.points) t2min = std::min(t2min, p.tau2);
        summary["tau2_min"] = t2min;
    } else {
        summary["tau2_min"] = nullptr;
    }
    summary["points"] = trace.points.size();
    summary["failed_v"] = trace.failed_v.size();

    const std::string path = o.out.empty() ? default_out("tau_plane", o.format) : o.out;
    if (o.format == "csv") {
        std::ostringstream os;
        fdde::write_boundary_csv(os, trace.points, config);
        write_text_file(path, os.str());
    } else {
        Json pts = Json::array();
        for (const auto& p : trace.points) pts.push_back(fdde::to_json(p));
        Json artifact{{"kind", "boundary"},
                      {"config", config},
                      {"summary", summary},
                      {"points", pts}};
        write_text_file(path, artifact.dump(2) + "\n");
    }
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

int run_slice(const CommonOpts& o, double tau1_max, double v_max, int v_samples, int max_branch) {
    const auto grid = fdde::default_v_grid(v_max, v_samples);
    const auto trace = fdde::trace_boundary(o.alpha, o.k, o.gamma, grid, max_branch);
    const auto report =
        fdde::classify_tau2_slice(o.alpha, o.k, o.gamma, o.tau2, tau1_max, trace.points);

    Json config = config_json("slice", o);
    config["tau1_max"] = tau1_max;
    config["v_max"] = v_max;
    config["v_samples"] = v_samples;
    config["max_branch"] = max_branch;
    Json artifact{{"kind", "slice"}, {"config", config}, {"result", fdde::to_json(report)}};
    const std::string path = o.out.empty() ? default_out("slice", "json") : o.out;
    write_text_file(path, artifact.dump(2) + "\n");
    std::cout << fdde::to_json(report).dump(2) << "\n";
    return kExitOk;
}

int run_simulate(const CommonOpts& o, double step, double horizon, double phi,
                 const std::string& g_kind) {
    const fdde::SystemParams p{o.alpha, o.k, o.gamma, o.tau1, o.tau2};
    p.validate();
    fdde::SimConfig cfg;
    cfg.step = step;
    cfg.horizon = horizon > 0.0 ? horizon : fdde::default_horizon(p);
    cfg.history_value = phi;
    const fdde::Nonlinearity g = g_kind == "tanh" ? fdde::Nonlinearity::tanh(o.k)
                                                  : fdde::Nonlinearity::linear(o.k);
    const fdde::Trajectory traj = fdde::simulate(p, g, cfg);

    Json config = config_json("simulate", o);
    config["step"] = cfg.step;
    config["horizon"] = cfg.horizon;
    config["phi"] = phi;
    config["g"] = g_kind;

    const std::string path = o.out.empty() ? default_out("trajectory", o.format) : o.out;
    if (o.format == "csv") {
        std::ostringstream os;
        fdde::write_trajectory_csv(os, traj, config);
        write_text_file(path, os.str());
    } else {
        Json artifact{{"kind", "trajectory"},
                      {"config", config},
                      {"result", fdde::to_json(traj, true)}};
        write_text_file(path, artifact.dump(2) + "\n");
    }
    std::cout << fdde::to_json(traj, false).dump(2) << "\n";
    return kExitOk;
}

// Midpoints representing every segment of a switch pattern.
std::vector<std::pair<double, fdde::Verdict>> pattern_probe_points(
    const fdde::SwitchPattern& pat) {
    std::vector<std::pair<double, fdde::Verdict>> probes;
    const auto& d = pat.critical_delays;
    if (d.empty()) {
        probes.emplace_back(0.5, pat.verdicts[0]);
        probes.emplace_back(2.0, pat.verdicts[0]);
        return probes;
    }
    probes.emplace_back(0.5 * d.front(), pat.verdicts[0]);
    for (std::size_t i = 1; i < d.size(); ++i)
        probes.emplace_back(0.5 * (d[i - 1] + d[i]), pat.verdicts[i]);
    probes.emplace_back(d.back() + std::max(1.0, 0.5 * d.back()), pat.verdicts.back());
    return probes;
}

int run_verify(const std::string& in_path, double residual_tol) {
    if (!std::filesystem::exists(in_path)) {
        std::cerr << "error: artifact not found: " << in_path << "\n";
        return kExitNoInput;
    }
    std::ifstream is(in_path);
    Json artifact = Json::parse(is, nullptr, true);
    const std::string kind = artifact.value("kind", "");
    const Json config = artifact.value("config", Json::object());
    const double alpha = config.value("alpha", 0.4);
    const double k = config.value("k", 1.0);
    const double gamma = config.value("gamma", 0.5);

    int failures = 0;
    int checks = 0;
    auto report_line = [&](const std::string& what, bool pass, const std::string& detail) {
        ++checks;
        if (!pass) ++failures;
        std::cout << (pass ? "PASS" : "FAIL") << "  " << what;
        if (!detail.empty()) std::cout << "  (" << detail << ")";
        std::cout << "\n";
    };

    if (kind == "classification") {
        fdde::SwitchPattern pat;
        pat.tag = fdde::PatternTag::StableAll;
        const Json result = artifact.at("result");
        pat.critical_delays = result.at("critical_delays").get<std::vector<double>>();
        std::vector<fdde::Verdict> verdicts;
        for (const auto& v : result.at("verdicts"))
            verdicts.push_back(v.get<std::string>() == "unstable" ? fdde::Verdict::Unstable
                                                                  : fdde::Verdict::Stable);
        pat.verdicts = verdicts;

        for (const auto& [tau, claimed] : pattern_probe_points(pat)) {
            const fdde::SystemParams p{alpha, k, gamma, 0.0, tau};
            std::vector<double> seeds;
            for (double tc : pat.critical_delays) {
                try {
                    seeds.push_back(fdde::crossing_frequency(
                        k - gamma, fdde::b_of_tau(k, gamma, tc), alpha));
                } catch (const fdde::DomainError&) {
                }
            }
            const auto root = fdde::find_unstable_root(p, 1e-5, seeds);
            const bool root_unstable = root && root->real() > 1e-5;
            report_line("root-scan at tau2 = " + fdde::format_number(tau),
                        root_unstable == (claimed == fdde::Verdict::Unstable),
                        root ? "rightmost Re = " + fdde::format_number(root->real()) : "no root");

            const fdde::Trajectory traj = fdde::simulate_extending(
                p, fdde::Nonlinearity::linear(k), fdde::default_sim_config(p));
            if (traj.verdict == fdde::Verdict::Inconclusive) {
                std::cout << "SKIP  simulation at tau2 = " << fdde::format_number(tau)
                          << "  (inconclusive)\n";
            } else {
                report_line("simulation at tau2 = " + fdde::format_number(tau),
                            traj.verdict == claimed, to_string(traj.verdict));
            }
        }
    } else if (kind == "slice") {
        const Json result = artifact.at("result");
        const double tau2 = result.at("tau2").get<double>();
        for (const auto& iv : result.at("intervals")) {
            const double lo = iv.at("tau1_lo").get<double>();
            const double hi = iv.at("tau1_hi").get<double>();
            const bool claimed_unstable = iv.at("verdict").get<std::string>() == "unstable";
            const double mid = 0.5 * (lo + hi);
            const fdde::SystemParams p{alpha, k, gamma, mid, tau2};
            const auto root = fdde::find_unstable_root(p, 1e-5, {});
            const bool root_unstable = root && root->real() > 1e-5;
            report_line("root-scan at tau1 = " + fdde::format_number(mid),
                        root_unstable == claimed_unstable,
                        root ? "rightmost Re = " + fdde::format_number(root->real()) : "no root");
        }
    } else if (kind == "boundary") {
        const Json pts = artifact.value("points", Json::array());
        if (pts.empty()) {
            report_line("boundary artifact", true, "empty point set, vacuous pass");
        } else {
            std::size_t step = std::max<std::size_t>(1, pts.size() / 20);
            for (std::size_t i = 0; i < pts.size(); i += step) {
                const auto& q = pts[i];
                const fdde::SystemParams p{alpha, k, gamma, q.at("tau1").get<double>(),
                                           q.at("tau2").get<double>()};
                const double res = std::abs(
                    fdde::char_value(fdde::Complex(0.0, q.at("v").get<double>()), p));
                report_line("boundary residual at v = " +
                                fdde::format_number(q.at("v").get<double>()),
                            res <= residual_tol, "|Delta(iv)| = " + fdde::format_number(res));
            }
        }
    } else {
        std::cerr << "error: unknown artifact kind: '" << kind << "'\n";
        return kExitUsage;
    }
    std::cout << (failures == 0 ? "VERIFIED" : "FAILED") << " " << (checks - failures) << "/"
              << checks << " checks\n";
    return failures == 0 ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stability analysis of a fractional two-delay system"};
    app.require_subcommand(1);

    CommonOpts o;
    double a = 0.0, b = -1.0;
    double k_min = 0.5, k_max = 10.0;
    int samples = 40;
    double v_max = 2.0 * std::numbers::pi;
    int v_samples = 2000;
    int max_branch = 3;
    double tau1_max = 4.0;
    double step = 1e-2;
    double horizon = -1.0;
    double phi = 0.1;
    std::string g_kind = "linear";
    std::string in_path;

    auto add_common = [&](CLI::App* cmd, bool with_taus) {
        cmd->add_option("--alpha", o.alpha, "fractional order in (0, 1]")
            ->capture_default_str();
        cmd->add_option("--k", o.k, "feedback slope g'(0)")->capture_default_str();
        cmd->add_option("--gamma", o.gamma, "decay coefficient")->capture_default_str();
        if (with_taus) {
            cmd->add_option("--tau1", o.tau1, "first delay")->capture_default_str();
            cmd->add_option("--tau2", o.tau2, "second delay")->capture_default_str();
        }
        cmd->add_option("--out", o.out, "output artifact path (default <command>.<format>)");
        cmd->add_option("--format", o.format, "artifact format: json or csv")
            ->check(CLI::IsMember({"json", "csv"}))
            ->capture_default_str();
    };

    auto* classify = app.add_subcommand("classify", "switch-pattern classification at tau1 = 0");
    add_common(classify, false);

    auto* hopf = app.add_subcommand("hopf", "single-delay class and Hopf delay for (a, b)");
    hopf->add_option("--a", a, "coefficient of x(t)")->required();
    hopf->add_option("--b", b, "coefficient of x(t - tau)")->required();
    add_common(hopf, false);

    auto* curves = app.add_subcommand("curves", "bifurcation curves h1 and h2 in the (k, gamma)-plane");
    add_common(curves, false);
    curves->add_option("--k-min", k_min, "lower end of the k sweep")->capture_default_str();
    curves->add_option("--k-max", k_max, "upper end of the k sweep")->capture_default_str();
    curves->add_option("--samples", samples, "number of k samples")->capture_default_str();

    auto* tau_plane = app.add_subcommand("tau-plane", "(tau1, tau2)-plane stability boundary");
    add_common(tau_plane, false);
    tau_plane->add_option("--v-max", v_max, "upper end of the crossing-frequency window")
        ->capture_default_str();
    tau_plane->add_option("--v-samples", v_samples, "number of v grid points")
        ->capture_default_str();
    tau_plane->add_option("--max-branch", max_branch, "wrapped copies per solution")
        ->capture_default_str();

    auto* slice = app.add_subcommand("slice", "stability intervals in tau1 at fixed tau2");
    add_common(slice, true);
    slice->add_option("--tau1-max", tau1_max, "right end of the tau1 window")
        ->capture_default_str();
    slice->add_option("--v-max", v_max, "upper end of the crossing-frequency window")
        ->capture_default_str();
    slice->add_option("--v-samples", v_samples, "number of v grid points")
        ->capture_default_str();
    slice->add_option("--max-branch", max_branch, "wrapped copies per solution")
        ->capture_default_str();

    auto* simulate = app.add_subcommand("simulate", "fractional predictor-corrector trajectory");
    add_common(simulate, true);
    simulate->add_option("--step", step, "grid spacing")->capture_default_str();
    simulate->add_option("--horizon", horizon, "final time (default max(50, 20(tau1+tau2)))");
    simulate->add_option("--phi", phi, "constant initial function value")->capture_default_str();
    simulate->add_option("--g", g_kind, "nonlinearity: linear or tanh")
        ->check(CLI::IsMember({"linear", "tanh"}))
        ->capture_default_str();

    double residual_tol = 1e-8;
    auto* verify = app.add_subcommand("verify", "cross-check an analysis artifact");
    verify->add_option("artifact", in_path, "path to a prior artifact (json)")->required();
    verify->add_option("--tol", residual_tol, "characteristic-residual bound for boundary checks")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
            return app.exit(e);
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (classify->parsed()) return run_classify(o);
        if (hopf->parsed()) return run_hopf(a, b, o);
        if (curves->parsed()) return run_curves(o, k_min, k_max, samples);
        if (tau_plane->parsed()) return run_tau_plane(o, v_max, v_samples, max_branch);
        if (slice->parsed()) return run_slice(o, tau1_max, v_max, v_samples, max_branch);
        if (simulate->parsed()) return run_simulate(o, step, horizon, phi, g_kind);
        if (verify->parsed()) return run_verify(in_path, residual_tol);
    } catch (const fdde::DomainError& e) {
        std::cerr << "error (domain): " << e.what() << "\n";
        return kExitDomain;
    } catch (const fdde::DegenerateInput& e) {
        std::cerr << "error (degenerate input): " << e.what() << "\n";
        return kExitDomain;
    } catch (const fdde::ConvergenceError& e) {
        std::cerr << "error (non-convergence): " << e.what() << "\n";
        return kExitNumerical;
    } catch (const fdde::InconclusiveVerdict& e) {
        std::cerr << "error (inconclusive): " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}
