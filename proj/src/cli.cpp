#include "thetacbc/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>

#include <CLI11.hpp>

#include "thetacbc/errors.hpp"
#include "thetacbc/rlc_fixture.hpp"
#include "thetacbc/scenario_io.hpp"

namespace thetacbc {

namespace {

struct Invocation {
    std::string scenario_path;
    std::uint64_t seed = 42;
    std::optional<std::int64_t> samples;
    std::optional<std::string> output;
    std::optional<std::string> format;
    bool dump_trajectories = false;
    std::string dump_path = "trajectories.csv";
    std::optional<int> jobs;
    std::vector<double> grid_sigma_w;
    std::vector<double> grid_sigma_i;
    std::vector<double> grid_sigma_u;
};

ReportFormat report_format(const Invocation& inv, ReportFormat fallback) {
    if (!inv.format) {
        return fallback;
    }
    return *inv.format == "csv" ? ReportFormat::Csv : ReportFormat::Json;
}

MonteCarloConfig monte_carlo_config(const Invocation& inv, std::int64_t default_samples) {
    MonteCarloConfig cfg;
    cfg.num_trajectories = inv.samples.value_or(default_samples);
    cfg.master_seed = inv.seed;
    if (inv.jobs) {
        cfg.parallelism = Parallelism::fixed(*inv.jobs);
    }
    if (inv.dump_trajectories) {
        cfg.trajectory_dump = inv.dump_path;
    }
    return cfg;
}

void write_output(const Invocation& inv, const std::string& text, std::ostream& out) {
    if (!inv.output) {
        out << text;
        return;
    }
    std::ofstream file(*inv.output);
    if (!file) {
        throw Error("cannot open output file " + *inv.output);
    }
    file << text;
}

std::string fixed(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

int run_certify(const Invocation& inv, std::ostream& out, std::ostream& err) {
    const ResolvedScenario resolved = resolve(load_scenario(inv.scenario_path));
    const CertificateReport cert = certify(resolved);
    write_output(inv, emit_report(cert, std::nullopt, report_format(inv, ReportFormat::Json)), out);
    if (!cert.valid) {
        err << "certificate invalid:";
        for (const auto& flag : cert.diagnostics) {
            err << ' ' << flag;
        }
        err << '\n';
        return kExitInvalidCertificate;
    }
    return kExitOk;
}

int run_simulate(const Invocation& inv, std::ostream& out, std::ostream&) {
    const ResolvedScenario resolved = resolve(load_scenario(inv.scenario_path));
    const MonteCarloReport mc = estimate(resolved, monte_carlo_config(inv, 20000));
    write_output(inv, emit_monte_carlo_report(mc, report_format(inv, ReportFormat::Json)), out);
    return kExitOk;
}

int run_sweep(const Invocation& inv, std::ostream& out, std::ostream& err) {
    const Scenario base = load_scenario(inv.scenario_path);
    const SweepGrid from_file = base.sweep.value_or(SweepGrid{});
    const auto pick = [](const std::vector<double>& flag, const std::vector<double>& cfg) {
        return flag.empty() ? cfg : flag;
    };
    const std::vector<double> sw = pick(inv.grid_sigma_w, from_file.sigma_w);
    const std::vector<double> si = pick(inv.grid_sigma_i, from_file.sigma_i);
    const std::vector<double> su = pick(inv.grid_sigma_u, from_file.sigma_u);
    if (sw.empty() || si.empty() || su.empty()) {
        err << "sweep needs sigma_w, sigma_i and sigma_u grids (flags or the scenario sweep block)\n";
        return kExitInputError;
    }
    for (const auto* list : {&sw, &si, &su}) {
        for (double s : *list) {
            if (!(s >= 0.0) || !std::isfinite(s)) {
                err << "sweep grid values must be finite and nonnegative\n";
                return kExitInputError;
            }
        }
    }
    MonteCarloConfig cfg = monte_carlo_config(inv, 2000);
    cfg.trajectory_dump.reset();
    const std::vector<SweepRow> rows = sweep(base, sw, si, su, cfg);
    write_output(inv, emit_sweep(rows, report_format(inv, ReportFormat::Csv)), out);
    if (!dominance_holds(rows)) {
        err << "dominance violated: empirical CI below the analytic bound\n";
        return kExitDominanceViolation;
    }
    return kExitOk;
}

int run_paper_repro(const Invocation& inv, std::ostream& out, std::ostream& err) {
    const Scenario scenario = rlc_scenario();
    MonteCarloConfig cfg = monte_carlo_config(inv, 20000);
    const int code = paper_repro(scenario, cfg, out, err);
    if (inv.output) {
        const ResolvedScenario resolved = resolve(scenario);
        cfg.trajectory_dump.reset();
        std::ofstream file(*inv.output);
        if (!file) {
            throw Error("cannot open output file " + *inv.output);
        }
        file << emit_report(certify(resolved), estimate(resolved, cfg),
                            report_format(inv, ReportFormat::Json));
    }
    return code;
}

}  // namespace

double ReproRow::abs_diff() const { return std::abs(computed - published); }

bool ReproRow::passed() const { return abs_diff() <= tolerance; }

std::vector<ReproRow> compare_to_published(const CertificateReport& cert) {
    return {
        {"eta", 0.003109, cert.eta, 5e-6},
        {"beta", 0.183054, cert.beta, 5e-5},
        {"c", 0.001012, cert.c, 5e-6},
        {"bound", 0.7066, cert.safety_lower_bound, 5e-4},
    };
}

int paper_repro(const Scenario& scenario, const MonteCarloConfig& mc, std::ostream& out,
                std::ostream& err) {
    const ResolvedScenario resolved = resolve(scenario);
    const CertificateReport cert = certify(resolved);
    const MonteCarloReport sim = estimate(resolved, mc);
    const std::vector<ReproRow> rows = compare_to_published(cert);

    bool all_pass = true;
    out << "quantity   published    computed     abs_diff     tolerance  status\n";
    for (const ReproRow& r : rows) {
        char line[160];
        std::snprintf(line, sizeof line, "%-10s %-12.6g %-12.6g %-12.3e %-10.1e %s\n",
                      r.quantity.c_str(), r.published, r.computed, r.abs_diff(), r.tolerance,
                      r.passed() ? "PASS" : "FAIL");
        out << line;
        all_pass = all_pass && r.passed();
    }
    out << "empirical p_safe " << fixed(sim.p_safe_empirical, 4) << " (95% CI "
        << fixed(sim.ci_low, 4) << ".." << fixed(sim.ci_high, 4) << ", " << sim.samples
        << " samples, seed " << sim.master_seed << "; published 0.9990)\n";
    if (sim.trajectory_dump) {
        out << "trajectories written to " << *sim.trajectory_dump << '\n';
    }
    if (!all_pass) {
        err << "paper-repro mismatch\n";
        return kExitReproMismatch;
    }
    return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Probabilistic safety certificates for stochastic linear systems with random sets",
                 "thetacbc"};
    app.require_subcommand(1);

    Invocation inv;
    auto add_common = [&](CLI::App* sub, bool needs_scenario) {
        auto* opt = sub->add_option("--scenario", inv.scenario_path, "Scenario JSON file");
        if (needs_scenario) {
            opt->required();
        }
        sub->add_option("--seed", inv.seed, "Master seed")->capture_default_str();
        sub->add_option("--samples", inv.samples, "Monte Carlo trajectories");
        sub->add_option("--output", inv.output, "Write the report here instead of stdout");
        sub->add_option("--format", inv.format, "json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--jobs", inv.jobs, "Worker threads")->check(CLI::PositiveNumber);
    };

    auto* certify_cmd = app.add_subcommand("certify", "Compute the analytic safety bound");
    add_common(certify_cmd, true);

    auto* simulate_cmd = app.add_subcommand("simulate", "Estimate safety by Monte Carlo");
    add_common(simulate_cmd, true);
    simulate_cmd->add_flag("--dump-trajectories", inv.dump_trajectories, "Write every state to CSV");
    simulate_cmd->add_option("--dump-path", inv.dump_path, "Trajectory CSV path")
        ->capture_default_str();

    auto* sweep_cmd = app.add_subcommand("sweep", "Bound vs. Monte Carlo over a sigma grid");
    add_common(sweep_cmd, true);
    sweep_cmd->add_option("--grid-sigma-w", inv.grid_sigma_w, "Comma-separated sigma_w values")
        ->delimiter(',');
    sweep_cmd->add_option("--grid-sigma-i", inv.grid_sigma_i, "Comma-separated sigma_i values")
        ->delimiter(',');
    sweep_cmd->add_option("--grid-sigma-u", inv.grid_sigma_u, "Comma-separated sigma_u values")
        ->delimiter(',');

    auto* repro_cmd = app.add_subcommand("paper-repro", "Reproduce the RLC circuit example");
    add_common(repro_cmd, false);
    repro_cmd->add_flag("--dump-trajectories", inv.dump_trajectories, "Write every state to CSV");
    repro_cmd->add_option("--dump-path", inv.dump_path, "Trajectory CSV path")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInputError;
    }
    if (inv.samples && *inv.samples < 1) {
        err << "--samples must be at least 1\n";
        return kExitInputError;
    }

    try {
        if (*certify_cmd) return run_certify(inv, out, err);
        if (*simulate_cmd) return run_simulate(inv, out, err);
        if (*sweep_cmd) return run_sweep(inv, out, err);
        return run_paper_repro(inv, out, err);
    } catch (const NoCertificateError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalidCertificate;
    } catch (const UnstabilizableError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalidCertificate;
    } catch (const InvalidCertificate& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalidCertificate;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }
}

}  // namespace thetacbc
