#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pflab/config.hpp"
#include "pflab/fields.hpp"
#include "pflab/geometry.hpp"
#include "pflab/io_util.hpp"
#include "pflab/problem.hpp"
#include "pflab/radial.hpp"
#include "pflab/solver2d.hpp"
#include "pflab/verify.hpp"

namespace {

using pflab::RunConfig;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitSolverFailure = 2;
constexpr int kExitConfigError = 3;

std::string out_path(const RunConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

void write_failure(const RunConfig& cfg, const std::string& kind, const std::string& detail,
                   ordered_json extra = ordered_json::object()) {
    ordered_json j;
    j["status"] = kind;
    j["detail"] = detail;
    for (auto& [k, v] : extra.items()) j[k] = v;
    pflab::atomic_write(out_path(cfg, "failure.json"), j.dump(2) + "\n");
    std::cerr << kind << ": " << detail << "\n";
}

pflab::SolveOptions solve_options(const RunConfig& cfg) {
    pflab::SolveOptions opts;
    opts.lambda_schedule = cfg.lambda_schedule;
    opts.newton_tol = cfg.tol_newton;
    opts.linear_tol = cfg.tol_linear;
    return opts;
}

pflab::VerifyOptions verify_options(const RunConfig& cfg) {
    pflab::VerifyOptions opts;
    opts.h = cfg.h;
    opts.betas = cfg.beta;
    opts.boundary_samples = cfg.boundary_samples;
    opts.solve = solve_options(cfg);
    return opts;
}

int run_radial(const RunConfig& cfg) {
    const pflab::ProblemSpec spec = pflab::build_problem(cfg);
    const pflab::ShootOutcome outcome =
        pflab::shoot_radial(spec, cfg.n, cfg.R, cfg.tol_shoot, cfg.h_r);
    if (!outcome.converged()) {
        ordered_json extra;
        extra["kind"] = outcome.status == pflab::ShootOutcome::Status::SpacelikeLimited
                            ? "spacelike-limited"
                            : "no-bracket";
        extra["bracket_lo"] = outcome.bracket_lo;
        extra["bracket_hi"] = outcome.bracket_hi;
        extra["evaluations"] = outcome.evaluations;
        write_failure(cfg, "existence-failure", outcome.message, extra);
        return kExitSolverFailure;
    }
    const pflab::RadialSolution& sol = *outcome.solution;
    pflab::atomic_write(out_path(cfg, "profile.csv"), pflab::radial_to_csv(sol));
    const pflab::ProfileConvexityReport conv = pflab::check_profile_convexity(sol, spec);
    ordered_json j;
    j["status"] = "converged";
    j["problem"] = spec.name;
    j["n"] = cfg.n;
    j["R"] = cfg.R;
    j["phi0"] = sol.phi0;
    j["residual"] = sol.residual;
    j["max_abs_phi_prime"] = sol.max_abs_phi_prime;
    j["profile_convexity"] = {
        {"min_phi_second", conv.min_phi_second},
        {"min_v_second", conv.min_v_second},
        {"phi_second_origin", conv.phi_second_origin},
        {"phi_second_origin_closed_form", conv.phi_second_origin_closed_form},
        {"pass", conv.pass},
    };
    pflab::atomic_write(out_path(cfg, "radial_report.json"), j.dump(2) + "\n");
    std::cout << "radial: phi0 = " << sol.phi0 << ", max|phi'| = " << sol.max_abs_phi_prime
              << ", profile convexity " << (conv.pass ? "pass" : "FAIL") << "\n";
    return conv.pass ? kExitPass : kExitCheckFailure;
}

int run_solve2d(const RunConfig& cfg) {
    const pflab::ProblemSpec spec = pflab::build_problem(cfg);
    const pflab::ConvexDomain domain = pflab::build_domain(cfg);
    auto grid = std::make_shared<pflab::ClippedGrid>(pflab::make_grid(domain, cfg.h));
    pflab::atomic_write(out_path(cfg, "grid.csv"), pflab::grid_to_csv(*grid));
    const pflab::Field2D field = pflab::newton_solve(spec, grid, solve_options(cfg));
    pflab::atomic_write(out_path(cfg, "field.csv"), pflab::field_to_csv(field));
    pflab::atomic_write(out_path(cfg, "solver_log.jsonl"), pflab::solver_log_to_json_lines(field));
    if (!field.converged()) {
        ordered_json extra;
        extra["lambda_reached"] = field.lambda;
        extra["final_residual"] = field.final_residual;
        write_failure(cfg, "solver-failure", field.failure_detail, extra);
        return kExitSolverFailure;
    }
    const pflab::DerivedFields derived =
        pflab::derive_fields(field, domain, cfg.boundary_samples);
    const pflab::PFunctionField phi =
        pflab::p_function(spec, derived, cfg.beta.empty() ? 1.0 : cfg.beta.front());
    const pflab::VField vf = pflab::v_transform(spec, field);
    pflab::atomic_write(out_path(cfg, "derived.csv"), pflab::derived_to_csv(derived, phi, vf));
    std::cout << "solve2d: " << grid->size() << " nodes, u_min = " << derived.u_min
              << ", q_m = " << derived.q_m << "\n";
    return kExitPass;
}

int run_verify(const RunConfig& cfg) {
    const pflab::ProblemSpec spec = pflab::build_problem(cfg);
    const pflab::ConvexDomain domain = pflab::build_domain(cfg);
    const pflab::VerificationReport report =
        pflab::run_verification(spec, domain, verify_options(cfg));
    pflab::atomic_write(out_path(cfg, "report.json"), pflab::report_to_json(report) + "\n");
    if (!report.solver_converged) {
        write_failure(cfg, "solver-failure", report.solver_status);
        return kExitSolverFailure;
    }
    std::cout << "verify: " << spec.name << " on " << domain.label() << " -> "
              << (report.aggregate_pass ? "pass" : "FAIL") << " (report.json)\n";
    return report.aggregate_pass ? kExitPass : kExitCheckFailure;
}

// Empirical existence edge of the gradient-limited radial problem: largest R
// (to 1e-3) for which the shoot converges.
double probe_existence_edge(const pflab::ProblemSpec& spec, int n) {
    auto solvable = [&](double R) {
        return pflab::shoot_radial(spec, n, R, 1e-8).converged();
    };
    double lo = 0.1;
    if (!solvable(lo)) return 0.0;
    double hi = lo;
    while (solvable(hi) && hi < 64.0) {
        lo = hi;
        hi *= 2.0;
    }
    for (int it = 0; it < 40 && hi - lo > 1e-3; ++it) {
        const double mid = 0.5 * (lo + hi);
        (solvable(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

int run_bounds(const RunConfig& cfg) {
    std::vector<double> alphas;
    if (cfg.alpha_set) {
        alphas.push_back(cfg.alpha);
    } else {
        for (int k = 0; k < cfg.alpha_count; ++k) {
            alphas.push_back(cfg.alpha_min + (cfg.alpha_max - cfg.alpha_min) * k /
                                                 (cfg.alpha_count - 1));
        }
    }
    std::string csv = "alpha,euclid_bound,lorentz_bound,lorentz_status\n";
    ordered_json rows = ordered_json::array();
    for (double a : alphas) {
        const double be = pflab::lower_bound_euclid(a);
        ordered_json row;
        row["alpha"] = a;
        row["euclid_bound"] = be;
        char line[160];
        try {
            const double bl = pflab::lower_bound_lorentz(a);
            row["lorentz_bound"] = bl;
            row["lorentz_status"] = "ok";
            std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,ok\n", a, be, bl);
        } catch (const pflab::ValidityRegionError&) {
            row["lorentz_bound"] = nullptr;
            row["lorentz_status"] = "outside-validity-region";
            std::snprintf(line, sizeof(line), "%.17g,%.17g,,outside-validity-region\n", a, be);
        }
        csv += line;
        rows.push_back(row);
    }
    ordered_json j;
    j["rows"] = rows;
    const double amax = pflab::lorentz_alpha_max();
    j["lorentz_validity"] = {
        {"alpha_max", amax},
        // alpha = R / (2 (n-1)) for a disk of radius R
        {"equivalent_disk_R", 2.0 * (cfg.n - 1) * amax},
    };
    if (cfg.probe_existence) {
        const double edge = probe_existence_edge(pflab::ProblemSpec::lorentzian(cfg.n), cfg.n);
        j["existence_probe"] = {
            {"problem", "lorentzian"},
            {"n", cfg.n},
            {"empirical_R_max", edge},
        };
        std::cout << "bounds: lorentz validity disk R <= "
                  << 2.0 * (cfg.n - 1) * amax << ", empirical existence edge R ~ " << edge
                  << "\n";
    }
    pflab::atomic_write(out_path(cfg, "bounds.csv"), csv);
    pflab::atomic_write(out_path(cfg, "bounds.json"), j.dump(2) + "\n");
    return kExitPass;
}

int run_sweep(const RunConfig& cfg) {
    const pflab::ProblemSpec spec = pflab::build_problem(cfg);
    const pflab::ConvexDomain domain = pflab::build_domain(cfg);
    std::vector<double> ladder = cfg.h_ladder;
    std::sort(ladder.begin(), ladder.end(), std::greater<double>());

    pflab::VerifyOptions vopts = verify_options(cfg);
    vopts.order_checks = false;  // consecutive rungs supply the pairs

    ordered_json rungs = ordered_json::array();
    pflab::ResidualStats prev;
    pflab::Field2D prev_field;
    bool all_pass = true;
    for (double h : ladder) {
        auto grid = std::make_shared<pflab::ClippedGrid>(pflab::make_grid(domain, h));
        pflab::SolveOptions sopts = solve_options(cfg);
        if (prev.valid) {
            sopts.initial_guess = pflab::prolong(prev_field, *grid);
            sopts.lambda_schedule = {cfg.lambda_schedule.empty() ? 1.0
                                                                 : cfg.lambda_schedule.back()};
        }
        const pflab::Field2D field = pflab::newton_solve(spec, grid, sopts);
        if (!field.converged()) {
            write_failure(cfg, "solver-failure",
                          "sweep rung h = " + pflab::format_double(h) + ": " +
                              field.failure_detail);
            return kExitSolverFailure;
        }
        vopts.h = h;
        const pflab::VerificationReport rep =
            pflab::assess_field(spec, domain, field, vopts, prev.valid ? &prev : nullptr);
        rungs.push_back(ordered_json::parse(pflab::report_to_json(rep)));
        all_pass = all_pass && rep.aggregate_pass;
        prev = pflab::residual_stats(spec, domain, field, cfg.boundary_samples);
        prev_field = field;
    }
    ordered_json j;
    j["ladder"] = ladder;
    j["rungs"] = rungs;
    j["all_pass"] = all_pass;
    pflab::atomic_write(out_path(cfg, "sweep.json"), j.dump(2) + "\n");
    std::cout << "sweep: " << ladder.size() << " rungs -> "
              << (all_pass ? "pass" : "FAIL") << " (sweep.json)\n";
    return all_pass ? kExitPass : kExitCheckFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quasilinear elliptic Dirichlet lab: radial and 2D solvers plus "
                 "concavity / minimum-principle / curvature-bound verification"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print help");  // frees -h / --h for the grid spacing

    std::string config_path, dump_path;
    // flag name -> config key; values applied over the config file
    std::vector<std::pair<std::string, std::string>> overrides;
    auto add_option = [&](CLI::App* cmd, const std::string& flag, const std::string& key,
                          const std::string& desc) {
        cmd->add_option_function<std::string>(
            flag, [&overrides, key](const std::string& v) { overrides.emplace_back(key, v); },
            desc);
    };

    const char* modes[] = {"radial", "solve2d", "verify", "bounds", "sweep"};
    const char* descs[] = {
        "shoot the radial profile on a ball and check profile convexity",
        "solve the 2D Dirichlet problem on a clipped grid",
        "solve and run the full verification report",
        "tabulate the curvature lower bounds over alpha",
        "repeat verification over a grid-spacing ladder",
    };
    std::map<std::string, CLI::App*> cmds;
    for (int m = 0; m < 5; ++m) {
        CLI::App* cmd = app.add_subcommand(modes[m], descs[m]);
        cmd->set_help_flag("--help", "print help");
        cmd->add_option("--config", config_path, "flat key=value config file");
        cmd->add_option("--dump-config", dump_path, "write the effective config and continue");
        add_option(cmd, "--problem", "problem", "euclidean | lorentzian | poisson | custom");
        add_option(cmd, "--g", "g", "custom g descriptor (one|const:c|poly:..|exp:a,b)");
        add_option(cmd, "--f", "f", "custom f descriptor");
        add_option(cmd, "--n", "n", "spatial dimension (radial any, 2d modes need 2)");
        add_option(cmd, "--domain", "domain", "disk:R=1 | ellipse:a=2,b=1 | blob:R=1,eps=0.05,k=3");
        add_option(cmd, "--h", "h", "grid spacing");
        add_option(cmd, "--h-r", "h_r", "radial step (default R/2000)");
        add_option(cmd, "--R", "R", "radial ball radius");
        add_option(cmd, "--beta", "beta", "comma list of P-function exponents");
        add_option(cmd, "--lambda-schedule", "lambda_schedule", "load continuation schedule");
        add_option(cmd, "--tol-shoot", "tol_shoot", "shooting tolerance on |phi(R)|");
        add_option(cmd, "--tol-newton", "tol_newton", "Newton max-norm residual tolerance");
        add_option(cmd, "--tol-linear", "tol_linear", "inner linear solve relative tolerance");
        add_option(cmd, "--boundary-samples", "boundary_samples", "boundary sample count");
        add_option(cmd, "--out-dir", "out_dir", "artifact directory");
        add_option(cmd, "--alpha", "alpha", "bounds mode: single alpha");
        add_option(cmd, "--alpha-min", "alpha_min", "bounds mode sweep start");
        add_option(cmd, "--alpha-max", "alpha_max", "bounds mode sweep end");
        add_option(cmd, "--alpha-count", "alpha_count", "bounds mode sweep size");
        add_option(cmd, "--probe-existence", "probe_existence",
                   "bounds mode: locate the radial existence edge (true/false)");
        add_option(cmd, "--h-ladder", "h_ladder", "sweep mode: comma list of spacings");
        cmds[modes[m]] = cmd;
    }

    CLI11_PARSE(app, argc, argv);

    RunConfig cfg;
    try {
        if (!config_path.empty()) {
            cfg = pflab::parse_config(pflab::read_file(config_path));
        }
        for (const auto& [key, value] : overrides) {
            pflab::apply_key(cfg, key, value);
        }
        for (const auto& [name, cmd] : cmds) {
            if (cmd->parsed()) cfg.mode = name;
        }
        pflab::validate_config(cfg);
        if (!dump_path.empty()) {
            pflab::atomic_write(dump_path, pflab::dump_config(cfg));
        }
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }

    try {
        if (cfg.mode == "radial") return run_radial(cfg);
        if (cfg.mode == "solve2d") return run_solve2d(cfg);
        if (cfg.mode == "verify") return run_verify(cfg);
        if (cfg.mode == "bounds") return run_bounds(cfg);
        if (cfg.mode == "sweep") return run_sweep(cfg);
        std::cerr << "config error: no mode\n";
        return kExitConfigError;
    } catch (const pflab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const pflab::GridError& e) {
        // grid spacing incompatible with the domain: a configuration problem
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        write_failure(cfg, "solver-failure", e.what());
        return kExitSolverFailure;
    }
}
