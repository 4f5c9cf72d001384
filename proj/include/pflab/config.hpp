#pragma once

#include <string>
#include <vector>

#include "pflab/geometry.hpp"
#include "pflab/problem.hpp"

namespace pflab {

/// One run of the command-line front end. Everything is a flat key-value
/// record; flags override file entries of the same key.
struct RunConfig {
    std::string mode;  // radial | solve2d | verify | bounds | sweep

    std::string problem = "euclidean";  // euclidean | lorentzian | poisson | custom
    std::string g_desc;                 // custom g: one | const:c | poly:c0,c1,.. | exp:a,b
    std::string f_desc;                 // custom f: same grammar
    int n = 2;

    std::string domain = "disk:R=1";  // disk:R=... | ellipse:a=..,b=.. | blob:R=..,eps=..,k=..
    double h = 1.0 / 64.0;
    double h_r = 0.0;  // 0 -> R/2000
    double R = 1.0;    // radial-mode ball radius

    std::vector<double> beta = {1.0, 1.5, 2.0};
    std::vector<double> lambda_schedule = {0.25, 0.5, 0.75, 0.9, 1.0};

    double tol_shoot = 1e-10;
    double tol_newton = 1e-10;
    double tol_linear = 1e-10;
    int boundary_samples = 1024;

    std::string out_dir = "out";

    // bounds mode
    bool alpha_set = false;
    double alpha = 0.5;
    double alpha_min = 0.05, alpha_max = 0.75;
    int alpha_count = 15;
    bool probe_existence = false;

    // sweep mode
    std::vector<double> h_ladder;
};

/// key=value text form, sorted keys; parse_config(dump_config(c)) == c.
std::string dump_config(const RunConfig& cfg);

/// Parses the flat key-value format ('#' comments, blank lines ignored).
RunConfig parse_config(const std::string& text);

/// Applies one key (shared by the file parser and the flag layer).
/// Unknown keys throw ConfigError.
void apply_key(RunConfig& cfg, const std::string& key, const std::string& value);

/// Mode-required fields present, tolerances positive. Throws ConfigError.
void validate_config(const RunConfig& cfg);

ProblemSpec build_problem(const RunConfig& cfg);
ConvexDomain build_domain(const RunConfig& cfg);

std::vector<double> parse_double_list(const std::string& text);

} // namespace pflab
