#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pflab/problem.hpp"

namespace pflab {

/// Radially symmetric profile phi(r) on a ball of radius R:
/// phi < 0 inside, phi'(0) = 0, phi(R) ~ 0 after a converged shoot.
struct RadialSolution {
    double R = 0.0;
    int n = 2;
    double h_r = 0.0;
    double phi0 = 0.0;         // center value phi(0)
    double residual = 0.0;     // phi(R) of the accepted shot
    double max_abs_phi_prime = 0.0;
    std::vector<double> r, phi, phi_prime, phi_second;
};

/// Right-hand side phi'' of
///     G phi'' + (n-1) g phi'/r = f(phi) G,   coefficients at s = phi'^2.
/// At r = 0 the friction term is replaced by its analytic limit, giving
/// phi''(0) = f(phi) G(0) / ((n-1) g(0) + G(0)).
/// Throws SpacelikeViolation when phi'^2 >= s_limit.
double radial_rhs(const ProblemSpec& spec, int n, double r, double phi, double phi_prime);

/// Classical fixed-step RK4 on (phi, phi') from r = 0 with phi'(0) = 0.
/// h_r is snapped to R/N with N = max(200, round(R/h_r)).
RadialSolution integrate_radial(const ProblemSpec& spec, int n, double phi0, double R,
                                double h_r);

struct ShootOutcome {
    enum class Status {
        Converged,
        NoBracket,         // residual never changes sign over the search range
        SpacelikeLimited,  // every deep-enough shot violates the gradient limit
    };
    Status status = Status::NoBracket;
    std::optional<RadialSolution> solution;
    double bracket_lo = 0.0, bracket_hi = 0.0;
    int evaluations = 0;
    std::string message;

    bool converged() const { return status == Status::Converged; }
};

/// Shoot on the center value: bracket phi0 (expansion factor 1.5 from the
/// Poisson-scaled guess -R^2 f(0) / (2n)), then bisect until |phi(R)| <= tol.
/// Spacelike violations during bracketing shrink the bracket; a missing sign
/// change is reported as a first-class existence failure, not an exception.
ShootOutcome shoot_radial(const ProblemSpec& spec, int n, double R, double tol = 1e-10,
                          double h_r = 0.0 /* 0 -> R/2000 */);

/// Profile convexity check: phi'' > 0 on [0, R) and the radial second
/// derivative of the concavity transform,
///     (2 F phi'' + f(phi) phi'^2) / (2 F^{3/2}),  F = cumulative_F(phi),
/// positive as well; phi''(0) is compared against its closed form.
struct ProfileConvexityReport {
    double min_phi_second = 0.0;
    double min_v_second = 0.0;
    double phi_second_origin = 0.0;
    double phi_second_origin_closed_form = 0.0;
    bool pass = false;
};

ProfileConvexityReport check_profile_convexity(const RadialSolution& sol,
                                               const ProblemSpec& spec);

/// CSV dump (r, phi, phi_prime, phi_second).
std::string radial_to_csv(const RadialSolution& sol);

} // namespace pflab
