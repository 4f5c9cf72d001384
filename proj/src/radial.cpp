#include "pflab/radial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace pflab {

namespace {

// Shooting trajectories may overshoot zero before r = R; the source
// coefficient is frozen at u = 0 beyond (only the sign of phi(R) matters
// there, and the converged profile stays negative).
double f_clamped(const ProblemSpec& spec, double phi) {
    return spec.f(std::min(phi, 0.0));
}

struct State {
    double phi, w;  // w = phi'
};

State rhs_pair(const ProblemSpec& spec, int n, double r, const State& y) {
    const double s = y.w * y.w;
    if (s >= spec.s_limit) {
        std::ostringstream msg;
        msg << "gradient limit reached at r = " << r << " (phi'^2 = " << s << ")";
        throw SpacelikeViolation(msg.str(), r);
    }
    const double fv = f_clamped(spec, y.phi);
    if (r == 0.0) {
        const double g0 = spec.g(0.0);
        const double G0 = spec.G(0.0);
        return {y.w, fv * G0 / ((n - 1) * g0 + G0)};
    }
    const double g = spec.g(s);
    const double G = spec.G(s);
    return {y.w, fv - (n - 1) * (g / G) * y.w / r};
}

// One classic RK4 step of size h from r.
State rk4_step(const ProblemSpec& spec, int n, double r, const State& y, double h) {
    const State k1 = rhs_pair(spec, n, r, y);
    const State k2 = rhs_pair(spec, n, r + 0.5 * h, {y.phi + 0.5 * h * k1.phi, y.w + 0.5 * h * k1.w});
    const State k3 = rhs_pair(spec, n, r + 0.5 * h, {y.phi + 0.5 * h * k2.phi, y.w + 0.5 * h * k2.w});
    const State k4 = rhs_pair(spec, n, r + h, {y.phi + h * k3.phi, y.w + h * k3.w});
    return {y.phi + h / 6.0 * (k1.phi + 2.0 * k2.phi + 2.0 * k3.phi + k4.phi),
            y.w + h / 6.0 * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w)};
}

// phi(R) for a given start value; used by the shooting bracket/bisection.
double terminal_value(const ProblemSpec& spec, int n, double phi0, double R, double h_r) {
    const long N = std::max(200L, std::lround(R / h_r));
    const double h = R / static_cast<double>(N);
    State y{phi0, 0.0};
    double r = 0.0;
    for (long k = 0; k < N; ++k) {
        y = rk4_step(spec, n, r, y, h);
        r += h;
    }
    return y.phi;
}

} // namespace

double radial_rhs(const ProblemSpec& spec, int n, double r, double phi, double phi_prime) {
    if (n < 2) throw DomainError("radial problem requires n >= 2");
    return rhs_pair(spec, n, r, {phi, phi_prime}).w;
}

RadialSolution integrate_radial(const ProblemSpec& spec, int n, double phi0, double R,
                                double h_r) {
    if (n < 2) throw DomainError("radial problem requires n >= 2");
    if (!(R > 0.0)) throw DomainError("ball radius must be positive");
    if (!(phi0 < 0.0)) throw DomainError("center value phi0 must be negative");
    if (!(h_r > 0.0)) h_r = R / 2000.0;
    if (h_r > R / 200.0 * (1.0 + 1e-12)) {
        throw DomainError("radial step too coarse (need h_r <= R/200)");
    }

    const long N = std::max(200L, std::lround(R / h_r));
    const double h = R / static_cast<double>(N);

    RadialSolution sol;
    sol.R = R;
    sol.n = n;
    sol.h_r = h;
    sol.phi0 = phi0;
    sol.r.resize(N + 1);
    sol.phi.resize(N + 1);
    sol.phi_prime.resize(N + 1);
    sol.phi_second.resize(N + 1);

    State y{phi0, 0.0};
    double r = 0.0;
    for (long k = 0; k <= N; ++k) {
        sol.r[k] = r;
        sol.phi[k] = y.phi;
        sol.phi_prime[k] = y.w;
        sol.phi_second[k] = rhs_pair(spec, n, r, y).w;
        sol.max_abs_phi_prime = std::max(sol.max_abs_phi_prime, std::abs(y.w));
        if (k < N) {
            y = rk4_step(spec, n, r, y, h);
            r += h;
        }
    }
    sol.residual = sol.phi.back();
    return sol;
}

ShootOutcome shoot_radial(const ProblemSpec& spec, int n, double R, double tol, double h_r) {
    ShootOutcome out;
    if (!(h_r > 0.0)) h_r = R / 2000.0;

    enum class Class { Pos, Neg, Fail };
    struct Eval {
        Class cls;
        double res;
    };
    auto classify = [&](double phi0) -> Eval {
        ++out.evaluations;
        try {
            const double res = terminal_value(spec, n, phi0, R, h_r);
            return {res > 0.0 ? Class::Pos : Class::Neg, res};
        } catch (const SpacelikeViolation&) {
            return {Class::Fail, 0.0};
        }
    };

    // Bracket around the Poisson-scaled guess. The terminal value is an
    // increasing function of phi0 (slope 1 for constant f), so "too shallow"
    // shots land positive and "too deep" shots land negative or spacelike.
    const double guess = -R * R * spec.f(0.0) / (2.0 * n);
    double lo = 0.0, hi = 0.0;
    double res_hi = 0.0;
    bool have_lo = false, have_hi = false, saw_neg = false;
    double res_lo = 0.0;

    Eval e = classify(guess);
    if (e.cls == Class::Pos) {
        hi = guess;
        res_hi = e.res;
        have_hi = true;
        double p = guess * 1.5;
        for (int it = 0; it < 200 && !have_lo; ++it, p *= 1.5) {
            Eval d = classify(p);
            if (d.cls == Class::Pos) {
                hi = p;
                res_hi = d.res;
            } else {
                lo = p;
                have_lo = true;
                if (d.cls == Class::Neg) {
                    saw_neg = true;
                    res_lo = d.res;
                }
            }
        }
        if (!have_lo) {
            out.status = ShootOutcome::Status::NoBracket;
            out.message = "terminal value stayed positive down to phi0 = " + std::to_string(p);
            return out;
        }
    } else {
        lo = guess;
        have_lo = true;
        saw_neg = (e.cls == Class::Neg);
        if (saw_neg) res_lo = e.res;
        bool all_fail = (e.cls == Class::Fail);
        double p = guess / 1.5;
        for (int it = 0; it < 600 && !have_hi; ++it, p /= 1.5) {
            Eval d = classify(p);
            all_fail = all_fail && (d.cls == Class::Fail);
            if (d.cls == Class::Pos) {
                hi = p;
                res_hi = d.res;
                have_hi = true;
            } else {
                lo = p;
                if (d.cls == Class::Neg) {
                    saw_neg = true;
                    res_lo = d.res;
                }
            }
            if (std::abs(p) < 1e-300) break;
        }
        if (!have_hi) {
            out.bracket_lo = lo;
            out.bracket_hi = 0.0;
            if (all_fail) {
                out.status = ShootOutcome::Status::SpacelikeLimited;
                std::ostringstream msg;
                msg << "every shot violates the gradient limit before r = " << R
                    << " (no spacelike profile spans the ball)";
                out.message = msg.str();
            } else {
                out.status = ShootOutcome::Status::NoBracket;
                out.message = "terminal value never became positive near phi0 = 0";
            }
            return out;
        }
    }

    if (saw_neg && !(res_lo <= res_hi)) {
        out.status = ShootOutcome::Status::NoBracket;
        out.message = "shooting monotonicity violated: terminal value not increasing in phi0";
        out.bracket_lo = lo;
        out.bracket_hi = hi;
        return out;
    }

    double accepted = 0.0;
    bool found = false;
    for (int it = 0; it < 300 && !found; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;  // bracket exhausted in double precision
        Eval d = classify(mid);
        if (d.cls != Class::Fail && std::abs(d.res) <= tol) {
            accepted = mid;
            found = true;
            break;
        }
        if (d.cls == Class::Pos) {
            hi = mid;
        } else {
            lo = mid;
            saw_neg = saw_neg || (d.cls == Class::Neg);
        }
    }

    out.bracket_lo = lo;
    out.bracket_hi = hi;
    if (!found) {
        if (!saw_neg) {
            out.status = ShootOutcome::Status::SpacelikeLimited;
            std::ostringstream msg;
            msg << "no spacelike profile reaches r = " << R
                << ": every shot below phi0 = " << hi
                << " violates the gradient limit while shallower shots overshoot";
            out.message = msg.str();
        } else {
            out.status = ShootOutcome::Status::NoBracket;
            out.message = "bisection exhausted without meeting the shooting tolerance";
        }
        return out;
    }

    RadialSolution sol = integrate_radial(spec, n, accepted, R, h_r);
    // converged-profile sanity: phi' > 0 away from the center
    for (std::size_t k = 1; k < sol.phi_prime.size(); ++k) {
        if (!(sol.phi_prime[k] > 0.0)) {
            out.status = ShootOutcome::Status::NoBracket;
            out.message = "converged profile lost monotonicity (phi' <= 0 at r = " +
                          std::to_string(sol.r[k]) + ")";
            return out;
        }
    }
    out.status = ShootOutcome::Status::Converged;
    out.solution = std::move(sol);
    return out;
}

ProfileConvexityReport check_profile_convexity(const RadialSolution& sol,
                                               const ProblemSpec& spec) {
    ProfileConvexityReport rep;
    rep.min_phi_second = std::numeric_limits<double>::infinity();
    rep.min_v_second = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < sol.phi.size(); ++k) {
        rep.min_phi_second = std::min(rep.min_phi_second, sol.phi_second[k]);
        // transform profile second derivative; the last node has F -> 0, skip it
        if (sol.phi[k] < -1e-8) {
            const double F = cumulative_F(spec, sol.phi[k]);
            const double fv = spec.f(sol.phi[k]);
            const double w = sol.phi_prime[k];
            const double v2 = (2.0 * F * sol.phi_second[k] + fv * w * w) /
                              (2.0 * F * std::sqrt(F));
            rep.min_v_second = std::min(rep.min_v_second, v2);
        }
    }
    rep.phi_second_origin = sol.phi_second.front();
    const double g0 = spec.g(0.0);
    const double G0 = spec.G(0.0);
    rep.phi_second_origin_closed_form =
        spec.f(sol.phi0) * G0 / ((sol.n - 1) * g0 + G0);
    rep.pass = rep.min_phi_second > 0.0 && rep.min_v_second > 0.0 &&
               std::abs(rep.phi_second_origin - rep.phi_second_origin_closed_form) <= 1e-8;
    return rep;
}

std::string radial_to_csv(const RadialSolution& sol) {
    std::string out = "r,phi,phi_prime,phi_second\n";
    char line[160];
    for (std::size_t k = 0; k < sol.r.size(); ++k) {
        std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g\n", sol.r[k], sol.phi[k],
                      sol.phi_prime[k], sol.phi_second[k]);
        out += line;
    }
    return out;
}

} // namespace pflab
