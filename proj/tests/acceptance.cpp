// Acceptance suite: one line per criterion, nonzero exit on any failure.
//
// C4's middle clause (curvature lower bound for the gradient-limited disk) is
// expected to fail: the bound's proof routes through the minimum principle,
// whose hypothesis the gradient-limited coefficients violate (G' > 0), and
// the measured P-function minimum indeed sits at the interior critical point.
// The suite reports the measured margins rather than masking the outcome.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "pflab/fields.hpp"
#include "pflab/radial.hpp"
#include "pflab/solver2d.hpp"
#include "pflab/verify.hpp"

using namespace pflab;

namespace {

struct Outcome {
    std::string name;
    bool pass = true;
    std::string detail;
    double seconds = 0.0;
};

std::vector<Outcome> g_outcomes;

class Criterion {
public:
    explicit Criterion(std::string name) : start_(clock_::now()) {
        out_.name = std::move(name);
    }
    void require(bool ok, const std::string& what) {
        if (!ok) {
            out_.pass = false;
            if (!out_.detail.empty()) out_.detail += "; ";
            out_.detail += "FAILED: " + what;
        }
    }
    void note(const std::string& what) {
        if (!out_.detail.empty()) out_.detail += "; ";
        out_.detail += what;
    }
    ~Criterion() {
        out_.seconds = std::chrono::duration<double>(clock_::now() - start_).count();
        std::printf("[%s] %s (%.1f s)%s%s\n", out_.pass ? "PASS" : "FAIL", out_.name.c_str(),
                    out_.seconds, out_.detail.empty() ? "" : " -- ", out_.detail.c_str());
        std::fflush(stdout);
        g_outcomes.push_back(out_);
    }

private:
    using clock_ = std::chrono::steady_clock;
    Outcome out_;
    clock_::time_point start_;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

double bisect_root(double (*f)(double, double), double alpha, double lo, double hi) {
    double flo = f(lo, alpha);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid, alpha);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double cubic_up(double q, double alpha) { return q * q * q + q - alpha; }
double cubic_down(double q, double alpha) { return q * q * q - q + alpha; }

double field_min(const Field2D& f) {
    double m = 0.0;
    for (double v : f.values) m = std::min(m, v);
    return m;
}

Field2D solve_warm(const ProblemSpec& spec, const ConvexDomain& dom, double h,
                   const Field2D* coarse) {
    auto grid = std::make_shared<ClippedGrid>(make_grid(dom, h));
    SolveOptions opts;
    if (coarse && coarse->converged()) {
        opts.initial_guess = prolong(*coarse, *grid);
        opts.lambda_schedule = {1.0};
    }
    return newton_solve(spec, grid, opts);
}

// pointwise checks shared by every converged field: the Hessian-gradient
// combination and the gradient ceiling
void pointwise_checks(Criterion& c, const std::string& tag, const ConvexDomain& dom,
                      const Field2D& field) {
    const DerivedFields derived = derive_fields(field, dom, 512);
    const PsResidual ps = ps_inequality_residual(derived);
    c.require(ps.min_value >= -1e-6 * ps.scale,
              tag + ": Hessian-gradient residual " + fmt(ps.min_value) + " < -1e-6*scale");
    const GradientCeilingCheck ceil = check_gradient_ceiling(derived);
    c.require(ceil.pass, tag + ": gradient ceiling margin " + fmt(ceil.min_margin));
}

} // namespace

int main() {
    std::printf("acceptance suite\n");

    // shared solves, reused across criteria
    const ProblemSpec pois = ProblemSpec::poisson();
    const ProblemSpec euc = ProblemSpec::euclidean();
    const ProblemSpec lor = ProblemSpec::lorentzian();
    const ConvexDomain disk1 = ConvexDomain::disk(1.0);
    const ConvexDomain disk03 = ConvexDomain::disk(0.3);
    const ConvexDomain ell = ConvexDomain::ellipse(2.0, 1.0);

    Field2D pois_64, pois_128, euc_32, euc_64, euc_128, ell_64, ell_128, lor_32;

    {
        Criterion c("C1 cubic bound formulas vs bisection oracles");
        double max_res_e = 0.0, max_diff_e = 0.0;
        for (int k = 1; k <= 1000; ++k) {
            const double alpha = 10.0 * k / 1000.0;
            const double q = std::sqrt(lower_bound_euclid(alpha));
            max_res_e = std::max(max_res_e, std::abs(cubic_up(q, alpha)));
            const double oracle = bisect_root(cubic_up, alpha, 0.0, 3.0);
            max_diff_e = std::max(max_diff_e, std::abs(q - oracle));
        }
        c.require(max_res_e <= 1e-10, "unbounded-family cubic residual " + fmt(max_res_e));
        c.require(max_diff_e <= 1e-10, "unbounded-family oracle gap " + fmt(max_diff_e));

        const double amax = lorentz_alpha_max();
        double max_res_l = 0.0, max_diff_l = 0.0;
        for (int k = 1; k <= 1000; ++k) {
            const double alpha = amax * k / 1000.0;
            const double q = std::sqrt(lower_bound_lorentz(alpha));
            max_res_l = std::max(max_res_l, std::abs(cubic_down(q, alpha)));
            if (alpha <= 0.95 * amax) {  // bisection loses meaning at the double root
                const double oracle =
                    bisect_root(cubic_down, alpha, 0.0, 1.0 / std::sqrt(3.0));
                max_diff_l = std::max(max_diff_l, std::abs(q - oracle));
            }
        }
        c.require(max_res_l <= 1e-10, "limited-family cubic residual " + fmt(max_res_l));
        c.require(max_diff_l <= 1e-10, "limited-family oracle gap " + fmt(max_diff_l));
        c.note("residuals " + fmt(max_res_e) + " / " + fmt(max_res_l));
    }

    {
        Criterion c("C2 linear-source regression and disk grid convergence");
        const ShootOutcome shot = shoot_radial(pois, 2, 1.0);
        c.require(shot.converged(), "linear-source shoot did not converge");
        if (shot.converged()) {
            c.require(std::abs(shot.solution->phi0 + 0.25) <= 1e-8,
                      "phi0 = " + fmt(shot.solution->phi0));
        }

        pois_64 = solve_warm(pois, disk1, 1.0 / 64, nullptr);
        c.require(pois_64.converged(), "linear-source 2D solve failed");
        const double umin64 = field_min(pois_64);
        c.require(std::abs(umin64 + 0.25) <= 5e-4, "u_min(1/64) = " + fmt(umin64));
        pois_128 = solve_warm(pois, disk1, 1.0 / 128, &pois_64);
        c.require(pois_128.converged(), "linear-source 1/128 solve failed");

        // the linear-source solution is quadratic and nodal-exact, so the
        // convergence band is measured on the curvature-flux disk against the
        // shooting reference
        const ShootOutcome eshot = shoot_radial(euc, 2, 1.0);
        c.require(eshot.converged(), "curvature-flux shoot failed");
        euc_32 = solve_warm(euc, disk1, 1.0 / 32, nullptr);
        euc_64 = solve_warm(euc, disk1, 1.0 / 64, &euc_32);
        euc_128 = solve_warm(euc, disk1, 1.0 / 128, &euc_64);
        c.require(euc_32.converged() && euc_64.converged() && euc_128.converged(),
                  "curvature-flux ladder solve failed");
        if (eshot.converged() && euc_128.converged()) {
            const double ref = eshot.solution->phi0;
            const double e32 = std::abs(field_min(euc_32) - ref);
            const double e64 = std::abs(field_min(euc_64) - ref);
            const double e128 = std::abs(field_min(euc_128) - ref);
            const double f1 = e32 / e64, f2 = e64 / e128;
            c.require(f1 >= 3.2 && f1 <= 4.8, "halving factor (1/32->1/64) " + fmt(f1));
            c.require(f2 >= 3.2 && f2 <= 4.8, "halving factor (1/64->1/128) " + fmt(f2));
            c.note("u_min errors " + fmt(e32) + " -> " + fmt(e64) + " -> " + fmt(e128));
        }
    }

    {
        Criterion c("C3 unit-disk a-priori sandwich (unbounded family)");
        const ShootOutcome shot = shoot_radial(euc, 2, 1.0);
        c.require(shot.converged(), "shoot failed");
        if (shot.converged()) {
            const double depth = -shot.solution->phi0;
            const double bound = lower_bound_euclid(0.5);
            c.require(std::abs(bound - 0.17970) <= 5e-4,
                      "bound(0.5) = " + fmt(bound) + " far from 0.17970");
            c.require(depth >= 0.17970 * (1.0 - 1e-3), "-u_min = " + fmt(depth));
            c.require(depth >= bound * (1.0 - 1e-3), "-u_min below the computed bound");
            c.require(depth <= 0.5 * (1.0 + 1e-3), "-u_min above d^2/2");
            c.note("-u_min = " + fmt(depth) + ", bound = " + fmt(bound) + ", ceiling 0.5");
        }
    }

    {
        Criterion c("C4 gradient-limited disk(0.3): existence, bounds");
        const ShootOutcome shot = shoot_radial(lor, 2, 0.3);
        c.require(shot.converged(), "spacelike shoot failed");
        if (shot.converged()) {
            const double depth = -shot.solution->phi0;
            c.require(shot.solution->max_abs_phi_prime < 1.0,
                      "max|phi'| = " + fmt(shot.solution->max_abs_phi_prime));
            const double bound = lower_bound_lorentz(0.15);
            // expected honest failure: the minimum principle behind this bound
            // does not hold for the gradient-limited coefficients
            c.require(depth >= bound * (1.0 - 1e-3),
                      "-u_min = " + fmt(depth) + " < bound*(1-1e-3) = " +
                          fmt(bound * (1.0 - 1e-3)) +
                          " [expected: hypothesis chain fails for this family; "
                          "see min-principle verdicts in C8]");
            c.require(depth <= 0.045 * (1.0 + 1e-3), "-u_min above d^2/2 = 0.045");
            lor_32 = solve_warm(lor, disk03, 0.3 / 32, nullptr);
            if (lor_32.converged()) {
                c.note("2D cross-check u_min = " + fmt(field_min(lor_32)) +
                       " vs radial " + fmt(shot.solution->phi0));
            }
        }
    }

    VerifyOptions ell_opts;
    ell_opts.h = 1.0 / 64;
    ell_opts.betas = {1.0, 1.5, 2.0};
    ell_opts.boundary_samples = 1024;
    VerificationReport ell_report;

    {
        Criterion c("C5 concavity of the transformed solution on ellipse(2,1)");
        ell_64 = solve_warm(euc, ell, 1.0 / 64, nullptr);
        c.require(ell_64.converged(), "ellipse 1/64 solve failed");
        if (ell_64.converged()) {
            const ResidualStats none{};
            ell_report = assess_field(euc, ell, ell_64, ell_opts, &none);
            const auto& cc = ell_report.concavity;
            c.require(cc.pass, "max core eigenvalue " + fmt(cc.max_core_eigenvalue) +
                                   " vs threshold " + fmt(cc.threshold));
            c.require(cc.rank_constant,
                      "eigenvalue-sign census not constant: " + fmt(cc.full_rank_count) +
                          "/" + fmt(cc.core_count));
            c.note("max core eig " + fmt(cc.max_core_eigenvalue) + ", census " +
                   fmt(cc.full_rank_count) + "/" + fmt(cc.core_count));
        }
    }

    {
        Criterion c("C6 minimum principle on ellipse(2,1), beta in {1, 1.5, 2}");
        c.require(ell_64.converged(), "no converged ellipse field");
        if (ell_64.converged()) {
            for (const auto& mp : ell_report.min_principle) {
                c.require(mp.pass, "beta = " + fmt(mp.beta) + ": interior min " +
                                       fmt(mp.interior_min) + " < boundary min " +
                                       fmt(mp.boundary_min) + " - tol");
                c.require(mp.nonconstant,
                          "beta = " + fmt(mp.beta) + ": P-function range " + fmt(mp.range));
                c.require(mp.hypothesis.verdict == HypothesisVerdict::Pass,
                          "beta = " + fmt(mp.beta) + ": hypothesis verdict not pass");
            }
            c.note("margins " + fmt(ell_report.min_principle[0].margin) + " / " +
                   fmt(ell_report.min_principle[1].margin) + " / " +
                   fmt(ell_report.min_principle[2].margin));
        }
    }

    {
        Criterion c("C7 identity checks and decay orders on converged fields");
        ell_128 = solve_warm(euc, ell, 1.0 / 128, &ell_64);
        c.require(ell_128.converged(), "ellipse 1/128 solve failed");
        if (ell_64.converged() && ell_128.converged()) {
            const ResidualStats coarse = residual_stats(euc, ell, ell_64, 1024);
            VerifyOptions fine_opts = ell_opts;
            fine_opts.h = 1.0 / 128;
            fine_opts.radial_crosscheck = false;
            const VerificationReport fine = assess_field(euc, ell, ell_128, fine_opts, &coarse);
            c.require(fine.boundary_identity_order >= 0.9,
                      "boundary-identity decay order " + fmt(fine.boundary_identity_order));
            c.require(fine.v_residual_order >= 1.3,
                      "transformed-equation decay order " + fmt(fine.v_residual_order));
            c.note("orders: boundary identity " + fmt(fine.boundary_identity_order) +
                   ", transformed equation " + fmt(fine.v_residual_order));
        }
        pointwise_checks(c, "poisson disk 1/64", disk1, pois_64);
        pointwise_checks(c, "poisson disk 1/128", disk1, pois_128);
        pointwise_checks(c, "curvature-flux disk 1/64", disk1, euc_64);
        pointwise_checks(c, "curvature-flux disk 1/128", disk1, euc_128);
        pointwise_checks(c, "ellipse 1/64", ell, ell_64);
        pointwise_checks(c, "ellipse 1/128", ell, ell_128);
        if (lor_32.converged()) {
            pointwise_checks(c, "gradient-limited disk", disk03, lor_32);
        }
    }

    {
        Criterion c("C8 hypothesis ledger and empirical P-function minimum");
        const auto us = default_u_samples(-0.5, 256);
        const auto se = default_s_samples(euc, 256, 10.0);
        const auto sl = default_s_samples(lor, 256, 1.0);
        for (int k = 0; k <= 10; ++k) {
            const double beta = 1.0 + k / 10.0;
            const auto he = check_min_principle_hypothesis(euc, beta, us, se);
            c.require(he.verdict == HypothesisVerdict::Pass,
                      "unbounded family beta = " + fmt(beta) + " not pass");
            const auto hl = check_min_principle_hypothesis(lor, beta, us, sl);
            c.require(hl.verdict == HypothesisVerdict::Fail,
                      "limited family beta = " + fmt(beta) + " not fail");
        }
        // the verification report carries verdicts + the measured minimum location
        VerifyOptions lopts;
        lopts.h = 0.3 / 32;
        lopts.betas = {1.0, 1.5, 2.0};
        lopts.boundary_samples = 512;
        const VerificationReport lrep = run_verification(lor, disk03, lopts);
        c.require(lrep.solver_converged, "gradient-limited verify solve failed");
        if (lrep.solver_converged) {
            const std::string json = report_to_json(lrep);
            c.require(json.find("hypothesis_verdict") != std::string::npos,
                      "report lacks hypothesis verdicts");
            c.require(json.find("phi_min_location") != std::string::npos,
                      "report lacks the P-function minimum location");
            const auto& mp = lrep.min_principle.front();
            c.note("empirical P-function minimum at (" + fmt(mp.interior_argmin.x) + ", " +
                   fmt(mp.interior_argmin.y) + "), margin " + fmt(mp.margin) +
                   (mp.pass ? " (boundary minimum holds)" : " (interior minimum: conclusion fails)"));
        }
    }

    {
        Criterion c("C9 gradient-limited validity map");
        bool threw = false;
        try {
            lower_bound_lorentz(0.5);  // unit disk: alpha = 0.5 > 2/(3 sqrt 3)
        } catch (const ValidityRegionError&) {
            threw = true;
        }
        c.require(threw, "alpha = 0.5 did not raise a validity-region error");

        const ShootOutcome big = shoot_radial(lor, 2, 5.0, 1e-8);
        c.require(!big.converged() &&
                      big.status == ShootOutcome::Status::SpacelikeLimited,
                  "R = 5 did not report a spacelike existence failure");

        // empirical existence edge vs the bound-formula validity edge
        auto solvable = [&](double R) { return shoot_radial(lor, 2, R, 1e-8).converged(); };
        double lo = 0.1, hi = 0.2;
        while (solvable(hi) && hi < 64.0) {
            lo = hi;
            hi *= 2.0;
        }
        for (int it = 0; it < 30 && hi - lo > 1e-3; ++it) {
            const double mid = 0.5 * (lo + hi);
            (solvable(mid) ? lo : hi) = mid;
        }
        const double edge = 0.5 * (lo + hi);
        const double validity_R = 2.0 * lorentz_alpha_max();
        c.require(edge > 1.0 && edge < 3.0, "existence edge " + fmt(edge) + " implausible");
        c.note("existence edge R* = " + fmt(edge) + " vs bound-validity disk R = " +
               fmt(validity_R) + " (side by side)");
    }

    int failures = 0;
    for (const auto& o : g_outcomes) {
        if (!o.pass) ++failures;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(g_outcomes.size()) - failures,
                g_outcomes.size());
    if (failures) {
        std::printf("note: C4's bound clause is a documented spec-level contradiction "
                    "(see the min-principle hypothesis verdicts); all other criteria "
                    "are expected green\n");
    }
    return failures;
}
