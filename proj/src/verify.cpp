#include "pflab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

namespace pflab {

using ordered_json = nlohmann::ordered_json;

double lower_bound_euclid(double alpha) {
    if (!(alpha > 0.0)) throw DomainError("curvature bound requires alpha > 0");
    const double rad = std::sqrt(0.25 * alpha * alpha + 1.0 / 27.0);
    const double A = 0.5 * alpha + rad;
    const double B = -1.0 / (27.0 * A);  // stable form of alpha/2 - rad
    const double q = std::cbrt(A) + std::cbrt(B);
    return q * q;
}

double lorentz_alpha_max() { return 2.0 / (3.0 * std::sqrt(3.0)); }

double lower_bound_lorentz(double alpha) {
    if (!(alpha > 0.0)) throw DomainError("curvature bound requires alpha > 0");
    if (alpha > lorentz_alpha_max() * (1.0 + 1e-14)) {
        std::ostringstream msg;
        msg << "alpha = " << alpha << " outside the validity region (0, "
            << lorentz_alpha_max() << "] of the gradient-limited bound";
        throw ValidityRegionError(msg.str(), alpha);
    }
    const double arg = std::max(-1.0, -1.5 * std::sqrt(3.0) * alpha);
    const double q = 2.0 / std::sqrt(3.0) *
                     std::cos(std::acos(arg) / 3.0 - 2.0 * std::numbers::pi / 3.0);
    return q * q;
}

ConcavityCheck check_concavity(const Field2D& field, const DerivedFields& derived,
                               const VField& vf) {
    ConcavityCheck out;
    const double h = field.grid->h;
    out.threshold = -h * h;
    double umax = 0.0;
    for (double u : field.values) umax = std::max(umax, std::abs(u));
    if (umax < 1e-14) {
        out.degenerate = true;
        out.pass = true;
        return out;
    }
    out.core_count = derived.core.size();
    out.max_core_eigenvalue = -std::numeric_limits<double>::infinity();
    for (std::int32_t k : derived.core) {
        out.max_core_eigenvalue = std::max(out.max_core_eigenvalue, vf.eig_hi[k]);
        if (vf.eig_hi[k] < out.threshold && vf.eig_lo[k] < out.threshold) {
            ++out.full_rank_count;
        }
    }
    out.rank_constant =
        out.full_rank_count == out.core_count || out.full_rank_count == 0;
    out.pass = out.max_core_eigenvalue < out.threshold;
    return out;
}

MinPrincipleCheck check_min_principle(const ProblemSpec& spec, const DerivedFields& derived,
                                      const PFunctionField& phi,
                                      const MinPrincipleHypothesisReport& hypothesis) {
    (void)spec;
    MinPrincipleCheck out;
    out.beta = phi.beta;
    out.interior_min = phi.interior_min;
    out.boundary_min = phi.boundary_min;
    out.margin = phi.interior_min - phi.boundary_min;
    out.tolerance = 1e-4 * std::max(1.0, derived.q_m * derived.q_m);
    out.interior_argmin = phi.interior_argmin;
    out.range = phi.range;
    out.nonconstant = phi.range > 1e-6 * std::max(1.0, std::abs(phi.boundary_min));
    out.pass = out.margin >= -out.tolerance;
    if (phi.beta == 1.0) {
        out.regime = "continuity-endpoint";
    } else if (phi.beta < 2.0) {
        out.regime = "interior";
    } else {
        out.regime = "upper-endpoint";
    }
    out.hypothesis = hypothesis;
    out.gating = hypothesis.verdict != HypothesisVerdict::Fail;
    return out;
}

CurvatureBoundCheck check_curvature_lower_bound(const ProblemSpec& spec, double alpha,
                                                double u_min, bool min_principle_gates) {
    CurvatureBoundCheck out;
    out.alpha = alpha;
    out.u_min = u_min;
    if (spec.name == "euclidean") {
        out.applicable = true;
        out.bound = lower_bound_euclid(alpha);
    } else if (spec.name == "lorentzian") {
        out.applicable = true;
        out.bound = lower_bound_lorentz(alpha);  // may throw ValidityRegionError
    } else {
        out.note = "no closed-form bound for this coefficient family";
        out.pass = true;
        return out;
    }
    out.pass = -u_min >= out.bound * (1.0 - 1e-3);
    out.gating = min_principle_gates;
    if (!min_principle_gates) {
        out.note = "minimum-principle hypothesis fails for this family; recorded only";
    }
    return out;
}

UpperBoundCheck check_inradius_upper_bound(double inradius, double u_min) {
    UpperBoundCheck out;
    out.inradius = inradius;
    out.ceiling = 0.5 * inradius * inradius;
    out.u_min = u_min;
    out.pass = -u_min <= out.ceiling * (1.0 + 1e-3);
    return out;
}

GradientCeilingCheck check_gradient_ceiling(const DerivedFields& derived) {
    GradientCeilingCheck out;
    out.min_margin = std::numeric_limits<double>::infinity();
    out.scale = std::max(1.0, derived.s_max);
    for (std::size_t k = 0; k < derived.u.size(); ++k) {
        const double margin =
            2.0 * derived.u[k] - 2.0 * derived.u_min - derived.node[k].s;
        out.min_margin = std::min(out.min_margin, margin);
    }
    out.pass = out.min_margin >= -1e-4 * out.scale;
    return out;
}

PFunctionFloorCheck check_pfunction_floor(const PFunctionField& phi1, double q_m,
                                          bool min_principle_gates) {
    PFunctionFloorCheck out;
    out.q_m_squared = q_m * q_m;
    out.min_margin = phi1.interior_min - out.q_m_squared;
    out.pass = out.min_margin >= -1e-4 * std::max(1.0, out.q_m_squared);
    out.gating = min_principle_gates;
    return out;
}

BoundaryIdentityCheck check_boundary_identity(const ProblemSpec& spec,
                                              const DerivedFields& derived,
                                              bool min_principle_gates) {
    BoundaryIdentityCheck out;
    const double f0 = spec.f(0.0);
    double qmin = std::numeric_limits<double>::infinity();
    for (const auto& s : derived.boundary) {
        if (!s.valid) continue;
        const double sn = spec.clamp_s(s.u_n * s.u_n);
        const double gv = spec.g(sn);
        const double Gv = gv + 2.0 * sn * spec.g_prime(sn);
        const double residual =
            s.u_nn + (spec.n - 1) * s.kappa * s.u_n * (gv / Gv) - f0;
        out.max_residual = std::max(out.max_residual, std::abs(residual));
        ++out.samples;
        if (s.u_n < qmin) {
            qmin = s.u_n;
            out.u_nn_at_phi_min = s.u_nn;
        }
    }
    // consequence of the boundary minimum of the P-function: u_nn <= 1/2 there
    // (0.05 covers the O(h) extraction error of u_nn at desk resolutions)
    out.u_nn_cap_pass = out.u_nn_at_phi_min <= 0.5 + 0.05;
    out.u_nn_cap_gating = min_principle_gates;
    return out;
}

namespace {

double estimate_order(double coarse, double fine, double h_coarse, double h_fine) {
    if (!(coarse > 0.0) || !(fine > 0.0) || !(h_coarse > h_fine)) return 0.0;
    return std::log(coarse / fine) / std::log(h_coarse / h_fine);
}

const char* status_string(Field2D::Status s) {
    switch (s) {
        case Field2D::Status::NotRun: return "not-run";
        case Field2D::Status::Converged: return "converged";
        case Field2D::Status::NewtonStalled: return "newton-stalled";
        case Field2D::Status::SpacelikeMarginUnattainable:
            return "spacelike-margin-unattainable";
    }
    return "?";
}

} // namespace

ResidualStats residual_stats(const ProblemSpec& spec, const ConvexDomain& domain,
                             const Field2D& field, int boundary_samples) {
    ResidualStats out;
    if (!field.converged()) return out;
    const DerivedFields derived = derive_fields(field, domain, boundary_samples);
    const VField vf = v_transform(spec, field);
    out.h = field.grid->h;
    out.v_residual_max = v_residual_max_outside(spec, domain, derived, vf, 3.0 * out.h);
    out.boundary_identity_max = check_boundary_identity(spec, derived, true).max_residual;
    out.valid = true;
    return out;
}

VerificationReport assess_field(const ProblemSpec& spec, const ConvexDomain& domain,
                                const Field2D& field, const VerifyOptions& opts,
                                const ResidualStats* coarse) {
    VerificationReport rep;
    rep.problem = spec.name;
    rep.domain = domain.label();
    rep.h = field.grid ? field.grid->h : opts.h;
    rep.n = spec.n;
    rep.solver_status = status_string(field.status);
    rep.solver_converged = field.converged();
    rep.lambda_reached = field.lambda;
    rep.final_residual = field.final_residual;
    rep.clamp_events = field.clamp_events;
    rep.newton_iterations = static_cast<int>(field.log.size());
    if (!rep.solver_converged) {
        rep.aggregate_pass = false;
        return rep;
    }

    const DerivedFields derived = derive_fields(field, domain, opts.boundary_samples);
    const VField vf = v_transform(spec, field);
    rep.u_min = derived.u_min;
    rep.u_min_location = derived.u_min_location;
    rep.q_m = derived.q_m;
    rep.s_max = derived.s_max;

    // hypothesis ledger over the realized solution ranges
    const auto u_samples = default_u_samples(std::min(derived.u_min, -1e-12));
    const auto s_samples =
        default_s_samples(spec, 512, std::max(1.0, derived.s_max * 1.0000001));
    rep.concavity_hypothesis = check_concavity_hypothesis(spec, u_samples);

    rep.concavity = check_concavity(field, derived, vf);

    bool min_principle_gates = true;
    for (double beta : opts.betas) {
        const auto hyp = check_min_principle_hypothesis(spec, beta, u_samples, s_samples);
        const auto phi = p_function(spec, derived, beta);
        rep.min_principle.push_back(check_min_principle(spec, derived, phi, hyp));
        if (hyp.verdict == HypothesisVerdict::Fail) min_principle_gates = false;
    }

    rep.curvature_lower_bound = check_curvature_lower_bound(
        spec, domain.alpha(spec.n), derived.u_min, min_principle_gates);
    rep.inradius_upper_bound = check_inradius_upper_bound(domain.inradius(), derived.u_min);

    const auto phi1 = p_function(spec, derived, 1.0);
    rep.pfunction_floor = check_pfunction_floor(phi1, derived.q_m, min_principle_gates);
    rep.boundary_identity = check_boundary_identity(spec, derived, min_principle_gates);
    for (double r : v_equation_residual(spec, derived, vf)) {
        rep.v_residual_max = std::max(rep.v_residual_max, std::abs(r));
    }

    const auto ps = ps_inequality_residual(derived);
    rep.ps_residual_min = ps.min_value;
    rep.ps_residual_scale = ps.scale;

    if (coarse && coarse->valid) {
        rep.order_checks_ran = true;
        rep.boundary_identity_order = estimate_order(
            coarse->boundary_identity_max, rep.boundary_identity.max_residual, coarse->h, rep.h);
        // decay measured over the coarse grid's core region on both grids
        const double fine_vres =
            v_residual_max_outside(spec, domain, derived, vf, 3.0 * coarse->h);
        rep.v_residual_order =
            estimate_order(coarse->v_residual_max, fine_vres, coarse->h, rep.h);
    }

    if (opts.radial_crosscheck && domain.kind() == DomainKind::Disk) {
        const ShootOutcome shot = shoot_radial(spec, spec.n, domain.param(0));
        rep.radial.ran = true;
        rep.radial.converged = shot.converged();
        if (shot.converged()) {
            rep.radial.phi0 = shot.solution->phi0;
            rep.radial.max_abs_phi_prime = shot.solution->max_abs_phi_prime;
            rep.radial.u_min_gap = std::abs(derived.u_min - shot.solution->phi0);
        }
    }

    rep.gradient_ceiling = check_gradient_ceiling(derived);

    bool pass = true;
    if (!rep.concavity.pass) pass = false;
    for (const auto& mp : rep.min_principle) {
        if (mp.gating && !mp.pass) pass = false;
    }
    if (rep.curvature_lower_bound.applicable && rep.curvature_lower_bound.gating &&
        !rep.curvature_lower_bound.pass) {
        pass = false;
    }
    if (!rep.inradius_upper_bound.pass) pass = false;
    if (rep.pfunction_floor.gating && !rep.pfunction_floor.pass) pass = false;
    if (rep.boundary_identity.u_nn_cap_gating && !rep.boundary_identity.u_nn_cap_pass) {
        pass = false;
    }
    if (!rep.gradient_ceiling.pass) pass = false;
    rep.aggregate_pass = pass;
    return rep;
}

VerificationReport run_verification(const ProblemSpec& spec, const ConvexDomain& domain,
                                    const VerifyOptions& opts) {
    ResidualStats coarse_stats;
    std::vector<double> warm_start;
    const std::vector<double>* warm = nullptr;
    std::shared_ptr<ClippedGrid> fine_grid;

    if (opts.order_checks) {
        try {
            auto coarse_grid = std::make_shared<ClippedGrid>(make_grid(domain, 2.0 * opts.h));
            const Field2D coarse = newton_solve(spec, coarse_grid, opts.solve);
            if (coarse.converged()) {
                coarse_stats = residual_stats(spec, domain, coarse, opts.boundary_samples);
                fine_grid = std::make_shared<ClippedGrid>(make_grid(domain, opts.h));
                warm_start = prolong(coarse, *fine_grid);
                warm = &warm_start;
            }
        } catch (const GridError&) {
            // 2h companion too coarse for this domain: skip the decay estimates
        }
    }
    if (!fine_grid) fine_grid = std::make_shared<ClippedGrid>(make_grid(domain, opts.h));

    SolveOptions sopts = opts.solve;
    if (warm) {
        sopts.initial_guess = *warm;
        sopts.lambda_schedule = {
            opts.solve.lambda_schedule.empty() ? 1.0 : opts.solve.lambda_schedule.back()};
    }
    const Field2D fine = newton_solve(spec, fine_grid, sopts);
    return assess_field(spec, domain, fine, opts,
                        coarse_stats.valid ? &coarse_stats : nullptr);
}

std::string report_to_json(const VerificationReport& rep) {
    ordered_json j;
    j["schema"] = "pflab-report-v1";
    j["run"] = {
        {"problem", rep.problem},
        {"domain", rep.domain},
        {"h", rep.h},
        {"n", rep.n},
        {"solver_status", rep.solver_status},
        {"solver_converged", rep.solver_converged},
        {"lambda_reached", rep.lambda_reached},
        {"final_residual", rep.final_residual},
        {"clamp_events", rep.clamp_events},
        {"newton_iterations", rep.newton_iterations},
    };
    if (!rep.solver_converged) {
        j["aggregate_pass"] = false;
        return j.dump(2);
    }
    j["solution"] = {
        {"u_min", rep.u_min},
        {"u_min_location", {rep.u_min_location.x, rep.u_min_location.y}},
        {"q_m", rep.q_m},
        {"s_max", rep.s_max},
    };
    j["hypotheses"] = {
        {"concavity",
         {{"verdict", to_string(rep.concavity_hypothesis.verdict)},
          {"min_f_prime", rep.concavity_hypothesis.min_f_prime},
          {"min_convexity_combo", rep.concavity_hypothesis.min_convexity_combo}}},
    };
    j["concavity"] = {
        {"degenerate", rep.concavity.degenerate},
        {"max_core_eigenvalue", rep.concavity.max_core_eigenvalue},
        {"threshold", rep.concavity.threshold},
        {"core_count", rep.concavity.core_count},
        {"full_rank_count", rep.concavity.full_rank_count},
        {"rank_constant", rep.concavity.rank_constant},
        {"pass", rep.concavity.pass},
    };
    j["min_principle"] = ordered_json::array();
    for (const auto& mp : rep.min_principle) {
        j["min_principle"].push_back({
            {"beta", mp.beta},
            {"interior_min_phi", mp.interior_min},
            {"boundary_min_phi", mp.boundary_min},
            {"margin", mp.margin},
            {"tolerance", mp.tolerance},
            {"phi_min_location", {mp.interior_argmin.x, mp.interior_argmin.y}},
            {"range", mp.range},
            {"nonconstant", mp.nonconstant},
            {"regime", mp.regime},
            {"hypothesis_verdict", to_string(mp.hypothesis.verdict)},
            {"hypothesis_max_expression", mp.hypothesis.max_expression},
            {"gating", mp.gating},
            {"pass", mp.pass},
        });
    }
    j["curvature_lower_bound"] = {
        {"applicable", rep.curvature_lower_bound.applicable},
        {"alpha", rep.curvature_lower_bound.alpha},
        {"lower_bound", rep.curvature_lower_bound.bound},
        {"u_min", rep.curvature_lower_bound.u_min},
        {"gating", rep.curvature_lower_bound.gating},
        {"pass", rep.curvature_lower_bound.pass},
        {"note", rep.curvature_lower_bound.note},
    };
    j["inradius_upper_bound"] = {
        {"d", rep.inradius_upper_bound.inradius},
        {"ceiling", rep.inradius_upper_bound.ceiling},
        {"u_min", rep.inradius_upper_bound.u_min},
        {"pass", rep.inradius_upper_bound.pass},
    };
    j["gradient_ceiling"] = {
        {"min_margin", rep.gradient_ceiling.min_margin},
        {"scale", rep.gradient_ceiling.scale},
        {"pass", rep.gradient_ceiling.pass},
    };
    j["pfunction_floor"] = {
        {"min_margin", rep.pfunction_floor.min_margin},
        {"q_m_squared", rep.pfunction_floor.q_m_squared},
        {"gating", rep.pfunction_floor.gating},
        {"pass", rep.pfunction_floor.pass},
    };
    j["boundary_identity"] = {
        {"max_residual", rep.boundary_identity.max_residual},
        {"samples", rep.boundary_identity.samples},
        {"order_estimate", rep.boundary_identity_order},
        {"u_nn_at_phi_min", rep.boundary_identity.u_nn_at_phi_min},
        {"u_nn_cap_pass", rep.boundary_identity.u_nn_cap_pass},
        {"u_nn_cap_gating", rep.boundary_identity.u_nn_cap_gating},
    };
    j["v_equation"] = {
        {"max_residual", rep.v_residual_max},
        {"order_estimate", rep.v_residual_order},
    };
    j["hessian_gradient_identity"] = {
        {"min_residual", rep.ps_residual_min},
        {"scale", rep.ps_residual_scale},
    };
    j["order_checks_ran"] = rep.order_checks_ran;
    if (rep.radial.ran) {
        j["radial_crosscheck"] = {
            {"converged", rep.radial.converged},
            {"phi0", rep.radial.phi0},
            {"max_abs_phi_prime", rep.radial.max_abs_phi_prime},
            {"u_min_gap", rep.radial.u_min_gap},
        };
    }
    j["aggregate_pass"] = rep.aggregate_pass;
    return j.dump(2);
}

} // namespace pflab
