#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pflab/fields.hpp"
#include "pflab/geometry.hpp"
#include "pflab/problem.hpp"
#include "pflab/radial.hpp"
#include "pflab/solver2d.hpp"

namespace pflab {

/// q^2 where q is the real root of q^3 + q - alpha = 0 (Cardano, stable form
/// for the negative radicand). alpha > 0.
double lower_bound_euclid(double alpha);

/// q^2 where q is the smallest positive root of q^3 - q + alpha = 0
/// (trigonometric form). Valid for 0 < alpha <= 2/(3 sqrt 3); larger alpha
/// throws ValidityRegionError.
double lower_bound_lorentz(double alpha);

/// Upper edge of the Lorentzian bound's validity region, 2/(3 sqrt 3).
double lorentz_alpha_max();

// ---------------------------------------------------------------------------
// individual checks
// ---------------------------------------------------------------------------

struct ConcavityCheck {
    bool degenerate = false;  // zero field (lambda = 0), check skipped
    double max_core_eigenvalue = 0.0;
    double threshold = 0.0;  // -h^2
    std::size_t core_count = 0;
    std::size_t full_rank_count = 0;  // both eigenvalues below the threshold
    bool rank_constant = false;
    bool pass = false;
};

ConcavityCheck check_concavity(const Field2D& field, const DerivedFields& derived,
                               const VField& vf);

struct MinPrincipleCheck {
    double beta = 0.0;
    double interior_min = 0.0;
    double boundary_min = 0.0;
    double margin = 0.0;     // interior_min - boundary_min
    double tolerance = 0.0;  // 1e-4 * max(1, q_m^2)
    Vec2 interior_argmin;
    double range = 0.0;
    bool nonconstant = false;  // range > 1e-6 * scale
    bool pass = false;
    std::string regime;  // "continuity-endpoint" (beta = 1), "interior", "upper-endpoint"
    MinPrincipleHypothesisReport hypothesis;
    bool gating = false;  // hypothesis failures are recorded, not gating
};

MinPrincipleCheck check_min_principle(const ProblemSpec& spec, const DerivedFields& derived,
                                      const PFunctionField& phi,
                                      const MinPrincipleHypothesisReport& hypothesis);

struct CurvatureBoundCheck {
    bool applicable = false;  // needs the euclidean or lorentzian coefficient family
    double alpha = 0.0;
    double bound = 0.0;
    double u_min = 0.0;  // signed
    bool pass = false;
    bool gating = false;
    std::string note;
};

/// Lower bound on -u_min from the boundary-curvature cubic; the coefficient
/// family selects which cubic applies.
CurvatureBoundCheck check_curvature_lower_bound(const ProblemSpec& spec, double alpha,
                                                double u_min, bool min_principle_gates);

struct UpperBoundCheck {
    double inradius = 0.0;
    double ceiling = 0.0;  // d^2/2
    double u_min = 0.0;
    bool pass = false;
};

UpperBoundCheck check_inradius_upper_bound(double inradius, double u_min);

struct GradientCeilingCheck {
    double min_margin = 0.0;  // min over nodes of 2u - 2u_min - |grad u|^2
    double scale = 1.0;
    bool pass = false;
};

GradientCeilingCheck check_gradient_ceiling(const DerivedFields& derived);

struct PFunctionFloorCheck {
    double min_margin = 0.0;  // min over nodes of Phi(.;1) - q_m^2
    double q_m_squared = 0.0;
    bool pass = false;
    bool gating = false;
};

PFunctionFloorCheck check_pfunction_floor(const PFunctionField& phi1, double q_m,
                                          bool min_principle_gates);

struct BoundaryIdentityCheck {
    double max_residual = 0.0;
    std::size_t samples = 0;
    double u_nn_at_phi_min = 0.0;  // at the boundary sample minimizing u_n
    bool u_nn_cap_pass = false;    // u_nn <= 1/2 + 0.05 there
    bool u_nn_cap_gating = false;
};

/// Residual of the boundary identity
///   u_nn + (n-1) kappa u_n g(u_n^2)/G(u_n^2) = f(0)
/// (reduces to the +/- closed forms for the euclidean/lorentzian families).
BoundaryIdentityCheck check_boundary_identity(const ProblemSpec& spec,
                                              const DerivedFields& derived,
                                              bool min_principle_gates);

// ---------------------------------------------------------------------------
// aggregate report
// ---------------------------------------------------------------------------

struct VerifyOptions {
    double h = 1.0 / 64.0;
    std::vector<double> betas = {1.0, 1.5, 2.0};
    int boundary_samples = 1024;
    SolveOptions solve;
    bool order_checks = true;       // also solve at 2h and estimate decay rates
    bool radial_crosscheck = true;  // disk domains: compare against the shooting solver
};

struct VerificationReport {
    // run metadata
    std::string problem, domain;
    double h = 0.0;
    int n = 2;
    std::string solver_status;
    bool solver_converged = false;
    double lambda_reached = 0.0;
    double final_residual = 0.0;
    std::size_t clamp_events = 0;
    int newton_iterations = 0;

    double u_min = 0.0;
    Vec2 u_min_location;
    double q_m = 0.0;
    double s_max = 0.0;

    ConcavityHypothesisReport concavity_hypothesis;
    ConcavityCheck concavity;
    std::vector<MinPrincipleCheck> min_principle;
    CurvatureBoundCheck curvature_lower_bound;
    UpperBoundCheck inradius_upper_bound;
    GradientCeilingCheck gradient_ceiling;
    PFunctionFloorCheck pfunction_floor;
    BoundaryIdentityCheck boundary_identity;
    double boundary_identity_order = 0.0;  // filled when order checks ran
    double v_residual_max = 0.0;
    double v_residual_order = 0.0;
    double ps_residual_min = 0.0;
    double ps_residual_scale = 1.0;
    bool order_checks_ran = false;

    struct RadialCrosscheck {
        bool ran = false;
        bool converged = false;
        double phi0 = 0.0;
        double max_abs_phi_prime = 0.0;
        double u_min_gap = 0.0;  // |u_min(2d) - phi0|
    } radial;

    bool aggregate_pass = false;
};

/// Residual summaries of a solved field used for two-grid decay estimates.
struct ResidualStats {
    bool valid = false;
    double h = 0.0;
    double boundary_identity_max = 0.0;
    double v_residual_max = 0.0;
};

ResidualStats residual_stats(const ProblemSpec& spec, const ConvexDomain& domain,
                             const Field2D& field, int boundary_samples);

/// All checks on one solved field; `coarse` (when valid) supplies the decay
/// order estimates.
VerificationReport assess_field(const ProblemSpec& spec, const ConvexDomain& domain,
                                const Field2D& field, const VerifyOptions& opts,
                                const ResidualStats* coarse = nullptr);

/// Full verification: solve (at 2h and h when order checks are on), derive
/// fields, run every check, estimate decay orders, aggregate gating passes.
VerificationReport run_verification(const ProblemSpec& spec, const ConvexDomain& domain,
                                    const VerifyOptions& opts);

/// Stable-schema JSON document (keys documented in the README).
std::string report_to_json(const VerificationReport& report);

} // namespace pflab
