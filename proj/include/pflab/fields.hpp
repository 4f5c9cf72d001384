#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pflab/geometry.hpp"
#include "pflab/problem.hpp"
#include "pflab/solver2d.hpp"
#include "pflab/stencils.hpp"

namespace pflab {

/// Boundary sample with the outward-normal derivatives of u extracted by a
/// one-sided quadratic fit along the inward normal. The fit uses the normal
/// component of the bilinearly interpolated nodal gradient at three depths
/// (base, 2 base, 3 base); base starts at h and deepens in h/2 steps until all
/// three interpolation cells are fully interior.
struct BoundarySample {
    double t = 0.0;
    Vec2 point;
    Vec2 normal;
    double kappa = 0.0;
    double u_n = 0.0;
    double u_nn = 0.0;
    double depth = 0.0;  // base depth actually used
    bool valid = false;
};

struct DerivedFields {
    std::shared_ptr<const ClippedGrid> grid;
    std::vector<double> u;
    std::vector<NodeDerivatives> node;

    double u_min = 0.0;
    std::int32_t u_min_node = -1;
    Vec2 u_min_location;

    std::vector<BoundarySample> boundary;
    std::size_t valid_boundary_samples = 0;
    double q_m = 0.0;      // min u_n over valid samples
    double min_u_n = 0.0;  // same value, kept for sign diagnostics
    double max_u_n = 0.0;

    std::vector<std::int32_t> core;  // nodes with distance-to-boundary > 3h
    double s_max = 0.0;
};

/// Gradients/Hessians at every interior node plus boundary normal data.
/// Throws GridError when the reliable-Hessian core is empty.
DerivedFields derive_fields(const Field2D& field, const ConvexDomain& domain,
                            int boundary_sample_count = 1024);

/// P-function Phi(x; beta) = |grad u|^2 + beta * F(u) at interior nodes and
/// Phi = u_n^2 at boundary samples.
struct PFunctionField {
    double beta = 0.0;
    std::vector<double> interior;          // per interior node
    std::vector<double> boundary;          // per valid boundary sample
    double interior_min = 0.0;
    std::int32_t interior_argmin_node = -1;
    Vec2 interior_argmin;
    double boundary_min = 0.0;
    double range = 0.0;  // max - min over interior and boundary values
};

PFunctionField p_function(const ProblemSpec& spec, const DerivedFields& derived, double beta);

/// Concavity transform v = v_of_u(u) nodewise, its stencil derivatives, and
/// closed-form eigenvalues of the 2x2 Hessian.
struct VField {
    std::vector<double> v;
    std::vector<NodeDerivatives> d;
    std::vector<double> eig_lo, eig_hi;
};

VField v_transform(const ProblemSpec& spec, const Field2D& field);

/// Residual of the transformed equation a_ij v_ij = b at core nodes, with
///   a_ij = (sqrt(F)/f) ((g/G) delta_ij + 2 (g'/G) F v_i v_j),
///   b    = -1 - |Dv|^2 / 2,
/// coefficients at F = F(u), s = F |Dv|^2. Returned in core order.
std::vector<double> v_equation_residual(const ProblemSpec& spec, const DerivedFields& derived,
                                        const VField& vf);

/// Max |transformed-equation residual| over core nodes at least min_distance
/// from the boundary. Two-grid decay estimates must compare maxima over the
/// same physical region: the transform is boundary-singular, so the moving
/// 3h core edge would otherwise dominate the estimate.
double v_residual_max_outside(const ProblemSpec& spec, const ConvexDomain& domain,
                              const DerivedFields& derived, const VField& vf,
                              double min_distance);

/// Pointwise slack of the Hessian-gradient inequality
///   RHS - LHS = |grad u|^2 (lap u)^2 + 2 u_ij u_i u_kj u_k
///               - 2 (lap u) u_ij u_i u_j - u_ik u_ik |grad u|^2,
/// evaluated at core nodes (identically zero in two dimensions up to
/// roundoff; kept as a floating-point health check of the discrete Hessian).
struct PsResidual {
    std::vector<double> value;       // core order
    double min_value = 0.0;          // over nodes with s >= 1e-10
    double scale = 1.0;              // max(1, (lap u)^2 |grad u|^2)
    std::size_t counted = 0;
};

PsResidual ps_inequality_residual(const DerivedFields& derived);

/// CSV dump (x, y, u, ux, uy, uxx, uxy, uyy, s, phi_beta, v, lmax_hess_v).
std::string derived_to_csv(const DerivedFields& derived, const PFunctionField& phi,
                           const VField& vf);

} // namespace pflab
