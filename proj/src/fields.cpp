#include "pflab/fields.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace pflab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Bilinear interpolation of the nodal gradient; fails when the cell touches
// non-interior lattice points.
bool gradient_at(const ClippedGrid& grid, const std::vector<NodeDerivatives>& node, Vec2 p,
                 Vec2& grad) {
    const double fx = p.x / grid.h;
    const double fy = p.y / grid.h;
    const std::int32_t i0 = static_cast<std::int32_t>(std::floor(fx));
    const std::int32_t j0 = static_cast<std::int32_t>(std::floor(fy));
    const std::int32_t idx[4] = {grid.index_at(i0, j0), grid.index_at(i0 + 1, j0),
                                 grid.index_at(i0, j0 + 1), grid.index_at(i0 + 1, j0 + 1)};
    for (int k = 0; k < 4; ++k) {
        if (idx[k] < 0) return false;
    }
    const double ax = fx - i0, ay = fy - j0;
    const double w[4] = {(1 - ax) * (1 - ay), ax * (1 - ay), (1 - ax) * ay, ax * ay};
    grad = {0.0, 0.0};
    for (int k = 0; k < 4; ++k) {
        grad.x += w[k] * node[idx[k]].ux;
        grad.y += w[k] * node[idx[k]].uy;
    }
    return true;
}

} // namespace

DerivedFields derive_fields(const Field2D& field, const ConvexDomain& domain,
                            int boundary_sample_count) {
    const ClippedGrid& grid = *field.grid;
    const std::int32_t n = static_cast<std::int32_t>(grid.size());
    StencilEvaluator st(grid);

    DerivedFields out;
    out.grid = field.grid;
    out.u = field.values;
    out.node.resize(n);
    out.u_min = std::numeric_limits<double>::infinity();
    for (std::int32_t k = 0; k < n; ++k) {
        out.node[k] = st.evaluate(field.values, k);
        out.s_max = std::max(out.s_max, out.node[k].s);
        if (field.values[k] < out.u_min) {
            out.u_min = field.values[k];
            out.u_min_node = k;
        }
    }
    out.u_min_location = grid.position(out.u_min_node);

    // boundary samples: uniform in the boundary parameter
    out.boundary.resize(boundary_sample_count);
    out.q_m = std::numeric_limits<double>::infinity();
    out.min_u_n = std::numeric_limits<double>::infinity();
    out.max_u_n = -std::numeric_limits<double>::infinity();
    const double h = grid.h;
    for (int sidx = 0; sidx < boundary_sample_count; ++sidx) {
        BoundarySample& s = out.boundary[sidx];
        s.t = kTwoPi * sidx / boundary_sample_count;
        s.point = domain.boundary(s.t);
        s.normal = domain.outward_normal(s.t);
        s.kappa = domain.curvature(s.t);
        for (double base = h; base <= 3.0 * h + 1e-12 * h; base += 0.5 * h) {
            Vec2 g1, g2, g3;
            const Vec2 p1 = s.point - base * s.normal;
            const Vec2 p2 = s.point - (2.0 * base) * s.normal;
            const Vec2 p3 = s.point - (3.0 * base) * s.normal;
            if (!gradient_at(grid, out.node, p1, g1) || !gradient_at(grid, out.node, p2, g2) ||
                !gradient_at(grid, out.node, p3, g3)) {
                continue;
            }
            const double w1 = dot(s.normal, g1);
            const double w2 = dot(s.normal, g2);
            const double w3 = dot(s.normal, g3);
            s.u_n = 3.0 * w1 - 3.0 * w2 + w3;                     // quadratic fit at depth 0
            s.u_nn = (5.0 * w1 - 8.0 * w2 + 3.0 * w3) / (2.0 * base);
            s.depth = base;
            s.valid = true;
            break;
        }
        if (s.valid) {
            ++out.valid_boundary_samples;
            out.q_m = std::min(out.q_m, s.u_n);
            out.min_u_n = std::min(out.min_u_n, s.u_n);
            out.max_u_n = std::max(out.max_u_n, s.u_n);
        }
    }
    if (out.valid_boundary_samples == 0) {
        throw GridError("no boundary sample found three interior gradient cells");
    }

    // reliable-Hessian core: distance to the boundary above 3h. The radial gap
    // bounds the distance from above; 4.5h bounds it from below for all
    // built-in kinds (the radial direction tilts from the normal by < 45 deg).
    for (std::int32_t k = 0; k < n; ++k) {
        const Vec2 p = grid.position(k);
        const double gap = -domain.radial_gap(p);
        if (gap <= 3.0 * h) continue;
        if (gap < 4.5 * h && domain.distance_to_boundary(p) <= 3.0 * h) continue;
        out.core.push_back(k);
    }
    if (out.core.empty()) {
        throw GridError("reliable-Hessian core is empty (grid too coarse)");
    }
    return out;
}

PFunctionField p_function(const ProblemSpec& spec, const DerivedFields& derived, double beta) {
    PFunctionField out;
    out.beta = beta;
    const std::int32_t n = static_cast<std::int32_t>(derived.u.size());
    out.interior.resize(n);
    out.interior_min = std::numeric_limits<double>::infinity();
    double vmax = -std::numeric_limits<double>::infinity();
    for (std::int32_t k = 0; k < n; ++k) {
        const double F = cumulative_F(spec, std::min(derived.u[k], 0.0));
        const double phi = derived.node[k].s + beta * F;
        out.interior[k] = phi;
        vmax = std::max(vmax, phi);
        if (phi < out.interior_min) {
            out.interior_min = phi;
            out.interior_argmin_node = k;
        }
    }
    out.interior_argmin = derived.grid->position(out.interior_argmin_node);
    out.boundary_min = std::numeric_limits<double>::infinity();
    for (const auto& s : derived.boundary) {
        if (!s.valid) continue;
        const double phi = s.u_n * s.u_n;  // F(0) = 0
        out.boundary.push_back(phi);
        out.boundary_min = std::min(out.boundary_min, phi);
        vmax = std::max(vmax, phi);
    }
    out.range = vmax - std::min(out.interior_min, out.boundary_min);
    return out;
}

VField v_transform(const ProblemSpec& spec, const Field2D& field) {
    const ClippedGrid& grid = *field.grid;
    const std::int32_t n = static_cast<std::int32_t>(grid.size());
    VField out;
    out.v.resize(n);
    for (std::int32_t k = 0; k < n; ++k) {
        out.v[k] = v_of_u(spec, std::min(field.values[k], 0.0));
    }
    StencilEvaluator st(grid);
    out.d.resize(n);
    out.eig_lo.resize(n);
    out.eig_hi.resize(n);
    for (std::int32_t k = 0; k < n; ++k) {
        out.d[k] = st.evaluate(out.v, k);
        const double tr = out.d[k].uxx + out.d[k].uyy;
        const double diff = out.d[k].uxx - out.d[k].uyy;
        const double disc = std::sqrt(diff * diff + 4.0 * out.d[k].uxy * out.d[k].uxy);
        out.eig_lo[k] = 0.5 * (tr - disc);
        out.eig_hi[k] = 0.5 * (tr + disc);
    }
    return out;
}

std::vector<double> v_equation_residual(const ProblemSpec& spec, const DerivedFields& derived,
                                        const VField& vf) {
    std::vector<double> out;
    out.reserve(derived.core.size());
    for (std::int32_t k : derived.core) {
        const double u = std::min(derived.u[k], 0.0);
        const double F = cumulative_F(spec, u);
        const double fv = spec.f(u);
        const auto& d = vf.d[k];
        const double dv2 = d.ux * d.ux + d.uy * d.uy;
        const double s = spec.clamp_s(F * dv2);
        const double gv = spec.g(s);
        const double gp = spec.g_prime(s);
        const double Gv = gv + 2.0 * s * gp;
        const double lead = std::sqrt(F) / fv;
        const double a11 = lead * (gv / Gv + 2.0 * (gp / Gv) * F * d.ux * d.ux);
        const double a22 = lead * (gv / Gv + 2.0 * (gp / Gv) * F * d.uy * d.uy);
        const double a12 = lead * (2.0 * (gp / Gv) * F * d.ux * d.uy);
        const double b = -1.0 - 0.5 * dv2;
        out.push_back(a11 * d.uxx + 2.0 * a12 * d.uxy + a22 * d.uyy - b);
    }
    return out;
}

double v_residual_max_outside(const ProblemSpec& spec, const ConvexDomain& domain,
                              const DerivedFields& derived, const VField& vf,
                              double min_distance) {
    const std::vector<double> res = v_equation_residual(spec, derived, vf);
    double out = 0.0;
    for (std::size_t k = 0; k < derived.core.size(); ++k) {
        const Vec2 p = derived.grid->position(derived.core[k]);
        const double gap = -domain.radial_gap(p);
        if (gap <= min_distance) continue;
        if (gap < 1.5 * min_distance && domain.distance_to_boundary(p) <= min_distance) {
            continue;
        }
        out = std::max(out, std::abs(res[k]));
    }
    return out;
}

PsResidual ps_inequality_residual(const DerivedFields& derived) {
    PsResidual out;
    out.value.reserve(derived.core.size());
    out.min_value = std::numeric_limits<double>::infinity();
    for (std::int32_t k : derived.core) {
        const auto& d = derived.node[k];
        const double lap = d.uxx + d.uyy;
        const double hx = d.uxx * d.ux + d.uxy * d.uy;  // (H grad)_x
        const double hy = d.uxy * d.ux + d.uyy * d.uy;
        const double frob = d.uxx * d.uxx + 2.0 * d.uxy * d.uxy + d.uyy * d.uyy;
        const double value = d.s * lap * lap + 2.0 * (hx * hx + hy * hy) -
                             2.0 * lap * (d.ux * hx + d.uy * hy) - frob * d.s;
        out.value.push_back(value);
        out.scale = std::max(out.scale, lap * lap * d.s);
        if (d.s >= 1e-10) {
            out.min_value = std::min(out.min_value, value);
            ++out.counted;
        }
    }
    if (out.counted == 0) out.min_value = 0.0;
    return out;
}

std::string derived_to_csv(const DerivedFields& derived, const PFunctionField& phi,
                           const VField& vf) {
    std::string out = "x,y,u,ux,uy,uxx,uxy,uyy,s,phi_beta,v,lmax_hess_v\n";
    char line[400];
    for (std::size_t k = 0; k < derived.u.size(); ++k) {
        const Vec2 p = derived.grid->position(static_cast<std::int32_t>(k));
        const auto& d = derived.node[k];
        std::snprintf(line, sizeof(line),
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      p.x, p.y, derived.u[k], d.ux, d.uy, d.uxx, d.uxy, d.uyy, d.s,
                      phi.interior[k], vf.v[k], vf.eig_hi[k]);
        out += line;
    }
    return out;
}

} // namespace pflab
