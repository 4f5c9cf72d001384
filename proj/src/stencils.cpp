#include "pflab/stencils.hpp"

namespace pflab {

namespace {

struct Arm {
    double len;  // arm length
    double val;  // value at the arm end (0 on boundary legs)
};

inline Arm axis_arm(const ClippedGrid& grid, std::span<const double> u,
                    const ClippedGrid::Node& node, int dir) {
    const std::int32_t a = node.arm[dir];
    if (a >= 0) return {grid.h * node.hops[dir], u[a]};
    return {grid.legs[-1 - a].theta * grid.h, 0.0};
}

} // namespace

double StencilEvaluator::corner_value(std::span<const double> u, std::int32_t node,
                                      int diag) const {
    const auto& nd = grid_->nodes[node];
    const std::int32_t a = nd.diag[diag];
    if (a >= 0) return u[a];
    const double rho = grid_->diag_legs[-1 - a].rho;
    if (rho < 0.02) return 0.0;  // crossing essentially at the node / no crossing
    // Quadratic reconstruction along the diagonal (t in corner-distance
    // units): through the crossing at t = rho (value 0), the node at t = 0,
    // and either the opposite corner at t = -1 or the opposite crossing at
    // t = -rho'. Exact for quadratic fields restricted to the diagonal.
    static constexpr int kOpposite[4] = {3, 2, 1, 0};  // NE<->SW, NW<->SE
    const std::int32_t opp = nd.diag[kOpposite[diag]];
    if (opp >= 0) {
        const double w_opp = (1.0 - rho) / (1.0 + rho);
        const double w_c = -2.0 * (1.0 - rho) / rho;
        return w_opp * u[opp] + w_c * u[node];
    }
    const double rho_opp = grid_->diag_legs[-1 - opp].rho;
    if (rho_opp >= 0.02) {
        // q(t) = c (t - rho)(t + rho'), q(0) = u_C
        return -u[node] * (1.0 - rho) * (1.0 + rho_opp) / (rho * rho_opp);
    }
    return u[node] * (1.0 - 1.0 / rho);  // lone data point: linear extension
}

NodeDerivatives StencilEvaluator::evaluate(std::span<const double> u,
                                           std::int32_t node) const {
    const auto& nd = grid_->nodes[node];
    const double uc = u[node];
    const Arm e = axis_arm(*grid_, u, nd, 0);
    const Arm w = axis_arm(*grid_, u, nd, 1);
    const Arm nn = axis_arm(*grid_, u, nd, 2);
    const Arm ss = axis_arm(*grid_, u, nd, 3);

    NodeDerivatives d;
    d.ux = (e.val * w.len * w.len - w.val * e.len * e.len + uc * (e.len * e.len - w.len * w.len)) /
           (e.len * w.len * (e.len + w.len));
    d.uy = (nn.val * ss.len * ss.len - ss.val * nn.len * nn.len +
            uc * (nn.len * nn.len - ss.len * ss.len)) /
           (nn.len * ss.len * (nn.len + ss.len));
    d.uxx = 2.0 * (e.val / (e.len * (e.len + w.len)) + w.val / (w.len * (e.len + w.len)) -
                   uc / (e.len * w.len));
    d.uyy = 2.0 * (nn.val / (nn.len * (nn.len + ss.len)) + ss.val / (ss.len * (nn.len + ss.len)) -
                   uc / (nn.len * ss.len));
    const double h = grid_->h;
    d.uxy = (corner_value(u, node, 0) + corner_value(u, node, 3) -
             corner_value(u, node, 1) - corner_value(u, node, 2)) /
            (4.0 * h * h);
    d.s = d.ux * d.ux + d.uy * d.uy;
    return d;
}

} // namespace pflab
