#pragma once

#include <span>

#include "pflab/geometry.hpp"

namespace pflab {

struct NodeDerivatives {
    double ux = 0.0, uy = 0.0;
    double uxx = 0.0, uyy = 0.0, uxy = 0.0;
    double s = 0.0;  // ux^2 + uy^2
};

/// Discrete differential operators on a clipped grid with homogeneous
/// Dirichlet data: boundary legs carry the value 0. First derivatives use the
/// unequal-arm 3-point formula, second derivatives the Shortley-Weller
/// stencil (both exact on quadratics). The cross derivative uses the 4-corner
/// box; exterior corners are reconstructed by linear extension along the
/// diagonal through the boundary crossing (corners with crossing fraction
/// rho < 0.05 take the boundary value directly).
class StencilEvaluator {
public:
    explicit StencilEvaluator(const ClippedGrid& grid) : grid_(&grid) {}

    NodeDerivatives evaluate(std::span<const double> u, std::int32_t node) const;

    /// Value at a box corner of `node` (diagonal index 0:NE 1:NW 2:SE 3:SW).
    double corner_value(std::span<const double> u, std::int32_t node, int diag) const;

    const ClippedGrid& grid() const { return *grid_; }

private:
    const ClippedGrid* grid_;
};

} // namespace pflab
