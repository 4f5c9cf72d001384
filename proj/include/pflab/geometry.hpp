#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pflab/errors.hpp"

namespace pflab {

struct Vec2 {
    double x = 0.0, y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }

enum class DomainKind { Disk, Ellipse, Blob };

/// Smooth strictly convex planar region with a counterclockwise parametric
/// boundary t in [0, 2pi) -> (x, y). All built-in kinds are star-shaped about
/// the origin, which is also the exact centroid (the blob's radial profile
/// R(1 + eps cos k theta) with k >= 2 has vanishing first moments).
class ConvexDomain {
public:
    static ConvexDomain disk(double R);
    static ConvexDomain ellipse(double a, double b);
    /// r(theta) = R (1 + eps cos(k theta)), k >= 2. Construction runs a dense
    /// curvature scan and rejects parameter choices that lose strict convexity.
    static ConvexDomain blob(double R, double eps, int k);

    DomainKind kind() const { return kind_; }
    const std::string& label() const { return label_; }
    double param(int i) const { return p_[i]; }  // disk: R; ellipse: a,b; blob: R,eps,k

    Vec2 boundary(double t) const;
    Vec2 boundary_d1(double t) const;
    Vec2 boundary_d2(double t) const;
    Vec2 outward_normal(double t) const;

    /// Plane-curve curvature (x'y'' - y'x'') / (x'^2 + y'^2)^{3/2}.
    /// Throws ConvexityError if it is not strictly positive.
    double curvature(double t) const;

    /// Max curvature: dense scan (4096 samples) + golden-section refinement
    /// to relative tolerance 1e-10.
    double k_max() const;

    /// 1 / (2 (n-1) k_max), n >= 2.
    double alpha(int n) const;

    /// Radius of the largest inscribed ball. Dense boundary sampling plus
    /// coordinate-ascent maximization of the distance-to-boundary function
    /// (concave on a convex domain); relative tolerance 1e-8.
    double inradius() const;

    Vec2 centroid() const { return {0.0, 0.0}; }

    /// Signed radial gap |p| - r_domain(angle(p)); negative strictly inside.
    double radial_gap(Vec2 p) const;

    /// Strict interior test; points within 1e-12 of the boundary count as exterior.
    bool inside(Vec2 p) const { return radial_gap(p) < -1e-12; }

    /// Boundary parameter of the point radially associated with p (exact for
    /// points on the boundary).
    double param_from_point(Vec2 p) const;

    /// Exact distance from an interior point to the boundary curve
    /// (polyline scan + local parabolic refinement).
    double distance_to_boundary(Vec2 p) const;

    double perimeter_scale() const;  // max |boundary| radius, for bounding boxes

private:
    ConvexDomain() = default;
    void validate_convexity() const;

    DomainKind kind_ = DomainKind::Disk;
    std::string label_;
    double p_[3] = {1.0, 0.0, 0.0};
};

/// One Shortley-Weller boundary leg: the arm from an interior node toward the
/// boundary crossing along a lattice direction. theta lies in (0, 1] for a
/// plain clipped arm; arms that hop a merged node carry theta in (1, ~2].
struct BoundaryLeg {
    double theta = 1.0;   // arm length in units of h
    Vec2 point;           // crossing point on the boundary
    double t = 0.0;       // boundary parameter of the radially associated point
    Vec2 normal;          // outward unit normal there
    std::int32_t node = -1;  // owning interior node
    std::int8_t dir = 0;     // 0:E 1:W 2:N 3:S
};

struct DiagonalLeg {
    double rho = 1.0;     // crossing distance in units of the corner distance
    std::int32_t node = -1;
    std::int8_t dir = 0;  // 0:NE 1:NW 2:SE 3:SW
};

/// Cartesian grid clipped to the domain. Interior nodes are lattice points
/// strictly inside; each axis arm either links to another interior node or
/// carries a boundary leg. Nodes with any axis crossing closer than 0.05 h are
/// merged into the boundary (dropped as unknowns); arms of their neighbours
/// hop over the merged position to the true crossing or the next interior
/// node, so every stencil value stays exact.
struct ClippedGrid {
    double h = 0.0;
    Vec2 anchor;  // lattice origin = domain centroid

    struct Node {
        std::int32_t i = 0, j = 0;
        // >= 0: interior node index; < 0: -1-index into legs / diag_legs
        std::int32_t arm[4] = {-1, -1, -1, -1};      // E W N S
        std::int32_t diag[4] = {-1, -1, -1, -1};     // NE NW SE SW
        std::int8_t hops[4] = {1, 1, 1, 1};          // lattice distance of linked arms
        bool uniform = false;   // all four axis neighbours interior at distance 1
        bool full_box = false;  // all eight box neighbours interior
    };

    std::vector<Node> nodes;
    std::vector<BoundaryLeg> legs;
    std::vector<DiagonalLeg> diag_legs;
    std::size_t merged_count = 0;

    // dense lattice -> node index lookup over [-lattice_radius, lattice_radius]^2
    std::int32_t lattice_radius = 0;
    std::vector<std::int32_t> lattice_index;  // -1 where not an interior node

    Vec2 position(std::int32_t node) const {
        return {anchor.x + h * nodes[node].i, anchor.y + h * nodes[node].j};
    }
    std::size_t size() const { return nodes.size(); }

    /// Node index at lattice coordinates, -1 when exterior/merged/out of range.
    std::int32_t index_at(std::int32_t i, std::int32_t j) const {
        if (std::abs(i) > lattice_radius || std::abs(j) > lattice_radius) return -1;
        const std::int32_t w = 2 * lattice_radius + 1;
        return lattice_index[static_cast<std::size_t>(j + lattice_radius) * w +
                             (i + lattice_radius)];
    }
};

/// Builds the clipped grid. Requires h <= inradius/10 (throws GridError).
/// Boundary crossings located by bisection to tolerance 1e-12 * h.
ClippedGrid make_grid(const ConvexDomain& domain, double h);

/// Grid dump: one row per interior node, columns
/// i,j,x,y,class,theta_E,theta_W,theta_N,theta_S (theta = 1 for full arms).
std::string grid_to_csv(const ClippedGrid& grid);

} // namespace pflab
