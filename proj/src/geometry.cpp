#include "pflab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

namespace pflab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kDenseSamples = 4096;

double wrap_angle(double t) {
    t = std::fmod(t, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    return t;
}

// Golden-section maximization of fn on [lo, hi] to relative tolerance rel.
template <typename Fn>
double golden_max(Fn&& fn, double lo, double hi, double rel) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = fn(c), fd = fn(d);
    while (b - a > rel * std::max(1.0, std::abs(a) + std::abs(b))) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = fn(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = fn(d);
        }
    }
    return std::max(fc, fd);
}

template <typename Fn>
double golden_min_arg(Fn&& fn, double lo, double hi, double tol) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = fn(c), fd = fn(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = fn(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = fn(d);
        }
    }
    return 0.5 * (a + b);
}

} // namespace

ConvexDomain ConvexDomain::disk(double R) {
    if (!(R > 0.0)) throw DomainError("disk radius must be positive");
    ConvexDomain d;
    d.kind_ = DomainKind::Disk;
    d.p_[0] = R;
    std::ostringstream l;
    l << "disk:R=" << R;
    d.label_ = l.str();
    return d;
}

ConvexDomain ConvexDomain::ellipse(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("ellipse semi-axes must be positive");
    ConvexDomain d;
    d.kind_ = DomainKind::Ellipse;
    d.p_[0] = a;
    d.p_[1] = b;
    std::ostringstream l;
    l << "ellipse:a=" << a << ",b=" << b;
    d.label_ = l.str();
    return d;
}

ConvexDomain ConvexDomain::blob(double R, double eps, int k) {
    if (!(R > 0.0)) throw DomainError("blob base radius must be positive");
    if (eps < 0.0 || eps >= 1.0) throw DomainError("blob eps must lie in [0, 1)");
    if (k < 2) throw DomainError("blob frequency k must be >= 2 (k = 1 shifts the centroid)");
    ConvexDomain d;
    d.kind_ = DomainKind::Blob;
    d.p_[0] = R;
    d.p_[1] = eps;
    d.p_[2] = static_cast<double>(k);
    std::ostringstream l;
    l << "blob:R=" << R << ",eps=" << eps << ",k=" << k;
    d.label_ = l.str();
    d.validate_convexity();
    return d;
}

Vec2 ConvexDomain::boundary(double t) const {
    switch (kind_) {
        case DomainKind::Disk:
            return {p_[0] * std::cos(t), p_[0] * std::sin(t)};
        case DomainKind::Ellipse:
            return {p_[0] * std::cos(t), p_[1] * std::sin(t)};
        case DomainKind::Blob: {
            const double r = p_[0] * (1.0 + p_[1] * std::cos(p_[2] * t));
            return {r * std::cos(t), r * std::sin(t)};
        }
    }
    return {};
}

Vec2 ConvexDomain::boundary_d1(double t) const {
    switch (kind_) {
        case DomainKind::Disk:
            return {-p_[0] * std::sin(t), p_[0] * std::cos(t)};
        case DomainKind::Ellipse:
            return {-p_[0] * std::sin(t), p_[1] * std::cos(t)};
        case DomainKind::Blob: {
            const double k = p_[2];
            const double r = p_[0] * (1.0 + p_[1] * std::cos(k * t));
            const double rp = -p_[0] * p_[1] * k * std::sin(k * t);
            return {rp * std::cos(t) - r * std::sin(t), rp * std::sin(t) + r * std::cos(t)};
        }
    }
    return {};
}

Vec2 ConvexDomain::boundary_d2(double t) const {
    switch (kind_) {
        case DomainKind::Disk:
            return {-p_[0] * std::cos(t), -p_[0] * std::sin(t)};
        case DomainKind::Ellipse:
            return {-p_[0] * std::cos(t), -p_[1] * std::sin(t)};
        case DomainKind::Blob: {
            const double k = p_[2];
            const double r = p_[0] * (1.0 + p_[1] * std::cos(k * t));
            const double rp = -p_[0] * p_[1] * k * std::sin(k * t);
            const double rpp = -p_[0] * p_[1] * k * k * std::cos(k * t);
            return {rpp * std::cos(t) - 2.0 * rp * std::sin(t) - r * std::cos(t),
                    rpp * std::sin(t) + 2.0 * rp * std::cos(t) - r * std::sin(t)};
        }
    }
    return {};
}

Vec2 ConvexDomain::outward_normal(double t) const {
    const Vec2 d1 = boundary_d1(t);
    const double len = norm(d1);
    return {d1.y / len, -d1.x / len};  // counterclockwise tangent rotated -90 deg
}

double ConvexDomain::curvature(double t) const {
    const Vec2 d1 = boundary_d1(t);
    const Vec2 d2 = boundary_d2(t);
    const double speed2 = dot(d1, d1);
    const double kappa = (d1.x * d2.y - d1.y * d2.x) / (speed2 * std::sqrt(speed2));
    if (!(kappa > 0.0)) {
        std::ostringstream msg;
        msg << label_ << ": curvature " << kappa << " at t = " << t
            << " is not strictly positive";
        throw ConvexityError(msg.str());
    }
    return kappa;
}

void ConvexDomain::validate_convexity() const {
    for (int i = 0; i < kDenseSamples; ++i) {
        curvature(kTwoPi * i / kDenseSamples);  // throws on failure
    }
}

double ConvexDomain::k_max() const {
    double best = -1.0;
    int best_i = 0;
    for (int i = 0; i < kDenseSamples; ++i) {
        const double k = curvature(kTwoPi * i / kDenseSamples);
        if (k > best) {
            best = k;
            best_i = i;
        }
    }
    const double dt = kTwoPi / kDenseSamples;
    const double lo = kTwoPi * best_i / kDenseSamples - dt;
    const double hi = kTwoPi * best_i / kDenseSamples + dt;
    auto safe_kappa = [this](double t) { return curvature(wrap_angle(t)); };
    return std::max(best, golden_max(safe_kappa, lo, hi, 1e-10));
}

double ConvexDomain::alpha(int n) const {
    if (n < 2) throw DomainError("alpha requires dimension n >= 2");
    return 1.0 / (2.0 * (n - 1) * k_max());
}

double ConvexDomain::radial_gap(Vec2 p) const {
    const double rp = norm(p);
    const double th = std::atan2(p.y, p.x);
    double rb = 0.0;
    switch (kind_) {
        case DomainKind::Disk:
            rb = p_[0];
            break;
        case DomainKind::Ellipse: {
            const double c = std::cos(th), s = std::sin(th);
            rb = p_[0] * p_[1] / std::sqrt(p_[1] * p_[1] * c * c + p_[0] * p_[0] * s * s);
            break;
        }
        case DomainKind::Blob:
            rb = p_[0] * (1.0 + p_[1] * std::cos(p_[2] * th));
            break;
    }
    return rp - rb;
}

double ConvexDomain::param_from_point(Vec2 p) const {
    if (kind_ == DomainKind::Ellipse) return wrap_angle(std::atan2(p.y / p_[1], p.x / p_[0]));
    return wrap_angle(std::atan2(p.y, p.x));
}

double ConvexDomain::perimeter_scale() const {
    switch (kind_) {
        case DomainKind::Disk: return p_[0];
        case DomainKind::Ellipse: return std::max(p_[0], p_[1]);
        case DomainKind::Blob: return p_[0] * (1.0 + p_[1]);
    }
    return 1.0;
}

double ConvexDomain::distance_to_boundary(Vec2 p) const {
    double best = std::numeric_limits<double>::infinity();
    int best_i = 0;
    for (int i = 0; i < kDenseSamples; ++i) {
        const Vec2 b = boundary(kTwoPi * i / kDenseSamples);
        const double d2 = dot(b - p, b - p);
        if (d2 < best) {
            best = d2;
            best_i = i;
        }
    }
    const double dt = kTwoPi / kDenseSamples;
    const double t0 = kTwoPi * best_i / kDenseSamples;
    auto dist2 = [&](double t) {
        const Vec2 b = boundary(t);
        return dot(b - p, b - p);
    };
    const double t_best = golden_min_arg(dist2, t0 - dt, t0 + dt, 1e-13);
    return std::sqrt(std::min(best, dist2(t_best)));
}

double ConvexDomain::inradius() const {
    Vec2 p = centroid();
    double d = distance_to_boundary(p);
    double step = 0.5 * d;
    const double scale = perimeter_scale();
    while (step > 1e-9 * scale) {
        bool improved = true;
        while (improved) {
            improved = false;
            const Vec2 moves[4] = {{step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}};
            for (const Vec2& m : moves) {
                const Vec2 q = p + m;
                if (!inside(q)) continue;
                const double dq = distance_to_boundary(q);
                if (dq > d) {
                    p = q;
                    d = dq;
                    improved = true;
                }
            }
        }
        step *= 0.5;
    }
    return d;
}

namespace {

// Boundary crossing distance along the ray from an inside point; the caller
// supplies an outside point at distance len (convexity: a single crossing).
// Bisection to 1e-12 * len.
double ray_crossing(const ConvexDomain& dom, Vec2 from, Vec2 dir, double len) {
    double lo = 0.0, hi = len;
    if (dom.radial_gap(from + len * dir) < 0.0) return len;  // endpoint in the boundary band
    for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (dom.radial_gap(from + mid * dir) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

ClippedGrid make_grid(const ConvexDomain& domain, double h) {
    if (!(h > 0.0)) throw GridError("grid spacing must be positive");
    const double d = domain.inradius();
    if (h > d / 10.0 * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "grid spacing h = " << h << " too coarse for " << domain.label()
            << " (need h <= inradius/10 = " << d / 10.0 << ")";
        throw GridError(msg.str());
    }

    const double reach = domain.perimeter_scale() + 2.0 * h;
    const int imax = static_cast<int>(std::ceil(reach / h));
    const int width = 2 * imax + 1;
    auto cell = [imax, width](int i, int j) {
        return static_cast<std::size_t>(j + imax) * width + (i + imax);
    };

    // classification: 0 exterior, 1 interior, 2 merged-onto-boundary
    std::vector<std::int8_t> cls(static_cast<std::size_t>(width) * width, 0);
    auto pos = [h](int i, int j) { return Vec2{h * i, h * j}; };

    for (int j = -imax; j <= imax; ++j) {
        for (int i = -imax; i <= imax; ++i) {
            if (domain.inside(pos(i, j))) cls[cell(i, j)] = 1;
        }
    }

    const int dx[4] = {1, -1, 0, 0};  // E W N S
    const int dy[4] = {0, 0, 1, -1};
    const int ddx[4] = {1, -1, 1, -1};  // NE NW SE SW
    const int ddy[4] = {1, 1, -1, -1};

    // merge pass: nodes whose boundary crossing along some axis is closer than
    // 0.05 h are dropped as unknowns (Shortley-Weller conditioning)
    std::size_t merged = 0;
    for (int j = -imax; j <= imax; ++j) {
        for (int i = -imax; i <= imax; ++i) {
            if (cls[cell(i, j)] != 1) continue;
            const Vec2 p = pos(i, j);
            for (int a = 0; a < 4; ++a) {
                const int ni = i + dx[a], nj = j + dy[a];
                if (cls[cell(ni, nj)] == 1) continue;
                const Vec2 dir{static_cast<double>(dx[a]), static_cast<double>(dy[a])};
                if (ray_crossing(domain, p, dir, h) < 0.05 * h) {
                    cls[cell(i, j)] = 2;
                    ++merged;
                    break;
                }
            }
        }
    }

    ClippedGrid grid;
    grid.h = h;
    grid.anchor = domain.centroid();
    grid.merged_count = merged;
    grid.lattice_radius = imax;
    grid.lattice_index.assign(static_cast<std::size_t>(width) * width, -1);

    std::vector<std::int32_t>& index = grid.lattice_index;
    for (int j = -imax; j <= imax; ++j) {
        for (int i = -imax; i <= imax; ++i) {
            if (cls[cell(i, j)] != 1) continue;
            index[cell(i, j)] = static_cast<std::int32_t>(grid.nodes.size());
            ClippedGrid::Node node;
            node.i = i;
            node.j = j;
            grid.nodes.push_back(node);
        }
    }
    if (grid.nodes.empty()) throw GridError("no interior nodes");

    constexpr int kMaxHops = 8;
    auto cls_at = [&](int i, int j) -> std::int8_t {
        if (std::abs(i) > imax || std::abs(j) > imax) return 0;
        return cls[cell(i, j)];
    };

    for (auto& node : grid.nodes) {
        const Vec2 p = pos(node.i, node.j);
        node.uniform = true;
        for (int a = 0; a < 4; ++a) {
            // walk over merged positions to the first interior node or
            // exterior lattice point along the arm
            int m = 1;
            while (cls_at(node.i + m * dx[a], node.j + m * dy[a]) == 2 && m < kMaxHops) ++m;
            const std::int8_t c = cls_at(node.i + m * dx[a], node.j + m * dy[a]);
            if (c == 2) {
                throw GridError("merged-node chain exceeds the hop cap; domain too "
                                "flat for this spacing");
            }
            if (c == 1) {
                node.arm[a] = index[cell(node.i + m * dx[a], node.j + m * dy[a])];
                node.hops[a] = static_cast<std::int8_t>(m);
                if (m > 1) node.uniform = false;
                continue;
            }
            node.uniform = false;
            BoundaryLeg leg;
            leg.node = index[cell(node.i, node.j)];
            leg.dir = static_cast<std::int8_t>(a);
            const Vec2 dir{static_cast<double>(dx[a]), static_cast<double>(dy[a])};
            leg.theta = ray_crossing(domain, p, dir, m * h) / h;
            leg.point = p + (leg.theta * h) * dir;
            leg.t = domain.param_from_point(leg.point);
            leg.normal = domain.outward_normal(leg.t);
            node.arm[a] = -1 - static_cast<std::int32_t>(grid.legs.size());
            grid.legs.push_back(leg);
        }
        node.full_box = node.uniform;
        for (int a = 0; a < 4; ++a) {
            int m = 1;
            while (cls_at(node.i + m * ddx[a], node.j + m * ddy[a]) == 2 && m < kMaxHops) ++m;
            const std::int8_t c = cls_at(node.i + m * ddx[a], node.j + m * ddy[a]);
            if (c == 1 && m == 1) {
                node.diag[a] = index[cell(node.i + ddx[a], node.j + ddy[a])];
                continue;
            }
            node.full_box = false;
            // corner value from interpolation toward the diagonal crossing; a
            // merged corner puts the crossing past the corner (rho > 1). When
            // the walk re-enters the interior without crossing (boundary
            // nearly parallel to the diagonal), the merged corner sits within
            // 0.05 h of the boundary and takes the boundary value directly
            // (rho = 0 sentinel).
            DiagonalLeg dl;
            dl.node = index[cell(node.i, node.j)];
            dl.dir = static_cast<std::int8_t>(a);
            if (c == 0) {
                const double inv = 1.0 / std::numbers::sqrt2;
                const Vec2 dir{ddx[a] * inv, ddy[a] * inv};
                dl.rho = ray_crossing(domain, p, dir, m * h * std::numbers::sqrt2) /
                         (h * std::numbers::sqrt2);
            } else {
                dl.rho = 0.0;
            }
            node.diag[a] = -1 - static_cast<std::int32_t>(grid.diag_legs.size());
            grid.diag_legs.push_back(dl);
        }
    }
    return grid;
}

std::string grid_to_csv(const ClippedGrid& grid) {
    std::string out = "i,j,x,y,class,theta_E,theta_W,theta_N,theta_S\n";
    char line[256];
    for (std::size_t k = 0; k < grid.nodes.size(); ++k) {
        const auto& node = grid.nodes[k];
        const Vec2 p = grid.position(static_cast<std::int32_t>(k));
        double th[4];
        for (int a = 0; a < 4; ++a) {
            th[a] = node.arm[a] >= 0 ? static_cast<double>(node.hops[a])
                                     : grid.legs[-1 - node.arm[a]].theta;
        }
        std::snprintf(line, sizeof(line), "%d,%d,%.17g,%.17g,interior,%.17g,%.17g,%.17g,%.17g\n",
                      node.i, node.j, p.x, p.y, th[0], th[1], th[2], th[3]);
        out += line;
    }
    return out;
}

} // namespace pflab
