#include "pflab/solver2d.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "pflab/sparse.hpp"
#include "pflab/stencils.hpp"

namespace pflab {

namespace {

// Coefficient evaluation is always clamped into the admissible s-range; the
// public residual op separately enforces the s < s_limit precondition on the
// actual state (Jacobian perturbations may brush past the margin harmlessly).
double residual_core(const ProblemSpec& spec, const StencilEvaluator& st,
                     const std::vector<double>& u, std::int32_t node, double lambda,
                     std::size_t* clamp_events) {
    const NodeDerivatives d = st.evaluate(u, node);
    bool clamped = false;
    const double s = spec.clamp_s(d.s, &clamped);
    if (clamped && clamp_events) ++(*clamp_events);
    const double gv = spec.g(s);
    const double gp = spec.g_prime(s);
    const double Gv = gv + 2.0 * s * gp;
    const double quad = d.ux * d.ux * d.uxx + 2.0 * d.ux * d.uy * d.uxy + d.uy * d.uy * d.uyy;
    const double fv = spec.f(std::min(u[node], 0.0));
    return (gv / Gv) * (d.uxx + d.uyy) + (2.0 * gp / Gv) * quad - lambda * fv;
}

double max_s(const StencilEvaluator& st, const std::vector<double>& u) {
    double m = 0.0;
    for (std::int32_t k = 0; k < static_cast<std::int32_t>(u.size()); ++k) {
        m = std::max(m, st.evaluate(u, k).s);
    }
    return m;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// 9-point box sparsity from the grid arms.
CsrMatrix build_pattern(const ClippedGrid& grid) {
    const int n = static_cast<int>(grid.size());
    CsrMatrix A;
    A.n = n;
    A.row_ptr.assign(n + 1, 0);
    std::vector<std::int32_t> cols;
    cols.reserve(9);
    std::vector<std::int32_t> all_cols;
    all_cols.reserve(9 * n);
    for (int m = 0; m < n; ++m) {
        const auto& node = grid.nodes[m];
        cols.clear();
        cols.push_back(m);
        for (int a = 0; a < 4; ++a) {
            if (node.arm[a] >= 0) cols.push_back(node.arm[a]);
            if (node.diag[a] >= 0) cols.push_back(node.diag[a]);
        }
        std::sort(cols.begin(), cols.end());
        A.row_ptr[m + 1] = A.row_ptr[m] + static_cast<std::int32_t>(cols.size());
        all_cols.insert(all_cols.end(), cols.begin(), cols.end());
    }
    A.col = std::move(all_cols);
    A.val.assign(A.col.size(), 0.0);
    return A;
}

// Nodes whose residual depends on u_k: k itself plus its box neighbours.
void box_members(const ClippedGrid& grid, std::int32_t k, std::vector<std::int32_t>& out) {
    out.clear();
    out.push_back(k);
    const auto& node = grid.nodes[k];
    for (int a = 0; a < 4; ++a) {
        if (node.arm[a] >= 0) out.push_back(node.arm[a]);
        if (node.diag[a] >= 0) out.push_back(node.diag[a]);
    }
}

} // namespace

std::vector<double> residual_vector(const ProblemSpec& spec, const ClippedGrid& grid,
                                    const std::vector<double>& u, double lambda) {
    StencilEvaluator st(grid);
    const std::int32_t n = static_cast<std::int32_t>(grid.size());
    std::vector<double> res(n);
    for (std::int32_t k = 0; k < n; ++k) {
        const NodeDerivatives d = st.evaluate(u, k);
        if (d.s >= spec.s_limit) {
            const Vec2 p = grid.position(k);
            std::ostringstream msg;
            msg << "|grad u|^2 = " << d.s << " >= " << spec.s_limit << " at node ("
                << p.x << ", " << p.y << ")";
            throw SpacelikeViolation(msg.str(), p.x, p.y);
        }
        res[k] = residual_core(spec, st, u, k, lambda, nullptr);
    }
    return res;
}

Field2D newton_solve(const ProblemSpec& spec, std::shared_ptr<const ClippedGrid> grid,
                     const SolveOptions& opts) {
    Field2D field;
    field.grid = grid;
    const ClippedGrid& g = *grid;
    const int n = static_cast<int>(g.size());
    field.values.assign(n, 0.0);
    if (!opts.initial_guess.empty()) {
        if (opts.initial_guess.size() != static_cast<std::size_t>(n)) {
            throw DomainError("warm start size does not match the grid");
        }
        field.values = opts.initial_guess;
    }
    field.status = Field2D::Status::Converged;  // lambda = 0 solution
    field.lambda = 0.0;
    if (opts.lambda_schedule.empty()) return field;

    StencilEvaluator st(g);
    CsrMatrix J = build_pattern(g);
    std::vector<double> res(n), res_new(n), delta(n), u_trial(n);
    std::vector<std::int32_t> members;
    const bool bounded_s = std::isfinite(spec.s_limit);
    const double s_margin = bounded_s ? spec.s_limit * (1.0 - 1e-6)
                                      : std::numeric_limits<double>::infinity();

    auto eval_residual = [&](const std::vector<double>& u, double lambda,
                             std::vector<double>& out) {
        for (std::int32_t k = 0; k < n; ++k) {
            out[k] = residual_core(spec, st, u, k, lambda, &field.clamp_events);
        }
    };

    for (double lambda : opts.lambda_schedule) {
        bool stage_done = false;
        eval_residual(field.values, lambda, res);
        double res_norm = max_abs(res);

        for (int iter = 0; iter < opts.max_newton_iter; ++iter) {
            field.log.push_back({lambda, iter, res_norm, 1.0, 0});
            if (res_norm <= opts.newton_tol) {
                stage_done = true;
                break;
            }

            // finite-difference Jacobian on the fixed 9-point pattern
            std::fill(J.val.begin(), J.val.end(), 0.0);
            for (std::int32_t k = 0; k < n; ++k) {
                const double eps = opts.fd_eps * std::max(1.0, std::abs(field.values[k]));
                const double saved = field.values[k];
                field.values[k] = saved + eps;
                box_members(g, k, members);
                for (std::int32_t m : members) {
                    const double rm = residual_core(spec, st, field.values, m, lambda, nullptr);
                    const std::int32_t slot = J.slot(m, k);
                    J.val[slot] = (rm - res[m]) / eps;
                }
                field.values[k] = saved;
            }

            std::fill(delta.begin(), delta.end(), 0.0);
            std::vector<double> rhs(n);
            for (int i = 0; i < n; ++i) rhs[i] = -res[i];
            const LinearSolveResult lin =
                bicgstab_jacobi(J, rhs, delta, opts.linear_tol, opts.max_linear_iter);
            field.log.back().linear_iterations = lin.iterations;
            if (!lin.converged) {
                field.status = Field2D::Status::NewtonStalled;
                std::ostringstream msg;
                msg << "linear solve stalled at lambda = " << lambda << ", iter = " << iter
                    << " (rel residual " << lin.rel_residual << ")";
                field.failure_detail = msg.str();
                field.final_residual = res_norm;
                return field;
            }

            // halve until the residual norm drops and the gradient margin holds
            double damping = 1.0;
            bool accepted = false;
            bool margin_blocked = false;
            for (int halving = 0; halving < 60; ++halving, damping *= 0.5) {
                for (int i = 0; i < n; ++i) u_trial[i] = field.values[i] + damping * delta[i];
                if (bounded_s && max_s(st, u_trial) > s_margin) {
                    margin_blocked = true;
                    continue;
                }
                eval_residual(u_trial, lambda, res_new);
                const double trial_norm = max_abs(res_new);
                if (trial_norm < res_norm) {
                    field.values = u_trial;
                    res = res_new;
                    res_norm = trial_norm;
                    field.log.back().step_damping = damping;
                    accepted = true;
                    break;
                }
            }
            if (!accepted) {
                field.final_residual = res_norm;
                if (margin_blocked || (bounded_s && max_s(st, field.values) > 0.999 * s_margin)) {
                    field.status = Field2D::Status::SpacelikeMarginUnattainable;
                    field.failure_detail =
                        "no damped step keeps |grad u|^2 below the admissible margin";
                } else {
                    field.status = Field2D::Status::NewtonStalled;
                    field.failure_detail = "line search found no residual decrease";
                }
                return field;
            }
        }

        if (!stage_done) {
            field.status = Field2D::Status::NewtonStalled;
            std::ostringstream msg;
            msg << "no convergence after " << opts.max_newton_iter
                << " Newton steps at lambda = " << lambda;
            field.failure_detail = msg.str();
            field.final_residual = res_norm;
            return field;
        }
        field.lambda = lambda;
        field.final_residual = res_norm;
    }

    field.status = Field2D::Status::Converged;
    return field;
}

std::vector<double> prolong(const Field2D& coarse, const ClippedGrid& fine) {
    const ClippedGrid& cg = *coarse.grid;
    const double H = cg.h;
    std::vector<double> out(fine.size(), 0.0);
    auto coarse_value = [&](std::int32_t i, std::int32_t j) {
        const std::int32_t idx = cg.index_at(i, j);
        return idx >= 0 ? coarse.values[idx] : 0.0;
    };
    for (std::size_t k = 0; k < fine.size(); ++k) {
        const Vec2 p = fine.position(static_cast<std::int32_t>(k));
        const double fx = p.x / H, fy = p.y / H;
        const std::int32_t i0 = static_cast<std::int32_t>(std::floor(fx));
        const std::int32_t j0 = static_cast<std::int32_t>(std::floor(fy));
        const double ax = fx - i0, ay = fy - j0;
        out[k] = (1 - ax) * (1 - ay) * coarse_value(i0, j0) +
                 ax * (1 - ay) * coarse_value(i0 + 1, j0) +
                 (1 - ax) * ay * coarse_value(i0, j0 + 1) +
                 ax * ay * coarse_value(i0 + 1, j0 + 1);
    }
    return out;
}

std::string field_to_csv(const Field2D& field) {
    std::string out = "i,j,x,y,u\n";
    char line[160];
    for (std::size_t k = 0; k < field.values.size(); ++k) {
        const auto& node = field.grid->nodes[k];
        const Vec2 p = field.grid->position(static_cast<std::int32_t>(k));
        std::snprintf(line, sizeof(line), "%d,%d,%.17g,%.17g,%.17g\n", node.i, node.j, p.x,
                      p.y, field.values[k]);
        out += line;
    }
    return out;
}

std::string solver_log_to_json_lines(const Field2D& field) {
    std::string out;
    char line[200];
    for (const auto& e : field.log) {
        std::snprintf(line, sizeof(line),
                      "{\"lambda\":%.17g,\"iter\":%d,\"residual_norm\":%.17g,"
                      "\"step_damping\":%.17g}\n",
                      e.lambda, e.iter, e.residual_norm, e.step_damping);
        out += line;
    }
    return out;
}

} // namespace pflab
