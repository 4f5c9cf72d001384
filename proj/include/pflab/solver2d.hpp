#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pflab/geometry.hpp"
#include "pflab/problem.hpp"

namespace pflab {

struct SolverLogEntry {
    double lambda = 0.0;
    int iter = 0;
    double residual_norm = 0.0;
    double step_damping = 1.0;
    int linear_iterations = 0;
};

/// Nodal solution on a clipped grid (boundary value 0 implied).
struct Field2D {
    enum class Status { NotRun, Converged, NewtonStalled, SpacelikeMarginUnattainable };

    std::shared_ptr<const ClippedGrid> grid;
    std::vector<double> values;
    Status status = Status::NotRun;
    double final_residual = 0.0;
    double lambda = 0.0;  // continuation factor reached
    std::vector<SolverLogEntry> log;
    std::size_t clamp_events = 0;
    std::string failure_detail;

    bool converged() const { return status == Status::Converged; }
};

struct SolveOptions {
    std::vector<double> lambda_schedule = {0.25, 0.5, 0.75, 0.9, 1.0};
    double newton_tol = 1e-10;  // max-norm of the residual
    int max_newton_iter = 50;   // per continuation step
    double linear_tol = 1e-10;  // relative residual of the inner solves
    int max_linear_iter = 20000;
    double fd_eps = 1e-7;  // Jacobian perturbation, scaled by max(1, |u_k|)
    std::vector<double> initial_guess;  // warm start for the first schedule entry
};

/// Residual of the non-divergence form at every interior node:
///   (g/G)(u_xx + u_yy) + (2g'/G)(ux^2 u_xx + 2 ux uy u_xy + uy^2 u_yy) - lambda f(u),
/// coefficients at s = ux^2 + uy^2. Throws SpacelikeViolation (with the node
/// location) when the discrete s reaches s_limit.
std::vector<double> residual_vector(const ProblemSpec& spec, const ClippedGrid& grid,
                                    const std::vector<double>& u, double lambda);

/// Damped Newton with load continuation. u = 0 is the exact lambda = 0
/// solution and seeds the first continuation step unless a warm start is
/// given. Failures are in-band (status + log), not exceptions.
Field2D newton_solve(const ProblemSpec& spec, std::shared_ptr<const ClippedGrid> grid,
                     const SolveOptions& opts = {});

/// Bilinear prolongation of a coarse field onto a finer grid (0 outside the
/// coarse interior); used to warm-start grid ladders.
std::vector<double> prolong(const Field2D& coarse, const ClippedGrid& fine);

/// CSV dump (i, j, x, y, u).
std::string field_to_csv(const Field2D& field);

/// Solver log as JSON lines {lambda, iter, residual_norm, step_damping}.
std::string solver_log_to_json_lines(const Field2D& field);

} // namespace pflab
