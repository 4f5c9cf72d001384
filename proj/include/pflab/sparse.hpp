#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace pflab {

/// Compressed-sparse-row matrix with a fixed pattern; values refilled per
/// Newton iteration.
struct CsrMatrix {
    int n = 0;
    std::vector<std::int32_t> row_ptr;  // size n+1
    std::vector<std::int32_t> col;
    std::vector<double> val;

    void multiply(std::span<const double> x, std::span<double> y) const;
    /// Returns the slot of (row, c), or -1 when outside the pattern.
    std::int32_t slot(int row, int c) const;
};

struct LinearSolveResult {
    bool converged = false;
    int iterations = 0;
    double rel_residual = 0.0;
};

/// BiCGStab with Jacobi (diagonal) preconditioning. Deterministic: fixed
/// iteration order, no randomness. x holds the initial guess on entry and the
/// solution on exit. Convergence on ||b - Ax|| <= rel_tol * ||b||.
LinearSolveResult bicgstab_jacobi(const CsrMatrix& A, std::span<const double> b,
                                  std::span<double> x, double rel_tol, int max_iter);

} // namespace pflab
