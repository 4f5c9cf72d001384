#include "pflab/sparse.hpp"

#include <algorithm>
#include <cmath>

namespace pflab {

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    for (int r = 0; r < n; ++r) {
        double acc = 0.0;
        for (std::int32_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
            acc += val[k] * x[col[k]];
        }
        y[r] = acc;
    }
}

std::int32_t CsrMatrix::slot(int row, int c) const {
    for (std::int32_t k = row_ptr[row]; k < row_ptr[row + 1]; ++k) {
        if (col[k] == c) return k;
    }
    return -1;
}

namespace {

double dot_product(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(std::span<const double> a) { return std::sqrt(dot_product(a, a)); }

} // namespace

LinearSolveResult bicgstab_jacobi(const CsrMatrix& A, std::span<const double> b,
                                  std::span<double> x, double rel_tol, int max_iter) {
    const int n = A.n;
    LinearSolveResult out;

    std::vector<double> dinv(n, 1.0);
    for (int r = 0; r < n; ++r) {
        for (std::int32_t k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) {
            if (A.col[k] == r && A.val[k] != 0.0) {
                dinv[r] = 1.0 / A.val[k];
                break;
            }
        }
    }

    const double norm_b = norm2(b);
    const double target = rel_tol * (norm_b > 0.0 ? norm_b : 1.0);

    std::vector<double> r(n), r0(n), p(n), v(n), t(n), y(n), z(n);
    int total_it = 0;

    for (int restart = 0; restart < 8; ++restart) {
        A.multiply(x, r);
        for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
        double res_norm = norm2(r);
        out.rel_residual = norm_b > 0.0 ? res_norm / norm_b : res_norm;
        if (res_norm <= target) {
            out.converged = true;
            out.iterations = total_it;
            return out;
        }
        if (total_it >= max_iter) break;

        r0 = r;
        double rho = 1.0, alpha = 1.0, omega = 1.0;
        std::fill(p.begin(), p.end(), 0.0);
        std::fill(v.begin(), v.end(), 0.0);
        bool first = true;

        while (total_it < max_iter) {
            const double rho_new = dot_product(r0, r);
            if (rho_new == 0.0) break;  // breakdown -> restart with fresh shadow residual
            if (first) {
                p = r;
                first = false;
            } else {
                const double beta = (rho_new / rho) * (alpha / omega);
                for (int i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
            }
            rho = rho_new;

            for (int i = 0; i < n; ++i) y[i] = dinv[i] * p[i];
            A.multiply(y, v);
            const double r0v = dot_product(r0, v);
            if (r0v == 0.0) break;
            alpha = rho / r0v;
            for (int i = 0; i < n; ++i) r[i] -= alpha * v[i];  // s = r - alpha v
            ++total_it;

            if (norm2(r) <= 0.25 * target) {
                for (int i = 0; i < n; ++i) x[i] += alpha * y[i];
                break;  // outer loop verifies the true residual
            }

            for (int i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
            A.multiply(z, t);
            const double tt = dot_product(t, t);
            if (tt == 0.0) {
                for (int i = 0; i < n; ++i) x[i] += alpha * y[i];
                break;
            }
            omega = dot_product(t, r) / tt;
            for (int i = 0; i < n; ++i) {
                x[i] += alpha * y[i] + omega * z[i];
                r[i] -= omega * t[i];
            }
            if (norm2(r) <= 0.25 * target || omega == 0.0) break;
        }
    }

    A.multiply(x, t);
    double true_res = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = b[i] - t[i];
        true_res += d * d;
    }
    true_res = std::sqrt(true_res);
    out.rel_residual = norm_b > 0.0 ? true_res / norm_b : true_res;
    out.iterations = total_it;
    out.converged = true_res <= target;
    return out;
}

} // namespace pflab
