#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "pflab/errors.hpp"

namespace pflab {

using ScalarFn = std::function<double(double)>;

/// Coefficient pair (g, f) of the divergence-form family
///
///     div(g(|grad u|^2) grad u) = f(u) * G(|grad u|^2),   G(s) = g(s) + 2 s g'(s),
///
/// with u = 0 on the boundary. g lives on s in [0, s_limit); f on u <= 0.
/// Immutable after construction and safe to share across threads.
struct ProblemSpec {
    std::string name;
    int n = 2;
    double s_limit = std::numeric_limits<double>::infinity();

    ScalarFn g, g_prime, g_second;
    ScalarFn f, f_prime, f_second;

    // Set for f == const; enables closed forms for cumulative_F / v_of_u.
    bool f_is_constant = false;
    double f_constant_value = 1.0;

    /// G(s) = g(s) + 2 s g'(s). Throws DomainError for s outside [0, s_limit).
    double G(double s) const;

    /// G'(s) = 3 g'(s) + 2 s g''(s).
    double G_prime(double s) const;

    /// Pulls s into the admissible range [0, s_limit * (1 - 1e-9)].
    /// Returns the clamped value; *clamped is set when clamping occurred.
    double clamp_s(double s, bool* clamped = nullptr) const;

    void require_admissible_s(double s) const;
    void require_admissible_u(double u) const;

    bool is_lorentzian_family() const { return std::isfinite(s_limit); }

    static ProblemSpec euclidean(int n = 2);   // g = (1+s)^{-1/2}, f = 1
    static ProblemSpec lorentzian(int n = 2);  // g = (1-s)^{-1/2}, f = 1, s_limit = 1
    static ProblemSpec poisson(int n = 2);     // g = 1, f = 1
};

/// F(u) = integral_u^0 f(y) dy, u <= 0. Exact for constant f, otherwise
/// adaptive quadrature to relative tolerance 1e-12. Positive for u < 0.
double cumulative_F(const ProblemSpec& spec, double u);

/// v(u) = integral_u^0 dy / sqrt(F(y)), u <= 0. The integrable endpoint
/// singularity at y = 0 is removed by the substitution y = -t^2 before
/// quadrature (relative tolerance 1e-10). Closed form 2 sqrt(-u/c) for f == c.
double v_of_u(const ProblemSpec& spec, double u);

enum class HypothesisVerdict { Pass, Marginal, Fail };

const char* to_string(HypothesisVerdict v);

/// Structural hypothesis behind the concavity theorem:
/// f' > 0 and 2 (f')^2 - f f'' >= 0 on the sampled u-range.
/// "Marginal" flags f' identically zero on the samples (constant f):
/// the strict inequality fails but the combination is degenerate, not negative.
struct ConcavityHypothesisReport {
    HypothesisVerdict verdict;
    double min_f_prime = 0.0;
    double max_abs_f_prime = 0.0;
    double min_convexity_combo = 0.0;  // min of 2 f'^2 - f f''
    std::size_t samples = 0;
};

ConcavityHypothesisReport check_concavity_hypothesis(const ProblemSpec& spec,
                                                     const std::vector<double>& u_samples);

/// Structural hypothesis behind the minimum principle:
/// g f' G + beta g f^2 G' <= 0 over the sampled (u, s) grid.
struct MinPrincipleHypothesisReport {
    HypothesisVerdict verdict;
    double beta = 0.0;
    double max_expression = 0.0;
    double min_expression = 0.0;
    std::size_t samples = 0;
};

MinPrincipleHypothesisReport check_min_principle_hypothesis(const ProblemSpec& spec,
                                                            double beta,
                                                            const std::vector<double>& u_samples,
                                                            const std::vector<double>& s_samples);

/// Default sample sets for the hypothesis checks: geometric clustering near
/// s = 0 and (when finite) near s_limit; u-samples cluster near 0 and u_low.
std::vector<double> default_s_samples(const ProblemSpec& spec, std::size_t count = 512,
                                      double s_max_hint = 100.0);
std::vector<double> default_u_samples(double u_low, std::size_t count = 512);

} // namespace pflab
