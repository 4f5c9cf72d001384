#include "pflab/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace pflab {

namespace {

double adaptive_integral(const std::function<double(double)>& fn, double a, double b,
                         double rel_tol) {
    if (a == b) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        fn, a, b, 15, rel_tol);
}

} // namespace

double ProblemSpec::G(double s) const {
    require_admissible_s(s);
    return g(s) + 2.0 * s * g_prime(s);
}

double ProblemSpec::G_prime(double s) const {
    require_admissible_s(s);
    return 3.0 * g_prime(s) + 2.0 * s * g_second(s);
}

double ProblemSpec::clamp_s(double s, bool* clamped) const {
    double lo = 0.0;
    double hi = std::isfinite(s_limit) ? s_limit * (1.0 - 1e-9)
                                       : std::numeric_limits<double>::infinity();
    double out = std::min(std::max(s, lo), hi);
    if (clamped) *clamped = (out != s);
    return out;
}

void ProblemSpec::require_admissible_s(double s) const {
    if (!(s >= 0.0) || s >= s_limit) {
        std::ostringstream msg;
        msg << "coefficient argument s = " << s << " outside [0, " << s_limit
            << ") for problem '" << name << "'";
        throw DomainError(msg.str());
    }
}

void ProblemSpec::require_admissible_u(double u) const {
    if (!(u <= 0.0)) {
        std::ostringstream msg;
        msg << "u = " << u << " > 0 not admissible (problem '" << name << "')";
        throw DomainError(msg.str());
    }
}

ProblemSpec ProblemSpec::euclidean(int n) {
    ProblemSpec p;
    p.name = "euclidean";
    p.n = n;
    p.g = [](double s) { return 1.0 / std::sqrt(1.0 + s); };
    p.g_prime = [](double s) { return -0.5 * std::pow(1.0 + s, -1.5); };
    p.g_second = [](double s) { return 0.75 * std::pow(1.0 + s, -2.5); };
    p.f = [](double) { return 1.0; };
    p.f_prime = [](double) { return 0.0; };
    p.f_second = [](double) { return 0.0; };
    p.f_is_constant = true;
    p.f_constant_value = 1.0;
    return p;
}

ProblemSpec ProblemSpec::lorentzian(int n) {
    ProblemSpec p;
    p.name = "lorentzian";
    p.n = n;
    p.s_limit = 1.0;
    p.g = [](double s) { return 1.0 / std::sqrt(1.0 - s); };
    p.g_prime = [](double s) { return 0.5 * std::pow(1.0 - s, -1.5); };
    p.g_second = [](double s) { return 0.75 * std::pow(1.0 - s, -2.5); };
    p.f = [](double) { return 1.0; };
    p.f_prime = [](double) { return 0.0; };
    p.f_second = [](double) { return 0.0; };
    p.f_is_constant = true;
    p.f_constant_value = 1.0;
    return p;
}

ProblemSpec ProblemSpec::poisson(int n) {
    ProblemSpec p;
    p.name = "poisson";
    p.n = n;
    p.g = [](double) { return 1.0; };
    p.g_prime = [](double) { return 0.0; };
    p.g_second = [](double) { return 0.0; };
    p.f = [](double) { return 1.0; };
    p.f_prime = [](double) { return 0.0; };
    p.f_second = [](double) { return 0.0; };
    p.f_is_constant = true;
    p.f_constant_value = 1.0;
    return p;
}

double cumulative_F(const ProblemSpec& spec, double u) {
    spec.require_admissible_u(u);
    if (u == 0.0) return 0.0;
    if (spec.f_is_constant) return -u * spec.f_constant_value;
    return adaptive_integral(spec.f, u, 0.0, 1e-12);
}

double v_of_u(const ProblemSpec& spec, double u) {
    spec.require_admissible_u(u);
    if (u == 0.0) return 0.0;
    if (spec.f_is_constant) return 2.0 * std::sqrt(-u / spec.f_constant_value);
    // y = -t^2 removes the 1/sqrt singularity at y = 0:
    //   v(u) = int_0^sqrt(-u) 2 t / sqrt(F(-t^2)) dt,
    // with limit 2/sqrt(f(0)) at t = 0.
    const double T = std::sqrt(-u);
    auto integrand = [&spec](double t) {
        if (t == 0.0) return 2.0 / std::sqrt(spec.f(0.0));
        return 2.0 * t / std::sqrt(cumulative_F(spec, -t * t));
    };
    return adaptive_integral(integrand, 0.0, T, 1e-10);
}

const char* to_string(HypothesisVerdict v) {
    switch (v) {
        case HypothesisVerdict::Pass: return "pass";
        case HypothesisVerdict::Marginal: return "marginal";
        case HypothesisVerdict::Fail: return "fail";
    }
    return "?";
}

ConcavityHypothesisReport check_concavity_hypothesis(const ProblemSpec& spec,
                                                     const std::vector<double>& u_samples) {
    ConcavityHypothesisReport rep;
    rep.min_f_prime = std::numeric_limits<double>::infinity();
    rep.min_convexity_combo = std::numeric_limits<double>::infinity();
    rep.max_abs_f_prime = 0.0;
    for (double u : u_samples) {
        spec.require_admissible_u(u);
        const double fp = spec.f_prime(u);
        const double combo = 2.0 * fp * fp - spec.f(u) * spec.f_second(u);
        rep.min_f_prime = std::min(rep.min_f_prime, fp);
        rep.max_abs_f_prime = std::max(rep.max_abs_f_prime, std::abs(fp));
        rep.min_convexity_combo = std::min(rep.min_convexity_combo, combo);
    }
    rep.samples = u_samples.size();
    if (rep.min_convexity_combo < 0.0 || rep.min_f_prime < 0.0) {
        rep.verdict = HypothesisVerdict::Fail;
    } else if (rep.max_abs_f_prime == 0.0) {
        rep.verdict = HypothesisVerdict::Marginal;  // f' == 0: strict part fails benignly
    } else if (rep.min_f_prime > 0.0) {
        rep.verdict = HypothesisVerdict::Pass;
    } else {
        rep.verdict = HypothesisVerdict::Fail;  // f' touches zero without vanishing identically
    }
    return rep;
}

MinPrincipleHypothesisReport check_min_principle_hypothesis(const ProblemSpec& spec,
                                                            double beta,
                                                            const std::vector<double>& u_samples,
                                                            const std::vector<double>& s_samples) {
    MinPrincipleHypothesisReport rep;
    rep.beta = beta;
    rep.max_expression = -std::numeric_limits<double>::infinity();
    rep.min_expression = std::numeric_limits<double>::infinity();
    for (double s : s_samples) {
        const double gv = spec.g(s);
        const double Gv = spec.G(s);
        const double Gp = spec.G_prime(s);
        for (double u : u_samples) {
            const double fv = spec.f(u);
            const double fp = spec.f_prime(u);
            const double expr = gv * fp * Gv + beta * gv * fv * fv * Gp;
            rep.max_expression = std::max(rep.max_expression, expr);
            rep.min_expression = std::min(rep.min_expression, expr);
        }
    }
    rep.samples = u_samples.size() * s_samples.size();
    if (rep.max_expression > 0.0) {
        rep.verdict = HypothesisVerdict::Fail;
    } else if (rep.max_expression == 0.0 && rep.min_expression == 0.0) {
        rep.verdict = HypothesisVerdict::Marginal;  // expression vanishes identically
    } else {
        rep.verdict = HypothesisVerdict::Pass;
    }
    return rep;
}

std::vector<double> default_s_samples(const ProblemSpec& spec, std::size_t count,
                                      double s_max_hint) {
    std::vector<double> out;
    out.reserve(count);
    out.push_back(0.0);
    if (std::isfinite(spec.s_limit)) {
        // half geometric from the left, half approaching s_limit from below
        const double lim = spec.s_limit;
        const std::size_t half = (count - 1) / 2;
        for (std::size_t i = 0; i < half; ++i) {
            double e = -9.0 + 9.0 * static_cast<double>(i) / static_cast<double>(half);
            out.push_back(0.5 * lim * std::pow(10.0, e));
        }
        const std::size_t rest = count - 1 - half;
        for (std::size_t i = 0; i < rest; ++i) {
            double e = -0.30103 - 8.0 * static_cast<double>(i) / static_cast<double>(rest);
            out.push_back(lim * (1.0 - std::pow(10.0, e)));
        }
    } else {
        for (std::size_t i = 0; i + 1 < count; ++i) {
            double e = -9.0 + 9.0 * static_cast<double>(i) / static_cast<double>(count - 2);
            out.push_back(s_max_hint * std::pow(10.0, e));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> default_u_samples(double u_low, std::size_t count) {
    std::vector<double> out;
    out.reserve(count);
    out.push_back(0.0);
    const double mag = std::abs(u_low);
    if (mag > 0.0) {
        for (std::size_t i = 0; i + 1 < count; ++i) {
            double e = -9.0 + 9.0 * static_cast<double>(i) / static_cast<double>(count - 2);
            out.push_back(-mag * std::pow(10.0, e));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace pflab
