#include <doctest.h>

#include <cmath>

#include "pflab/problem.hpp"
#include "test_support.hpp"

using namespace pflab;
using namespace pflab::testing;

TEST_CASE("coefficient gain G for the built-in families") {
    const ProblemSpec euc = ProblemSpec::euclidean();
    CHECK(euc.G(0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(euc.G(3.0) == doctest::Approx(0.125).epsilon(1e-13));

    const ProblemSpec lor = ProblemSpec::lorentzian();
    CHECK(lor.G(0.75) == doctest::Approx(8.0).epsilon(1e-13));

    // closed-form identities over the admissible ranges
    for (int k = 0; k <= 200; ++k) {
        const double s = 100.0 * k / 200.0;
        CHECK(euc.G(s) * std::pow(1.0 + s, 1.5) == doctest::Approx(1.0).epsilon(1e-12));
    }
    for (int k = 0; k <= 200; ++k) {
        const double s = (1.0 - 1e-6) * k / 200.0;
        CHECK(lor.G(s) * std::pow(1.0 - s, 1.5) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("G rejects arguments at or past the gradient limit") {
    const ProblemSpec lor = ProblemSpec::lorentzian();
    CHECK_THROWS_AS(lor.G(1.0), DomainError);
    CHECK_THROWS_AS(lor.G(1.5), DomainError);
    CHECK_THROWS_AS(lor.G(-0.1), DomainError);
    bool clamped = false;
    CHECK(lor.clamp_s(2.0, &clamped) == doctest::Approx(1.0 - 1e-9));
    CHECK(clamped);
}

TEST_CASE("cumulative source integral") {
    const ProblemSpec pois = ProblemSpec::poisson();
    CHECK(cumulative_F(pois, -2.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(cumulative_F(pois, 0.0) == 0.0);
    CHECK_THROWS_AS(cumulative_F(pois, 0.5), DomainError);

    const ProblemSpec expf = exponential_source_spec();
    CHECK(cumulative_F(expf, -1.0) ==
          doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));

    // strictly decreasing in u for u < 0
    double prev = cumulative_F(expf, -5.0);
    for (double u = -4.5; u <= -1e-6; u += 0.5) {
        const double cur = cumulative_F(expf, u);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("concavity transform v(u)") {
    const ProblemSpec pois = ProblemSpec::poisson();
    CHECK(v_of_u(pois, -1.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(v_of_u(pois, -4.0) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(v_of_u(pois, 0.0) == 0.0);
    CHECK_THROWS_AS(v_of_u(pois, 1e-3), DomainError);

    for (int k = 0; k <= 100; ++k) {
        const double u = -10.0 + 10.0 * k / 100.0;
        if (u > 0.0) break;
        CHECK(v_of_u(pois, u) == doctest::Approx(2.0 * std::sqrt(-u)).epsilon(1e-9));
    }

    // quadrature path vs an independent composite-Simpson oracle on the
    // transformed integrand (y = -t^2)
    const ProblemSpec expf = exponential_source_spec();
    auto oracle = [&](double u) {
        auto integrand = [&](double t) {
            if (t == 0.0) return 2.0;
            return 2.0 * t / std::sqrt(1.0 - std::exp(-t * t));
        };
        return simpson(integrand, 0.0, std::sqrt(-u), 1 << 14);
    };
    CHECK(v_of_u(expf, -1.0) == doctest::Approx(oracle(-1.0)).epsilon(1e-8));
    CHECK(v_of_u(expf, -0.25) == doctest::Approx(oracle(-0.25)).epsilon(1e-8));

    double prev = v_of_u(expf, -3.0);
    for (double u = -2.5; u <= -1e-6; u += 0.25) {
        const double cur = v_of_u(expf, u);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("concavity hypothesis verdicts") {
    const auto us = default_u_samples(-3.0, 128);

    const auto marginal = check_concavity_hypothesis(ProblemSpec::poisson(), us);
    CHECK(marginal.verdict == HypothesisVerdict::Marginal);
    CHECK(marginal.min_convexity_combo == 0.0);

    const auto pass = check_concavity_hypothesis(exponential_source_spec(), us);
    CHECK(pass.verdict == HypothesisVerdict::Pass);
    CHECK(pass.min_f_prime > 0.0);
    CHECK(pass.min_convexity_combo > 0.0);

    const auto fail = check_concavity_hypothesis(wavy_source_spec(), us);
    CHECK(fail.verdict == HypothesisVerdict::Fail);  // f' = cos(u) < 0 near u = -3
}

TEST_CASE("minimum-principle hypothesis verdicts") {
    const auto us = default_u_samples(-1.0, 64);

    const ProblemSpec euc = ProblemSpec::euclidean();
    const auto se = default_s_samples(euc, 128, 10.0);
    const auto pass = check_min_principle_hypothesis(euc, 1.5, us, se);
    CHECK(pass.verdict == HypothesisVerdict::Pass);
    CHECK(pass.max_expression < 0.0);

    const ProblemSpec lor = ProblemSpec::lorentzian();
    const auto sl = default_s_samples(lor, 128, 1.0);
    const auto fail = check_min_principle_hypothesis(lor, 1.5, us, sl);
    CHECK(fail.verdict == HypothesisVerdict::Fail);
    CHECK(fail.max_expression > 0.0);

    const ProblemSpec pois = ProblemSpec::poisson();
    const auto sp = default_s_samples(pois, 128, 10.0);
    const auto marginal = check_min_principle_hypothesis(pois, 1.5, us, sp);
    CHECK(marginal.verdict == HypothesisVerdict::Marginal);
}

TEST_CASE("sample generators cover the admissible ranges") {
    const ProblemSpec lor = ProblemSpec::lorentzian();
    const auto sl = default_s_samples(lor, 512, 1.0);
    CHECK(sl.front() == 0.0);
    CHECK(sl.back() > 0.99);
    for (double s : sl) {
        CHECK(s >= 0.0);
        CHECK(s < lor.s_limit);
    }
    const auto us = default_u_samples(-2.0, 512);
    CHECK(us.back() == 0.0);
    CHECK(us.front() == doctest::Approx(-2.0));
}
