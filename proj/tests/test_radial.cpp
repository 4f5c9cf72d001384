#include <doctest.h>

#include <cmath>

#include "pflab/radial.hpp"
#include "test_support.hpp"

using namespace pflab;
using namespace pflab::testing;

TEST_CASE("radial right-hand side") {
    const ProblemSpec euc = ProblemSpec::euclidean();
    CHECK(radial_rhs(euc, 2, 0.0, -0.3, 0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(radial_rhs(ProblemSpec::euclidean(3), 3, 0.0, -0.3, 0.0) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    // friction term vanishes with phi' = 0 away from the center
    CHECK(radial_rhs(euc, 2, 0.5, -0.2, 0.0) == doctest::Approx(1.0).epsilon(1e-14));

    const ProblemSpec lor = ProblemSpec::lorentzian();
    CHECK_THROWS_AS(radial_rhs(lor, 2, 0.5, -0.2, 1.1), SpacelikeViolation);
}

TEST_CASE("integrator reproduces the closed-form quadratic profile") {
    const ProblemSpec pois = ProblemSpec::poisson();
    const RadialSolution sol = integrate_radial(pois, 2, -0.3, 1.0, 1.0 / 2000.0);
    for (std::size_t k = 0; k < sol.r.size(); ++k) {
        const double expected = -0.3 + sol.r[k] * sol.r[k] / 4.0;
        CHECK(sol.phi[k] == doctest::Approx(expected).epsilon(1e-10));
        CHECK(sol.phi_second[k] == doctest::Approx(0.5).epsilon(1e-10));
    }
    CHECK_THROWS_AS(integrate_radial(pois, 2, -0.3, 1.0, 0.1), DomainError);
    CHECK_THROWS_AS(integrate_radial(pois, 2, 0.3, 1.0, 1e-3), DomainError);
}

TEST_CASE("integrator is fourth order on a nonlinear instance") {
    const ProblemSpec euc = ProblemSpec::euclidean();
    // the profile rises monotonically away from the center
    const RadialSolution probe = integrate_radial(euc, 2, -0.3, 1.0, 1.0 / 2000);
    for (std::size_t k = 1; k < probe.phi_prime.size(); ++k) {
        CHECK(probe.phi_prime[k] > 0.0);
    }
    auto terminal = [&](double h) {
        return integrate_radial(euc, 2, -0.3, 1.0, h).phi.back();
    };
    const double d1 = std::abs(terminal(1.0 / 200) - terminal(1.0 / 400));
    const double d2 = std::abs(terminal(1.0 / 400) - terminal(1.0 / 800));
    REQUIRE(d1 > 0.0);
    REQUIRE(d2 > 0.0);
    const double order = std::log2(d1 / d2);
    CHECK(order > 3.2);
    CHECK(order < 5.0);
}

TEST_CASE("shooting: linear source closed form") {
    const ShootOutcome out = shoot_radial(ProblemSpec::poisson(), 2, 1.0);
    REQUIRE(out.converged());
    CHECK(out.solution->phi0 == doctest::Approx(-0.25).epsilon(1e-8));
    CHECK(std::abs(out.solution->residual) <= 1e-10);
    // phi' > 0 away from the center, phi'(0) = 0
    CHECK(out.solution->phi_prime.front() == 0.0);
    CHECK(out.solution->phi_prime.back() > 0.0);
}

TEST_CASE("shooting: gradient-limited family") {
    const ProblemSpec lor = ProblemSpec::lorentzian();
    const ShootOutcome ok = shoot_radial(lor, 2, 0.3);
    REQUIRE(ok.converged());
    CHECK(ok.solution->max_abs_phi_prime < 1.0);
    CHECK(ok.solution->phi0 == doctest::Approx(-0.0225637604).epsilon(1e-7));

    const ShootOutcome fail = shoot_radial(lor, 2, 5.0);
    CHECK_FALSE(fail.converged());
    CHECK(fail.status == ShootOutcome::Status::SpacelikeLimited);
    CHECK_FALSE(fail.message.empty());
}

TEST_CASE("shooting: curvature-flux family lands in the a-priori sandwich") {
    const ShootOutcome out = shoot_radial(ProblemSpec::euclidean(), 2, 1.0);
    REQUIRE(out.converged());
    const double depth = -out.solution->phi0;
    CHECK(depth >= 0.1797);
    CHECK(depth <= 0.5);
    CHECK(out.solution->phi0 == doctest::Approx(-0.2427770648).epsilon(1e-7));
}

TEST_CASE("shooting in three dimensions keeps the sandwich") {
    // ball of radius 1, n = 3: alpha = R / (2 (n-1)) = 0.25, ceiling d^2/2 = 0.5
    const ShootOutcome out = shoot_radial(ProblemSpec::euclidean(3), 3, 1.0);
    REQUIRE(out.converged());
    const double depth = -out.solution->phi0;
    CHECK(depth >= 0.056042467772 * (1.0 - 1e-3));  // bisection-oracle bound at 0.25
    CHECK(depth <= 0.5 * (1.0 + 1e-3));
    CHECK(out.solution->phi0 == doctest::Approx(-0.16318055).epsilon(1e-6));
}

TEST_CASE("shooting with a strictly increasing source") {
    const ShootOutcome out = shoot_radial(exponential_source_spec(), 2, 1.0);
    REQUIRE(out.converged());
    CHECK(out.solution->phi0 < 0.0);
    CHECK(std::abs(out.solution->residual) <= 1e-10);
}

TEST_CASE("profile convexity check") {
    const ProblemSpec pois = ProblemSpec::poisson();
    const ShootOutcome out = shoot_radial(pois, 2, 1.0);
    REQUIRE(out.converged());
    const ProfileConvexityReport rep = check_profile_convexity(*out.solution, pois);
    CHECK(rep.pass);
    CHECK(rep.min_phi_second == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(rep.min_v_second > 0.0);
    CHECK(rep.phi_second_origin ==
          doctest::Approx(rep.phi_second_origin_closed_form).epsilon(1e-10));

    const ProblemSpec euc = ProblemSpec::euclidean();
    const ShootOutcome oute = shoot_radial(euc, 2, 1.0);
    REQUIRE(oute.converged());
    CHECK(check_profile_convexity(*oute.solution, euc).pass);

    const ProblemSpec lor = ProblemSpec::lorentzian();
    const ShootOutcome outl = shoot_radial(lor, 2, 0.3);
    REQUIRE(outl.converged());
    CHECK(check_profile_convexity(*outl.solution, lor).pass);
}

TEST_CASE("radial profile dump") {
    const ShootOutcome out = shoot_radial(ProblemSpec::poisson(), 2, 1.0);
    REQUIRE(out.converged());
    const std::string csv = radial_to_csv(*out.solution);
    CHECK(csv.rfind("r,phi,phi_prime,phi_second\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') ==
          static_cast<long>(out.solution->r.size()) + 1);
}
