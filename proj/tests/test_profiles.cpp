#include <doctest.h>

#include <cmath>

#include "hop/errors.hpp"
#include "hop/limits.hpp"
#include "hop/profile.hpp"
#include "oracle.hpp"

using namespace hop;

// frozen oracle values (adaptive quadrature at 1e-12, computed before the build)
static constexpr double kIntPsi = 0.44399381616807944;
static constexpr double kIntPsiSq = 0.13308612084499427;
static constexpr double kIntPsiPrimeSq = 0.40958706075277013;
static constexpr double kIntX2Psi = 0.07020147675297541;
static constexpr double kPsiHat10 = 0.01462308665513271;

TEST_SUITE_BEGIN("profiles");

TEST_CASE("bump moments match the frozen quadrature oracle") {
    Profile psi = Profile::psi();
    CHECK(psi.moment(0).real() == doctest::Approx(kIntPsi).epsilon(1e-11));
    CHECK(psi.moment(1) == cplx(0.0, 0.0));  // enforced by symmetry
    CHECK(psi.moment(2).real() == doctest::Approx(kIntX2Psi).epsilon(1e-10));
}

TEST_CASE("derivative bumps have exact vanishing moments") {
    Profile p1 = Profile::psi_prime();
    CHECK(p1.moment(0) == cplx(0.0, 0.0));
    CHECK(p1.moment(1).real() == doctest::Approx(-kIntPsi).epsilon(1e-12));
    Profile p2 = Profile::psi_second();
    CHECK(p2.moment(0) == cplx(0.0, 0.0));
    CHECK(p2.moment(1) == cplx(0.0, 0.0));
    CHECK(p2.moment(2).real() == doctest::Approx(2.0 * kIntPsi).epsilon(1e-12));
}

TEST_CASE("moments agree with direct quadrature for every kind") {
    auto check_profile = [](const Profile& p) {
        const Interval s = p.support();
        for (int k = 0; k <= 6; ++k) {
            const cplx direct = oracle::integrate(
                [&](double x) { return std::pow(x, k) * p(x); }, s.lo, s.hi);
            CHECK(std::abs(p.moment(k) - direct) <=
                  1e-10 * (1.0 + std::abs(p.moment(k))));
        }
    };
    check_profile(Profile::psi());
    check_profile(Profile::psi_prime());
    check_profile(Profile::affine(Profile::psi(), 0.3, 0.7));
    check_profile(Profile::lincomb({{cplx(2.0, 1.0), Profile::psi()},
                                    {cplx(-1.0, 0.0), Profile::psi_second()}}));
    check_profile(Profile::smooth_box(1.0, 0.1));
}

TEST_CASE("evaluation vanishes outside the support") {
    for (const Profile& p : {Profile::psi(), Profile::affine(Profile::psi_prime(), 2.0, 0.5),
                             Profile::smooth_box(1.0, 0.05)}) {
        const Interval s = p.support();
        CHECK(p(s.lo - 1e-9) == cplx(0.0, 0.0));
        CHECK(p(s.hi + 1e-9) == cplx(0.0, 0.0));
        CHECK(p(s.lo - 5.0) == cplx(0.0, 0.0));
    }
}

TEST_CASE("fourier transform: values, symmetry, decay, Taylor consistency") {
    Profile psi = Profile::psi();
    CHECK(psi.fourier(0.0).real() == doctest::Approx(kIntPsi).epsilon(1e-11));
    CHECK(std::abs(psi.fourier(10.0) - cplx(kPsiHat10, 0.0)) < 1e-10);
    CHECK(std::abs(Profile::psi_prime().fourier(0.0)) < 1e-12);

    // reality symmetry for a real asymmetric profile at xi = 3.7
    Profile p = Profile::affine(Profile::psi(), 0.4, 0.6);
    CHECK(std::abs(p.fourier(3.7) - std::conj(p.fourier(-3.7))) < 1e-10);

    // fast decay on a grid (smooth compactly supported transform)
    const double scale = std::abs(psi.fourier(0.0));
    for (double xi = 1.0; xi <= 50.0; xi += 1.0)
        CHECK(std::abs(psi.fourier(xi)) <= scale * std::pow(1.0 + xi, -3.0) * 150.0);

    // Taylor consistency at xi = 1e-2, K = 4
    const double xi = 1e-2;
    cplx series = 0.0;
    double fact = 1.0;
    cplx pw = 1.0;
    for (int k = 0; k < 4; ++k) {
        series += pw / fact * psi.moment(k);
        pw *= cplx(0, -xi);
        fact *= k + 1;
    }
    CHECK(std::abs(psi.fourier(xi) - series) < 1e-9);
}

TEST_CASE("fourier transform against the oracle for a complex lincomb") {
    Profile p = Profile::lincomb({{cplx(1.0, 2.0), Profile::psi_prime()},
                                  {cplx(0.0, -1.0), Profile::affine(Profile::psi(), -0.2, 0.5)}});
    for (double xi : {0.0, 1.3, 7.7}) {
        const Interval s = p.support();
        const cplx direct = oracle::integrate(
            [&](double x) { return std::exp(cplx(0, -xi * x)) * p(x); }, s.lo, s.hi);
        CHECK(std::abs(p.fourier(xi) - direct) < 1e-10);
    }
}

TEST_CASE("vanishing order ladder") {
    CHECK(Profile::psi().vanishing_order() == 0);
    CHECK(Profile::psi_prime().vanishing_order() == 1);
    CHECK(Profile::psi_second().vanishing_order() == 2);
    CHECK_THROWS_AS(Profile::zero().vanishing_order(), config_error);
}

TEST_CASE("antiderivative closed forms and errors") {
    Profile q = Profile::psi_prime().antiderivative();
    CHECK(q.describe() == "psi");
    CHECK_THROWS_AS(Profile::psi().antiderivative(), config_error);

    // int (antiderivative of psi_second)^2 = int (psi')^2
    Profile a = Profile::psi_second().antiderivative();
    const double val = oracle::integrate_real(
        [&](double x) { return std::norm(a(x)); }, -1.0, 1.0);
    CHECK(val == doctest::Approx(kIntPsiPrimeSq).epsilon(1e-10));
}

TEST_CASE("cumulative antiderivative differentiates back to the profile") {
    // lincomb with zero total mean but nonzero child means forces the
    // quadrature-backed representation
    Profile p = Profile::lincomb({{cplx(1.0, 0.0), Profile::affine(Profile::psi(), 0.4, 0.5)},
                                  {cplx(-1.0, 0.0), Profile::affine(Profile::psi(), -0.4, 0.5)}});
    CHECK(std::abs(p.moment(0)) < 1e-12);
    Profile Q = p.antiderivative();
    CHECK(Q.support().lo == doctest::Approx(p.support().lo));
    const double h = 1e-5;
    for (int i = 1; i < 20; ++i) {
        const double x = -0.85 + 1.7 * i / 20.0;
        const cplx fd = (Q(x + h) - Q(x - h)) / (2.0 * h);
        CHECK(std::abs(fd - p(x)) < 1e-8);
    }
}

TEST_CASE("finite differences of eval converge to the analytic derivative") {
    Profile psi = Profile::psi();
    Profile d1 = psi.derivative();
    const double h = 1e-6;
    for (double x : {-0.6, -0.1, 0.35, 0.8}) {
        const cplx fd = (psi(x + h) - psi(x - h)) / (2.0 * h);
        CHECK(std::abs(fd - d1(x)) < 1e-9);
    }
}

TEST_CASE("gamma exponent is an exact rational") {
    CHECK(gamma_exponent(1, 0) == Rational{1, 2});
    CHECK(gamma_exponent(3, 0) == Rational{3, 2});
    CHECK(gamma_exponent(1, 2) == Rational{7, 4});
    CHECK(gamma_exponent(1, 1) == Rational{3, 2});
    CHECK(gamma_exponent(5, 1) == Rational{7, 4});
    CHECK_THROWS_AS(gamma_exponent(2, 0), config_error);
}

TEST_CASE("affine support arithmetic and zero-scale rejection") {
    Profile p = Profile::affine(Profile::psi(), 1.5, 0.25);
    CHECK(p.support().lo == doctest::Approx(1.25));
    CHECK(p.support().hi == doctest::Approx(1.75));
    CHECK_THROWS_AS(Profile::affine(Profile::psi(), 0.0, 0.0), config_error);
    CHECK_THROWS_AS(Profile::lincomb({}), config_error);
}

TEST_CASE("expression grammar round-trips") {
    const char* exprs[] = {
        "psi",
        "d1(psi)",
        "d2(psi)",
        "affine(psi, 0.25, 0.5)",
        "lincomb(2*psi + (0,-1)*d1(psi))",
        "box(1, 0.05)",
        "antiderivative(lincomb(1*affine(psi, 0.4, 0.5) + -1*affine(psi, -0.4, 0.5)))",
        "zero",
    };
    for (const char* e : exprs) {
        Profile p = Profile::parse(e);
        Profile q = Profile::parse(p.describe());
        for (double x : {-0.9, -0.3, 0.2, 0.77}) CHECK(std::abs(p(x) - q(x)) < 1e-12);
    }
    CHECK_THROWS_AS(Profile::parse("frob(psi)"), config_error);
    CHECK_THROWS_AS(Profile::parse("psi junk"), config_error);
}

TEST_CASE("smooth box mass is exact and edges are centered") {
    Profile b = Profile::smooth_box(1.0, 0.05);
    CHECK(b.moment(0).real() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(b(0.0).real() == doctest::Approx(1.0));
    CHECK(b(1.0).real() == doctest::Approx(0.5));  // edge midpoint
    CHECK(std::abs(b(1.0 + 0.026)) == 0.0);
}

TEST_SUITE_END();
