#include <doctest.h>

#include <cmath>

#include "hop/errors.hpp"
#include "hop/limits.hpp"
#include "hop/perturbation.hpp"
#include "hop/resonance.hpp"
#include "hop/sobolev.hpp"
#include "oracle.hpp"

using namespace hop;

namespace {
constexpr double kIntPsiSq = 0.13308612084499427;
}

TEST_SUITE_BEGIN("limits");

TEST_CASE("sigma matrix: free pair, rotated pair, monomial pair") {
    CovMatrix2 free_cov = sigma_matrix([](double) { return cplx(0.5, 0.0); });
    CHECK(free_cov.a11 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(free_cov.a12 == doctest::Approx(0.0));
    CHECK(free_cov.a22 == doctest::Approx(0.0));
    CHECK(free_cov.degenerate);

    CovMatrix2 rot = sigma_matrix([](double) { return cplx(0.0, 0.5); });
    CHECK(rot.a11 == doctest::Approx(0.0));
    CHECK(rot.a22 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rot.degenerate);

    CovMatrix2 mono = sigma_matrix([](double x) { return cplx(x, x * x); });
    CHECK(mono.a11 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(mono.a22 == doctest::Approx(2.0 / 5.0).epsilon(1e-12));
    CHECK(mono.a12 == doctest::Approx(0.0));
    CHECK(!mono.degenerate);
    // nonnegative eigenvalues
    const double tr = mono.trace(), det = mono.det();
    CHECK(tr >= 0.0);
    CHECK(det >= -1e-12);
}

TEST_CASE("degeneracy detects proportional components (Cauchy-Schwarz equality)") {
    CovMatrix2 c = sigma_matrix([](double x) {
        const double v = std::cos(1.7 * x);
        return cplx(2.0 * v, -3.0 * v);  // phi1 = (-2/3) phi2
    });
    CHECK(c.degenerate);
    CHECK(!c.direction_swapped);  // phi2 dominates
    CHECK(c.alpha == doctest::Approx(-2.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("oscillation factor equals the antiderivative identity (5 profiles)") {
    // (1/2pi) int q_hat(xi) q_hat(-xi)/xi^2 = int Q^2 for zero-mean real q
    const Profile profiles[] = {
        Profile::psi_prime(),
        Profile::psi_second(),
        Profile::lincomb({{cplx(1.0, 0.0), Profile::affine(Profile::psi(), 0.4, 0.5)},
                          {cplx(-1.0, 0.0), Profile::affine(Profile::psi(), -0.4, 0.5)}}),
        Profile::affine(Profile::psi_prime(), 0.2, 0.8),
        Profile::lincomb({{cplx(0.7, 0.0), Profile::psi_prime()},
                          {cplx(0.3, 0.0), Profile::psi_second()}}),
    };
    for (const Profile& q : profiles) {
        Profile Q = q.antiderivative();
        const Interval s = Q.support();
        const double intQ2 = oracle::integrate_real(
            [&](double x) { return std::norm(Q(x)); }, s.lo, s.hi, 1e-12);
        const cplx osc = oscillation_factor(q, 1);
        CHECK(std::abs(osc.real() - intQ2) < 1e-8 * std::max(1.0, intQ2));
        CHECK(std::abs(osc.imag()) < 1e-9);
    }
}

TEST_CASE("oscillation factor diverges for nonzero mean") {
    CHECK_THROWS_AS(oscillation_factor(Profile::psi(), 1), config_error);
}

TEST_CASE("constant L: free pair value and bilinearity") {
    Profile q = Profile::psi_prime();
    ResonantPair pair = ResonantPair::free_pair();
    const cplx L = constant_L(q, pair, 1);
    // int_{-1}^{1} fg = 1 for the free pair: L = int Q^2 = int psi^2
    CHECK(L.real() == doctest::Approx(kIntPsiSq).epsilon(1e-8));
    Profile q2 = Profile::lincomb({{cplx(2.0, 0.0), q}});
    CHECK(constant_L(q2, pair, 1).real() == doctest::Approx(4.0 * L.real()).epsilon(1e-9));
}

TEST_CASE("d = 3 oscillation factor for a radial bump is positive and scales") {
    Profile q = Profile::psi();  // radial profile r -> psi(r)
    const cplx o = oscillation_factor(q, 3);
    CHECK(o.real() > 0.0);
    CHECK(std::abs(o.imag()) < 1e-10);
    Profile q2 = Profile::lincomb({{cplx(3.0, 0.0), q}});
    CHECK(oscillation_factor(q2, 3).real() == doctest::Approx(9.0 * o.real()).epsilon(1e-9));
}

TEST_CASE("case classifier decision tree") {
    ResonantPair free_pair = ResonantPair::free_pair();
    CHECK(case_classifier(1, Profile::psi(), free_pair) == CaseTag::I);
    CHECK(case_classifier(3, Profile::psi(), free_pair) == CaseTag::I);
    // zero mean, nonzero first moment, but (fg)' = 0: falls through II to III
    CHECK(case_classifier(1, Profile::psi_prime(), free_pair) == CaseTag::III);
    // zero mean and zero first moment: III regardless of the pair
    CHECK(case_classifier(1, Profile::psi_second(), free_pair) == CaseTag::III);

    // a genuine Case II: well background makes (fg)' nonvanishing
    Profile q0 = Profile::lincomb({{cplx(-4.0, 0.0), Profile::psi()}});
    ResonantPair well = resonant_pair(q0, cplx(0.0, 0.65), 0.4);
    CHECK(case_classifier(1, Profile::psi_prime(), well) == CaseTag::II);
    CHECK(case_classifier(1, Profile::psi(), well) == CaseTag::I);
    CHECK(case_classifier(1, Profile::psi_second(), well) == CaseTag::III);
}

TEST_CASE("corollary variances for the free pair") {
    ResonantPair pair = ResonantPair::free_pair();
    // Case I: int |f|^4 = 1/2
    CHECK(sigma2_corollary(CaseTag::I, pair, Profile::psi(), 1) ==
          doctest::Approx(0.5).epsilon(1e-10));
    // Case II: (|f|^2)' = 0 -> variance 0 (the classifier routes this to III)
    CHECK(sigma2_corollary(CaseTag::II, pair, Profile::psi_prime(), 1) ==
          doctest::Approx(0.0));
    // Case III equals the oscillation constant for real q (|q_hat|^2 route)
    const double s2 = sigma2_corollary(CaseTag::III, pair, Profile::psi_prime(), 1);
    CHECK(s2 == doctest::Approx(constant_L(Profile::psi_prime(), pair, 1).real())
                    .epsilon(1e-8));
}

TEST_CASE("corollary variance rejects pairs away from the imaginary axis") {
    auto f = [](double) { return cplx(0.3, 0.1); };
    ResonantPair off = ResonantPair::synthetic(f, f, cplx(0.5, -0.2), 1.0);
    CHECK_THROWS_AS(sigma2_corollary(CaseTag::I, off, Profile::psi(), 1), config_error);
}

TEST_CASE("sigma2 Case III equals constant_L for a real well pair as well") {
    Profile q0 = Profile::lincomb({{cplx(-4.0, 0.0), Profile::psi()}});
    ResonantPair well = resonant_pair(q0, cplx(0.0, 0.65), 0.4);
    Profile q = Profile::psi_second();
    const double s2 = sigma2_corollary(CaseTag::III, well, q, 1);
    CHECK(s2 == doctest::Approx(constant_L(q, well, 1).real()).epsilon(1e-7));
}

TEST_CASE("effective potential: scaling laws and existence warning") {
    Profile q = Profile::psi_prime();
    EffectivePotential e20 = effective_potential(Profile::zero(), q, 20, 1);
    EffectivePotential e40 = effective_potential(Profile::zero(), q, 40, 1);
    CHECK(std::abs(e40.constant) == doctest::Approx(std::abs(e20.constant) / 4.0).epsilon(1e-10));
    Profile q2 = Profile::lincomb({{cplx(2.0, 0.0), q}});
    EffectivePotential es = effective_potential(Profile::zero(), q2, 20, 1);
    CHECK(std::abs(es.constant) == doctest::Approx(4.0 * std::abs(e20.constant)).epsilon(1e-10));
    CHECK(e20.exists_warning);  // d/2 + m = 3/2 < 2
    EffectivePotential e2 = effective_potential(Profile::zero(), Profile::psi_second(), 20, 1);
    CHECK(!e2.exists_warning);  // d/2 + m = 5/2
    CHECK_THROWS_AS(effective_potential(Profile::zero(), Profile::psi(), 20, 1), config_error);
}

TEST_CASE("effective potential resonance tracks the random-model root") {
    // relative gap (lambda_N - lambda_eff)/(lambda_N - lambda0) < 0.2 for 90%
    // of seeds at N = 20 (both sides computed by this artifact's own solvers)
    Profile q = Profile::psi_prime();
    const int N = 20;
    EffectivePotential eff = effective_potential(Profile::zero(), q, N, 1);
    RandomPotential veff = eff.as_potential();
    std::vector<Resonance> re = find_resonances(veff, {-0.02, 0.02, -0.02, 0.02}, 1e-13);
    REQUIRE(re.size() == 1);
    const cplx lam_eff = re[0].lambda;
    CHECK(lam_eff.imag() > 0.0);  // emerging eigenvalue

    int ok = 0, total = 0;
    ResonantPair pair = ResonantPair::free_pair();
    for (int seed = 0; seed < 20; ++seed) {
        RandomPotential V(Profile::zero(), q, N,
                          CoefficientField::sample(CoefficientLaw::rademacher(), N, 1,
                                                   static_cast<std::uint64_t>(seed)));
        CharacteristicSeries s = make_series(V, pair, 2, 0.5);
        cplx root;
        try {
            root = phi_root(s, 0.0, 0.1, 1e-13).root;
        } catch (const regime_error&) {
            continue;
        }
        ++total;
        if (std::abs(root - lam_eff) / std::abs(root) < 0.2) ++ok;
    }
    CHECK(total >= 18);
    CHECK(ok >= static_cast<int>(0.9 * total));
}

TEST_SUITE_END();
