#include <doctest.h>

#include <cmath>

#include "hop/errors.hpp"
#include "hop/limits.hpp"
#include "hop/perturbation.hpp"
#include "hop/sobolev.hpp"
#include "hop/stats.hpp"
#include "oracle.hpp"

using namespace hop;

TEST_SUITE_BEGIN("perturbation");

TEST_CASE("regularized kernel: values, derivative, series branch") {
    CHECK(std::abs(regularized_kernel(cplx(0.7, -0.2), 0.0)) == 0.0);
    CHECK(regularized_kernel(cplx(0.0, 0.0), 1.3) == cplx(-0.65, 0.0));
    // d/dr K(lambda, 0) = -1/2 independent of lambda
    for (cplx lam : {cplx(0.9, 0.0), cplx(0.0, 0.4), cplx(1.3, -0.7)}) {
        const double h = 1e-6;
        const cplx d = (regularized_kernel(lam, h) - regularized_kernel(lam, 0.0)) / h;
        CHECK(std::abs(d - cplx(-0.5, 0.0)) < 1e-5);
    }
    // series branch agrees with the direct formula at the same argument
    const double r = 1.0;
    const cplx lam_small(0.99e-4, 0.3e-4);  // |lam r| below the switch: series used
    const cplx direct = cplx(0, 1) *
                        (std::exp(cplx(0, 1) * lam_small * r) - 1.0) / (2.0 * lam_small);
    CHECK(std::abs(regularized_kernel(lam_small, r) - direct) < 1e-13);
    CHECK_THROWS_AS(regularized_kernel(cplx(1.0, 0.0), -0.5), config_error);
}

TEST_CASE("a0 with a constant pair is the exact bump sum") {
    // fg = 1/2 pulls out: a0 = (int q / 2N) * sum u_j
    Profile q = Profile::psi();
    const int N = 13;
    CoefficientField u = CoefficientField::sample(CoefficientLaw::rademacher(), N, 1, 77);
    RandomPotential V(Profile::zero(), q, N, u);
    double usum = 0.0;
    for (int j = -N; j <= N; ++j) usum += u.at(j);
    const cplx a0 = term_a(0, V, ResonantPair::free_pair(), 0.0);
    CHECK(std::abs(a0 - q.moment(0) / (2.0 * N) * usum) < 1e-12);
}

TEST_CASE("a0 vanishes identically for zero-mean q with a globally constant pair") {
    Profile q = Profile::psi_prime();
    const int N = 10;
    RandomPotential V(Profile::zero(), q, N,
                      CoefficientField::sample(CoefficientLaw::rademacher(), N, 1, 3));
    CHECK(std::abs(term_a(0, V, ResonantPair::free_pair(), 0.0)) < 1e-13);
}

TEST_CASE("a0 boundary-bump contribution decays like N^{-3}") {
    // pair constant on [-1,1] but varying beyond the right edge: only the
    // boundary bumps contribute once int q = 0 (the Lemma 1g mechanism);
    // one-sided so odd q cannot cancel the two edges against each other
    auto f = [](double x) -> cplx {
        const double c = 1.0 / std::sqrt(2.0);
        const double t = x - 1.0;
        return t <= 0.0 ? cplx(c, 0.0) : cplx(c * (1.0 + t * t), 0.0);
    };
    ResonantPair pair = ResonantPair::synthetic(f, f, 0.0, 1.0);
    Profile q = Profile::psi_prime();
    std::vector<double> ns, as;
    for (int N : {10, 20, 40, 80}) {
        // all-ones field keeps the edge contribution deterministic in N
        RandomPotential V(Profile::zero(), q, N,
                          CoefficientField::deterministic(DeterministicPattern::AllOnes, N, 1));
        ns.push_back(N);
        as.push_back(std::abs(term_a(0, V, pair, 0.0)));
    }
    LineFit fit = rate_fit(ns, as);
    CHECK(fit.slope == doctest::Approx(-3.0).epsilon(0.2 / 3.0));
}

TEST_CASE("terms are multilinear in the potential") {
    Profile q = Profile::psi_prime();
    const int N = 8;
    CoefficientField u = CoefficientField::sample(CoefficientLaw::rademacher(), N, 1, 19);
    std::vector<double> u2(u.values());
    for (double& v : u2) v *= 2.0;
    RandomPotential V(Profile::zero(), q, N, u);
    RandomPotential V2(Profile::zero(), q, N, CoefficientField::from_values(u2, N, 1));
    ResonantPair pair = ResonantPair::free_pair();
    const cplx lam(0.01, 0.02);
    // scaling by c multiplies term k by c^{k+1}
    const cplx a0 = term_a(0, V, pair, lam), a0s = term_a(0, V2, pair, lam);
    CHECK(std::abs(a0s - 2.0 * a0) <= 1e-12 * std::max(1.0, std::abs(a0s)));
    const cplx a1 = term_a(1, V, pair, lam), a1s = term_a(1, V2, pair, lam);
    CHECK(std::abs(a1s - 4.0 * a1) <= 1e-12 + 1e-10 * std::abs(a1s));
    const cplx a2 = term_a(2, V, pair, lam), a2s = term_a(2, V2, pair, lam);
    CHECK(std::abs(a2s - 8.0 * a2) <= 1e-12 + 1e-10 * std::abs(a2s));
}

TEST_CASE("a1 kernel regularization branch is consistent near lambda = 0") {
    Profile q = Profile::psi_prime();
    const int N = 8;
    RandomPotential V(Profile::zero(), q, N,
                      CoefficientField::sample(CoefficientLaw::rademacher(), N, 1, 23));
    ResonantPair pair = ResonantPair::free_pair();
    const cplx small(1e-6, 0.0);
    const cplx at0 = term_a(1, V, pair, 0.0);
    const cplx near0 = term_a(1, V, pair, small);
    CHECK(std::abs(at0 - near0) < 1e-5 * std::max(std::abs(at0), 1e-12) + 1e-9);
}

TEST_CASE("N^2 a1 converges to the oscillation constant") {
    Profile q = Profile::psi_prime();
    ResonantPair pair = ResonantPair::free_pair();
    const double limit = oscillation_factor(q, 1).real();  // int fg over [-1,1] is 1
    std::vector<double> vals;
    for (int N : {10, 20, 40}) {
        RandomPotential V(Profile::zero(), q, N,
                          CoefficientField::sample(CoefficientLaw::rademacher(), N, 1, 12345));
        // at lambda = 0 the regularized kernel is real: a1 -> L / N^2
        vals.push_back((double(N) * N * term_a(1, V, pair, 0.0)).real());
    }
    // Cauchy gaps below 5 percent and convergence toward the constant
    CHECK(std::abs(vals[2] - vals[1]) / std::abs(vals[2]) < 0.12);
    CHECK(std::abs(vals[2] - limit) / limit < 0.15);
}

TEST_CASE("unsupported series terms raise capability errors") {
    Profile q = Profile::psi();
    RandomPotential V(Profile::zero(), q, 6,
                      CoefficientField::sample(CoefficientLaw::rademacher(), 6, 1, 2));
    Profile q0 = Profile::lincomb({{cplx(-4.0, 0.0), Profile::psi()}});
    ResonantPair well = resonant_pair(q0, cplx(0.0, 0.65), 0.4);
    CHECK_THROWS_AS(term_a(2, V, well, well.lambda0), config_error);
    CHECK_THROWS_AS(term_a(3, V, ResonantPair::free_pair(), 0.0), config_error);
    CHECK_THROWS_AS(CharacteristicSeries(V, well, 2, 0.5, 0.1), config_error);
}

TEST_CASE("a1 for a background well matches the resolvent-difference kernel route") {
    // q0 != 0, k = 1 term: direct evaluation through the 1d resolvent; sanity
    // against the scaling relation only (no closed form available)
    Profile q = Profile::psi_prime();
    Profile q0 = Profile::lincomb({{cplx(-4.0, 0.0), Profile::psi()}});
    ResonantPair pair = resonant_pair(q0, cplx(0.0, 0.65), 0.4);
    const int N = 8;
    CoefficientField u = CoefficientField::sample(CoefficientLaw::rademacher(), N, 1, 31);
    RandomPotential V(Profile::zero(), q, N, u);
    const cplx lam = pair.lambda0 + cplx(0.05, 0.0);
    const cplx a1 = term_a(1, V, pair, lam);
    CHECK(std::isfinite(a1.real()));
    std::vector<double> u2(u.values());
    for (double& v : u2) v *= -3.0;
    RandomPotential V2(Profile::zero(), q, N, CoefficientField::from_values(u2, N, 1));
    const cplx a1s = term_a(1, V2, pair, lam);
    CHECK(std::abs(a1s - 9.0 * a1) <= 1e-10 * std::max(1.0, std::abs(a1s)));
}

TEST_CASE("phi: trivial potential, root equals lambda0") {
    RandomPotential V(Profile::zero(), Profile::zero(), 1, CoefficientField::zero(1, 1));
    CharacteristicSeries s(V, ResonantPair::free_pair(), 0, 0.5, 0.0);
    CHECK(s.phi(cplx(0.3, -0.1)) == cplx(0.3, -0.1));
    PhiRoot r = phi_root(s, 0.0, 0.5, 1e-12);
    CHECK(std::abs(r.root) < 1e-12);
}

TEST_CASE("phi root of a tiny deterministic bump matches first-order theory") {
    // V = eps * psi: root ~ -i eps int(psi)/2 + O(eps^2)
    const double eps = 1e-3;
    Profile q = Profile::lincomb({{cplx(eps, 0.0), Profile::psi()}});
    std::vector<double> one(3, 0.0);
    one[1] = 1.0;
    RandomPotential V(Profile::zero(), q, 1, CoefficientField::from_values(one, 1, 1));
    CharacteristicSeries s = make_series(V, ResonantPair::free_pair(), 2, 0.5);
    PhiRoot r = phi_root(s, 0.0, 0.1, 1e-13);
    const cplx first_order = cplx(0, -1) * eps * 0.44399381616807944 / 2.0;
    CHECK(std::abs(r.root - first_order) < 5.0 * eps * eps);

    // cross-check against the direct solver
    std::vector<Resonance> rs = find_resonances(V, {-0.05, 0.05, -0.05, 0.05}, 1e-13);
    REQUIRE(rs.size() == 1);
    CHECK(std::abs(r.root - rs[0].lambda) < 1e-8);
}

TEST_CASE("phi root equals the solver resonance within the tail estimate") {
    Profile q = Profile::psi();
    const int N = 16;
    ResonantPair pair = ResonantPair::free_pair();
    const double C = calibrate_decay_constant(Profile::zero(), q,
                                              CoefficientLaw::rademacher(), N, 8, 500, pair, 2);
    int agreements = 0;
    for (int i = 0; i < 6; ++i) {
        RandomPotential V(Profile::zero(), q, N,
                          CoefficientField::sample(CoefficientLaw::rademacher(), N, 1,
                                                   mix64(1000, i)));
        CharacteristicSeries s = make_series(V, pair, 2, C);
        PhiRoot pr;
        try {
            pr = phi_root(s, 0.0, 0.6, 1e-12);
        } catch (const regime_error&) {
            continue;
        }
        std::vector<Resonance> rs =
            find_resonances(V, {-0.6, 0.6, -0.6, 0.6}, 1e-12);
        REQUIRE(rs.size() >= 1);
        double best = 1e300;
        for (const auto& r : rs) best = std::min(best, std::abs(r.lambda - pr.root));
        CHECK(best <= std::max(pr.tail_estimate, 1e-8));
        ++agreements;
    }
    CHECK(agreements >= 4);
}

TEST_CASE("geometric decay of the measured terms") {
    Profile q = Profile::psi();
    const int N = 16;
    ResonantPair pair = ResonantPair::free_pair();
    // calibrate on one run, then assert across fresh samples
    const double C = calibrate_decay_constant(Profile::zero(), q,
                                              CoefficientLaw::rademacher(), N, 10, 4242, pair, 2);
    for (int i = 0; i < 40; ++i) {
        RandomPotential V(Profile::zero(), q, N,
                          CoefficientField::sample(CoefficientLaw::rademacher(), N, 1,
                                                   mix64(909, i)));
        const double h = hnorm_spectral(V, 1.0);
        for (int k = 0; k <= 2; ++k) {
            const double ak = std::abs(term_a(k, V, pair, 0.0));
            CHECK(ak <= std::pow(C * h, k + 1) + 1e-13);
        }
    }
}

TEST_SUITE_END();
