#include <doctest.h>

#include <cmath>

#include "hop/errors.hpp"
#include "hop/experiments.hpp"
#include "hop/report.hpp"
#include "hop/stats.hpp"

using namespace hop;

TEST_SUITE_BEGIN("experiments");

TEST_CASE("rate_fit: exact powers, constants, noisy synthetic slope") {
    LineFit f = rate_fit({10, 20, 40, 80}, {1e-2, 2.5e-3, 6.25e-4, 1.5625e-4});
    CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-12));
    LineFit c = rate_fit({10, 20, 40}, {3.0, 3.0, 3.0});
    CHECK(c.slope == doctest::Approx(0.0));
    // delta = N^{-1/2} (1 + 1% noise)
    std::vector<double> ns, ds;
    for (int i = 0; i < 8; ++i) {
        const double n = 10.0 * std::pow(2.0, i * 0.5);
        const double noise = 1.0 + 0.01 * ((mix64(3, static_cast<std::uint64_t>(i)) >> 8) % 200 - 100.0) / 100.0;
        ns.push_back(n);
        ds.push_back(std::pow(n, -0.5) * noise);
    }
    LineFit g = rate_fit(ns, ds);
    CHECK(g.slope == doctest::Approx(-0.5).epsilon(0.1));
    CHECK_THROWS_AS(rate_fit({10, 20, 40}, {1.0, -1.0, 0.5}), config_error);
    CHECK_THROWS_AS(rate_fit({10, 20}, {1.0, 0.5}), config_error);
}

TEST_CASE("statistics helpers") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-6));
    auto [lo, hi] = wilson_interval(50, 100);
    CHECK(lo == doctest::Approx(0.4038315).epsilon(1e-4));
    CHECK(hi == doctest::Approx(0.5961685).epsilon(1e-4));
    // KS of a genuinely gaussian sample is small, of a shifted one large
    std::vector<double> z;
    for (int i = 0; i < 4000; ++i) {
        const double u1 = (mix64(1, static_cast<std::uint64_t>(i)) >> 11) * 0x1.0p-53;
        const double u2 = (mix64(2, static_cast<std::uint64_t>(i)) >> 11) * 0x1.0p-53;
        z.push_back(std::sqrt(-2.0 * std::log(u1 + 1e-300)) * std::cos(2 * M_PI * u2));
    }
    CHECK(ks_distance_gaussian(z, 0.0, 1.0) < 0.03);
    CHECK(ks_distance_gaussian(z, 0.5, 1.0) > 0.15);
    std::vector<double> w = z;
    for (double& v : w) v = 1.3 * v;
    CHECK(ks_distance_two_sample(z, w) > 0.05);
    CHECK(ks_distance_two_sample(z, z) == doctest::Approx(0.0));
}

TEST_CASE("degenerate case study: zero oscillatory part") {
    CaseStudyConfig cfg;
    cfg.tag = CaseTag::I;
    cfg.q_expr = "zero";
    cfg.N_list = {10};
    cfg.M = 20;
    CaseStudyReport r = run_case_study(cfg);
    CHECK(r.stats[0].degenerate);
    for (const auto& rec : r.samples.at(10)) {
        CHECK(rec.lambda == cplx(0.0, 0.0));
        CHECK(rec.rescaled == cplx(0.0, 0.0));
    }
}

TEST_CASE("case study config mismatch is rejected") {
    CaseStudyConfig cfg;
    cfg.tag = CaseTag::II;  // psi with the free pair is Case I
    cfg.q_expr = "psi";
    cfg.N_list = {10};
    cfg.M = 5;
    CHECK_THROWS_AS(run_case_study(cfg), config_error);
}

TEST_CASE("small Case I study: imaginary shifts, sane variance, reproducible") {
    CaseStudyConfig cfg;
    cfg.tag = CaseTag::I;
    cfg.q_expr = "psi";
    cfg.N_list = {24};
    cfg.M = 400;
    cfg.seed = 11;
    cfg.workers = 2;
    CaseStudyReport r = run_case_study(cfg);
    const CaseNStats& st = r.stats[0];
    CHECK(st.max_abs_re_rescaled < 1e-12);  // k=0 series is purely imaginary here
    CHECK(st.rejection_rate == 0.0);
    // variance should be near Sigma11 = 1/2 at moderate N
    CHECK(st.sigma2_hat == doctest::Approx(0.5).epsilon(0.25));
    CHECK(st.ks_theorem < st.ks_halved);  // the theorem convention fits better

    // rejection accounting: fractions add to one
    CHECK(st.rejection_rate + 1.0 * (cfg.M - 0) / cfg.M == doctest::Approx(1.0));

    // bit-identical rerun with a different worker count
    cfg.workers = 1;
    CaseStudyReport r2 = run_case_study(cfg);
    CHECK(report_json(r) == report_json(r2));
    CHECK(r.digest == r2.digest);
}

TEST_CASE("case I universality: rademacher and uniform shifts agree in law") {
    CaseStudyConfig cfg;
    cfg.tag = CaseTag::I;
    cfg.q_expr = "psi";
    cfg.N_list = {24};
    cfg.M = 600;
    cfg.seed = 5;
    CaseStudyReport ra = run_case_study(cfg);
    cfg.law = "uniform";
    CaseStudyReport rb = run_case_study(cfg);
    std::vector<double> za, zb;
    for (const auto& rec : ra.samples.at(24)) za.push_back((rec.rescaled / ra.normalizer).real());
    for (const auto& rec : rb.samples.at(24)) zb.push_back((rec.rescaled / rb.normalizer).real());
    CHECK(ks_distance_two_sample(za, zb) < 0.1);
}

TEST_CASE("replay round-trips a case-study report byte for byte") {
    CaseStudyConfig cfg;
    cfg.tag = CaseTag::I;
    cfg.q_expr = "psi";
    cfg.N_list = {12};
    cfg.M = 50;
    cfg.seed = 3;
    const std::string text = report_json(run_case_study(cfg));
    CHECK(replay_report_json(text).empty());
}

TEST_CASE("config digest is stable under key order and sensitive to values") {
    KV a{{"b", "2"}, {"a", "1"}};
    KV b{{"a", "1"}, {"b", "2"}};
    CHECK(config_digest(a) == config_digest(b));
    KV c{{"a", "1"}, {"b", "3"}};
    CHECK(config_digest(a) != config_digest(c));
}

TEST_CASE("config text parsing mirrors flags") {
    KV kv = parse_config_text("# comment\n q = psi \nN_list=8,16\nM= 25\n\nbad line\n");
    CHECK(kv.at("q") == "psi");
    CHECK(kv.at("N_list") == "8,16");
    CHECK(kv.at("M") == "25");
    CHECK(kv.size() == 3);
}

TEST_CASE("free-region scan on a tiny configuration") {
    FreeRegionConfig cfg;
    cfg.q_expr = "psi";
    cfg.N_list = {8};
    cfg.M = 4;
    cfg.box = ComplexBox{-2.5, 2.5, -2.0, 0.4};
    cfg.seed = 2;
    cfg.workers = 2;
    FreeRegionReport r = resonance_free_scan(cfg);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].near_zero_fraction == doctest::Approx(1.0));
    // deterministic rerun
    FreeRegionReport r2 = resonance_free_scan(cfg);
    CHECK(report_json(r) == report_json(r2));
}

TEST_CASE("counterexample smoke: distances computed against the barrier roots") {
    CounterexampleConfig cfg;
    cfg.q_expr = "lincomb(2.2522836210435813*psi)";  // 1/int(psi): unit mass
    cfg.N_list = {8, 12, 16};
    cfg.box = ComplexBox{0.6, 3.4, -2.2, -0.2};
    CounterexampleReport r = counterexample_study(cfg);
    REQUIRE(r.barrier_roots.size() >= 2);
    REQUIRE(r.match_distance.size() == 3);
    // distances shrink from N=8 to N=16 for the lowest root
    CHECK(r.match_distance[2][0] < r.match_distance[0][0]);
    CHECK(r.h2_distance[2] < r.h2_distance[0]);
    CHECK_THROWS_AS(
        counterexample_study(CounterexampleConfig{.q_expr = "psi", .N_list = {8}, .box = {}, .box_edge = 0.025, .workers = 1}),
        config_error);
}

TEST_CASE("deterministic alternating rate is quadratic") {
    DeterministicRateReport r =
        deterministic_rate_study("d1(psi)", "alternating", {8, 16, 32}, 2);
    CHECK(r.rate.slope == doctest::Approx(-2.0).epsilon(0.1));
}

TEST_SUITE_END();
