#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hop/limits.hpp"
#include "hop/resonance.hpp"
#include "hop/stats.hpp"

namespace hop {

struct SampleRecord {
    std::uint64_t index = 0;
    std::uint64_t seed = 0;
    bool rejected = false;
    cplx lambda;    // located resonance (lambda0 when rejected)
    cplx rescaled;  // N^pow (lambda - lambda0)
};

struct CaseStudyConfig {
    CaseTag tag = CaseTag::I;
    std::string q0_expr = "zero";
    std::string q_expr = "psi";
    std::string law = "rademacher";
    cplx lambda0_guess = 0.0;
    double isolation_radius = 0.35;
    std::vector<int> N_list{40};
    int M = 2000;
    std::uint64_t seed = 1;
    int solver_spot_checks = 0;
    bool solver_sampling = false;  // Case III solves every sample
    unsigned workers = 1;
};

struct CaseNStats {
    int N = 0;
    double rescale_power = 0.5;
    bool degenerate = false;
    double rejection_rate = 0.0;
    double max_abs_re_rescaled = 0.0;  // imaginary-shift check for real pairs
    double sigma2_hat = 0.0;           // fitted variance of z = rescaled/normalizer
    double ks_fitted = 0.0;
    double ks_theorem = 0.0;  // vs N(0, sigma2_theorem)
    double ks_halved = 0.0;   // vs N(0, sigma2_theorem / 2)
    double rms_abs_shift = 0.0;
    cplx mean_rescaled;  // Case III
    double spot_gap_max = 0.0;
    int spot_checks_run = 0;
    int spot_checks_failed = 0;
};

struct CaseStudyReport {
    CaseStudyConfig config;
    std::string digest;
    int schema = 1;
    cplx lambda0;
    cplx normalizer;  // i int q (I), i int xq (II), 1 (III)
    double sigma2_theorem = 0.0;
    double sigma2_cor2 = 0.0;
    cplx L_limit;  // Case III constant
    std::vector<CaseNStats> stats;
    std::map<int, std::vector<SampleRecord>> samples;
    std::vector<double> cauchy_gaps;
    double ratio_to_L = 0.0;  // Re( rescaled / (i L) ) at the largest N
    LineFit shift_rate;
};

CaseStudyReport run_case_study(const CaseStudyConfig& cfg);

struct LocalizationConfig {
    std::string q0_expr;
    std::string q_expr = "psi";
    std::string law = "rademacher";
    double R = 2.0;
    int N = 40;
    int M = 100;
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

struct LocalizationReport {
    LocalizationConfig config;
    std::string digest;
    int schema = 1;
    std::vector<cplx> q0_resonances;
    std::vector<int> multiplicities;
    double gamma = 0.5;
    std::vector<double> disk_radius;  // N^{-gamma/(2 m)} per resonance
    int satisfied = 0, violated = 0, rejected = 0;
    int violations_small_radius = 0;  // radius / 4
    int violations_large_radius = 0;  // radius * 4
    double worst_offender = 0.0;
    double fraction() const;
};

LocalizationReport localization_check(const LocalizationConfig& cfg);

struct FreeRegionConfig {
    std::string q_expr = "psi";
    std::string law = "rademacher";
    std::vector<int> N_list{8, 16, 32};
    int M = 20;
    ComplexBox box{-4.0, 4.0, -3.0, 0.5};
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

struct FreeRegionRow {
    int N = 0;
    double max_im_remaining = 0.0;  // max over samples, near-zero root excluded
    double min_neg_im = 0.0;        // -max_im_remaining (table convention)
    double near_zero_fraction = 0.0;
    int samples_with_remaining = 0;
};

struct FreeRegionReport {
    FreeRegionConfig config;
    std::string digest;
    int schema = 1;
    double gamma = 0.5;
    std::vector<FreeRegionRow> rows;
    LineFit im_vs_logn;
    double A_fit = 0.0;
};

FreeRegionReport resonance_free_scan(const FreeRegionConfig& cfg);

struct CounterexampleConfig {
    std::string q_expr;
    std::vector<int> N_list{10, 20, 40};
    ComplexBox box{0.5, 5.0, -2.6, 0.05};
    double box_edge = 0.025;
    unsigned workers = 1;
};

struct CounterexampleReport {
    CounterexampleConfig config;
    std::string digest;
    int schema = 1;
    std::vector<cplx> barrier_roots;
    std::vector<std::vector<double>> match_distance;  // [n_idx][root_idx]
    std::vector<int> found_count;
    std::vector<double> h2_distance;
    LineFit h2_rate;
};

CounterexampleReport counterexample_study(const CounterexampleConfig& cfg);

struct DeterministicRateReport {
    std::string q_expr;
    std::string pattern;  // alternating | all_ones
    std::vector<int> N_list;
    std::vector<double> shift;
    LineFit rate;
    std::string digest;
    int schema = 1;
};

DeterministicRateReport deterministic_rate_study(const std::string& q_expr,
                                                 const std::string& pattern,
                                                 std::vector<int> N_list,
                                                 unsigned workers = 1);

}  // namespace hop
