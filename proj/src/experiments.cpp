#include "hop/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "hop/errors.hpp"
#include "hop/parallel.hpp"
#include "hop/perturbation.hpp"
#include "hop/report.hpp"
#include "hop/sobolev.hpp"

namespace hop {

namespace {

ResonantPair make_pair(const Profile& q0, cplx guess, double isolation) {
    if (q0.is_zero() && std::abs(guess) < 1e-12) return ResonantPair::free_pair();
    return resonant_pair(q0, guess, isolation);
}

double rescale_power(CaseTag tag) {
    switch (tag) {
        case CaseTag::I: return 0.5;  // d = 1 campaigns
        case CaseTag::II: return 1.5;
        case CaseTag::III: return 2.0;
    }
    return 0.5;
}

// Locate the resonance of V nearest lambda0 inside the isolation box.
// Returns rejected=true on contour trouble or ambiguity (a B_N event).
struct Located {
    cplx lambda;
    bool rejected = true;
};

Located locate_near(const RandomPotential& V, cplx lambda0, double radius, double tol) {
    Located out;
    ComplexBox box{lambda0.real() - radius, lambda0.real() + radius,
                   lambda0.imag() - radius, lambda0.imag() + radius};
    try {
        std::vector<Resonance> rs = find_resonances(V, box, tol);
        std::vector<cplx> inside;
        for (const auto& r : rs)
            if (std::abs(r.lambda - lambda0) <= radius) inside.push_back(r.lambda);
        if (inside.size() != 1) return out;  // none or ambiguous
        out.lambda = inside.front();
        out.rejected = false;
    } catch (const accuracy_error&) {
    } catch (const regime_error&) {
    }
    return out;
}

}  // namespace

CaseStudyReport run_case_study(const CaseStudyConfig& cfg) {
    CaseStudyReport rep;
    rep.config = cfg;
    rep.digest = config_digest(to_kv(cfg));

    const Profile q0 = Profile::parse(cfg.q0_expr);
    const Profile q = Profile::parse(cfg.q_expr);
    const CoefficientLaw law = CoefficientLaw::parse(cfg.law);
    const ResonantPair pair = make_pair(q0, cfg.lambda0_guess, cfg.isolation_radius);
    rep.lambda0 = pair.lambda0;

    if (!q.is_zero()) {
        const CaseTag observed = case_classifier(1, q, pair);
        if (observed != cfg.tag)
            throw config_error("case study: classifier says Case " + case_name(observed) +
                               ", requested Case " + case_name(cfg.tag));
    }

    const double pow_n = rescale_power(cfg.tag);
    switch (cfg.tag) {
        case CaseTag::I: rep.normalizer = cplx(0, 1) * q.moment(0); break;
        case CaseTag::II: rep.normalizer = cplx(0, 1) * q.moment(1); break;
        case CaseTag::III: rep.normalizer = 1.0; break;
    }
    rep.sigma2_theorem = sigma_matrix([&](double x) { return pair.fg(x); }).a11;
    try {
        rep.sigma2_cor2 = sigma2_corollary(cfg.tag, pair, q, 1);
    } catch (const config_error&) {
        rep.sigma2_cor2 = 0.0;
    }
    if (cfg.tag == CaseTag::III && !q.is_zero()) rep.L_limit = constant_L(q, pair, 1);

    const int m_order = q.is_zero() ? 0 : q.vanishing_order();
    const double gam = gamma_exponent(1, m_order).value();

    for (int N : cfg.N_list) {
        std::vector<SampleRecord> recs(static_cast<std::size_t>(cfg.M));
        std::vector<double> spot_gap(static_cast<std::size_t>(cfg.M), -1.0);
        const bool solve_all = cfg.solver_sampling || cfg.tag == CaseTag::III;
        const double solve_radius =
            std::min(pair.isolation_radius, 4.0 * std::pow(double(N), -gam / 2.0));

        parallel_for(static_cast<std::size_t>(cfg.M), cfg.workers, [&](std::size_t i) {
            SampleRecord& r = recs[i];
            r.index = i;
            r.seed = mix64(mix64(cfg.seed, static_cast<std::uint64_t>(N)), i);
            CoefficientField field = CoefficientField::sample(law, N, 1, r.seed);
            RandomPotential v_sharp(Profile::zero(), q, N, field);
            RandomPotential v_full(q0, q, N, field);

            cplx lambda_series = pair.lambda0;
            if (!q.is_zero())
                lambda_series = pair.lambda0 - cplx(0, 1) * term_a(0, v_sharp, pair, pair.lambda0);

            if (solve_all && !q.is_zero()) {
                Located loc = locate_near(v_full, pair.lambda0, solve_radius, 1e-11);
                if (loc.rejected) {
                    // fall back to the characteristic-series root
                    try {
                        CharacteristicSeries series =
                            make_series(v_sharp, pair, pair.free_case ? 1 : 0, 1.0, {});
                        PhiRoot pr = phi_root(series, pair.lambda0, solve_radius, 1e-12);
                        r.lambda = pr.root;
                        r.rejected = false;
                    } catch (const regime_error&) {
                        r.lambda = pair.lambda0;
                        r.rejected = true;
                    }
                } else {
                    r.lambda = loc.lambda;
                    r.rejected = false;
                }
            } else {
                r.lambda = lambda_series;
                r.rejected = false;
                if (static_cast<int>(i) < cfg.solver_spot_checks && !q.is_zero()) {
                    Located loc = locate_near(v_full, pair.lambda0,
                                              std::min(pair.isolation_radius, 0.75), 1e-11);
                    spot_gap[i] = loc.rejected ? -2.0 : std::abs(loc.lambda - lambda_series);
                }
            }
            r.rescaled = std::pow(double(N), pow_n) * (r.lambda - pair.lambda0);
        });

        CaseNStats st;
        st.N = N;
        st.rescale_power = pow_n;
        std::vector<double> z, abs_shift;
        int rejected = 0;
        for (const auto& r : recs) {
            if (r.rejected) {
                ++rejected;
                continue;
            }
            st.max_abs_re_rescaled = std::max(st.max_abs_re_rescaled,
                                              std::abs(r.rescaled.real()));
            const cplx zi = r.rescaled / rep.normalizer;
            z.push_back(zi.real());
            abs_shift.push_back(std::abs(r.lambda - pair.lambda0));
            st.mean_rescaled += r.rescaled;
        }
        const std::size_t kept = z.size();
        st.rejection_rate = static_cast<double>(rejected) / std::max(1, cfg.M);
        if (kept > 0) st.mean_rescaled /= static_cast<double>(kept);
        st.degenerate = q.is_zero() || (kept > 1 && sample_variance(z) == 0.0);
        if (kept > 1 && !st.degenerate) {
            st.sigma2_hat = sample_variance(z);
            const double sd = std::sqrt(st.sigma2_hat);
            st.ks_fitted = ks_distance_gaussian(z, 0.0, sd);
            if (rep.sigma2_theorem > 0.0) {
                st.ks_theorem = ks_distance_gaussian(z, 0.0, std::sqrt(rep.sigma2_theorem));
                st.ks_halved =
                    ks_distance_gaussian(z, 0.0, std::sqrt(rep.sigma2_theorem / 2.0));
            }
            double rms = 0.0;
            for (double a : abs_shift) rms += a * a;
            st.rms_abs_shift = std::sqrt(rms / static_cast<double>(kept));
        }
        for (std::size_t i = 0; i < recs.size(); ++i) {
            if (spot_gap[i] >= 0.0) {
                ++st.spot_checks_run;
                st.spot_gap_max = std::max(st.spot_gap_max, spot_gap[i]);
            } else if (spot_gap[i] == -2.0) {
                ++st.spot_checks_failed;
            }
        }
        rep.stats.push_back(st);
        rep.samples[N] = std::move(recs);
    }

    // Case III digest statistics: Cauchy gaps of the rescaled means, ratio to i L
    if (cfg.tag == CaseTag::III && rep.stats.size() >= 2) {
        for (std::size_t k = 1; k < rep.stats.size(); ++k) {
            const cplx a = rep.stats[k - 1].mean_rescaled, b = rep.stats[k].mean_rescaled;
            rep.cauchy_gaps.push_back(std::abs(b - a) / std::max(std::abs(b), 1e-300));
        }
    }
    if (cfg.tag == CaseTag::III && !rep.stats.empty() && std::abs(rep.L_limit) > 0.0) {
        const cplx top = rep.stats.back().mean_rescaled;
        rep.ratio_to_L = (top / (cplx(0, 1) * rep.L_limit)).real();
    }
    // rate of the raw shifts across N (meaningful when more than two N)
    if (rep.stats.size() >= 3) {
        std::vector<double> ns, ds;
        for (const auto& st : rep.stats)
            if (st.rms_abs_shift > 0.0) {
                ns.push_back(st.N);
                ds.push_back(st.rms_abs_shift);
            }
        if (ns.size() >= 3) rep.shift_rate = rate_fit(ns, ds);
    }
    return rep;
}

double LocalizationReport::fraction() const {
    const int total = satisfied + violated + rejected;
    return total > 0 ? static_cast<double>(satisfied) / total : 0.0;
}

LocalizationReport localization_check(const LocalizationConfig& cfg) {
    LocalizationReport rep;
    rep.config = cfg;
    rep.digest = config_digest(to_kv(cfg));

    const Profile q0 = Profile::parse(cfg.q0_expr);
    const Profile q = Profile::parse(cfg.q_expr);
    const CoefficientLaw law = CoefficientLaw::parse(cfg.law);
    if (q0.is_zero()) throw config_error("localization: q0 must have resonances in the box");

    RandomPotential bare(q0, Profile::zero(), 1, CoefficientField::zero(1, 1));
    const double margin = 0.08;
    ComplexBox box{-cfg.R - margin, cfg.R + margin, -cfg.R - margin, cfg.R + margin};
    std::vector<Resonance> base = find_resonances(bare, box, 1e-11);
    for (const auto& r : base) {
        if (std::abs(std::abs(r.lambda) - cfg.R) < 0.02)
            throw config_error("localization: q0 resonance too close to |lambda| = R");
        if (std::abs(r.lambda) <= cfg.R) {
            rep.q0_resonances.push_back(r.lambda);
            rep.multiplicities.push_back(r.multiplicity);
        }
    }
    if (rep.q0_resonances.empty())
        throw config_error("localization: no q0 resonance inside D(0,R)");

    const int m_order = q.vanishing_order();
    rep.gamma = gamma_exponent(1, m_order).value();
    for (std::size_t i = 0; i < rep.q0_resonances.size(); ++i)
        rep.disk_radius.push_back(
            std::pow(double(cfg.N), -rep.gamma / (2.0 * rep.multiplicities[i])));

    std::vector<int> outcome(static_cast<std::size_t>(cfg.M), 0);  // 1 ok, 0 violated, -1 rejected
    std::vector<int> viol_small(static_cast<std::size_t>(cfg.M), 0);
    std::vector<int> viol_large(static_cast<std::size_t>(cfg.M), 0);
    std::vector<double> offender(static_cast<std::size_t>(cfg.M), 0.0);

    parallel_for(static_cast<std::size_t>(cfg.M), cfg.workers, [&](std::size_t i) {
        const std::uint64_t seed = mix64(cfg.seed, i);
        RandomPotential V(q0, q, cfg.N, CoefficientField::sample(law, cfg.N, 1, seed));
        std::vector<Resonance> rs;
        try {
            rs = find_resonances(V, box, 1e-10);
        } catch (const accuracy_error&) {
            outcome[i] = -1;
            return;
        }
        auto check = [&](double fac, bool with_counts) {
            bool ok = true;
            for (const auto& r : rs) {
                if (std::abs(r.lambda) > cfg.R) continue;
                double dist = 1e300;
                for (std::size_t k = 0; k < rep.q0_resonances.size(); ++k)
                    dist = std::min(dist, std::abs(r.lambda - rep.q0_resonances[k]) -
                                              fac * rep.disk_radius[k]);
                if (dist > 0.0) {
                    ok = false;
                    offender[i] = std::max(offender[i], dist);
                }
            }
            if (ok && with_counts) {
                for (std::size_t k = 0; k < rep.q0_resonances.size(); ++k) {
                    int count = 0;
                    for (const auto& r : rs)
                        if (std::abs(r.lambda - rep.q0_resonances[k]) <=
                            fac * rep.disk_radius[k])
                            count += r.multiplicity;
                    if (count != rep.multiplicities[k]) ok = false;
                }
            }
            return ok;
        };
        outcome[i] = check(1.0, true) ? 1 : 0;
        viol_small[i] = check(0.25, false) ? 0 : 1;
        viol_large[i] = check(4.0, false) ? 0 : 1;
    });

    for (int i = 0; i < cfg.M; ++i) {
        if (outcome[static_cast<std::size_t>(i)] == 1)
            ++rep.satisfied;
        else if (outcome[static_cast<std::size_t>(i)] == 0)
            ++rep.violated;
        else
            ++rep.rejected;
        rep.violations_small_radius += viol_small[static_cast<std::size_t>(i)];
        rep.violations_large_radius += viol_large[static_cast<std::size_t>(i)];
        rep.worst_offender = std::max(rep.worst_offender, offender[static_cast<std::size_t>(i)]);
    }
    return rep;
}

FreeRegionReport resonance_free_scan(const FreeRegionConfig& cfg) {
    FreeRegionReport rep;
    rep.config = cfg;
    rep.digest = config_digest(to_kv(cfg));

    const Profile q = Profile::parse(cfg.q_expr);
    const CoefficientLaw law = CoefficientLaw::parse(cfg.law);
    rep.gamma = gamma_exponent(1, q.vanishing_order()).value();

    for (int N : cfg.N_list) {
        FreeRegionRow row;
        row.N = N;
        const double excl = 4.0 * std::pow(double(N), -rep.gamma / 2.0);
        std::vector<double> max_im(static_cast<std::size_t>(cfg.M), -1e300);
        std::vector<int> near0(static_cast<std::size_t>(cfg.M), 0);
        parallel_for(static_cast<std::size_t>(cfg.M), cfg.workers, [&](std::size_t i) {
            const std::uint64_t seed = mix64(mix64(cfg.seed, static_cast<std::uint64_t>(N)), i);
            RandomPotential V(Profile::zero(), q, N,
                              CoefficientField::sample(law, N, 1, seed));
            std::vector<Resonance> rs;
            try {
                rs = find_resonances(V, cfg.box, 1e-9);
            } catch (const accuracy_error&) {
                return;
            }
            for (const auto& r : rs) {
                if (std::abs(r.lambda) <= excl)
                    near0[i] += r.multiplicity;
                else
                    max_im[i] = std::max(max_im[i], r.lambda.imag());
            }
        });
        int with_rem = 0, near_ok = 0;
        double mx = -1e300;
        for (int i = 0; i < cfg.M; ++i) {
            if (near0[static_cast<std::size_t>(i)] == 1) ++near_ok;
            if (max_im[static_cast<std::size_t>(i)] > -1e250) {
                ++with_rem;
                mx = std::max(mx, max_im[static_cast<std::size_t>(i)]);
            }
        }
        row.samples_with_remaining = with_rem;
        row.max_im_remaining = mx;
        row.min_neg_im = -mx;
        row.near_zero_fraction = static_cast<double>(near_ok) / std::max(1, cfg.M);
        rep.rows.push_back(row);
    }

    std::vector<double> lx, ly;
    for (const auto& row : rep.rows)
        if (row.samples_with_remaining > 0) {
            lx.push_back(std::log(double(row.N)));
            ly.push_back(row.max_im_remaining);
        }
    if (lx.size() >= 2) {
        rep.im_vs_logn = least_squares_line(lx, ly);
        rep.A_fit = -rep.im_vs_logn.slope;
    }
    return rep;
}

CounterexampleReport counterexample_study(const CounterexampleConfig& cfg) {
    CounterexampleReport rep;
    rep.config = cfg;
    rep.digest = config_digest(to_kv(cfg));

    const Profile q = Profile::parse(cfg.q_expr);
    if (std::abs(q.moment(0) - 1.0) > 1e-9 * std::max(1.0, q.abs_mass()))
        throw config_error("counterexample: q must have unit mass");

    rep.barrier_roots = square_barrier_resonances(1.0, cfg.box);
    const Profile indicator = Profile::smooth_box(1.0, cfg.box_edge);

    for (int N : cfg.N_list) {
        CoefficientField ones = CoefficientField::deterministic(DeterministicPattern::AllOnes,
                                                                N, 1);
        RandomPotential V(Profile::zero(), q, N, ones);
        std::vector<Resonance> rs = find_resonances(V, cfg.box, 1e-10);
        rep.found_count.push_back(static_cast<int>(rs.size()));
        std::vector<double> dists;
        for (const cplx& root : rep.barrier_roots) {
            double best = 1e300;
            for (const auto& r : rs) best = std::min(best, std::abs(r.lambda - root));
            dists.push_back(best);
        }
        rep.match_distance.push_back(dists);
        rep.h2_distance.push_back(hnorm_spectral_diff(V, indicator, 2.0));
    }
    std::vector<double> ns(cfg.N_list.begin(), cfg.N_list.end());
    if (ns.size() >= 3) rep.h2_rate = rate_fit(ns, rep.h2_distance);
    return rep;
}

DeterministicRateReport deterministic_rate_study(const std::string& q_expr,
                                                 const std::string& pattern,
                                                 std::vector<int> N_list, unsigned workers) {
    DeterministicRateReport rep;
    rep.q_expr = q_expr;
    rep.pattern = pattern;
    rep.N_list = N_list;
    const Profile q = Profile::parse(q_expr);
    const DeterministicPattern pat = pattern == "alternating"
                                         ? DeterministicPattern::Alternating
                                         : DeterministicPattern::AllOnes;
    rep.shift.resize(N_list.size(), 0.0);
    parallel_for(N_list.size(), workers, [&](std::size_t k) {
        const int N = N_list[k];
        RandomPotential V(Profile::zero(), q, N,
                          CoefficientField::deterministic(pat, N, 1));
        const double r = std::min(0.8, 10.0 / double(N));
        ComplexBox box{-r, r, -r, r};
        std::vector<Resonance> rs = find_resonances(V, box, 1e-12);
        double best = 1e300;
        for (const auto& res : rs) best = std::min(best, std::abs(res.lambda));
        rep.shift[k] = best;
    });
    std::vector<double> ns(N_list.begin(), N_list.end());
    if (ns.size() >= 3) rep.rate = rate_fit(ns, rep.shift);
    KV kv;
    kv["campaign"] = "deterministic-rate";
    kv["q"] = q_expr;
    kv["pattern"] = pattern;
    rep.digest = config_digest(kv);
    return rep;
}

}  // namespace hop
