// hoplab: command-line laboratory for random highly-oscillatory potentials.
// Subcommands compute profiles, potentials, resonances, negative-order
// Sobolev norms, concentration tails, limit constants, and run the
// Monte Carlo campaigns. Every run writes JSON (+ CSV curves) and prints a
// one-line summary; reruns with the same config are byte-identical.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hop/errors.hpp"
#include "hop/experiments.hpp"
#include "hop/parallel.hpp"
#include "hop/perturbation.hpp"
#include "hop/report.hpp"
#include "hop/sobolev.hpp"
#include "hop/stats.hpp"

using namespace hop;
using json = nlohmann::ordered_json;

namespace {

void write_out(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    write_text_file(path, content);
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(std::stoi(tok));
    return out;
}

ComplexBox parse_box(const std::string& s) {
    std::stringstream ss(s);
    std::string tok;
    std::vector<double> v;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) v.push_back(std::stod(tok));
    if (v.size() != 4) throw config_error("--box expects re0,re1,im0,im1");
    return ComplexBox{v[0], v[1], v[2], v[3]};
}

CoefficientField make_field(const std::string& law, const std::string& pattern, int N,
                            std::uint64_t seed) {
    if (pattern == "alternating")
        return CoefficientField::deterministic(DeterministicPattern::Alternating, N, 1);
    if (pattern == "all_ones")
        return CoefficientField::deterministic(DeterministicPattern::AllOnes, N, 1);
    if (!pattern.empty()) throw config_error("unknown pattern: " + pattern);
    return CoefficientField::sample(CoefficientLaw::parse(law), N, 1, seed);
}

json cxj(cplx z) { return json::array({z.real(), z.imag()}); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for resonances of random highly oscillatory potentials"};
    app.require_subcommand(1);
    app.set_config("--config");

    unsigned workers = default_workers();
    app.add_option("--workers", workers, "worker threads (results are worker-count independent)");

    std::string out = "out/run";
    app.add_option("--out", out, "output path prefix (.json/.csv appended)");

    // ---- profile-info ----------------------------------------------------
    auto* sc_prof = app.add_subcommand("profile-info", "moments, transform and exponents of a profile");
    std::string p_expr = "psi";
    int p_d = 1;
    sc_prof->add_option("--p", p_expr, "profile expression");
    sc_prof->add_option("--d", p_d, "dimension for the gamma exponent");

    // ---- potential-dump --------------------------------------------------
    auto* sc_dump = app.add_subcommand("potential-dump", "grid dump of a realized potential");
    std::string d_q0 = "zero", d_q = "psi", d_law = "rademacher", d_pattern;
    int d_N = 20, d_points = 2000;
    std::uint64_t d_seed = 1;
    sc_dump->add_option("--q0", d_q0);
    sc_dump->add_option("--q", d_q);
    sc_dump->add_option("--law", d_law);
    sc_dump->add_option("--pattern", d_pattern, "alternating | all_ones (overrides --law)");
    sc_dump->add_option("--N", d_N);
    sc_dump->add_option("--seed", d_seed);
    sc_dump->add_option("--points", d_points);

    // ---- resonances ------------------------------------------------------
    auto* sc_res = app.add_subcommand("resonances", "complete resonance list in a box");
    std::string r_q0 = "zero", r_q = "psi", r_law = "rademacher", r_pattern, r_box = "-3,3,-3,0.5";
    int r_N = 20;
    std::uint64_t r_seed = 1;
    double r_tol = 1e-10;
    sc_res->add_option("--q0", r_q0);
    sc_res->add_option("--q", r_q);
    sc_res->add_option("--law", r_law);
    sc_res->add_option("--pattern", r_pattern);
    sc_res->add_option("--N", r_N);
    sc_res->add_option("--seed", r_seed);
    sc_res->add_option("--box", r_box, "re0,re1,im0,im1");
    sc_res->add_option("--tol", r_tol);

    // ---- hnorm -------------------------------------------------------------
    auto* sc_h = app.add_subcommand("hnorm", "H^{-s} norm of V_# (spectral and bilinear routes)");
    std::string h_q = "psi", h_law = "rademacher", h_pattern;
    int h_N = 20;
    double h_s = 2.0;
    std::uint64_t h_seed = 1;
    sc_h->add_option("--q", h_q);
    sc_h->add_option("--law", h_law);
    sc_h->add_option("--pattern", h_pattern);
    sc_h->add_option("--N", h_N);
    sc_h->add_option("--s", h_s);
    sc_h->add_option("--seed", h_seed);

    // ---- hw-tail -----------------------------------------------------------
    auto* sc_hw = app.add_subcommand("hw-tail", "quadratic-form concentration tail experiment");
    std::string w_q = "psi", w_law = "rademacher";
    int w_N = 16, w_M = 5000, w_tn = 16;
    double w_s = 2.0, w_tmax_factor = 6.0;
    std::uint64_t w_seed = 1;
    sc_hw->add_option("--q", w_q);
    sc_hw->add_option("--law", w_law);
    sc_hw->add_option("--N", w_N);
    sc_hw->add_option("--s", w_s);
    sc_hw->add_option("--M", w_M);
    sc_hw->add_option("--seed", w_seed);
    sc_hw->add_option("--t-points", w_tn);
    sc_hw->add_option("--t-max-factor", w_tmax_factor, "largest t^2 as a multiple of the HS norm");

    // ---- limits ------------------------------------------------------------
    auto* sc_lim = app.add_subcommand("limits", "closed-form limit constants and the case classifier");
    std::string l_q = "d1(psi)", l_q0 = "zero", l_lambda0 = "0,0";
    int l_d = 1, l_N = 20;
    sc_lim->add_option("--q", l_q);
    sc_lim->add_option("--q0", l_q0);
    sc_lim->add_option("--d", l_d);
    sc_lim->add_option("--N", l_N, "N for the effective-potential constant");
    sc_lim->add_option("--lambda0", l_lambda0, "re,im guess for the q0 resonance");

    // ---- case-study ---------------------------------------------------------
    auto* sc_case = app.add_subcommand("case-study", "rescaled-shift campaign for Cases I/II/III");
    std::string c_case = "I", c_q0 = "zero", c_q = "psi", c_law = "rademacher", c_nlist = "40",
                c_lambda0 = "0,0", c_pattern;
    int c_M = 2000, c_spot = 0;
    bool c_solver = false;
    double c_iso = 0.35;
    std::uint64_t c_seed = 1;
    sc_case->add_option("--case", c_case, "I | II | III");
    sc_case->add_option("--q0", c_q0);
    sc_case->add_option("--q", c_q);
    sc_case->add_option("--law", c_law);
    sc_case->add_option("--pattern", c_pattern, "alternating: deterministic rate study");
    sc_case->add_option("--N-list", c_nlist);
    sc_case->add_option("--M", c_M);
    sc_case->add_option("--seed", c_seed);
    sc_case->add_option("--lambda0", c_lambda0);
    sc_case->add_option("--isolation-radius", c_iso);
    sc_case->add_option("--spot-checks", c_spot);
    sc_case->add_flag("--solver-sampling", c_solver);

    // ---- localize -----------------------------------------------------------
    auto* sc_loc = app.add_subcommand("localize", "disk inclusion and counts near Res(q0)");
    std::string o_q0 = "lincomb(-12*psi)", o_q = "psi", o_law = "rademacher";
    double o_R = 2.0;
    int o_N = 40, o_M = 100;
    std::uint64_t o_seed = 1;
    sc_loc->add_option("--q0", o_q0);
    sc_loc->add_option("--q", o_q);
    sc_loc->add_option("--law", o_law);
    sc_loc->add_option("--R", o_R);
    sc_loc->add_option("--N", o_N);
    sc_loc->add_option("--M", o_M);
    sc_loc->add_option("--seed", o_seed);

    // ---- free-region ----------------------------------------------------------
    auto* sc_free = app.add_subcommand("free-region", "resonance-free region scan (q0 = 0)");
    std::string f_q = "psi", f_law = "rademacher", f_nlist = "8,16,32", f_box = "-4,4,-3,0.5";
    int f_M = 20;
    std::uint64_t f_seed = 1;
    sc_free->add_option("--q", f_q);
    sc_free->add_option("--law", f_law);
    sc_free->add_option("--N-list", f_nlist);
    sc_free->add_option("--M", f_M);
    sc_free->add_option("--box", f_box);
    sc_free->add_option("--seed", f_seed);

    // ---- counterexample ---------------------------------------------------------
    auto* sc_ctr = app.add_subcommand("counterexample", "all-ones coefficients against the sharp barrier");
    std::string x_q, x_nlist = "10,20,40", x_box = "0.5,5,-2.6,0.05";
    double x_edge = 0.025;
    sc_ctr->add_option("--q", x_q, "unit-mass profile expression")->required();
    sc_ctr->add_option("--N-list", x_nlist);
    sc_ctr->add_option("--box", x_box);
    sc_ctr->add_option("--edge", x_edge);

    // ---- replay -------------------------------------------------------------------
    auto* sc_rep = app.add_subcommand("replay", "rerun a report from its embedded config and diff");
    std::string rep_file;
    sc_rep->add_option("file", rep_file, "report JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*sc_prof) {
            const Profile p = Profile::parse(p_expr);
            json j;
            j["schema"] = 1;
            KV kv{{"campaign", "profile-info"}, {"p", p_expr}, {"d", std::to_string(p_d)}};
            j["digest"] = config_digest(kv);
            j["config"] = json::object();
            for (auto& [k, v] : kv) j["config"][k] = v;
            j["describe"] = p.describe();
            j["support"] = {p.support().lo, p.support().hi};
            json moments = json::array();
            for (int k = 0; k <= Profile::kMaxMoment; ++k) moments.push_back(cxj(p.moment(k)));
            j["moments"] = moments;
            j["abs_mass"] = p.abs_mass();
            j["sup_norm"] = p.sup_norm();
            int m = -1;
            try {
                m = p.vanishing_order();
            } catch (const config_error&) {
            }
            j["vanishing_order"] = m;
            if (m >= 0) {
                const Rational g = gamma_exponent(p_d, m);
                j["gamma"] = {{"num", g.num}, {"den", g.den}, {"value", g.value()}};
            }
            json ft = json::array();
            for (double xi : {0.0, 0.5, 1.0, 2.0, 5.0, 10.0})
                ft.push_back({{"xi", xi}, {"value", cxj(p.fourier(xi))}});
            j["fourier"] = ft;
            write_out(out + ".json", j.dump(2));
            std::cout << "profile-info: " << p.describe() << " m=" << m << " -> " << out
                      << ".json\n";
        } else if (*sc_dump) {
            const Profile q0 = Profile::parse(d_q0), q = Profile::parse(d_q);
            CoefficientField field = make_field(d_law, d_pattern, d_N, d_seed);
            RandomPotential V(q0, q, d_N, field);
            write_out(out + ".csv", potential_grid_csv(V, d_points));
            write_out(out + "_field.csv", field_csv(field));
            KV kv{{"campaign", "potential-dump"}, {"q0", d_q0}, {"q", d_q},
                  {"law", d_pattern.empty() ? d_law : d_pattern},
                  {"N", std::to_string(d_N)}, {"seed", std::to_string(d_seed)}};
            json j;
            j["schema"] = 1;
            j["digest"] = config_digest(kv);
            j["config"] = json::object();
            for (auto& [k, v] : kv) j["config"][k] = v;
            j["sup_bound"] = V.sup_bound();
            j["support"] = {V.support().lo, V.support().hi};
            write_out(out + ".json", j.dump(2));
            std::cout << "potential-dump: N=" << d_N << " -> " << out << ".csv\n";
        } else if (*sc_res) {
            const Profile q0 = Profile::parse(r_q0), q = Profile::parse(r_q);
            CoefficientField field = make_field(r_law, r_pattern, r_N, r_seed);
            RandomPotential V(q0, q, r_N, field);
            std::vector<Resonance> rs = find_resonances(V, parse_box(r_box), r_tol);
            KV kv{{"campaign", "resonances"}, {"q0", r_q0}, {"q", r_q},
                  {"law", r_pattern.empty() ? r_law : r_pattern}, {"N", std::to_string(r_N)},
                  {"seed", std::to_string(r_seed)}, {"box", r_box}};
            write_out(out + ".json", resonances_json(rs, kv));
            write_out(out + ".csv", resonances_csv(rs));
            std::cout << "resonances: found " << rs.size() << " in box " << r_box << " -> "
                      << out << ".json\n";
        } else if (*sc_h) {
            const Profile q = Profile::parse(h_q);
            CoefficientField field = make_field(h_law, h_pattern, h_N, h_seed);
            RandomPotential V(Profile::zero(), q, h_N, field);
            const double norm = hnorm_spectral(V, h_s);
            AlphaMatrix A = alpha_matrix(q, h_N, 1, h_s);
            const double qf = quadratic_form(A, field);
            KV kv{{"campaign", "hnorm"}, {"q", h_q},
                  {"law", h_pattern.empty() ? h_law : h_pattern}, {"N", std::to_string(h_N)},
                  {"s", std::to_string(h_s)}, {"seed", std::to_string(h_seed)}};
            json j;
            j["schema"] = 1;
            j["digest"] = config_digest(kv);
            j["config"] = json::object();
            for (auto& [k, v] : kv) j["config"][k] = v;
            j["hnorm"] = norm;
            j["hnorm_squared"] = norm * norm;
            j["quadratic_form"] = qf;
            j["relative_gap"] = std::abs(qf - norm * norm) / std::max(qf, 1e-300);
            j["alpha_trace"] = A.trace();
            j["alpha_hs"] = A.hs_norm();
            write_out(out + ".json", j.dump(2));
            std::cout << "hnorm: |V|_{H^-" << h_s << "} = " << norm << " -> " << out
                      << ".json\n";
        } else if (*sc_hw) {
            const Profile q = Profile::parse(w_q);
            AlphaMatrix A = alpha_matrix(q, w_N, 1, w_s);
            std::vector<double> t_grid;
            const double t2_lo = 2.0 * std::abs(A.trace());
            const double t2_hi = w_tmax_factor * A.hs_norm() + t2_lo;
            for (int i = 0; i < w_tn; ++i)
                t_grid.push_back(std::sqrt(t2_lo + (t2_hi - t2_lo) * (i + 1) / w_tn));
            TailCurve curve = hw_tail_experiment(A, CoefficientLaw::parse(w_law), t_grid,
                                                 w_M, w_seed, workers);
            KV kv{{"campaign", "hw-tail"}, {"q", w_q}, {"law", w_law},
                  {"N", std::to_string(w_N)}, {"s", std::to_string(w_s)},
                  {"M", std::to_string(w_M)}, {"seed", std::to_string(w_seed)}};
            write_out(out + ".json", report_json(curve, kv));
            write_out(out + ".csv", tail_curve_csv(curve));
            std::cout << "hw-tail: mean=" << curve.mc_mean << " trace=" << curve.trace
                      << " rate=" << curve.fitted_rate << " -> " << out << ".json\n";
        } else if (*sc_lim) {
            const Profile q = Profile::parse(l_q), q0 = Profile::parse(l_q0);
            const ComplexBox dummy{};
            (void)dummy;
            cplx guess(0, 0);
            {
                std::stringstream ss(l_lambda0);
                std::string a, b;
                std::getline(ss, a, ',');
                std::getline(ss, b, ',');
                guess = cplx(std::stod(a), b.empty() ? 0.0 : std::stod(b));
            }
            ResonantPair pair = (q0.is_zero() && std::abs(guess) < 1e-12)
                                    ? ResonantPair::free_pair()
                                    : resonant_pair(q0, guess);
            const CaseTag tag = case_classifier(l_d, q, pair);
            const int m = q.vanishing_order();
            const Rational g = gamma_exponent(l_d, m);
            CovMatrix2 sig = sigma_matrix([&](double x) { return pair.fg(x); });
            json j;
            KV kv{{"campaign", "limits"}, {"q", l_q}, {"q0", l_q0},
                  {"d", std::to_string(l_d)}, {"N", std::to_string(l_N)},
                  {"lambda0", l_lambda0}};
            j["schema"] = 1;
            j["digest"] = config_digest(kv);
            j["config"] = json::object();
            for (auto& [k, v] : kv) j["config"][k] = v;
            j["case"] = case_name(tag);
            j["gamma"] = {{"num", g.num}, {"den", g.den}, {"value", g.value()}};
            j["Sigma"] = {{"a11", sig.a11}, {"a12", sig.a12}, {"a22", sig.a22},
                          {"degenerate", sig.degenerate}};
            try {
                j["L"] = cxj(constant_L(q, pair, l_d));
            } catch (const config_error&) {
                j["L"] = nullptr;
            }
            try {
                j["sigma2"] = sigma2_corollary(tag, pair, q, l_d);
            } catch (const config_error&) {
                j["sigma2"] = nullptr;
            }
            try {
                EffectivePotential eff = effective_potential(q0, q, l_N, l_d);
                j["V_eff_constant"] = cxj(eff.constant);
                j["V_eff_exists_warning"] = eff.exists_warning;
            } catch (const config_error&) {
                j["V_eff_constant"] = nullptr;
            }
            write_out(out + ".json", j.dump(2));
            std::cout << "limits: case " << case_name(tag) << " gamma=" << g.num << "/"
                      << g.den << " -> " << out << ".json\n";
        } else if (*sc_case) {
            if (c_pattern == "alternating" || c_pattern == "all_ones") {
                DeterministicRateReport r =
                    deterministic_rate_study(c_q, c_pattern, parse_int_list(c_nlist), workers);
                write_out(out + ".json", report_json(r));
                std::cout << "case-study(" << c_pattern << "): rate slope " << r.rate.slope
                          << " -> " << out << ".json\n";
            } else {
                CaseStudyConfig cfg;
                cfg.tag = c_case == "I" ? CaseTag::I : c_case == "II" ? CaseTag::II : CaseTag::III;
                cfg.q0_expr = c_q0;
                cfg.q_expr = c_q;
                cfg.law = c_law;
                cfg.N_list = parse_int_list(c_nlist);
                cfg.M = c_M;
                cfg.seed = c_seed;
                cfg.solver_spot_checks = c_spot;
                cfg.solver_sampling = c_solver;
                cfg.isolation_radius = c_iso;
                {
                    std::stringstream ss(c_lambda0);
                    std::string a, b;
                    std::getline(ss, a, ',');
                    std::getline(ss, b, ',');
                    cfg.lambda0_guess = cplx(std::stod(a), b.empty() ? 0.0 : std::stod(b));
                }
                cfg.workers = workers;
                CaseStudyReport r = run_case_study(cfg);
                write_out(out + ".json", report_json(r));
                std::cout << "case-study " << c_case << ": digest " << r.digest << " -> "
                          << out << ".json\n";
            }
        } else if (*sc_loc) {
            LocalizationConfig cfg;
            cfg.q0_expr = o_q0;
            cfg.q_expr = o_q;
            cfg.law = o_law;
            cfg.R = o_R;
            cfg.N = o_N;
            cfg.M = o_M;
            cfg.seed = o_seed;
            cfg.workers = workers;
            LocalizationReport r = localization_check(cfg);
            write_out(out + ".json", report_json(r));
            std::cout << "localize: " << r.satisfied << "/" << cfg.M << " satisfied -> "
                      << out << ".json\n";
        } else if (*sc_free) {
            FreeRegionConfig cfg;
            cfg.q_expr = f_q;
            cfg.law = f_law;
            cfg.N_list = parse_int_list(f_nlist);
            cfg.M = f_M;
            cfg.box = parse_box(f_box);
            cfg.seed = f_seed;
            cfg.workers = workers;
            FreeRegionReport r = resonance_free_scan(cfg);
            write_out(out + ".json", report_json(r));
            std::cout << "free-region: A_fit=" << r.A_fit << " -> " << out << ".json\n";
        } else if (*sc_ctr) {
            CounterexampleConfig cfg;
            cfg.q_expr = x_q;
            cfg.N_list = parse_int_list(x_nlist);
            cfg.box = parse_box(x_box);
            cfg.box_edge = x_edge;
            cfg.workers = workers;
            CounterexampleReport r = counterexample_study(cfg);
            write_out(out + ".json", report_json(r));
            std::cout << "counterexample: h2 slope " << r.h2_rate.slope << " -> " << out
                      << ".json\n";
        } else if (*sc_rep) {
            const std::string diff = replay_report_json(read_text_file(rep_file));
            if (diff.empty()) {
                std::cout << "replay: identical (empty diff)\n";
            } else {
                std::cout << "replay: differs: " << diff << "\n";
                return 2;
            }
        }
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const accuracy_error& e) {
        std::cerr << "numerical accuracy error: " << e.what() << "\n";
        return 2;
    } catch (const regime_error& e) {
        std::cerr << "regime error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
