#include "hop/report.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hop/errors.hpp"

namespace hop {

using json = nlohmann::ordered_json;

std::string config_digest(const KV& kv) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& [k, v] : kv) {
        feed(k);
        feed("=");
        feed(v);
        feed("\n");
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

double get_d(const KV& kv, const std::string& k, double dflt) {
    auto it = kv.find(k);
    return it == kv.end() ? dflt : std::stod(it->second);
}
long long get_i(const KV& kv, const std::string& k, long long dflt) {
    auto it = kv.find(k);
    return it == kv.end() ? dflt : std::stoll(it->second);
}
std::string get_s(const KV& kv, const std::string& k, const std::string& dflt) {
    auto it = kv.find(k);
    return it == kv.end() ? dflt : it->second;
}
std::vector<int> get_ints(const KV& kv, const std::string& k) {
    std::vector<int> out;
    auto it = kv.find(k);
    if (it == kv.end()) return out;
    std::stringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stoi(tok));
    }
    return out;
}
std::string join_ints(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(v[i]);
    }
    return out;
}

json cx(const cplx& z) { return json::array({z.real(), z.imag()}); }

}  // namespace

KV to_kv(const CaseStudyConfig& c) {
    KV kv;
    kv["campaign"] = "case-study";
    kv["case"] = case_name(c.tag);
    kv["q0"] = c.q0_expr;
    kv["q"] = c.q_expr;
    kv["law"] = c.law;
    kv["lambda0_re"] = num(c.lambda0_guess.real());
    kv["lambda0_im"] = num(c.lambda0_guess.imag());
    kv["isolation_radius"] = num(c.isolation_radius);
    kv["N_list"] = join_ints(c.N_list);
    kv["M"] = std::to_string(c.M);
    kv["seed"] = std::to_string(c.seed);
    kv["solver_spot_checks"] = std::to_string(c.solver_spot_checks);
    kv["solver_sampling"] = c.solver_sampling ? "1" : "0";
    return kv;
}

CaseStudyConfig case_config_from_kv(const KV& kv) {
    CaseStudyConfig c;
    const std::string tag = get_s(kv, "case", "I");
    c.tag = tag == "I" ? CaseTag::I : tag == "II" ? CaseTag::II : CaseTag::III;
    c.q0_expr = get_s(kv, "q0", "zero");
    c.q_expr = get_s(kv, "q", "psi");
    c.law = get_s(kv, "law", "rademacher");
    c.lambda0_guess = cplx(get_d(kv, "lambda0_re", 0), get_d(kv, "lambda0_im", 0));
    c.isolation_radius = get_d(kv, "isolation_radius", 0.35);
    c.N_list = get_ints(kv, "N_list");
    c.M = static_cast<int>(get_i(kv, "M", 2000));
    c.seed = static_cast<std::uint64_t>(get_i(kv, "seed", 1));
    c.solver_spot_checks = static_cast<int>(get_i(kv, "solver_spot_checks", 0));
    c.solver_sampling = get_s(kv, "solver_sampling", "0") == "1";
    return c;
}

KV to_kv(const LocalizationConfig& c) {
    KV kv;
    kv["campaign"] = "localize";
    kv["q0"] = c.q0_expr;
    kv["q"] = c.q_expr;
    kv["law"] = c.law;
    kv["R"] = num(c.R);
    kv["N"] = std::to_string(c.N);
    kv["M"] = std::to_string(c.M);
    kv["seed"] = std::to_string(c.seed);
    return kv;
}

LocalizationConfig localization_config_from_kv(const KV& kv) {
    LocalizationConfig c;
    c.q0_expr = get_s(kv, "q0", "");
    c.q_expr = get_s(kv, "q", "psi");
    c.law = get_s(kv, "law", "rademacher");
    c.R = get_d(kv, "R", 2.0);
    c.N = static_cast<int>(get_i(kv, "N", 40));
    c.M = static_cast<int>(get_i(kv, "M", 100));
    c.seed = static_cast<std::uint64_t>(get_i(kv, "seed", 1));
    return c;
}

KV to_kv(const FreeRegionConfig& c) {
    KV kv;
    kv["campaign"] = "free-region";
    kv["q"] = c.q_expr;
    kv["law"] = c.law;
    kv["N_list"] = join_ints(c.N_list);
    kv["M"] = std::to_string(c.M);
    kv["box"] = num(c.box.re0) + "," + num(c.box.re1) + "," + num(c.box.im0) + "," +
                num(c.box.im1);
    kv["seed"] = std::to_string(c.seed);
    return kv;
}

FreeRegionConfig free_region_config_from_kv(const KV& kv) {
    FreeRegionConfig c;
    c.q_expr = get_s(kv, "q", "psi");
    c.law = get_s(kv, "law", "rademacher");
    c.N_list = get_ints(kv, "N_list");
    c.M = static_cast<int>(get_i(kv, "M", 20));
    std::stringstream ss(get_s(kv, "box", "-4,4,-3,0.5"));
    std::string tok;
    double vals[4] = {-4, 4, -3, 0.5};
    for (double& v : vals) {
        if (std::getline(ss, tok, ',')) v = std::stod(tok);
    }
    c.box = ComplexBox{vals[0], vals[1], vals[2], vals[3]};
    c.seed = static_cast<std::uint64_t>(get_i(kv, "seed", 1));
    return c;
}

KV to_kv(const CounterexampleConfig& c) {
    KV kv;
    kv["campaign"] = "counterexample";
    kv["q"] = c.q_expr;
    kv["N_list"] = join_ints(c.N_list);
    kv["box"] = num(c.box.re0) + "," + num(c.box.re1) + "," + num(c.box.im0) + "," +
                num(c.box.im1);
    kv["box_edge"] = num(c.box_edge);
    return kv;
}

CounterexampleConfig counterexample_config_from_kv(const KV& kv) {
    CounterexampleConfig c;
    c.q_expr = get_s(kv, "q", "");
    c.N_list = get_ints(kv, "N_list");
    std::stringstream ss(get_s(kv, "box", "0.5,5,-2.6,0.05"));
    std::string tok;
    double vals[4] = {0.5, 5, -2.6, 0.05};
    for (double& v : vals) {
        if (std::getline(ss, tok, ',')) v = std::stod(tok);
    }
    c.box = ComplexBox{vals[0], vals[1], vals[2], vals[3]};
    c.box_edge = get_d(kv, "box_edge", 0.025);
    return c;
}

namespace {

json kv_json(const KV& kv) {
    json j = json::object();
    for (const auto& [k, v] : kv) j[k] = v;
    return j;
}

json stats_json(const CaseNStats& s) {
    json j;
    j["N"] = s.N;
    j["rescale_power"] = s.rescale_power;
    j["degenerate"] = s.degenerate;
    j["rejection_rate"] = s.rejection_rate;
    j["max_abs_re_rescaled"] = s.max_abs_re_rescaled;
    j["sigma2_hat"] = s.sigma2_hat;
    j["ks_fitted"] = s.ks_fitted;
    j["ks_theorem"] = s.ks_theorem;
    j["ks_halved"] = s.ks_halved;
    j["rms_abs_shift"] = s.rms_abs_shift;
    j["mean_rescaled"] = cx(s.mean_rescaled);
    j["spot_gap_max"] = s.spot_gap_max;
    j["spot_checks_run"] = s.spot_checks_run;
    j["spot_checks_failed"] = s.spot_checks_failed;
    return j;
}

}  // namespace

std::string report_json(const CaseStudyReport& r) {
    json j;
    j["schema"] = r.schema;
    j["campaign"] = "case-study";
    j["digest"] = r.digest;
    j["config"] = kv_json(to_kv(r.config));
    j["lambda0"] = cx(r.lambda0);
    j["normalizer"] = cx(r.normalizer);
    j["sigma2_theorem"] = r.sigma2_theorem;
    j["sigma2_halved"] = r.sigma2_theorem / 2.0;
    j["sigma2_cor2"] = r.sigma2_cor2;
    j["L_limit"] = cx(r.L_limit);
    j["ratio_to_L"] = r.ratio_to_L;
    j["cauchy_gaps"] = r.cauchy_gaps;
    json st = json::array();
    for (const auto& s : r.stats) st.push_back(stats_json(s));
    j["stats"] = st;
    if (r.shift_rate.slope != 0.0) {
        j["shift_rate"] = {{"slope", r.shift_rate.slope},
                           {"stderr", r.shift_rate.slope_stderr}};
    }
    json all = json::object();
    for (const auto& [N, recs] : r.samples) {
        json arr = json::array();
        for (const auto& rec : recs) {
            json e;
            e["i"] = rec.index;
            e["seed"] = rec.seed;
            e["rejected"] = rec.rejected;
            e["lambda"] = cx(rec.lambda);
            e["rescaled"] = cx(rec.rescaled);
            arr.push_back(e);
        }
        all[std::to_string(N)] = arr;
    }
    j["samples"] = all;
    return j.dump(2);
}

std::string report_json(const LocalizationReport& r) {
    json j;
    j["schema"] = r.schema;
    j["campaign"] = "localize";
    j["digest"] = r.digest;
    j["config"] = kv_json(to_kv(r.config));
    json roots = json::array();
    for (std::size_t i = 0; i < r.q0_resonances.size(); ++i)
        roots.push_back({{"lambda", cx(r.q0_resonances[i])},
                         {"multiplicity", r.multiplicities[i]},
                         {"disk_radius", r.disk_radius[i]}});
    j["q0_resonances"] = roots;
    j["gamma"] = r.gamma;
    j["satisfied"] = r.satisfied;
    j["violated"] = r.violated;
    j["rejected"] = r.rejected;
    j["fraction"] = r.fraction();
    j["violations_small_radius"] = r.violations_small_radius;
    j["violations_large_radius"] = r.violations_large_radius;
    j["worst_offender"] = r.worst_offender;
    return j.dump(2);
}

std::string report_json(const FreeRegionReport& r) {
    json j;
    j["schema"] = r.schema;
    j["campaign"] = "free-region";
    j["digest"] = r.digest;
    j["config"] = kv_json(to_kv(r.config));
    j["gamma"] = r.gamma;
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"N", row.N},
                        {"max_im_remaining", row.max_im_remaining},
                        {"min_neg_im", row.min_neg_im},
                        {"near_zero_fraction", row.near_zero_fraction},
                        {"samples_with_remaining", row.samples_with_remaining}});
    j["rows"] = rows;
    j["A_fit"] = r.A_fit;
    j["im_slope_vs_logN"] = r.im_vs_logn.slope;
    return j.dump(2);
}

std::string report_json(const CounterexampleReport& r) {
    json j;
    j["schema"] = r.schema;
    j["campaign"] = "counterexample";
    j["digest"] = r.digest;
    j["config"] = kv_json(to_kv(r.config));
    json roots = json::array();
    for (const auto& z : r.barrier_roots) roots.push_back(cx(z));
    j["barrier_roots"] = roots;
    j["found_count"] = r.found_count;
    j["match_distance"] = r.match_distance;
    j["h2_distance"] = r.h2_distance;
    j["h2_rate_slope"] = r.h2_rate.slope;
    return j.dump(2);
}

std::string report_json(const DeterministicRateReport& r) {
    json j;
    j["schema"] = r.schema;
    j["campaign"] = "deterministic-rate";
    j["digest"] = r.digest;
    KV kv;
    kv["campaign"] = "deterministic-rate";
    kv["q"] = r.q_expr;
    kv["pattern"] = r.pattern;
    kv["N_list"] = join_ints(r.N_list);
    j["config"] = kv_json(kv);
    j["shift"] = r.shift;
    j["rate_slope"] = r.rate.slope;
    j["rate_stderr"] = r.rate.slope_stderr;
    return j.dump(2);
}

std::string report_json(const TailCurve& curve, const KV& config) {
    json j;
    j["schema"] = 1;
    j["campaign"] = "hw-tail";
    j["digest"] = config_digest(config);
    j["config"] = kv_json(config);
    j["trace"] = curve.trace;
    j["hs_norm"] = curve.hs;
    j["mc_mean"] = curve.mc_mean;
    j["mc_std"] = curve.mc_std;
    j["fitted_rate"] = curve.fitted_rate;
    j["samples"] = curve.samples;
    j["t"] = curve.t;
    j["empirical_p"] = curve.empirical_p;
    j["wilson_lo"] = curve.wilson_lo;
    j["wilson_hi"] = curve.wilson_hi;
    j["filtered_t"] = curve.filtered_t;
    return j.dump(2);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open for writing: " + path);
    out << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

KV parse_config_text(const std::string& text) {
    KV kv;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        const std::string k = trim(line.substr(0, eq));
        const std::string v = trim(line.substr(eq + 1));
        if (!k.empty()) kv[k] = v;
    }
    return kv;
}

std::string replay_report_json(const std::string& json_text) {
    json j = json::parse(json_text);
    const std::string campaign = j.value("campaign", "");
    KV kv;
    for (const auto& [k, v] : j.at("config").items()) kv[k] = v.get<std::string>();
    std::string fresh;
    if (campaign == "case-study") {
        fresh = report_json(run_case_study(case_config_from_kv(kv)));
    } else if (campaign == "localize") {
        fresh = report_json(localization_check(localization_config_from_kv(kv)));
    } else if (campaign == "free-region") {
        fresh = report_json(resonance_free_scan(free_region_config_from_kv(kv)));
    } else if (campaign == "counterexample") {
        fresh = report_json(counterexample_study(counterexample_config_from_kv(kv)));
    } else {
        throw config_error("replay: unsupported campaign '" + campaign + "'");
    }
    if (fresh == json_text) return {};
    // first differing line for the diff summary
    std::stringstream a(json_text), b(fresh);
    std::string la, lb;
    int line = 0;
    while (std::getline(a, la) && std::getline(b, lb)) {
        ++line;
        if (la != lb)
            return "line " + std::to_string(line) + ": '" + la + "' vs '" + lb + "'";
    }
    return "reports differ in length";
}

std::string tail_curve_csv(const TailCurve& t) {
    std::ostringstream os;
    os.precision(17);
    os << "t,t2,empirical_p,wilson_lo,wilson_hi\n";
    for (std::size_t i = 0; i < t.t.size(); ++i)
        os << t.t[i] << "," << t.t_squared[i] << "," << t.empirical_p[i] << ","
           << t.wilson_lo[i] << "," << t.wilson_hi[i] << "\n";
    return os.str();
}

std::string potential_grid_csv(const RandomPotential& V, int points) {
    std::ostringstream os;
    os.precision(17);
    os << "x,re_v,im_v\n";
    const Interval s = V.support();
    const double margin = 0.05 * std::max(1.0, s.length());
    for (int i = 0; i <= points; ++i) {
        const double x = s.lo - margin + (s.length() + 2 * margin) * i / points;
        const cplx v = V(x);
        os << x << "," << v.real() << "," << v.imag() << "\n";
    }
    return os.str();
}

std::string field_csv(const CoefficientField& f) {
    std::ostringstream os;
    os.precision(17);
    if (f.dim() == 1) {
        os << "j,u\n";
        for (int j = -f.N(); j <= f.N(); ++j) os << j << "," << f.at(j) << "\n";
        return os.str();
    }
    os << "j1,j2,j3,u\n";
    for (int a = -f.N(); a <= f.N(); ++a)
        for (int b = -f.N(); b <= f.N(); ++b)
            for (int c = -f.N(); c <= f.N(); ++c)
                os << a << "," << b << "," << c << "," << f.at({a, b, c}) << "\n";
    return os.str();
}

std::string resonances_csv(const std::vector<Resonance>& rs) {
    std::ostringstream os;
    os.precision(17);
    os << "re,im,multiplicity,residual\n";
    for (const auto& r : rs)
        os << r.lambda.real() << "," << r.lambda.imag() << "," << r.multiplicity << ","
           << r.residual << "\n";
    return os.str();
}

std::string resonances_json(const std::vector<Resonance>& rs, const KV& config) {
    json j;
    j["schema"] = 1;
    j["campaign"] = "resonances";
    j["digest"] = config_digest(config);
    j["config"] = kv_json(config);
    json arr = json::array();
    for (const auto& r : rs) {
        json e;
        e["re"] = r.lambda.real();
        e["im"] = r.lambda.imag();
        e["multiplicity"] = r.multiplicity;
        e["residual"] = r.residual;
        e["box"] = {r.certified_box.re0, r.certified_box.re1, r.certified_box.im0,
                    r.certified_box.im1};
        arr.push_back(e);
    }
    j["resonances"] = arr;
    return j.dump(2);
}

}  // namespace hop
