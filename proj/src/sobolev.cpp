#include "hop/sobolev.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "hop/errors.hpp"
#include "hop/parallel.hpp"
#include "hop/quadrature.hpp"
#include "hop/stats.hpp"

namespace hop {

namespace {

// Dense tabulation of q_hat on [-Xi, Xi]. The transform at every grid point is
// evaluated from one shared set of composite Gauss nodes for q, which keeps
// the table build at O(points * nodes) with spectral accuracy per panel.
struct FourierTable {
    double xi_max = 0.0;
    double step = 0.0;
    std::vector<cplx> val;  // at xi = -xi_max + k*step

    cplx operator()(double xi) const {
        const double u = (xi + xi_max) / step;
        std::ptrdiff_t k = static_cast<std::ptrdiff_t>(std::floor(u));
        // 4-point local cubic interpolation
        k = std::max<std::ptrdiff_t>(1, std::min<std::ptrdiff_t>(k, static_cast<std::ptrdiff_t>(val.size()) - 3));
        const double t = u - static_cast<double>(k);
        const cplx fm1 = val[static_cast<std::size_t>(k - 1)];
        const cplx f0 = val[static_cast<std::size_t>(k)];
        const cplx f1 = val[static_cast<std::size_t>(k + 1)];
        const cplx f2 = val[static_cast<std::size_t>(k + 2)];
        const double a = -t * (t - 1.) * (t - 2.) / 6.;
        const double b = (t * t - 1.) * (t - 2.) / 2.;
        const double c = -t * (t + 1.) * (t - 2.) / 2.;
        const double d = t * (t * t - 1.) / 6.;
        return a * fm1 + b * f0 + c * f1 + d * f2;
    }
};

FourierTable build_table(const Profile& q, double xi_max, int points_per_unit = 512) {
    FourierTable tab;
    tab.xi_max = xi_max;
    const std::size_t n = static_cast<std::size_t>(std::ceil(2 * xi_max * points_per_unit)) + 1;
    tab.step = 2 * xi_max / static_cast<double>(n - 1);
    tab.val.resize(n);

    const Interval s = q.support();
    if (!(s.hi > s.lo)) return tab;
    // shared composite Gauss nodes; phase per panel <= ~pi at xi_max
    const int order = 24;
    const int panels =
        std::max(8, static_cast<int>(std::ceil(xi_max * s.length() / M_PI)) + 4);
    const GaussRule& rule = gauss_rule(order);
    std::vector<double> xs, ws;
    std::vector<cplx> qs;
    for (int p = 0; p < panels; ++p) {
        const double a = s.lo + s.length() * p / panels;
        const double b = s.lo + s.length() * (p + 1) / panels;
        for (int i = 0; i < order; ++i) {
            const double x = 0.5 * (a + b) + 0.5 * (b - a) * rule.node[static_cast<std::size_t>(i)];
            xs.push_back(x);
            ws.push_back(0.5 * (b - a) * rule.weight[static_cast<std::size_t>(i)]);
            qs.push_back(q(x));
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        const double xi = -xi_max + tab.step * static_cast<double>(k);
        cplx acc = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            acc += ws[i] * qs[i] * std::exp(cplx(0.0, -xi * xs[i]));
        tab.val[k] = acc;
    }
    return tab;
}

const FourierTable& cached_table(const Profile& q, double xi_max) {
    static std::map<std::string, FourierTable> cache;
    static std::mutex mu;
    std::string key = q.describe() + "#" + std::to_string(xi_max);
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, build_table(q, xi_max)).first;
    return it->second;
}

double truncation_from_table(const FourierTable& tab) {
    double peak = 0.0;
    for (const cplx& v : tab.val) peak = std::max(peak, std::norm(v));
    const double thresh = 1e-14 * peak;
    // outermost |xi| where |q_hat|^2 still exceeds the threshold
    double xi_cut = tab.step;
    const std::size_t n = tab.val.size();
    for (std::size_t k = 0; k < n; ++k) {
        if (std::norm(tab.val[k]) > thresh) {
            const double xi = std::abs(-tab.xi_max + tab.step * static_cast<double>(k));
            xi_cut = std::max(xi_cut, xi);
        }
    }
    return std::min(xi_cut + 1.0, tab.xi_max);
}

constexpr double kTableXi = 96.0;

}  // namespace

double fourier_truncation(const Profile& q) {
    return truncation_from_table(cached_table(q, kTableXi));
}

cplx fourier_cached(const Profile& q, double xi) {
    if (std::abs(xi) >= kTableXi) return 0.0;
    return cached_table(q, kTableXi)(xi);
}

cplx fourier_radial3(const Profile& q, double rho) {
    const Interval sup = q.support();
    const double rmax = std::max(std::abs(sup.lo), std::abs(sup.hi));
    AdaptiveOptions opt;
    opt.abs_tol = 1e-12;
    opt.max_panel = M_PI / (std::abs(rho) + 1.0);
    if (std::abs(rho) < 1e-8) {
        cplx v = integrate_adaptive([&](double r) { return r * r * q(r); }, 0.0, rmax, opt);
        return 4.0 * M_PI * v;
    }
    cplx v = integrate_adaptive(
        [&](double r) { return r * std::sin(rho * r) * q(r); }, 0.0, rmax, opt);
    return 4.0 * M_PI / rho * v;
}

cplx AlphaMatrix::entry_diff(int delta) const {
    if (d != 1) throw config_error("entry_diff by signed offset requires d = 1");
    const int a = std::abs(delta);
    if (a >= static_cast<int>(diff.size())) return 0.0;
    const cplx v = diff[static_cast<std::size_t>(a)];
    return delta >= 0 ? v : std::conj(v);
}

cplx AlphaMatrix::entry(int j, int l) const { return entry_diff(j - l); }

double AlphaMatrix::trace() const {
    return static_cast<double>(side()) * diff[0].real();
}

std::size_t AlphaMatrix::side() const {
    std::size_t out = 1;
    for (int i = 0; i < d; ++i) out *= static_cast<std::size_t>(2 * N + 1);
    return out;
}

double AlphaMatrix::hs_norm() const {
    if (d == 1) {
        const double n = 2.0 * N + 1.0;
        double acc = n * std::norm(diff[0]);
        for (int k = 1; k <= 2 * N; ++k)
            acc += 2.0 * (n - k) * std::norm(diff[static_cast<std::size_t>(k)]);
        return std::sqrt(acc);
    }
    // d=3: count pairs at each materialized radial offset
    const int side1 = 2 * N + 1;
    double acc = 0.0;
    const int cut = static_cast<int>(diff.size()) - 1;
    for (int dx = -cut; dx <= cut; ++dx)
        for (int dy = -cut; dy <= cut; ++dy)
            for (int dz = -cut; dz <= cut; ++dz) {
                const double r = std::sqrt(double(dx * dx + dy * dy + dz * dz));
                const int k = static_cast<int>(std::lround(r));
                if (k > cut) continue;
                // interpolate the radial profile at non-integer radii
                cplx v;
                const int k0 = static_cast<int>(std::floor(r));
                if (k0 >= cut)
                    v = diff[static_cast<std::size_t>(cut)];
                else {
                    const double t = r - k0;
                    v = (1 - t) * diff[static_cast<std::size_t>(k0)] +
                        t * diff[static_cast<std::size_t>(k0 + 1)];
                }
                double pairs = 1.0;
                pairs *= side1 - std::abs(dx);
                pairs *= side1 - std::abs(dy);
                pairs *= side1 - std::abs(dz);
                acc += pairs * std::norm(v);
            }
    return std::sqrt(acc);
}

AlphaMatrix alpha_matrix(const Profile& q, int N, int d, double s, int d3_cutoff) {
    if (!(s > 0.0)) throw config_error("alpha_matrix: s must be positive");
    if (d != 1 && d != 3) throw config_error("alpha_matrix: d must be 1 or 3");
    if (N < 1) throw config_error("alpha_matrix: N must be >= 1");

    AlphaMatrix A;
    A.s = s;
    A.N = N;
    A.d = d;

    if (d == 1) {
        const FourierTable& tab = cached_table(q, kTableXi);
        const double xi_cut = truncation_from_table(tab);
        A.diff.resize(static_cast<std::size_t>(2 * N) + 1);
        const double norm_c = 1.0 / (2.0 * M_PI * N);
        for (int delta = 0; delta <= 2 * N; ++delta) {
            AdaptiveOptions opt;
            opt.abs_tol = 1e-12 / N;
            opt.max_panel = M_PI / (std::abs(delta) + 1.0);
            cplx v = integrate_adaptive(
                [&](double xi) {
                    const double w = std::norm(tab(xi)) /
                                     std::pow(1.0 + N * static_cast<double>(N) * xi * xi, s);
                    return std::exp(cplx(0.0, -xi * delta)) * w;
                },
                -xi_cut, xi_cut, opt);
            A.diff[static_cast<std::size_t>(delta)] = norm_c * v;
        }
        // entry(0,0) is a real positive integral; drop the quadrature residue
        A.diff[0] = cplx(A.diff[0].real(), 0.0);
        return A;
    }

    // d = 3, radial profile q(|x|): q_hat(rho) = (4 pi / rho) int r sin(rho r) q(r) dr
    const Interval sup = q.support();
    const double rmax = std::max(std::abs(sup.lo), std::abs(sup.hi));
    auto q_hat_radial = [&](double rho) -> cplx {
        AdaptiveOptions opt;
        opt.abs_tol = 1e-12;
        opt.max_panel = M_PI / (std::abs(rho) + 1.0);
        if (std::abs(rho) < 1e-8) {
            cplx v = integrate_adaptive([&](double r) { return r * r * q(r); }, 0.0, rmax, opt);
            return 4.0 * M_PI * v;
        }
        cplx v = integrate_adaptive(
            [&](double r) { return r * std::sin(rho * r) * q(r); }, 0.0, rmax, opt);
        return 4.0 * M_PI / rho * v;
    };
    // tabulate the radial transform once
    const double xi_cut = 64.0;
    const int ntab = 4096;
    std::vector<cplx> qh(ntab + 1);
    for (int i = 0; i <= ntab; ++i) qh[static_cast<std::size_t>(i)] = q_hat_radial(xi_cut * i / ntab);
    auto qh_at = [&](double rho) {
        const double u = rho / xi_cut * ntab;
        int k = std::max(1, std::min(static_cast<int>(u), ntab - 2));
        const double t = u - k;
        return (1 - t) * qh[static_cast<std::size_t>(k)] + t * qh[static_cast<std::size_t>(k + 1)];
    };
    const double n3 = std::pow(static_cast<double>(N), 3);
    const double norm_c = 1.0 / (std::pow(2.0 * M_PI, 3) * n3);
    A.diff.resize(static_cast<std::size_t>(d3_cutoff) + 1);
    for (int k = 0; k <= d3_cutoff; ++k) {
        AdaptiveOptions opt;
        opt.abs_tol = 1e-12 / n3;
        opt.max_panel = M_PI / (k + 1.0);
        cplx v = integrate_adaptive(
            [&](double r) {
                const double phase = r * k;
                const double sinc = std::abs(phase) < 1e-8
                                        ? 1.0 - phase * phase / 6.0
                                        : std::sin(phase) / phase;
                return cplx(4.0 * M_PI * r * r * sinc /
                            std::pow(1.0 + double(N) * N * r * r, s), 0.0) *
                       std::norm(qh_at(r));
            },
            0.0, xi_cut, opt);
        A.diff[static_cast<std::size_t>(k)] = norm_c * v;
    }
    A.diff[0] = cplx(A.diff[0].real(), 0.0);
    return A;
}

double quadratic_form(const AlphaMatrix& A, const CoefficientField& u) {
    if (A.d != 1 || u.dim() != 1)
        throw config_error("quadratic_form: implemented for d = 1");
    if (A.N != u.N()) throw config_error("quadratic_form: N mismatch");
    const int N = A.N;
    // correlation c_delta = sum_j u_j u_{j-delta}
    cplx acc = 0.0;
    for (int delta = -2 * N; delta <= 2 * N; ++delta) {
        double c = 0.0;
        const int jlo = std::max(-N, -N + delta), jhi = std::min(N, N + delta);
        for (int j = jlo; j <= jhi; ++j) c += u.at(j) * u.at(j - delta);
        acc += A.entry_diff(delta) * c;
    }
    const double scale = std::max(std::abs(acc), 1e-300);
    if (std::abs(acc.imag()) > 1e-9 * scale)
        throw accuracy_error("quadratic_form: imaginary residue above threshold");
    return acc.real();
}

namespace {

double hnorm_integral(const RandomPotential& V, const Profile* ref, double s) {
    if (V.coeffs().dim() != 1) throw config_error("hnorm_spectral: requires d = 1");
    const int N = V.N();
    const Profile& q = V.q();
    const FourierTable& tab = cached_table(q, kTableXi);
    const double xi_cut = truncation_from_table(tab);
    const FourierTable* rtab = nullptr;
    double xi_hi = N * xi_cut;
    if (ref) {
        rtab = &cached_table(*ref, kTableXi);
        xi_hi = std::max(xi_hi, truncation_from_table(*rtab));
    }
    const auto& field = V.coeffs();
    auto S = [&](double eta) -> cplx {
        // sum_j u_j e^{-i eta j} by incremental rotation
        const cplx rot = std::exp(cplx(0.0, -eta));
        cplx ph = std::exp(cplx(0.0, eta * N));
        cplx acc = 0.0;
        for (int j = -N; j <= N; ++j) {
            acc += field.at(j) * ph;
            ph *= rot;
        }
        return acc;
    };
    auto vhat = [&](double xi) -> cplx { return tab(xi / N) * S(xi / N) / double(N); };
    AdaptiveOptions opt;
    opt.abs_tol = 1e-10;
    opt.max_panel = M_PI / 2.0;  // S(xi/N) and ref oscillate at unit scale in xi
    double val = integrate_adaptive_real(
        [&](double xi) {
            cplx v = vhat(xi);
            if (rtab) v -= (*rtab)(xi);
            return std::norm(v) / std::pow(1.0 + xi * xi, s);
        },
        -xi_hi, xi_hi, opt);
    return val / (2.0 * M_PI);
}

}  // namespace

double hnorm_spectral(const RandomPotential& v_sharp, double s) {
    if (!v_sharp.q0().is_zero())
        throw config_error("hnorm_spectral: potential must have q0 = 0");
    return std::sqrt(std::max(0.0, hnorm_integral(v_sharp, nullptr, s)));
}

double hnorm_spectral_diff(const RandomPotential& v_sharp, const Profile& ref, double s) {
    if (!v_sharp.q0().is_zero())
        throw config_error("hnorm_spectral_diff: potential must have q0 = 0");
    return std::sqrt(std::max(0.0, hnorm_integral(v_sharp, &ref, s)));
}

TailCurve hw_tail_experiment(const AlphaMatrix& A, const CoefficientLaw& law,
                             std::vector<double> t_grid, int M, std::uint64_t seed,
                             unsigned workers) {
    if (M < 100) throw config_error("hw_tail_experiment: M must be >= 100");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw config_error("hw_tail_experiment: t grid must be increasing");

    TailCurve out;
    out.samples = M;
    out.trace = A.trace();
    out.hs = A.hs_norm();

    std::vector<double> Q(static_cast<std::size_t>(M));
    parallel_for(static_cast<std::size_t>(M), workers, [&](std::size_t i) {
        CoefficientField u = CoefficientField::sample(law, A.N, A.d, mix64(seed, i));
        Q[i] = quadratic_form(A, u);
    });
    double mean = 0.0;
    for (double v : Q) mean += v;
    mean /= M;
    double var = 0.0;
    for (double v : Q) var += (v - mean) * (v - mean);
    out.mc_mean = mean;
    out.mc_std = std::sqrt(var / std::max(1, M - 1));

    for (double t : t_grid) {
        if (t * t < 2.0 * std::abs(out.trace)) {
            out.filtered_t.push_back(t);
            continue;
        }
        int count = 0;
        for (double v : Q)
            if (std::abs(v) >= t * t) ++count;
        auto [lo, hi] = wilson_interval(count, M);
        out.t.push_back(t);
        out.t_squared.push_back(t * t);
        out.empirical_p.push_back(static_cast<double>(count) / M);
        out.wilson_lo.push_back(lo);
        out.wilson_hi.push_back(hi);
    }
    // fitted exponential decay of log p against t^2/|alpha|_HS
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < out.t.size(); ++i) {
        if (out.empirical_p[i] <= 0.0) continue;
        xs.push_back(out.t_squared[i] / out.hs);
        ys.push_back(std::log(out.empirical_p[i]));
    }
    if (xs.size() >= 2) {
        auto fit = least_squares_line(xs, ys);
        out.fitted_rate = fit.slope;
    }
    return out;
}

}  // namespace hop
