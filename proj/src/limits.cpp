#include "hop/limits.hpp"

#include <cmath>
#include <numeric>

#include "hop/errors.hpp"
#include "hop/quadrature.hpp"
#include "hop/sobolev.hpp"

namespace hop {

Rational gamma_exponent(int d, int m) {
    if (d <= 0 || d % 2 == 0) throw config_error("gamma_exponent: d must be odd positive");
    if (m < 0) throw config_error("gamma_exponent: m must be nonnegative");
    // min(7/4, d/2 + m) over denominator 4
    long num = std::min<long>(7, 2L * d + 4L * m);
    long den = 4;
    const long g = std::gcd(num, den);
    return Rational{num / g, den / g};
}

namespace {

constexpr double kDegenerateRel = 1e-10;

CovMatrix2 finish_cov(double a11, double a12, double a22) {
    CovMatrix2 c;
    c.a11 = a11;
    c.a12 = a12;
    c.a22 = a22;
    const double tr = c.trace();
    c.degenerate = c.det() < kDegenerateRel * tr * tr;
    if (c.degenerate && tr > 0.0) {
        if (a22 >= a11) {
            c.alpha = a22 > 0 ? a12 / a22 : 0.0;  // phi1 = alpha phi2
            c.direction_swapped = false;
        } else {
            c.alpha = a11 > 0 ? a12 / a11 : 0.0;  // phi2 = alpha phi1
            c.direction_swapped = true;
        }
    }
    return c;
}

}  // namespace

CovMatrix2 sigma_matrix(const std::function<cplx(double)>& phi) {
    double a11 = 0, a12 = 0, a22 = 0;
    const int panels = 8, order = 32;
    for (int p = 0; p < panels; ++p) {
        const double a = -1.0 + 2.0 * p / panels, b = -1.0 + 2.0 * (p + 1) / panels;
        a11 += gauss([&](double x) { const cplx v = phi(x); return v.real() * v.real(); }, a, b, order);
        a12 += gauss([&](double x) { const cplx v = phi(x); return v.real() * v.imag(); }, a, b, order);
        a22 += gauss([&](double x) { const cplx v = phi(x); return v.imag() * v.imag(); }, a, b, order);
    }
    return finish_cov(a11, a12, a22);
}

CovMatrix2 sigma_matrix3(const std::function<cplx(double, double, double)>& phi) {
    const GaussRule& r = gauss_rule(24);
    double a11 = 0, a12 = 0, a22 = 0;
    for (std::size_t i = 0; i < r.node.size(); ++i)
        for (std::size_t j = 0; j < r.node.size(); ++j)
            for (std::size_t k = 0; k < r.node.size(); ++k) {
                const double w = r.weight[i] * r.weight[j] * r.weight[k];
                const cplx v = phi(r.node[i], r.node[j], r.node[k]);
                a11 += w * v.real() * v.real();
                a12 += w * v.real() * v.imag();
                a22 += w * v.imag() * v.imag();
            }
    return finish_cov(a11, a12, a22);
}

namespace {

// q_hat near 0 from the cached moments (no cancellation: product of values).
cplx fourier_series_small(const Profile& q, double xi) {
    cplx acc = 0.0;
    cplx pw = 1.0;
    double fact = 1.0;
    for (int k = 0; k <= Profile::kMaxMoment; ++k) {
        acc += pw / fact * q.moment(k);
        pw *= cplx(0.0, -xi);
        fact *= double(k + 1);
    }
    return acc;
}

}  // namespace

cplx oscillation_factor(const Profile& q, int d) {
    if (d == 1) {
        int m = 0;
        try {
            m = q.vanishing_order();
        } catch (const config_error&) {
            throw config_error("oscillation_factor: degenerate profile");
        }
        if (m < 1)
            throw config_error(
                "oscillation_factor: divergent integral (d=1 requires one vanishing moment)");
        const double cut = fourier_truncation(q);
        auto integrand = [&](double xi) -> cplx {
            const cplx a = std::abs(xi) < 0.05 ? fourier_series_small(q, xi)
                                               : fourier_cached(q, xi);
            const cplx b = std::abs(xi) < 0.05 ? fourier_series_small(q, -xi)
                                               : fourier_cached(q, -xi);
            return a * b / (xi * xi);
        };
        AdaptiveOptions opt;
        opt.abs_tol = 1e-12;
        opt.max_panel = 0.5;
        // the integrand extends continuously through 0; split to avoid the midpoint
        cplx v = integrate_adaptive(integrand, -cut, -1e-9, opt) +
                 integrate_adaptive(integrand, 1e-9, cut, opt);
        return v / (2.0 * M_PI);
    }
    if (d == 3) {
        // radial: (1/(2 pi)^3) * 4 pi int_0^inf q_hat(r)^2 dr
        AdaptiveOptions opt;
        opt.abs_tol = 1e-12;
        opt.max_panel = 0.5;
        const double cut = 64.0;
        cplx v = integrate_adaptive(
            [&](double r) {
                const cplx qh = fourier_radial3(q, r);
                return qh * qh;
            },
            0.0, cut, opt);
        return 4.0 * M_PI * v / std::pow(2.0 * M_PI, 3);
    }
    throw config_error("oscillation_factor: d must be 1 or 3");
}

cplx constant_L(const Profile& q, const ResonantPair& pair, int d) {
    const cplx osc = oscillation_factor(q, d);
    if (d == 1) {
        cplx fg_int = 0.0;
        for (int p = 0; p < 8; ++p) {
            const double a = -1.0 + 2.0 * p / 8.0, b = -1.0 + 2.0 * (p + 1) / 8.0;
            fg_int += gauss([&](double x) { return pair.fg(x); }, a, b, 32);
        }
        return osc * fg_int;
    }
    // d = 3: only constant pairs are available (no multidimensional solver);
    // int over the cube of a constant fg
    const cplx fg0 = pair.fg(0.0);
    return osc * fg0 * 8.0;
}

std::string case_name(CaseTag t) {
    switch (t) {
        case CaseTag::I: return "I";
        case CaseTag::II: return "II";
        case CaseTag::III: return "III";
    }
    return "?";
}

CaseTag case_classifier(int d, const Profile& q, const ResonantPair& pair) {
    if (d != 1 && d != 3) throw config_error("case_classifier: d must be 1 or 3");
    const double tol = 1e-8;
    const double mass_scale = std::max(q.abs_mass(), 1e-300);
    const bool q_mean_nonzero = std::abs(q.moment(0)) > tol * mass_scale;
    if (q_mean_nonzero) return CaseTag::I;
    if (d == 1) {
        const bool first_moment_nonzero = std::abs(q.moment(1)) > tol * mass_scale;
        if (first_moment_nonzero) {
            // (fg)' not identically 0 on [-1,1]: sup over a 64-point grid
            double sup_d = 0.0, scale = 0.0;
            const double h = 1e-5;
            for (int i = 0; i < 64; ++i) {
                const double x = -1.0 + 2.0 * (i + 0.5) / 64.0;
                const cplx d1 = (pair.fg(x + h) - pair.fg(x - h)) / (2.0 * h);
                sup_d = std::max(sup_d, std::abs(d1));
                scale = std::max(scale, std::abs(pair.fg(x)));
            }
            if (sup_d > 1e-8 * std::max(scale, 1e-300)) return CaseTag::II;
        }
    }
    return CaseTag::III;
}

double sigma2_corollary(CaseTag tag, const ResonantPair& pair, const Profile& q, int d) {
    // applicability: real-pair refinement (lambda0 on iR, g = conj(f))
    if (std::abs(pair.lambda0.real()) > 1e-9)
        throw config_error("sigma2_corollary: resonance not on the imaginary axis");
    for (double x : {-0.8, -0.3, 0.2, 0.7}) {
        if (std::abs(pair.g(x) - std::conj(pair.f(x))) >
            1e-6 * std::max(1.0, std::abs(pair.f(x))))
            throw config_error("sigma2_corollary: pair is not of real type (g != conj f)");
    }
    if (tag == CaseTag::I) {
        if (d == 1) {
            double acc = 0.0;
            for (int p = 0; p < 8; ++p) {
                const double a = -1.0 + 2.0 * p / 8.0, b = -1.0 + 2.0 * (p + 1) / 8.0;
                acc += gauss([&](double x) { return std::pow(std::abs(pair.f(x)), 4); }, a,
                             b, 32);
            }
            return acc;
        }
        const GaussRule& r = gauss_rule(24);
        double acc = 0.0;
        for (std::size_t i = 0; i < r.node.size(); ++i)
            for (std::size_t j = 0; j < r.node.size(); ++j)
                for (std::size_t k = 0; k < r.node.size(); ++k)
                    acc += r.weight[i] * r.weight[j] * r.weight[k] *
                           std::pow(std::abs(pair.f(r.node[i])), 4);  // radial d=3 pairs only
        return acc;
    }
    if (tag == CaseTag::II) {
        if (d != 1) throw config_error("sigma2_corollary: Case II requires d = 1");
        const double h = 1e-5;
        double acc = 0.0;
        for (int p = 0; p < 8; ++p) {
            const double a = -1.0 + 2.0 * p / 8.0, b = -1.0 + 2.0 * (p + 1) / 8.0;
            acc += gauss(
                [&](double x) {
                    const double d1 = (std::norm(pair.f(x + h)) - std::norm(pair.f(x - h))) /
                                      (2.0 * h);
                    return d1 * d1;
                },
                a, b, 32);
        }
        return acc;
    }
    // Case III: (1/(2 pi)^d) int |q_hat|^2/|xi|^2 * int |f|^2
    cplx osc;
    if (d == 1) {
        int m = q.vanishing_order();
        if (m < 1) throw config_error("sigma2_corollary: divergent Case III integral");
        const double cut = fourier_truncation(q);
        AdaptiveOptions opt;
        opt.abs_tol = 1e-12;
        opt.max_panel = 0.5;
        auto integrand = [&](double xi) {
            const cplx a = std::abs(xi) < 0.05 ? fourier_series_small(q, xi)
                                               : fourier_cached(q, xi);
            return std::norm(a) / (xi * xi);
        };
        osc = (integrate_adaptive_real(integrand, -cut, -1e-9, opt) +
               integrate_adaptive_real(integrand, 1e-9, cut, opt)) /
              (2.0 * M_PI);
    } else {
        AdaptiveOptions opt;
        opt.abs_tol = 1e-12;
        opt.max_panel = 0.5;
        double v = integrate_adaptive_real(
            [&](double r) { return std::norm(fourier_radial3(q, r)); }, 0.0, 64.0, opt);
        osc = 4.0 * M_PI * v / std::pow(2.0 * M_PI, 3);
    }
    double f2 = 0.0;
    if (d == 1) {
        for (int p = 0; p < 8; ++p) {
            const double a = -1.0 + 2.0 * p / 8.0, b = -1.0 + 2.0 * (p + 1) / 8.0;
            f2 += gauss([&](double x) { return std::norm(pair.f(x)); }, a, b, 32);
        }
    } else {
        f2 = 8.0 * std::norm(pair.f(0.0));
    }
    return osc.real() * f2;
}

Profile EffectivePotential::as_profile() const {
    std::vector<std::pair<cplx, Profile>> terms;
    if (!q0.is_zero()) terms.emplace_back(1.0, q0);
    terms.emplace_back(constant, Profile::smooth_box(1.0, box_edge));
    return Profile::lincomb(std::move(terms));
}

RandomPotential EffectivePotential::as_potential() const {
    return RandomPotential(as_profile(), Profile::zero(), 1, CoefficientField::zero(1, 1));
}

EffectivePotential effective_potential(const Profile& q0, const Profile& q, int N, int d) {
    if (N < 1) throw config_error("effective_potential: N must be >= 1");
    EffectivePotential out;
    out.q0 = q0;
    const cplx osc = oscillation_factor(q, d);  // throws when divergent
    // sign chosen so the induced first-order shift equals +i * L / N^2
    out.constant = -osc / (static_cast<double>(N) * N);
    const int m = q.vanishing_order();
    out.exists_warning = (d / 2.0 + m) < 2.0;
    return out;
}

}  // namespace hop
