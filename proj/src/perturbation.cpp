#include "hop/perturbation.hpp"

#include <cmath>
#include <memory>

#include "hop/errors.hpp"
#include "hop/quadrature.hpp"
#include "hop/sobolev.hpp"

namespace hop {

cplx regularized_kernel(cplx lambda, double r) {
    if (r < 0.0) throw config_error("regularized_kernel: r must be nonnegative");
    const cplx z = cplx(0, 1) * lambda * r;
    if (std::abs(z) < 1e-4) {
        // K = -(r/2) * (e^z - 1)/z expanded around z = 0
        const cplx phi1 = 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
        return -0.5 * r * phi1;
    }
    return cplx(0, 1) * (std::exp(z) - 1.0) / (2.0 * lambda);
}

namespace {

// Gauss integral of w(x) over the bump support, split at an interior kink.
template <class Fn>
cplx bump_integral(const Interval& s, double kink, int order, const Fn& w) {
    if (kink > s.lo + 1e-14 && kink < s.hi - 1e-14)
        return gauss(w, s.lo, kink, order) + gauss(w, kink, s.hi, order);
    return gauss(w, s.lo, s.hi, order);
}

// weights/abscissas of V_# against a kernel factor:
//   (Lw)(X) = sum_l u_l (1/N) int q(y) Ker(X, (y+l)/N) w((y+l)/N) dy
// with the |X - Y| kink split inside the bump that contains it.
struct BumpField {
    const RandomPotential& V;
    Interval s;
    int N;

    template <class Ker, class Fn>
    cplx apply(const Ker& kernel, const Fn& w, double X, int order) const {
        cplx acc = 0.0;
        for (int l = -N; l <= N; ++l) {
            const double u = V.coeffs().at(l);
            if (u == 0.0) continue;
            const double kink = N * X - l;  // y with (y+l)/N = X
            acc += u * bump_integral(s, kink, order, [&](double y) {
                const double Y = (y + l) / N;
                return V.q()(y) * kernel(X, Y) * w(Y);
            });
        }
        return acc / double(N);
    }
};

}  // namespace

cplx term_a(int k, const RandomPotential& v_sharp, const ResonantPair& pair, cplx lambda,
            const SeriesOptions& opt) {
    if (!v_sharp.q0().is_zero())
        throw config_error("term_a: pass the oscillatory part only (q0 = 0)");
    const Profile& q = v_sharp.q();
    if (q.is_zero()) return 0.0;
    const int N = v_sharp.N();
    const Interval s = q.support();

    if (k == 0) {
        // two half-support panels of order 48: the bump family is flat but
        // not analytic at its endpoints, one moderate panel is not enough
        const double mid = 0.5 * (s.lo + s.hi);
        cplx acc = 0.0;
        for (int j = -N; j <= N; ++j) {
            const double u = v_sharp.coeffs().at(j);
            if (u == 0.0) continue;
            auto w = [&](double x) { return q(x) * pair.fg((x + j) / N); };
            acc += u * (gauss(w, s.lo, mid, 48) + gauss(w, mid, s.hi, 48));
        }
        return acc / double(N);
    }

    const bool free_kernel = pair.q0_profile.is_zero() && std::abs(pair.lambda0) < 1e-12;
    if (k > 2 || (k == 2 && !free_kernel))
        throw config_error("term_a: unsupported (k, q0) combination");

    // kernel of L^{lambda0}_{q0}(lambda)
    std::shared_ptr<ResolventKernel> G;
    if (!free_kernel) {
        RandomPotential Vq0(pair.q0_profile, Profile::zero(), 1, CoefficientField::zero(1, 1));
        const double L = std::max(solver_halfwidth(Vq0), 1.0 + std::max(std::abs(s.lo), s.hi) / N + 0.25);
        G = std::make_shared<ResolventKernel>(Vq0, lambda, L, 1024);
    }
    const cplx lam0 = pair.lambda0;
    auto kernel = [&](double X, double Y) -> cplx {
        if (free_kernel) return regularized_kernel(lambda, std::abs(X - Y));
        return (*G)(X, Y) - cplx(0, 1) * pair.f(X) * pair.g(Y) / (lambda - lam0);
    };

    BumpField field{v_sharp, s, N};
    const double diam = s.length();

    if (k == 1) {
        // sum over outer bumps j of u_j/N * int q(x) g(X) (L V f)(X) dx
        cplx acc = 0.0;
        for (int j = -N; j <= N; ++j) {
            const double uj = v_sharp.coeffs().at(j);
            if (uj == 0.0) continue;
            acc += uj * gauss(
                            [&](double x) {
                                const double X = (x + j) / N;
                                // inner: reduced order for far pairs
                                cplx inner = 0.0;
                                for (int l = -N; l <= N; ++l) {
                                    const double ul = v_sharp.coeffs().at(l);
                                    if (ul == 0.0) continue;
                                    const int ord = std::abs(j - l) > opt.far_factor * diam
                                                        ? opt.far_order
                                                        : opt.quad_order;
                                    const double kink = N * X - l;
                                    inner += ul * bump_integral(s, kink, ord, [&](double y) {
                                        const double Y = (y + l) / N;
                                        return q(y) * kernel(X, Y) * pair.f(Y);
                                    });
                                }
                                return q(x) * pair.g(X) * inner / double(N);
                            },
                            s.lo, s.hi, opt.quad_order) /
                   double(N);
        }
        return acc;
    }

    // k = 2, free kernel: nested application  a2 = <g, V L (V L (V f))>
    // Stage values are computed at the shared per-bump Gauss nodes.
    const GaussRule& rule = gauss_rule(opt.quad_order);
    std::vector<double> ys;
    std::vector<int> owner;
    for (int l = -N; l <= N; ++l) {
        if (v_sharp.coeffs().at(l) == 0.0) continue;
        for (std::size_t i = 0; i < rule.node.size(); ++i) {
            const double y = 0.5 * (s.lo + s.hi) + 0.5 * s.length() * rule.node[i];
            ys.push_back((y + l) / N);
            owner.push_back(l);
        }
    }
    std::vector<cplx> w1(ys.size());
    for (std::size_t t = 0; t < ys.size(); ++t)
        w1[t] = field.apply(kernel, [&](double Y) { return pair.f(Y); }, ys[t],
                            opt.quad_order);
    // interpolate w1 by re-evaluating: cheaper to reuse nodes exactly
    std::vector<cplx> w2(ys.size());
    for (std::size_t t = 0; t < ys.size(); ++t) {
        // (L V w1)(X): inner integral uses the same node layout, so reuse w1
        cplx acc = 0.0;
        std::size_t idx = 0;
        for (int l = -N; l <= N; ++l) {
            const double ul = v_sharp.coeffs().at(l);
            if (ul == 0.0) continue;
            cplx inner = 0.0;
            for (std::size_t i = 0; i < rule.node.size(); ++i, ++idx) {
                const double y = 0.5 * (s.lo + s.hi) + 0.5 * s.length() * rule.node[i];
                const double wgt = 0.5 * s.length() * rule.weight[i];
                inner += wgt * q(y) * kernel(ys[t], ys[idx]) * w1[idx];
            }
            acc += ul * inner;
        }
        w2[t] = acc / double(N);
    }
    cplx a2 = 0.0;
    {
        std::size_t idx = 0;
        for (int j = -N; j <= N; ++j) {
            const double uj = v_sharp.coeffs().at(j);
            if (uj == 0.0) continue;
            cplx inner = 0.0;
            for (std::size_t i = 0; i < rule.node.size(); ++i, ++idx) {
                const double y = 0.5 * (s.lo + s.hi) + 0.5 * s.length() * rule.node[i];
                const double wgt = 0.5 * s.length() * rule.weight[i];
                inner += wgt * q(y) * pair.g(ys[idx]) * w2[idx];
            }
            a2 += uj * inner;
        }
        a2 /= double(N);
    }
    return a2;
}

CharacteristicSeries::CharacteristicSeries(RandomPotential v_sharp, ResonantPair pair,
                                           int truncation, double decay_constant,
                                           double h_norm, SeriesOptions opt)
    : v_(std::move(v_sharp)), pair_(std::move(pair)), K_(truncation), C_(decay_constant),
      h_(h_norm), opt_(opt) {
    const bool free_kernel = pair_.q0_profile.is_zero() && std::abs(pair_.lambda0) < 1e-12;
    const int cap = free_kernel ? 2 : 1;
    if (K_ < 0 || K_ > cap)
        throw config_error("characteristic series: truncation not supported for this q0");
}

cplx CharacteristicSeries::term(int k, cplx lambda) const {
    return term_a(k, v_, pair_, lambda, opt_);
}

cplx CharacteristicSeries::phi(cplx lambda) const {
    cplx acc = lambda - pair_.lambda0;
    double sign = 1.0;
    for (int k = 0; k <= K_; ++k) {
        acc += cplx(0, 1) * sign * term(k, lambda);
        sign = -sign;
    }
    return acc;
}

double CharacteristicSeries::tail_estimate() const {
    const double ch = C_ * h_;
    if (!(ch < 1.0)) return 1e300;
    return C_ * std::pow(h_, K_ + 2) / (1.0 - ch);
}

CharacteristicSeries make_series(const RandomPotential& v_sharp, const ResonantPair& pair,
                                 int truncation, double decay_constant,
                                 const SeriesOptions& opt) {
    const double h = hnorm_spectral(v_sharp, 1.0);
    return CharacteristicSeries(v_sharp, pair, truncation, decay_constant, h, opt);
}

double calibrate_decay_constant(const Profile& q0, const Profile& q,
                                const CoefficientLaw& law, int N, int n_samples,
                                std::uint64_t seed, const ResonantPair& pair,
                                int truncation) {
    (void)q0;
    double c_max = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        RandomPotential V(Profile::zero(), q, N,
                          CoefficientField::sample(law, N, 1, mix64(seed, static_cast<std::uint64_t>(i))));
        const double h = hnorm_spectral(V, 1.0);
        if (!(h > 0.0)) continue;
        for (int k = 0; k <= truncation; ++k) {
            const double ak = std::abs(term_a(k, V, pair, pair.lambda0));
            if (ak <= 0.0) continue;
            c_max = std::max(c_max, std::pow(ak, 1.0 / (k + 1)) / h);
        }
    }
    return 1.5 * c_max;  // safety margin, then frozen for the campaign
}

PhiRoot phi_root(const CharacteristicSeries& series, cplx center, double radius,
                 double tol) {
    ComplexBox box{center.real() - radius, center.real() + radius, center.imag() - radius,
                   center.imag() + radius};
    ContourOptions copt;
    copt.tol = tol;
    auto F = [&series](cplx z) { return series.phi(z); };
    int w;
    try {
        w = winding_number(F, box, copt);
    } catch (const accuracy_error& e) {
        throw regime_error(std::string("phi_root: winding unstable: ") + e.what());
    }
    if (w != 1) throw regime_error("phi_root: winding != 1 on the isolation disk");

    cplx z = center;
    const double h = 1e-6 * radius;
    PhiRoot out;
    for (int it = 0; it < 60; ++it) {
        const cplx f = series.phi(z);
        out.iterations = it + 1;
        if (std::abs(f) <= tol) break;
        const cplx fp = (series.phi(z + h) - series.phi(z - h)) / (2.0 * h);
        cplx step = f / fp;
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag()))
            throw regime_error("phi_root: derivative breakdown");
        if (std::abs(step) > radius) step *= radius / std::abs(step);
        z -= step;
        if (std::abs(z - center) > 2.0 * radius)
            throw regime_error("phi_root: iterate left the isolation disk");
    }
    out.root = z;
    out.residual = std::abs(series.phi(z));
    out.tail_estimate = series.tail_estimate();
    if (!(out.residual <= 10.0 * tol))
        throw regime_error("phi_root: no convergence inside the disk");
    return out;
}

}  // namespace hop
