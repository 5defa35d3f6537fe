#include "hop/resonance.hpp"

#include <algorithm>
#include <cmath>

#include "hop/errors.hpp"
#include "hop/ode.hpp"

namespace hop {

double ComplexBox::diag() const { return std::hypot(re1 - re0, im1 - im0); }

bool ComplexBox::contains(cplx z, double slack) const {
    return z.real() >= re0 - slack && z.real() <= re1 + slack && z.imag() >= im0 - slack &&
           z.imag() <= im1 + slack;
}

ComplexBox ComplexBox::expanded(double factor) const {
    const double cr = 0.5 * (re0 + re1), ci = 0.5 * (im0 + im1);
    const double hr = 0.5 * (re1 - re0) * factor, hi = 0.5 * (im1 - im0) * factor;
    return {cr - hr, cr + hr, ci - hi, ci + hi};
}

double solver_halfwidth(const RandomPotential& V) {
    const Interval s = V.support();
    return std::max({std::abs(s.lo), std::abs(s.hi), 1.0});
}

OutgoingSolution outgoing_solution(const RandomPotential& V, cplx lambda, double L) {
    const Interval s = V.support();
    if (s.lo < -L || s.hi > L)
        throw config_error("outgoing_defect: support exceeds the integration interval");
    if (std::abs(lambda.real()) > kMaxRe || std::abs(lambda.imag()) > kMaxIm)
        throw config_error("outgoing_defect: frequency outside the working box");

    const cplx lam2 = lambda * lambda;
    auto rhs = [&](double x, const State2& y, State2& dy) {
        dy[0] = y[1];
        dy[1] = (V(x) - lam2) * y[0];
    };
    OdeControls ctl;
    ctl.max_step = std::min(0.5, V.oscillation_scale() / 20.0);
    const cplx u0 = std::exp(cplx(0, 1) * lambda * L);
    State2 y{u0, cplx(0, -1) * lambda * u0};
    OdeStats st = integrate_rkf78(rhs, y, -L, L, ctl);

    OutgoingSolution out;
    out.lambda = lambda;
    out.L = L;
    out.u_at_L = y[0];
    out.du_at_L = y[1];
    out.steps = st.steps;
    out.est_error = st.err_accum;
    out.defect = 0.5 * std::exp(cplx(0, 1) * lambda * L) *
                 (cplx(0, 1) * lambda * y[0] - y[1]);
    const double scale = std::max({std::abs(y[0]), std::abs(y[1]), 1.0});
    if (!(out.est_error <= 1e-6 * scale))
        throw accuracy_error("outgoing_defect: integrator error estimate above tolerance");
    return out;
}

cplx outgoing_defect(const RandomPotential& V, cplx lambda, double L) {
    return outgoing_solution(V, lambda, L).defect;
}

cplx outgoing_defect(const RandomPotential& V, cplx lambda) {
    return outgoing_solution(V, lambda, solver_halfwidth(V)).defect;
}

// ---------------------------------------------------------------------------
// Argument-principle machinery
// ---------------------------------------------------------------------------

namespace {

struct BoundaryWalk {
    const std::function<cplx(cplx)>& F;
    const ContourOptions& opt;
    double total = 0.0;
    double max_abs = 0.0;
    double min_abs = 1e300;
    long evals = 0;

    cplx eval(cplx z) {
        ++evals;
        if (evals > 2'000'000) throw accuracy_error("winding: evaluation budget exhausted");
        cplx v = F(z);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw accuracy_error("winding: non-finite boundary value");
        const double a = std::abs(v);
        if (a == 0.0) throw accuracy_error("winding: zero on the contour");
        max_abs = std::max(max_abs, a);
        min_abs = std::min(min_abs, a);
        return v;
    }

    void segment(cplx z0, cplx f0, cplx z1, cplx f1, int depth) {
        const double d = std::arg(f1 / f0);
        if (std::abs(d) <= M_PI / 4.0) {
            total += d;
            return;
        }
        if (depth >= opt.max_refine_depth)
            throw accuracy_error("winding: boundary refinement exhausted (zero near contour?)");
        const cplx zm = 0.5 * (z0 + z1);
        const cplx fm = eval(zm);
        segment(z0, f0, zm, fm, depth + 1);
        segment(zm, fm, z1, f1, depth + 1);
    }
};

}  // namespace

int winding_number(const std::function<cplx(cplx)>& F, const ComplexBox& box,
                   const ContourOptions& opt, double* boundary_scale) {
    const cplx c0(box.re0, box.im0), c1(box.re1, box.im0), c2(box.re1, box.im1),
        c3(box.re0, box.im1);
    const cplx corners[5] = {c0, c1, c2, c3, c0};
    BoundaryWalk walk{F, opt};
    constexpr int kInit = 8;
    for (int e = 0; e < 4; ++e) {
        std::vector<cplx> zs, fs;
        for (int i = 0; i <= kInit; ++i) {
            cplx z = corners[e] + (corners[e + 1] - corners[e]) * (double(i) / kInit);
            zs.push_back(z);
            fs.push_back(walk.eval(z));
        }
        for (int i = 0; i < kInit; ++i)
            walk.segment(zs[static_cast<std::size_t>(i)], fs[static_cast<std::size_t>(i)],
                         zs[static_cast<std::size_t>(i + 1)],
                         fs[static_cast<std::size_t>(i + 1)], 0);
    }
    const double w = walk.total / (2.0 * M_PI);
    const double rounded = std::round(w);
    if (std::abs(w - rounded) > 0.1)
        throw accuracy_error("winding: non-integer argument accumulation; refine the boundary");
    if (boundary_scale) *boundary_scale = walk.max_abs;
    return static_cast<int>(rounded);
}

namespace {

bool newton_polish(const std::function<cplx(cplx)>& F, const ComplexBox& cell, int mult,
                   double scale, const ContourOptions& opt, Resonance& out) {
    cplx z(0.5 * (cell.re0 + cell.re1), 0.5 * (cell.im0 + cell.im1));
    const double diag = std::max(cell.diag(), opt.tol);
    const double h = std::max(1e-6 * diag, 1e-13);
    bool moved = false;
    for (int it = 0; it < 60; ++it) {
        const cplx f = F(z);
        if (std::abs(f) <= 1e-12 * scale && moved) break;
        const cplx fp = (F(z + h) - F(z - h)) / (2.0 * h);
        if (!(std::abs(fp) > 0.0)) return false;
        cplx step = double(mult) * f / fp;
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return false;
        if (std::abs(step) > diag) step *= diag / std::abs(step);
        z -= step;
        moved = true;
        if (!cell.contains(z, 0.75 * diag)) return false;
        if (std::abs(step) < std::max(1e-15 * std::abs(z), 1e-2 * opt.tol)) break;
    }
    const double res = std::abs(F(z));
    if (!(res <= 1e-9 * scale)) return false;
    // the winding certificate puts the zero inside this cell; a polish that
    // drifted into a neighboring cell must be retried on a finer cell instead
    if (!cell.contains(z, std::max(opt.tol, 1e-6 * diag))) return false;
    out.lambda = z;
    out.multiplicity = mult;
    out.residual = res;
    out.certified_box = cell;
    return true;
}

void search_cells(const std::function<cplx(cplx)>& F, const ComplexBox& box, int w,
                  double scale, const ContourOptions& opt, int depth,
                  std::vector<Resonance>& out) {
    if (w == 0) return;
    if (depth > 64) throw accuracy_error("find_zeros: subdivision depth exhausted");

    if (w == 1 || box.diag() <= opt.min_box) {
        Resonance r;
        if (newton_polish(F, box, w, scale, opt, r)) {
            out.push_back(r);
            return;
        }
        if (box.diag() <= opt.min_box)
            throw accuracy_error("find_zeros: cell polish failed at the size floor");
    }

    // Quadrisect; cut fractions are nudged if a zero sits on a cut line.
    static constexpr double cuts[] = {0.5, 0.55, 0.45, 0.6, 0.4};
    for (double fx : cuts) {
        for (double fy : cuts) {
            const double rm = box.re0 + fx * (box.re1 - box.re0);
            const double im = box.im0 + fy * (box.im1 - box.im0);
            const ComplexBox kids[4] = {
                {box.re0, rm, box.im0, im},
                {rm, box.re1, box.im0, im},
                {rm, box.re1, im, box.im1},
                {box.re0, rm, im, box.im1},
            };
            int wk[4];
            double sk[4];
            bool ok = true;
            int total = 0;
            try {
                for (int i = 0; i < 4; ++i) {
                    wk[i] = winding_number(F, kids[i], opt, &sk[i]);
                    total += wk[i];
                }
            } catch (const accuracy_error&) {
                ok = false;
            }
            if (!ok || total != w) continue;  // cut hit a zero or was unstable
            for (int i = 0; i < 4; ++i)
                search_cells(F, kids[i], wk[i], std::max(sk[i], 1e-300), opt, depth + 1, out);
            return;
        }
    }
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "find_zeros: no clean quadrisection of [%.6g,%.6g]x[%.6g,%.6g] (w=%d)",
                  box.re0, box.re1, box.im0, box.im1, w);
    throw accuracy_error(msg);
}

}  // namespace

std::vector<Resonance> find_zeros(const std::function<cplx(cplx)>& F, ComplexBox box,
                                  const ContourOptions& opt) {
    std::string last = "";
    for (int attempt = 0; attempt <= opt.nudge_attempts; ++attempt) {
        const ComplexBox b = attempt == 0 ? box : box.expanded(1.0 + 0.004 * attempt);
        try {
            double scale = 0.0;
            const int w = winding_number(F, b, opt, &scale);
            std::vector<Resonance> out;
            search_cells(F, b, w, std::max(scale, 1e-300), opt, 0, out);
            std::sort(out.begin(), out.end(), [](const Resonance& a, const Resonance& c) {
                if (a.lambda.real() != c.lambda.real()) return a.lambda.real() < c.lambda.real();
                return a.lambda.imag() < c.lambda.imag();
            });
            // merge duplicates introduced by boundary nudging
            std::vector<Resonance> dedup;
            for (const auto& r : out) {
                if (!dedup.empty() &&
                    std::abs(dedup.back().lambda - r.lambda) < 10.0 * opt.tol) {
                    dedup.back().multiplicity += r.multiplicity - 1;
                    continue;
                }
                dedup.push_back(r);
            }
            return dedup;
        } catch (const accuracy_error& e) {
            last = e.what();
        }
    }
    throw accuracy_error("find_zeros: " + last + " (after boundary nudges)");
}

std::vector<Resonance> find_resonances(const RandomPotential& V, const ComplexBox& box,
                                       double tol) {
    const double L = solver_halfwidth(V);
    ContourOptions opt;
    opt.tol = tol;
    auto F = [&V, L](cplx z) { return outgoing_defect(V, z, L); };
    return find_zeros(F, box, opt);
}

// ---------------------------------------------------------------------------
// Square barrier oracle
// ---------------------------------------------------------------------------

cplx square_barrier_defect(cplx V0, cplx lambda) {
    const cplx k2 = lambda * lambda - V0;
    const cplx k = std::sqrt(k2);
    cplx c, s;
    if (std::abs(k) < 1e-4) {
        // entire functions of k^2
        c = 1.0 + k2 * (-2.0 + k2 * (2.0 / 3.0 - k2 * 4.0 / 45.0));
        s = 2.0 + k2 * (-4.0 / 3.0 + k2 * (4.0 / 15.0 - k2 * 8.0 / 315.0));
    } else {
        c = std::cos(2.0 * k);
        s = std::sin(2.0 * k) / k;
    }
    const cplx u0 = std::exp(cplx(0, 1) * lambda);
    const cplx du0 = cplx(0, -1) * lambda * u0;
    const cplx u1 = c * u0 + s * du0;
    const cplx du1 = -k2 * s * u0 + c * du0;
    return 0.5 * std::exp(cplx(0, 1) * lambda) * (cplx(0, 1) * lambda * u1 - du1);
}

std::vector<cplx> square_barrier_resonances(cplx V0, const ComplexBox& box, double tol) {
    if (V0 == cplx(0.0, 0.0)) throw config_error("square_barrier_resonances: V0 must be nonzero");
    ContourOptions opt;
    opt.tol = tol;
    auto F = [V0](cplx z) { return square_barrier_defect(V0, z); };
    std::vector<Resonance> rs = find_zeros(F, box, opt);
    std::vector<cplx> out;
    for (const auto& r : rs)
        for (int i = 0; i < r.multiplicity; ++i) out.push_back(r.lambda);
    return out;
}

// ---------------------------------------------------------------------------
// Resolvent kernel and resonant pairs
// ---------------------------------------------------------------------------

namespace {

cplx cubic_interp(const std::vector<double>& xs, const std::vector<cplx>& vs, double x) {
    const double lo = xs.front(), hi = xs.back();
    const double step = (hi - lo) / static_cast<double>(xs.size() - 1);
    double u = (x - lo) / step;
    std::ptrdiff_t k = static_cast<std::ptrdiff_t>(std::floor(u));
    k = std::max<std::ptrdiff_t>(1, std::min<std::ptrdiff_t>(
                                        k, static_cast<std::ptrdiff_t>(xs.size()) - 3));
    const double t = u - static_cast<double>(k);
    const cplx fm1 = vs[static_cast<std::size_t>(k - 1)], f0 = vs[static_cast<std::size_t>(k)],
               f1 = vs[static_cast<std::size_t>(k + 1)], f2 = vs[static_cast<std::size_t>(k + 2)];
    const double a = -t * (t - 1) * (t - 2) / 6.0;
    const double b = (t * t - 1) * (t - 2) / 2.0;
    const double c = -t * (t + 1) * (t - 2) / 2.0;
    const double d = t * (t * t - 1) / 6.0;
    return a * fm1 + b * f0 + c * f1 + d * f2;
}

struct DenseSolve {
    std::vector<double> xs;
    std::vector<cplx> u, du;
};

// left-outgoing (e^{-i lambda x} to the left) sampled on an ascending grid
DenseSolve left_dense(const RandomPotential& V, cplx lambda, double L, int n) {
    DenseSolve d;
    d.xs.resize(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) d.xs[static_cast<std::size_t>(i)] = -L + 2.0 * L * i / n;
    d.u.reserve(d.xs.size());
    d.du.reserve(d.xs.size());
    const cplx lam2 = lambda * lambda;
    auto rhs = [&](double x, const State2& y, State2& dy) {
        dy[0] = y[1];
        dy[1] = (V(x) - lam2) * y[0];
    };
    OdeControls ctl;
    ctl.max_step = std::min(0.5, V.oscillation_scale() / 20.0);
    State2 y{std::exp(cplx(0, 1) * lambda * L), cplx(0, -1) * lambda * std::exp(cplx(0, 1) * lambda * L)};
    integrate_rkf78(rhs, y, -L, L, ctl, &d.xs, [&d](double, const State2& s) {
        d.u.push_back(s[0]);
        d.du.push_back(s[1]);
    });
    if (d.u.size() != d.xs.size()) throw accuracy_error("dense solve: sample mismatch");
    return d;
}

// right-outgoing (e^{+i lambda x} to the right), returned on the ascending grid
DenseSolve right_dense(const RandomPotential& V, cplx lambda, double L, int n) {
    DenseSolve d;
    std::vector<double> desc(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) desc[static_cast<std::size_t>(i)] = L - 2.0 * L * i / n;
    const cplx lam2 = lambda * lambda;
    auto rhs = [&](double x, const State2& y, State2& dy) {
        dy[0] = y[1];
        dy[1] = (V(x) - lam2) * y[0];
    };
    OdeControls ctl;
    ctl.max_step = std::min(0.5, V.oscillation_scale() / 20.0);
    State2 y{std::exp(cplx(0, 1) * lambda * L), cplx(0, 1) * lambda * std::exp(cplx(0, 1) * lambda * L)};
    std::vector<cplx> u, du;
    integrate_rkf78(rhs, y, L, -L, ctl, &desc, [&](double, const State2& s) {
        u.push_back(s[0]);
        du.push_back(s[1]);
    });
    if (u.size() != desc.size()) throw accuracy_error("dense solve: sample mismatch");
    d.xs.assign(desc.rbegin(), desc.rend());
    d.u.assign(u.rbegin(), u.rend());
    d.du.assign(du.rbegin(), du.rend());
    return d;
}

}  // namespace

ResolventKernel::ResolventKernel(const RandomPotential& V, cplx lambda, double L, int grid_n)
    : L_(L), lambda_(lambda) {
    DenseSolve lm = left_dense(V, lambda, L, grid_n);
    DenseSolve rp = right_dense(V, lambda, L, grid_n);
    xs_ = lm.xs;
    um_ = lm.u;
    up_ = rp.u;
    // Wronskian is x-independent; read it where both solutions are largest.
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t i = 0; i < xs_.size(); ++i) {
        const double m = std::abs(lm.u[i]) * std::abs(rp.u[i]);
        if (m > best_mag) {
            best_mag = m;
            best = i;
        }
    }
    wronskian_ = lm.u[best] * rp.du[best] - lm.du[best] * rp.u[best];
    if (std::abs(wronskian_) == 0.0)
        throw accuracy_error("resolvent kernel: vanishing wronskian (at a resonance)");
}

cplx ResolventKernel::left(double x) const { return cubic_interp(xs_, um_, x); }
cplx ResolventKernel::right(double x) const { return cubic_interp(xs_, up_, x); }

cplx ResolventKernel::operator()(double x, double y) const {
    // G = -u_-(x_<) u_+(x_>) / W  (the delta jump G'(y+) - G'(y-) = -1)
    const double lo = std::min(x, y), hi = std::max(x, y);
    return -cubic_interp(xs_, um_, lo) * cubic_interp(xs_, up_, hi) / wronskian_;
}

ResonantPair ResonantPair::free_pair() {
    ResonantPair p;
    p.lambda0 = 0.0;
    p.L = 1.0;
    p.free_case = true;
    p.isolation_radius = 1.0;
    const double c = 1.0 / std::sqrt(2.0);
    p.f_ = [c](double) { return cplx(c, 0.0); };
    p.g_ = [c](double) { return cplx(c, 0.0); };
    p.fg_ = [](double) { return cplx(0.5, 0.0); };
    return p;
}

ResonantPair ResonantPair::synthetic(std::function<cplx(double)> f,
                                     std::function<cplx(double)> g, cplx lambda0, double L) {
    ResonantPair p;
    p.lambda0 = lambda0;
    p.L = L;
    p.f_ = std::move(f);
    p.g_ = std::move(g);
    return p;
}

cplx ResonantPair::f(double x) const { return f_(x); }
cplx ResonantPair::g(double x) const { return g_(x); }
cplx ResonantPair::fg(double x) const { return fg_ ? fg_(x) : f_(x) * g_(x); }

ResonantPair resonant_pair(const Profile& q0, cplx lambda0_guess, double isolation_radius) {
    if (q0.is_zero() && std::abs(lambda0_guess) < 1e-12) return ResonantPair::free_pair();

    RandomPotential V(q0, Profile::zero(), 1, CoefficientField::zero(1, 1));
    const double L = solver_halfwidth(V);
    auto F = [&](cplx z) { return outgoing_defect(V, z, L); };

    // certify simplicity and polish the location
    const double r = isolation_radius;
    ComplexBox cell{lambda0_guess.real() - r, lambda0_guess.real() + r,
                    lambda0_guess.imag() - r, lambda0_guess.imag() + r};
    ContourOptions opt;
    opt.tol = 1e-11;
    double scale = 0.0;
    const int w = winding_number(F, cell, opt, &scale);
    if (w == 0) throw config_error("resonant_pair: no resonance in the isolation box");
    if (w > 1) throw config_error("resonant_pair: resonance is not simple (winding > 1)");
    Resonance res;
    if (!newton_polish(F, cell, 1, scale, opt, res))
        throw accuracy_error("resonant_pair: polish failed");
    const cplx lambda0 = res.lambda;

    // dense common solution v = u_- at lambda0 and the proportionality constant
    const int n = 1024;
    DenseSolve lm = left_dense(V, lambda0, L, n);
    DenseSolve rp = right_dense(V, lambda0, L, n);
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t i = 0; i < lm.u.size(); ++i)
        if (std::abs(lm.u[i]) > best_mag) {
            best_mag = std::abs(lm.u[i]);
            best = i;
        }
    const cplx c = rp.u[best] / lm.u[best];
    for (std::size_t i = 0; i < lm.u.size(); i += lm.u.size() / 4) {
        if (std::abs(lm.u[i]) < 1e-8 * best_mag) continue;
        const cplx ci = rp.u[i] / lm.u[i];
        if (std::abs(ci - c) > 1e-4 * std::max(1.0, std::abs(c)))
            throw config_error("resonant_pair: outgoing solutions not proportional (not simple?)");
    }

    // residue of the kernel by a 32-point trapezoid contour integral
    const double rc = 0.5 * r;
    const int m_pts = 32;
    const double sample_x[4] = {-0.75 * std::min(L, 1.0), -0.35 * std::min(L, 1.0),
                                0.25 * std::min(L, 1.0), 0.65 * std::min(L, 1.0)};
    cplx resmat[4][4] = {};
    for (int m = 0; m < m_pts; ++m) {
        const double th = 2.0 * M_PI * m / m_pts;
        const cplx mu = lambda0 + rc * std::exp(cplx(0, 1) * th);
        ResolventKernel G(V, mu, L, 512);
        const cplx w_m = rc * std::exp(cplx(0, 1) * th) / double(m_pts);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) resmat[i][j] += w_m * G(sample_x[i], sample_x[j]);
    }

    // fit residue = rho * v(x) v(y)
    cplx num = 0.0;
    double den = 0.0;
    auto v_at = [&](double x) { return cubic_interp(lm.xs, lm.u, x); };
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const cplx vv = v_at(sample_x[i]) * v_at(sample_x[j]);
            num += resmat[i][j] * std::conj(vv);
            den += std::norm(vv);
        }
    const cplx rho = num / den;
    double misfit = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const cplx vv = v_at(sample_x[i]) * v_at(sample_x[j]);
            misfit = std::max(misfit, std::abs(resmat[i][j] - rho * vv) /
                                          std::max(std::abs(rho * vv), 1e-300));
        }
    if (misfit > 1e-4)
        throw accuracy_error("resonant_pair: residue is not rank one (second resonance inside the contour?)");

    const cplx beta = std::sqrt(rho / cplx(0, 1));
    auto xs = std::make_shared<std::vector<double>>(lm.xs);
    auto vs = std::make_shared<std::vector<cplx>>(lm.u);
    const cplx lam0 = lambda0;
    const double Lc = L;
    const cplx tail_c = c;
    auto eval = [xs, vs, beta, lam0, Lc, tail_c](double x) -> cplx {
        if (x <= -Lc) return beta * std::exp(cplx(0, -1) * lam0 * x);
        if (x >= Lc) return beta / tail_c * std::exp(cplx(0, 1) * lam0 * x);
        return beta * cubic_interp(*xs, *vs, x);
    };

    ResonantPair p;
    p.lambda0 = lambda0;
    p.L = L;
    p.isolation_radius = isolation_radius;
    p.residue_misfit = misfit;
    p.q0_profile = q0;
    p.f_ = eval;
    p.g_ = eval;
    return p;
}

// ---------------------------------------------------------------------------
// Finite-difference Dirichlet eigenvalues (Sturm bisection on the tridiagonal)
// ---------------------------------------------------------------------------

std::vector<double> dirichlet_eigenvalues_fd(const RandomPotential& V, double wall,
                                             double mesh, int count) {
    const long n = std::lround(2.0 * wall / mesh) - 1;
    if (n < 3) throw config_error("dirichlet_eigenvalues_fd: grid too coarse");
    std::vector<double> diag(static_cast<std::size_t>(n));
    const double inv_h2 = 1.0 / (mesh * mesh);
    for (long i = 0; i < n; ++i) {
        const double x = -wall + mesh * (i + 1);
        diag[static_cast<std::size_t>(i)] = 2.0 * inv_h2 + V(x).real();
    }
    const double off2 = inv_h2 * inv_h2;

    auto count_below = [&](double E) {
        long cnt = 0;
        double q = 1.0;
        for (long i = 0; i < n; ++i) {
            const double d = diag[static_cast<std::size_t>(i)] - E;
            q = (i == 0) ? d : d - off2 / q;
            if (q == 0.0) q = 1e-300;
            if (q < 0.0) ++cnt;
        }
        return cnt;
    };

    double lo = diag[0], hi = diag[0];
    for (double d : diag) {
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    lo -= 2.0 * inv_h2 + 1.0;
    hi += 2.0 * inv_h2 + 1.0;

    std::vector<double> eigs;
    for (int k = 1; k <= count; ++k) {
        double a = lo, b = hi;
        for (int it = 0; it < 120; ++it) {
            const double m = 0.5 * (a + b);
            if (count_below(m) >= k)
                b = m;
            else
                a = m;
        }
        eigs.push_back(0.5 * (a + b));
    }
    return eigs;
}

}  // namespace hop
