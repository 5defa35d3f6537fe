#include "hop/profile.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <sstream>

#include "hop/errors.hpp"
#include "hop/quadrature.hpp"

namespace hop {

namespace {

double psi_raw(double x) {
    if (std::abs(x) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - x * x));
}

double psi_d1(double x) {
    if (std::abs(x) >= 1.0) return 0.0;
    const double t = 1.0 - x * x;
    return psi_raw(x) * (-2.0 * x / (t * t));
}

double psi_d2(double x) {
    if (std::abs(x) >= 1.0) return 0.0;
    const double t = 1.0 - x * x;
    const double t2 = t * t;
    return psi_raw(x) * (4.0 * x * x / (t2 * t2) - 2.0 / t2 - 8.0 * x * x / (t2 * t));
}

// C-infinity step: 0 for t<=0, 1 for t>=1, and s(t) + s(1-t) = 1.
double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

std::string fmt_num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

enum class Kind { Zero, Psi, PsiPrime, PsiSecond, Affine, Lincomb, SmoothBox, Cumulative };

struct Profile::Node {
    Kind kind = Kind::Zero;
    // Affine/Cumulative: single child in terms[0]; Lincomb: all children.
    std::vector<std::pair<cplx, Profile>> terms;
    double shift = 0.0, scale = 1.0;      // Affine
    double half_width = 1.0, edge = 0.1;  // SmoothBox
    Interval supp{0.0, 0.0};
    std::array<cplx, Profile::kMaxMoment + 1> moments{};
    double abs_mass = 0.0;
    double sup = 0.0;
    // Cumulative panel table: integral of the child from supp.lo to panel_x[k].
    std::vector<double> panel_x;
    std::vector<cplx> panel_cum;

    cplx eval(double x) const;
};

cplx Profile::Node::eval(double x) const {
    switch (kind) {
        case Kind::Zero: return 0.0;
        case Kind::Psi: return psi_raw(x);
        case Kind::PsiPrime: return psi_d1(x);
        case Kind::PsiSecond: return psi_d2(x);
        case Kind::Affine: return terms[0].second((x - shift) / scale);
        case Kind::Lincomb: {
            cplx acc = 0.0;
            for (const auto& [c, p] : terms) acc += c * p(x);
            return acc;
        }
        case Kind::SmoothBox:
            return smooth_step((x + half_width) / edge + 0.5) *
                   smooth_step((half_width - x) / edge + 0.5);
        case Kind::Cumulative: {
            if (x <= supp.lo) return 0.0;
            if (x >= supp.hi) return panel_cum.back();
            auto it = std::upper_bound(panel_x.begin(), panel_x.end(), x);
            std::size_t k = static_cast<std::size_t>(it - panel_x.begin());
            if (k > 0) --k;
            const Profile& child = terms[0].second;
            cplx tail = gauss([&](double t) { return child(t); }, panel_x[k], x, 24);
            return panel_cum[k] + tail;
        }
    }
    return 0.0;
}

namespace {

using NodePtr = std::shared_ptr<Profile::Node>;

// Moments, |p|_1 and |p|_inf by direct quadrature/scan of eval.
void fill_numeric_caches(Profile::Node& n, bool skip_moments = false) {
    const double a = n.supp.lo, b = n.supp.hi;
    if (!(b > a)) {
        n.moments.fill(0.0);
        n.abs_mass = 0.0;
        n.sup = 0.0;
        return;
    }
    AdaptiveOptions opt;
    opt.abs_tol = 1e-13 * std::max(1.0, b - a);
    if (!skip_moments) {
        for (int k = 0; k <= Profile::kMaxMoment; ++k) {
            n.moments[static_cast<std::size_t>(k)] = integrate_adaptive(
                [&](double x) { return std::pow(x, k) * n.eval(x); }, a, b, opt);
        }
    }
    n.abs_mass =
        integrate_adaptive_real([&](double x) { return std::abs(n.eval(x)); }, a, b, opt);
    double m = 0.0;
    const int grid = 4096;
    for (int i = 0; i <= grid; ++i)
        m = std::max(m, std::abs(n.eval(a + (b - a) * i / grid)));
    n.sup = m;
}

}  // namespace

Profile::Profile() : node_(std::make_shared<Node>()) {}

cplx Profile::operator()(double x) const { return node_->eval(x); }

Interval Profile::support() const { return node_->supp; }

bool Profile::is_zero() const {
    return node_->kind == Kind::Zero || node_->abs_mass < 1e-14;
}

cplx Profile::moment(int k) const {
    if (k < 0 || k > kMaxMoment) throw config_error("moment index out of range");
    return node_->moments[static_cast<std::size_t>(k)];
}

double Profile::abs_mass() const { return node_->abs_mass; }
double Profile::sup_norm() const { return node_->sup; }

Profile Profile::zero() { return Profile(std::make_shared<Node>()); }

Profile Profile::psi() {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Psi;
    n->supp = {-1.0, 1.0};
    fill_numeric_caches(*n);
    // odd moments vanish by symmetry
    for (int k = 1; k <= kMaxMoment; k += 2) n->moments[static_cast<std::size_t>(k)] = 0.0;
    return Profile(n);
}

Profile Profile::psi_prime() {
    auto n = std::make_shared<Node>();
    n->kind = Kind::PsiPrime;
    n->supp = {-1.0, 1.0};
    fill_numeric_caches(*n, /*skip_moments=*/true);
    // moment relations: int x^k psi' = -k int x^{k-1} psi (exact)
    Profile base = Profile::psi();
    n->moments[0] = 0.0;
    for (int k = 1; k <= kMaxMoment; ++k)
        n->moments[static_cast<std::size_t>(k)] = -double(k) * base.moment(k - 1);
    return Profile(n);
}

Profile Profile::psi_second() {
    auto n = std::make_shared<Node>();
    n->kind = Kind::PsiSecond;
    n->supp = {-1.0, 1.0};
    fill_numeric_caches(*n, /*skip_moments=*/true);
    // int x^k psi'' = k(k-1) int x^{k-2} psi (exact)
    Profile base = Profile::psi();
    n->moments[0] = 0.0;
    n->moments[1] = 0.0;
    for (int k = 2; k <= kMaxMoment; ++k)
        n->moments[static_cast<std::size_t>(k)] = double(k) * double(k - 1) * base.moment(k - 2);
    return Profile(n);
}

Profile Profile::affine(const Profile& p, double shift, double scale) {
    if (scale == 0.0) throw config_error("affine: scale must be nonzero");
    auto n = std::make_shared<Node>();
    n->kind = Kind::Affine;
    n->terms.emplace_back(1.0, p);
    n->shift = shift;
    n->scale = scale;
    Interval cs = p.support();
    double e0 = cs.lo * scale + shift, e1 = cs.hi * scale + shift;
    n->supp = {std::min(e0, e1), std::max(e0, e1)};
    // int x^k p((x-a)/s) dx = |s| sum_i C(k,i) a^{k-i} s^i m_i(p)
    const double s = scale, a = shift, as = std::abs(scale);
    for (int k = 0; k <= kMaxMoment; ++k) {
        cplx acc = 0.0;
        double binom = 1.0;
        for (int i = 0; i <= k; ++i) {
            acc += binom * std::pow(a, k - i) * std::pow(s, i) * p.moment(i);
            binom = binom * double(k - i) / double(i + 1);
        }
        n->moments[static_cast<std::size_t>(k)] = as * acc;
    }
    n->abs_mass = as * p.abs_mass();
    n->sup = p.sup_norm();
    return Profile(n);
}

Profile Profile::lincomb(std::vector<std::pair<cplx, Profile>> terms) {
    if (terms.empty()) throw config_error("lincomb: empty term list");
    auto n = std::make_shared<Node>();
    n->kind = Kind::Lincomb;
    n->terms = std::move(terms);
    double lo = 1e300, hi = -1e300;
    bool any = false;
    for (const auto& [c, p] : n->terms) {
        (void)c;
        if (p.is_zero()) continue;
        lo = std::min(lo, p.support().lo);
        hi = std::max(hi, p.support().hi);
        any = true;
    }
    n->supp = any ? Interval{lo, hi} : Interval{0.0, 0.0};
    for (int k = 0; k <= kMaxMoment; ++k) {
        cplx acc = 0.0;
        for (const auto& [c, p] : n->terms) acc += c * p.moment(k);
        n->moments[static_cast<std::size_t>(k)] = acc;
    }
    if (any) fill_numeric_caches(*n, /*skip_moments=*/true);
    return Profile(n);
}

Profile Profile::smooth_box(double half_width, double edge_width) {
    if (!(half_width > 0.0) || !(edge_width > 0.0))
        throw config_error("smooth_box: widths must be positive");
    if (edge_width > half_width)
        throw config_error("smooth_box: edge wider than the box");
    auto n = std::make_shared<Node>();
    n->kind = Kind::SmoothBox;
    n->half_width = half_width;
    n->edge = edge_width;
    n->supp = {-half_width - edge_width / 2, half_width + edge_width / 2};
    fill_numeric_caches(*n);
    for (int k = 1; k <= kMaxMoment; k += 2) n->moments[static_cast<std::size_t>(k)] = 0.0;
    // centered mollification preserves the sharp-box mass exactly
    n->moments[0] = 2.0 * half_width;
    return Profile(n);
}

namespace {

cplx psi_hat(double xi) {
    // even real function of xi; oscillation resolved by the panel cap
    AdaptiveOptions opt;
    opt.abs_tol = 1e-12;
    opt.max_panel = M_PI / std::max(std::abs(xi), 1.0);
    double val = integrate_adaptive_real(
        [xi](double x) { return std::cos(xi * x) * psi_raw(x); }, 0.0, 1.0, opt);
    return 2.0 * val;
}

}  // namespace

cplx Profile::fourier(double xi) const {
    const Node& n = *node_;
    switch (n.kind) {
        case Kind::Zero: return 0.0;
        case Kind::Psi: return psi_hat(xi);
        case Kind::PsiPrime: return cplx(0.0, xi) * psi_hat(xi);
        case Kind::PsiSecond: return -xi * xi * psi_hat(xi);
        case Kind::Affine: {
            const cplx child = n.terms[0].second.fourier(n.scale * xi);
            return std::abs(n.scale) * std::exp(cplx(0.0, -xi * n.shift)) * child;
        }
        case Kind::Lincomb: {
            cplx acc = 0.0;
            for (const auto& [c, p] : n.terms) acc += c * p.fourier(xi);
            return acc;
        }
        case Kind::SmoothBox: {
            AdaptiveOptions opt;
            opt.abs_tol = 1e-12;
            opt.max_panel = M_PI / std::max(std::abs(xi), 1.0);
            double val = integrate_adaptive_real(
                [&](double x) { return std::cos(xi * x) * n.eval(x).real(); }, 0.0,
                n.supp.hi, opt);
            return 2.0 * val;
        }
        case Kind::Cumulative: {
            if (std::abs(xi) >= 0.05)
                return n.terms[0].second.fourier(xi) / cplx(0.0, xi);
            // Taylor series from own moments; remainder < |xi|^9 sup|x|^9 /9! * mass
            cplx acc = 0.0;
            cplx pw = 1.0;
            double fact = 1.0;
            for (int k = 0; k <= kMaxMoment; ++k) {
                acc += pw / fact * n.moments[static_cast<std::size_t>(k)];
                pw *= cplx(0.0, -xi);
                fact *= double(k + 1);
            }
            return acc;
        }
    }
    return 0.0;
}

int Profile::vanishing_order(double tol) const {
    if (abs_mass() <= tol) throw config_error("vanishing_order: profile is numerically zero");
    for (int k = 0; k <= kMaxMoment; ++k)
        if (std::abs(moment(k)) > tol * abs_mass()) return k;
    throw config_error("vanishing_order: undetermined beyond moment cap");
}

Profile Profile::derivative() const {
    const Node& n = *node_;
    switch (n.kind) {
        case Kind::Zero: return zero();
        case Kind::Psi: return psi_prime();
        case Kind::PsiPrime: return psi_second();
        case Kind::Affine: {
            Profile d = n.terms[0].second.derivative();
            return lincomb({{cplx(1.0 / n.scale, 0.0), affine(d, n.shift, n.scale)}});
        }
        case Kind::Lincomb: {
            std::vector<std::pair<cplx, Profile>> out;
            for (const auto& [c, p] : n.terms) out.emplace_back(c, p.derivative());
            return lincomb(std::move(out));
        }
        case Kind::Cumulative: return n.terms[0].second;
        default: throw config_error("derivative: no closed-form rule for this node");
    }
}

Profile Profile::antiderivative(double tol) const {
    const Node& n = *node_;
    if (std::abs(moment(0)) > tol * std::max(abs_mass(), 1e-30))
        throw config_error("antiderivative: nonzero mean, no compactly supported antiderivative");
    switch (n.kind) {
        case Kind::PsiPrime: return psi();
        case Kind::PsiSecond: return psi_prime();
        case Kind::Affine: {
            const Profile& child = n.terms[0].second;
            if (std::abs(child.moment(0)) <= tol * std::max(child.abs_mass(), 1e-30)) {
                Profile ca = child.antiderivative(tol);
                return lincomb({{cplx(n.scale, 0.0), affine(ca, n.shift, n.scale)}});
            }
            break;
        }
        case Kind::Lincomb: {
            bool all_zero_mean = true;
            for (const auto& [c, p] : n.terms) {
                (void)c;
                if (p.is_zero()) continue;
                if (std::abs(p.moment(0)) > tol * std::max(p.abs_mass(), 1e-30)) {
                    all_zero_mean = false;
                    break;
                }
            }
            if (all_zero_mean) {
                std::vector<std::pair<cplx, Profile>> out;
                for (const auto& [c, p] : n.terms)
                    out.emplace_back(c, p.is_zero() ? zero() : p.antiderivative(tol));
                return lincomb(std::move(out));
            }
            break;
        }
        default: break;
    }
    // generic path: cumulative quadrature panel table
    auto out = std::make_shared<Node>();
    out->kind = Kind::Cumulative;
    out->terms.emplace_back(1.0, *this);
    out->supp = n.supp;
    const int panels = 256;
    out->panel_x.resize(panels + 1);
    out->panel_cum.resize(panels + 1);
    cplx acc = 0.0;
    for (int i = 0; i <= panels; ++i)
        out->panel_x[static_cast<std::size_t>(i)] =
            n.supp.lo + (n.supp.hi - n.supp.lo) * i / panels;
    out->panel_cum[0] = 0.0;
    for (int i = 1; i <= panels; ++i) {
        acc += gauss([&](double t) { return n.eval(t); }, out->panel_x[i - 1], out->panel_x[i],
                     24);
        out->panel_cum[static_cast<std::size_t>(i)] = acc;
    }
    fill_numeric_caches(*out);
    return Profile(out);
}

std::string Profile::describe() const {
    const Node& n = *node_;
    switch (n.kind) {
        case Kind::Zero: return "zero";
        case Kind::Psi: return "psi";
        case Kind::PsiPrime: return "d1(psi)";
        case Kind::PsiSecond: return "d2(psi)";
        case Kind::Affine:
            return "affine(" + n.terms[0].second.describe() + ", " + fmt_num(n.shift) + ", " +
                   fmt_num(n.scale) + ")";
        case Kind::Lincomb: {
            std::string out = "lincomb(";
            bool first = true;
            for (const auto& [c, p] : n.terms) {
                if (!first) out += " + ";
                first = false;
                if (c.imag() == 0.0)
                    out += fmt_num(c.real());
                else
                    out += "(" + fmt_num(c.real()) + "," + fmt_num(c.imag()) + ")";
                out += "*" + p.describe();
            }
            return out + ")";
        }
        case Kind::SmoothBox:
            return "box(" + fmt_num(n.half_width) + ", " + fmt_num(n.edge) + ")";
        case Kind::Cumulative:
            return "antiderivative(" + n.terms[0].second.describe() + ")";
    }
    return "zero";
}

// ---------------------------------------------------------------------------
// Grammar:  zero | psi | d1(psi) | d2(psi) | affine(p, shift, scale)
//         | lincomb(c1*p1 + c2*p2 + ...) | box(half_width, edge_width)
//         | antiderivative(p)
// Coefficients are real numbers or (re,im) pairs.
// ---------------------------------------------------------------------------

namespace {

struct Parser {
    std::string_view s;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!eat(c)) throw config_error(std::string("profile parse: expected '") + c + "'");
    }
    bool peek_word(std::string_view w) {
        skip_ws();
        return s.substr(pos, w.size()) == w;
    }
    bool eat_word(std::string_view w) {
        if (peek_word(w)) {
            pos += w.size();
            return true;
        }
        return false;
    }
    double number() {
        skip_ws();
        std::size_t i = pos;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
        while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.' ||
                                s[i] == 'e' || s[i] == 'E' ||
                                ((s[i] == '+' || s[i] == '-') && (s[i - 1] == 'e' || s[i - 1] == 'E'))))
            ++i;
        if (i == pos) throw config_error("profile parse: expected a number");
        double v = std::stod(std::string(s.substr(pos, i - pos)));
        pos = i;
        return v;
    }
    cplx coefficient() {
        skip_ws();
        if (pos < s.size() && s[pos] == '(') {
            ++pos;
            double re = number();
            expect(',');
            double im = number();
            expect(')');
            return {re, im};
        }
        return {number(), 0.0};
    }

    Profile expr() {
        skip_ws();
        if (eat_word("zero")) return Profile::zero();
        if (eat_word("psi")) return Profile::psi();
        if (eat_word("d1")) {
            expect('(');
            Profile inner = expr();
            expect(')');
            return inner.derivative();
        }
        if (eat_word("d2")) {
            expect('(');
            Profile inner = expr();
            expect(')');
            return inner.derivative().derivative();
        }
        if (eat_word("affine")) {
            expect('(');
            Profile p = expr();
            expect(',');
            double a = number();
            expect(',');
            double sc = number();
            expect(')');
            return Profile::affine(p, a, sc);
        }
        if (eat_word("box")) {
            expect('(');
            double h = number();
            double w = 0.05;
            if (eat(','))
                w = number();
            else {
                // single-argument form: box(edge_width) with half-width 1
                w = h;
                h = 1.0;
            }
            expect(')');
            return Profile::smooth_box(h, w);
        }
        if (eat_word("antiderivative")) {
            expect('(');
            Profile p = expr();
            expect(')');
            return p.antiderivative();
        }
        if (eat_word("lincomb")) {
            expect('(');
            std::vector<std::pair<cplx, Profile>> terms;
            while (true) {
                cplx c = coefficient();
                expect('*');
                terms.emplace_back(c, expr());
                skip_ws();
                if (eat('+')) continue;
                break;
            }
            expect(')');
            return Profile::lincomb(std::move(terms));
        }
        throw config_error("profile parse: unknown construct at '" +
                           std::string(s.substr(pos, 16)) + "'");
    }
};

}  // namespace

Profile Profile::parse(std::string_view text) {
    Parser p{text};
    Profile out = p.expr();
    p.skip_ws();
    if (p.pos != text.size()) throw config_error("profile parse: trailing input");
    return out;
}

}  // namespace hop
