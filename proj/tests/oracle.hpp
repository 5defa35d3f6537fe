#pragma once

// Test-local quadrature oracle, kept independent of the library's adaptive
// Gauss machinery: recursive Simpson with Richardson acceptance.

#include <cmath>
#include <complex>
#include <functional>

namespace oracle {

using cplx = std::complex<double>;

inline cplx simpson_rec(const std::function<cplx(double)>& f, double a, double b, cplx fa,
                        cplx fm, cplx fb, cplx whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const cplx flm = f(lm), frm = f(rm);
    const cplx left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const cplx right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth > 60 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth + 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth + 1);
}

inline cplx integrate(const std::function<cplx(double)>& f, double a, double b,
                      double tol = 1e-12) {
    if (!(b > a)) return 0.0;
    // seed with a few panels so narrow features are not missed
    const int seed_panels = 16;
    cplx total = 0.0;
    for (int i = 0; i < seed_panels; ++i) {
        const double pa = a + (b - a) * i / seed_panels;
        const double pb = a + (b - a) * (i + 1) / seed_panels;
        const double pm = 0.5 * (pa + pb);
        const cplx fa = f(pa), fm = f(pm), fb = f(pb);
        const cplx whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
        total += simpson_rec(f, pa, pb, fa, fm, fb, whole, tol / seed_panels, 0);
    }
    return total;
}

inline double integrate_real(const std::function<double(double)>& f, double a, double b,
                             double tol = 1e-12) {
    return integrate([&](double x) { return cplx(f(x), 0.0); }, a, b, tol).real();
}

}  // namespace oracle
