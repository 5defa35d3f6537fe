#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace hop {

// Gauss-Legendre nodes/weights on [-1, 1].
struct GaussRule {
    std::vector<double> node;
    std::vector<double> weight;
};

// Cached rule of order n (computed once, thread-safe after first use of each order).
const GaussRule& gauss_rule(int n);

// Fixed-order Gauss-Legendre on [a, b].
template <class F>
auto gauss(const F& f, double a, double b, int order) -> decltype(f(0.0)) {
    const GaussRule& r = gauss_rule(order);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    decltype(f(0.0)) acc{};
    for (std::size_t i = 0; i < r.node.size(); ++i)
        acc += r.weight[i] * f(mid + half * r.node[i]);
    return acc * half;
}

struct AdaptiveOptions {
    double abs_tol = 1e-12;
    // Panels never start wider than this (used to resolve oscillations).
    double max_panel = 1e300;
    int max_depth = 48;
};

// Adaptive bisection; error estimated per panel from |GL16 - GL32|.
std::complex<double> integrate_adaptive(const std::function<std::complex<double>(double)>& f,
                                        double a, double b, const AdaptiveOptions& opt = {});
double integrate_adaptive_real(const std::function<double(double)>& f,
                               double a, double b, const AdaptiveOptions& opt = {});

}  // namespace hop
