#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <boost/numeric/odeint/stepper/runge_kutta_fehlberg78.hpp>

#include "hop/errors.hpp"

namespace hop {

using State2 = std::array<std::complex<double>, 2>;

// Tolerances are per-step budgets; with the bump-resolving step cap the
// accumulated defect stays a few orders below every residual target used by
// the contour machinery.
struct OdeControls {
    double abs_tol = 1e-14;
    double rel_tol = 3e-14;
    double max_step = 1e300;
    long max_steps = 4000000;
};

struct OdeStats {
    long steps = 0;
    long rejected = 0;
    double err_accum = 0.0;  // accumulated per-step error estimates
};

// Fehlberg 7(8) propagation with step-doubling error control: the embedded
// 7/8 estimate degenerates on linear oscillatory systems, so each step is
// compared against two half-steps and the halved solution is kept with local
// extrapolation. Integrates from a to b (either direction); when `samples` is
// given (monotone from a to b) the steps land exactly on them and on_sample
// is invoked there.
template <class RHS>
OdeStats integrate_rkf78(RHS&& rhs, State2& y, double a, double b, const OdeControls& c,
                         const std::vector<double>* samples = nullptr,
                         const std::function<void(double, const State2&)>& on_sample = {}) {
    namespace od = boost::numeric::odeint;
    od::runge_kutta_fehlberg78<State2> stepper;
    auto sys = [&rhs](const State2& s, State2& dsdt, double x) { rhs(x, s, dsdt); };

    OdeStats stats;
    const double dir = (b >= a) ? 1.0 : -1.0;
    double x = a;
    double dt = dir * std::min(c.max_step, std::abs(b - a) / 16.0);
    std::size_t next_sample = 0;
    if (samples && next_sample < samples->size() &&
        std::abs((*samples)[next_sample] - a) < 1e-14) {
        if (on_sample) on_sample(a, y);
        ++next_sample;
    }

    while (dir * (b - x) > 1e-14 * std::max(1.0, std::abs(b))) {
        double target = b;
        if (samples && next_sample < samples->size()) target = (*samples)[next_sample];
        if (dir * (target - x) <= 0) {  // passed by rounding; emit and advance
            if (on_sample) on_sample(x, y);
            ++next_sample;
            continue;
        }
        double h = dt;
        if (std::abs(h) > std::abs(target - x)) h = target - x;

        State2 ybig = y;
        stepper.do_step(sys, ybig, x, h);
        State2 yhalf = y;
        stepper.do_step(sys, yhalf, x, 0.5 * h);
        stepper.do_step(sys, yhalf, x + 0.5 * h, 0.5 * h);

        double err = 0.0, errnorm = 0.0;
        for (std::size_t i = 0; i < 2; ++i) {
            const double e = std::abs(ybig[i] - yhalf[i]);
            err = std::max(err, e);
            const double scale =
                c.abs_tol + c.rel_tol * std::max(std::abs(y[i]), std::abs(yhalf[i]));
            errnorm = std::max(errnorm, e / std::max(scale, 1e-300));
        }
        if (errnorm <= 1.0) {
            x += h;
            for (std::size_t i = 0; i < 2; ++i)
                y[i] = yhalf[i] + (yhalf[i] - ybig[i]) / 255.0;
            ++stats.steps;
            stats.err_accum += err;
            if (samples && next_sample < samples->size() &&
                std::abs(x - (*samples)[next_sample]) <=
                    1e-12 * std::max(1.0, std::abs(x))) {
                if (on_sample) on_sample(x, y);
                ++next_sample;
            }
            const double grow = 0.8 * std::pow(std::max(errnorm, 1e-12), -1.0 / 9.0);
            dt = dir * std::min(c.max_step,
                                std::abs(dt) * std::min(2.5, std::max(0.5, grow)));
        } else {
            ++stats.rejected;
            const double shrink = std::max(0.1, 0.9 * std::pow(errnorm, -1.0 / 9.0));
            dt = dir * std::abs(h) * shrink;
        }
        if (stats.steps + stats.rejected > c.max_steps)
            throw accuracy_error("ode: step budget exhausted");
        if (std::abs(dt) < 1e-15 * std::max(1.0, std::abs(x)))
            throw accuracy_error("ode: step size underflow");
    }
    if (samples && next_sample < samples->size()) {
        // emit any samples that coincide with the right endpoint
        while (next_sample < samples->size() &&
               std::abs((*samples)[next_sample] - b) < 1e-10 * std::max(1.0, std::abs(b))) {
            if (on_sample) on_sample(b, y);
            ++next_sample;
        }
    }
    return stats;
}

}  // namespace hop
