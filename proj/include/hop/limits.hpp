#pragma once

#include <functional>

#include "hop/ensemble.hpp"
#include "hop/resonance.hpp"

namespace hop {

// Exact rational exponent gamma = min(7/4, d/2 + m).
struct Rational {
    long num = 0;
    long den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Rational&) const = default;
};
Rational gamma_exponent(int d, int m);

struct CovMatrix2 {
    double a11 = 0, a12 = 0, a22 = 0;  // int phi1^2, int phi1 phi2, int phi2^2
    bool degenerate = false;
    // when degenerate: phi1 = alpha phi2 (direction_swapped = false) or
    // phi2 = alpha phi1 (direction_swapped = true, e.g. real phi)
    double alpha = 0.0;
    bool direction_swapped = false;
    double trace() const { return a11 + a22; }
    double det() const { return a11 * a22 - a12 * a12; }
};

// Sigma[phi] over [-1,1]^d by tensor-product Gauss quadrature.
CovMatrix2 sigma_matrix(const std::function<cplx(double)>& phi);  // d = 1
CovMatrix2 sigma_matrix3(const std::function<cplx(double, double, double)>& phi);

// (1/(2 pi)^d) int q_hat(xi) q_hat(-xi) / |xi|^2 dxi; d=1 requires one
// vanishing moment, d=3 takes radial profiles.
cplx oscillation_factor(const Profile& q, int d);

// The full limit constant: oscillation_factor * int_{[-1,1]^d} f g.
cplx constant_L(const Profile& q, const ResonantPair& pair, int d);

enum class CaseTag { I, II, III };
std::string case_name(CaseTag t);

CaseTag case_classifier(int d, const Profile& q, const ResonantPair& pair);

// Limit variances of the real-pair refinement; Case III returns the real
// magnitude of the deterministic limit (the shift itself carries the i).
double sigma2_corollary(CaseTag tag, const ResonantPair& pair, const Profile& q, int d);

// q0 + constant * (mollified indicator of [-1,1]); the constant is the
// N^{-2} oscillation factor with the sign that reproduces the i*L shift of
// the resonance (an attractive well for real q).
struct EffectivePotential {
    Profile q0;
    cplx constant;
    double box_edge = 0.025;
    bool exists_warning = false;  // d/2 + m < 2
    Profile as_profile() const;
    RandomPotential as_potential() const;
};

EffectivePotential effective_potential(const Profile& q0, const Profile& q, int N, int d);

}  // namespace hop
