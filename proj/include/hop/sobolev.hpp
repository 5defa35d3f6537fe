#pragma once

#include <cstdint>
#include <vector>

#include "hop/ensemble.hpp"
#include "hop/profile.hpp"

namespace hop {

// Toeplitz bilinear-form matrix: for d=1,
//   alpha_{j,l} = (1/(2 pi N)) int e^{-i xi (j-l)} |q_hat(xi)|^2 / (1+N^2 xi^2)^s dxi,
// so that sum_{j,l} alpha_{j,l} u_j u_l equals the squared H^{-s} norm of
// V_# = sum u_j q(Nx-j) with the normalization |f|_{H^{-s}}^2 =
// (1/2pi) int |f_hat|^2 (1+xi^2)^{-s}. For d=3 (radial q) only the radial
// difference profile up to a cutoff is materialized.
class AlphaMatrix {
  public:
    double s = 2.0;
    int N = 1;
    int d = 1;
    // d=1: diff[k] = alpha at j-l = k, k = 0..2N; alpha(-k) = conj(alpha(k)).
    // d=3: diff[k] = alpha at |j-l| = k, k = 0..cutoff.
    std::vector<cplx> diff;

    cplx entry_diff(int delta) const;     // d=1, any |delta| <= 2N
    cplx entry(int j, int l) const;       // d=1
    double trace() const;
    double hs_norm() const;               // d=1: exact; d=3: from materialized entries
    std::size_t side() const;             // (2N+1)^d
};

AlphaMatrix alpha_matrix(const Profile& q, int N, int d, double s, int d3_cutoff = 8);

// sum_{j,l} alpha_{j,l} u_j u_l via the Toeplitz correlation form (d=1).
// Throws accuracy_error if the imaginary residue exceeds 1e-9 * |Q|.
double quadratic_form(const AlphaMatrix& A, const CoefficientField& u);

// sqrt( (1/2pi) int |V_hat(xi)|^2 (1+xi^2)^{-s} dxi ) for V = sum u_j q(Nx-j), d=1.
double hnorm_spectral(const RandomPotential& v_sharp, double s);

// Same norm for (V_# - ref): used for the weak-convergence studies.
double hnorm_spectral_diff(const RandomPotential& v_sharp, const Profile& ref, double s);

// Truncation point: |q_hat(xi)|^2 below 1e-14 of its maximum beyond this.
double fourier_truncation(const Profile& q);

// Interpolated dense tabulation of the transform (cached per profile).
cplx fourier_cached(const Profile& q, double xi);

// Radial 3-d transform of a radial profile: (4 pi / rho) int r sin(rho r) q(r) dr.
cplx fourier_radial3(const Profile& q, double rho);

struct TailCurve {
    std::vector<double> t;          // admitted thresholds (t^2 >= 2|trace|)
    std::vector<double> t_squared;
    std::vector<double> empirical_p;
    std::vector<double> wilson_lo;
    std::vector<double> wilson_hi;
    std::vector<double> filtered_t;  // thresholds rejected by the hypothesis
    double fitted_rate = 0.0;        // slope of log p against t^2/|alpha|_HS
    double mc_mean = 0.0;            // empirical mean of the quadratic form
    double mc_std = 0.0;
    double trace = 0.0;
    double hs = 0.0;
    int samples = 0;
};

TailCurve hw_tail_experiment(const AlphaMatrix& A, const CoefficientLaw& law,
                             std::vector<double> t_grid, int M, std::uint64_t seed,
                             unsigned workers = 1);

}  // namespace hop
