#pragma once

#include "hop/ensemble.hpp"
#include "hop/resonance.hpp"

namespace hop {

// Kernel of the regularized free resolvent at the zero resonance:
//   K(lambda, r) = i (e^{i lambda r} - 1) / (2 lambda),
// with the removable singularity at lambda = 0 evaluated by series.
cplx regularized_kernel(cplx lambda, double r);

struct SeriesOptions {
    int quad_order = 12;      // per-bump Gauss order (near pairs)
    int far_order = 8;        // reduced order once |j - l| > far_factor * diam(supp q)
    double far_factor = 4.0;
};

// a_k(lambda) = <(V_# L rho)^k V_# f, g-bar> with the bilinear pairing
// int V f g. Supported: k <= 2 for q0 = 0; k <= 1 otherwise (the k = 1 kernel
// for q0 != 0 is assembled from the one-dimensional resolvent of q0).
cplx term_a(int k, const RandomPotential& v_sharp, const ResonantPair& pair, cplx lambda,
            const SeriesOptions& opt = {});

// phi(lambda) = lambda - lambda0 + i sum_{k<=K} (-1)^k a_k(lambda), with the
// attached tail bound C h^{K+2} / (1 - C h), h = |V_#|_{H^{-1}}.
class CharacteristicSeries {
  public:
    CharacteristicSeries(RandomPotential v_sharp, ResonantPair pair, int truncation,
                         double decay_constant, double h_norm,
                         SeriesOptions opt = {});

    cplx phi(cplx lambda) const;
    cplx term(int k, cplx lambda) const;
    double tail_estimate() const;
    int truncation() const { return K_; }
    const ResonantPair& pair() const { return pair_; }
    const RandomPotential& potential() const { return v_; }
    double h_norm() const { return h_; }

  private:
    RandomPotential v_;
    ResonantPair pair_;
    int K_ = 0;
    double C_ = 1.0;
    double h_ = 0.0;
    SeriesOptions opt_;
};

// Convenience: h taken from the H^{-1} spectral norm of V_#.
CharacteristicSeries make_series(const RandomPotential& v_sharp, const ResonantPair& pair,
                                 int truncation, double decay_constant,
                                 const SeriesOptions& opt = {});

// Calibration of the geometric-decay constant: smallest C with
// |a_k| <= C^{k+1} h^{k+1} over the sampled configurations, times a safety factor.
double calibrate_decay_constant(const Profile& q0, const Profile& q,
                                const CoefficientLaw& law, int N, int n_samples,
                                std::uint64_t seed, const ResonantPair& pair,
                                int truncation);

struct PhiRoot {
    cplx root;
    double residual = 0.0;
    int iterations = 0;
    double tail_estimate = 0.0;
};

// Newton from the disk center; uniqueness certified by winding number 1 on the
// disk boundary (regime_error otherwise -- the sample is a B_N event).
PhiRoot phi_root(const CharacteristicSeries& series, cplx center, double radius,
                 double tol);

}  // namespace hop
