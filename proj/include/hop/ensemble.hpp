#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hop/profile.hpp"

namespace hop {

// Bounded i.i.d. coefficient law with mean 0 and variance 1.
class CoefficientLaw {
  public:
    enum class Kind { Rademacher, UniformScaled, DiscreteSymmetric };

    static CoefficientLaw rademacher();
    static CoefficientLaw uniform_scaled();  // uniform on [-sqrt(3), sqrt(3)]
    // symmetric discrete law given one half of the support; validated to have
    // mean 0 (by symmetry) and variance 1
    static CoefficientLaw discrete_symmetric(std::vector<double> values,
                                             std::vector<double> probs);

    Kind kind() const { return kind_; }
    double bound() const { return bound_; }
    std::string name() const;
    static CoefficientLaw parse(const std::string& name);

    // Deterministic draw from a 64-bit counter word.
    double sample(std::uint64_t word) const;

  private:
    Kind kind_ = Kind::Rademacher;
    double bound_ = 1.0;
    std::vector<double> values_;  // full support (symmetrized)
    std::vector<double> cdf_;
};

enum class DeterministicPattern { Alternating, AllOnes };

// Realized coefficient field u_j, j in [-N,N]^d. Values are generated from a
// counter keyed by (seed, flattened index), so any entry is computable without
// generating its predecessors and the result is independent of worker count.
class CoefficientField {
  public:
    static CoefficientField sample(const CoefficientLaw& law, int N, int d,
                                   std::uint64_t seed);
    static CoefficientField deterministic(DeterministicPattern pat, int N, int d);
    static CoefficientField zero(int N, int d);
    // all entries given explicitly (tests)
    static CoefficientField from_values(std::vector<double> values, int N, int d);

    int N() const { return N_; }
    int dim() const { return d_; }
    std::uint64_t seed() const { return seed_; }
    const std::string& law_name() const { return law_name_; }
    std::size_t size() const { return values_.size(); }

    // d=1 access by index j in [-N, N]
    double at(int j) const { return values_[static_cast<std::size_t>(j + N_)]; }
    // multi-index access (d=1 or 3)
    double at(const std::vector<int>& j) const;
    const std::vector<double>& values() const { return values_; }

  private:
    int N_ = 0, d_ = 1;
    std::uint64_t seed_ = 0;
    std::string law_name_;
    std::vector<double> values_;
};

// V_N(x) = q0(x) + sum_j u_j q(Nx - j); evaluation visits only the O(1)
// bumps whose support contains Nx - j.
class RandomPotential {
  public:
    RandomPotential() = default;
    RandomPotential(Profile q0, Profile q, int N, CoefficientField coeffs);

    cplx operator()(double x) const;
    // the oscillatory part sum_j u_j q(Nx - j) alone
    cplx oscillatory_part(double x) const;

    const Profile& q0() const { return q0_; }
    const Profile& q() const { return q_; }
    int N() const { return N_; }
    const CoefficientField& coeffs() const { return coeffs_; }

    Interval support() const;
    double sup_bound() const;  // |q0|_inf + overlap * |q|_inf * bound
    // shortest length scale of variation (used by the ODE step cap)
    double oscillation_scale() const;

  private:
    Profile q0_, q_;
    int N_ = 1;
    CoefficientField coeffs_;
    double law_bound_ = 1.0;
};

// integral V_#(x) phi(x) dx by per-bump substitution (d=1)
cplx weak_pairing(const RandomPotential& V, const Profile& phi);

// 64-bit mix used for counter-based sampling (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t seed, std::uint64_t counter);

}  // namespace hop
