#include "hop/ensemble.hpp"

#include <cmath>

#include "hop/errors.hpp"
#include "hop/quadrature.hpp"

namespace hop {

std::uint64_t mix64(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (counter + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

double unit_uniform(std::uint64_t word) {
    return static_cast<double>(word >> 11) * 0x1.0p-53;
}

}  // namespace

CoefficientLaw CoefficientLaw::rademacher() {
    CoefficientLaw law;
    law.kind_ = Kind::Rademacher;
    law.bound_ = 1.0;
    return law;
}

CoefficientLaw CoefficientLaw::uniform_scaled() {
    CoefficientLaw law;
    law.kind_ = Kind::UniformScaled;
    law.bound_ = std::sqrt(3.0);
    return law;
}

CoefficientLaw CoefficientLaw::discrete_symmetric(std::vector<double> values,
                                                  std::vector<double> probs) {
    if (values.size() != probs.size() || values.empty())
        throw config_error("discrete_symmetric: values/probs size mismatch");
    CoefficientLaw law;
    law.kind_ = Kind::DiscreteSymmetric;
    double ptot = 0.0, var = 0.0, bound = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (probs[i] < 0) throw config_error("discrete_symmetric: negative probability");
        ptot += probs[i];
        var += probs[i] * values[i] * values[i];
        bound = std::max(bound, std::abs(values[i]));
    }
    if (std::abs(ptot - 0.5) > 1e-12)
        throw config_error("discrete_symmetric: half-support probabilities must sum to 1/2");
    if (std::abs(2.0 * var - 1.0) > 1e-12)
        throw config_error("discrete_symmetric: variance must be 1");
    law.bound_ = bound;
    // symmetrize: +v with prob p, -v with prob p
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        law.values_.push_back(values[i]);
        acc += probs[i];
        law.cdf_.push_back(acc);
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        law.values_.push_back(-values[i]);
        acc += probs[i];
        law.cdf_.push_back(acc);
    }
    law.cdf_.back() = 1.0;
    return law;
}

std::string CoefficientLaw::name() const {
    switch (kind_) {
        case Kind::Rademacher: return "rademacher";
        case Kind::UniformScaled: return "uniform";
        case Kind::DiscreteSymmetric: return "discrete";
    }
    return "rademacher";
}

CoefficientLaw CoefficientLaw::parse(const std::string& name) {
    if (name == "rademacher") return rademacher();
    if (name == "uniform" || name == "uniform_scaled") return uniform_scaled();
    throw config_error("unknown coefficient law: " + name);
}

double CoefficientLaw::sample(std::uint64_t word) const {
    switch (kind_) {
        case Kind::Rademacher: return (word >> 63) ? 1.0 : -1.0;
        case Kind::UniformScaled: return std::sqrt(3.0) * (2.0 * unit_uniform(word) - 1.0);
        case Kind::DiscreteSymmetric: {
            const double u = unit_uniform(word);
            for (std::size_t i = 0; i < cdf_.size(); ++i)
                if (u < cdf_[i]) return values_[i];
            return values_.back();
        }
    }
    return 0.0;
}

namespace {

std::size_t field_size(int N, int d) {
    std::size_t n = 1;
    for (int i = 0; i < d; ++i) n *= static_cast<std::size_t>(2 * N + 1);
    return n;
}

}  // namespace

CoefficientField CoefficientField::sample(const CoefficientLaw& law, int N, int d,
                                          std::uint64_t seed) {
    if (N < 1) throw config_error("coefficient field: N must be >= 1");
    if (d != 1 && d != 3) throw config_error("coefficient field: d must be 1 or 3");
    CoefficientField f;
    f.N_ = N;
    f.d_ = d;
    f.seed_ = seed;
    f.law_name_ = law.name();
    const std::size_t n = field_size(N, d);
    f.values_.resize(n);
    for (std::size_t i = 0; i < n; ++i) f.values_[i] = law.sample(mix64(seed, i));
    return f;
}

CoefficientField CoefficientField::deterministic(DeterministicPattern pat, int N, int d) {
    if (N < 1) throw config_error("coefficient field: N must be >= 1");
    CoefficientField f;
    f.N_ = N;
    f.d_ = d;
    f.law_name_ = pat == DeterministicPattern::Alternating ? "alternating" : "all_ones";
    const std::size_t n = field_size(N, d);
    f.values_.resize(n);
    const int side = 2 * N + 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (pat == DeterministicPattern::AllOnes) {
            f.values_[i] = 1.0;
        } else {
            // parity of j_1 + ... + j_d with j_k = (digit in base side) - N
            std::size_t rest = i;
            long parity = 0;
            for (int k = 0; k < d; ++k) {
                parity += static_cast<long>(rest % side) - N;
                rest /= side;
            }
            f.values_[i] = (parity % 2 == 0) ? 1.0 : -1.0;
        }
    }
    return f;
}

CoefficientField CoefficientField::zero(int N, int d) {
    CoefficientField f;
    f.N_ = N;
    f.d_ = d;
    f.law_name_ = "zero";
    f.values_.assign(field_size(N, d), 0.0);
    return f;
}

CoefficientField CoefficientField::from_values(std::vector<double> values, int N, int d) {
    if (values.size() != field_size(N, d))
        throw config_error("coefficient field: wrong value count");
    CoefficientField f;
    f.N_ = N;
    f.d_ = d;
    f.law_name_ = "explicit";
    f.values_ = std::move(values);
    return f;
}

double CoefficientField::at(const std::vector<int>& j) const {
    if (static_cast<int>(j.size()) != d_) throw config_error("field index: wrong dimension");
    const int side = 2 * N_ + 1;
    std::size_t idx = 0;
    for (int k = d_ - 1; k >= 0; --k) {
        if (j[static_cast<std::size_t>(k)] < -N_ || j[static_cast<std::size_t>(k)] > N_)
            throw config_error("field index: out of range");
        idx = idx * static_cast<std::size_t>(side) +
              static_cast<std::size_t>(j[static_cast<std::size_t>(k)] + N_);
    }
    return values_[idx];
}

RandomPotential::RandomPotential(Profile q0, Profile q, int N, CoefficientField coeffs)
    : q0_(std::move(q0)), q_(std::move(q)), N_(N), coeffs_(std::move(coeffs)) {
    if (coeffs_.dim() != 1)
        throw config_error("random potential evaluation requires d = 1");
    if (coeffs_.N() != N_) throw config_error("random potential: N mismatch");
    double b = 0.0;
    for (double v : coeffs_.values()) b = std::max(b, std::abs(v));
    law_bound_ = b;
}

cplx RandomPotential::oscillatory_part(double x) const {
    if (q_.is_zero()) return 0.0;
    const Interval s = q_.support();
    // j with Nx - j in supp(q)
    const double y = N_ * x;
    int jlo = static_cast<int>(std::ceil(y - s.hi));
    int jhi = static_cast<int>(std::floor(y - s.lo));
    jlo = std::max(jlo, -N_);
    jhi = std::min(jhi, N_);
    cplx acc = 0.0;
    for (int j = jlo; j <= jhi; ++j) acc += coeffs_.at(j) * q_(y - j);
    return acc;
}

cplx RandomPotential::operator()(double x) const { return q0_(x) + oscillatory_part(x); }

Interval RandomPotential::support() const {
    Interval out{0.0, 0.0};
    bool any = false;
    if (!q0_.is_zero()) {
        out = q0_.support();
        any = true;
    }
    if (!q_.is_zero()) {
        const Interval s = q_.support();
        Interval bumps{(-N_ + s.lo) / N_, (N_ + s.hi) / N_};
        if (!any)
            out = bumps;
        else
            out = {std::min(out.lo, bumps.lo), std::max(out.hi, bumps.hi)};
        any = true;
    }
    return out;
}

double RandomPotential::sup_bound() const {
    const double diam = q_.support().length();
    const double overlap = std::floor(diam) + 1.0;
    return q0_.sup_norm() + overlap * q_.sup_norm() * law_bound_;
}

double RandomPotential::oscillation_scale() const {
    double sc = 1e300;
    if (!q_.is_zero()) sc = std::min(sc, q_.support().length() / N_);
    if (!q0_.is_zero()) sc = std::min(sc, q0_.support().length());
    return sc;
}

cplx weak_pairing(const RandomPotential& V, const Profile& phi) {
    if (V.coeffs().dim() != 1) throw config_error("weak_pairing requires d = 1");
    const Profile& q = V.q();
    if (q.is_zero()) return 0.0;
    const Interval s = q.support();
    const int N = V.N();
    AdaptiveOptions opt;
    opt.abs_tol = 1e-13;
    cplx acc = 0.0;
    for (int j = -N; j <= N; ++j) {
        const double u = V.coeffs().at(j);
        if (u == 0.0) continue;
        cplx inner = integrate_adaptive(
            [&](double x) { return q(x) * phi((x + j) / N); }, s.lo, s.hi, opt);
        acc += u * inner;
    }
    return acc / double(N);
}

}  // namespace hop
