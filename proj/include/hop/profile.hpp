#pragma once

#include <complex>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hop {

using cplx = std::complex<double>;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

// Smooth compactly supported building block: an expression tree over the
// standard bump psi(x) = exp(-1/(1-x^2)) on (-1,1), its first two derivatives,
// affine rescalings, complex linear combinations, a C-infinity box with
// mollified edges, and numerically accumulated antiderivatives.
//
// Immutable after construction; every cache (moments, |p|_1, |p|_inf) is
// filled eagerly so instances can be shared across threads freely.
class Profile {
  public:
    static constexpr int kMaxMoment = 8;

    Profile();  // zero profile

    cplx operator()(double x) const;
    Interval support() const;
    bool is_zero() const;

    // integral of x^k p(x), cached, 0 <= k <= kMaxMoment
    cplx moment(int k) const;
    double abs_mass() const;  // integral of |p|
    double sup_norm() const;

    // integral of e^{-i xi x} p(x) dx
    cplx fourier(double xi) const;

    // smallest k with |moment(k)| > tol * abs_mass; throws config_error when
    // the profile is numerically zero or the search cap kMaxMoment is passed
    int vanishing_order(double tol = 1e-9) const;

    // compactly supported Q with Q' = p; requires |moment(0)| <= tol*abs_mass
    Profile antiderivative(double tol = 1e-9) const;

    // analytic derivative where a closed-form rule exists
    Profile derivative() const;

    std::string describe() const;
    static Profile parse(std::string_view text);

    static Profile zero();
    static Profile psi();
    static Profile psi_prime();
    static Profile psi_second();
    // p((x - shift)/scale); scale != 0
    static Profile affine(const Profile& p, double shift, double scale);
    static Profile lincomb(std::vector<std::pair<cplx, Profile>> terms);
    // 1 on [-h+w/2, h-w/2], 0 outside [-h-w/2, h+w/2], C-infinity edges
    // centered at +-h (so the mollification is mean-preserving at each edge)
    static Profile smooth_box(double half_width, double edge_width);

    struct Node;  // defined in the implementation file

  private:
    explicit Profile(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

}  // namespace hop
