#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "hop/ensemble.hpp"
#include "hop/profile.hpp"

namespace hop {

struct ComplexBox {
    double re0 = 0, re1 = 0, im0 = 0, im1 = 0;
    double diag() const;
    bool contains(cplx z, double slack = 0.0) const;
    ComplexBox expanded(double factor) const;
};

// Solution of -u'' + V u = lambda^2 u normalized to e^{-i lambda x} left of the
// support, evaluated at x = L together with the outgoing-matching defect
//   F(lambda) = (1/2) e^{i lambda L} (i lambda u(L) - u'(L)).
// F is entire, F = i*lambda for V = 0, and its zeros (with multiplicity) are
// the resonances of V.
struct OutgoingSolution {
    cplx lambda;
    double L = 1.0;
    cplx u_at_L, du_at_L;
    cplx defect;
    long steps = 0;
    double est_error = 0.0;
};

// Working box for the frequency argument; growth e^{2L|Im lambda|} is rejected
// beyond it rather than silently degraded.
constexpr double kMaxRe = 30.0;
constexpr double kMaxIm = 15.0;

double solver_halfwidth(const RandomPotential& V);

OutgoingSolution outgoing_solution(const RandomPotential& V, cplx lambda, double L);
cplx outgoing_defect(const RandomPotential& V, cplx lambda, double L);
cplx outgoing_defect(const RandomPotential& V, cplx lambda);  // L from the support

struct Resonance {
    cplx lambda;
    int multiplicity = 1;
    double residual = 0.0;  // |F| after polish
    ComplexBox certified_box;
};

struct ContourOptions {
    double tol = 1e-10;        // target location accuracy for simple zeros
    double min_box = 1e-9;     // stop subdividing below this diagonal
    int max_refine_depth = 42; // boundary-argument refinement cap
    int nudge_attempts = 6;
};

// Argument-principle winding number of F around the box boundary
// (counterclockwise); throws accuracy_error on non-integer accumulation.
int winding_number(const std::function<cplx(cplx)>& F, const ComplexBox& box,
                   const ContourOptions& opt = {}, double* boundary_scale = nullptr);

// Complete list of zeros in the box, certified by recursive quadrisection.
std::vector<Resonance> find_zeros(const std::function<cplx(cplx)>& F, ComplexBox box,
                                  const ContourOptions& opt = {});

std::vector<Resonance> find_resonances(const RandomPotential& V, const ComplexBox& box,
                                       double tol = 1e-10);

// Sharp-barrier matching function for V0 * 1_{[-1,1]} from exact exponentials;
// entire in lambda through the even dependence on k = sqrt(lambda^2 - V0).
cplx square_barrier_defect(cplx V0, cplx lambda);
std::vector<cplx> square_barrier_resonances(cplx V0, const ComplexBox& box,
                                            double tol = 1e-11);

// Green kernel of (-d^2/dx^2 + V - lambda^2)^{-1} on [-L, L], assembled from
// the left- and right-outgoing solutions: u_-(x_<) u_+(x_>) / W(lambda).
class ResolventKernel {
  public:
    ResolventKernel(const RandomPotential& V, cplx lambda, double L, int grid_n = 1024);
    cplx operator()(double x, double y) const;
    cplx wronskian() const { return wronskian_; }
    cplx left(double x) const;   // u_-
    cplx right(double x) const;  // u_+
    double L() const { return L_; }

  private:
    double L_ = 1.0;
    cplx lambda_;
    std::vector<double> xs_;
    std::vector<cplx> um_, up_;
    cplx wronskian_;
};

// Simple resonance lambda0 of q0 with states (f, g) normalized so that the
// residue of the resolvent kernel at lambda0 equals i f(x) g(y).
class ResonantPair {
  public:
    cplx lambda0;
    double L = 1.0;
    double isolation_radius = 0.25;
    bool free_case = false;
    Profile q0_profile;  // background potential the pair belongs to

    cplx f(double x) const;
    cplx g(double x) const;
    cplx fg(double x) const;

    static ResonantPair free_pair();
    // arbitrary states for tests and synthetic studies
    static ResonantPair synthetic(std::function<cplx(double)> f,
                                  std::function<cplx(double)> g, cplx lambda0, double L);

    // residue fit diagnostics
    double residue_misfit = 0.0;

  private:
    friend ResonantPair resonant_pair(const Profile&, cplx, double);
    std::function<cplx(double)> f_, g_;
    std::function<cplx(double)> fg_;  // closed-form product when available
};

ResonantPair resonant_pair(const Profile& q0, cplx lambda0_guess,
                           double isolation_radius = 0.25);

// Smallest eigenvalues of the Dirichlet finite-difference discretization of
// -d^2/dx^2 + V on [-wall, wall]; independent oracle for bound states.
std::vector<double> dirichlet_eigenvalues_fd(const RandomPotential& V, double wall,
                                             double mesh, int count);

}  // namespace hop
