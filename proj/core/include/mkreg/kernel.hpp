#pragma once

#include "mkreg/manifold.hpp"

#include <Eigen/Dense>

#include <variant>
#include <vector>

namespace mkreg {

// Spectral filters g(lambda) defining kernels k(x,y) = sum g(lambda_l) u_l(x) u_l(y).
struct Bandlimited {
    double omega; // g = 1 for lambda <= omega^2, else 0
};
struct Heat {
    double t; // g = exp(-lambda t / 2)
};
struct Sobolev {
    double s; // g = (1 + lambda)^{-s}; requires s > m/2
};
using KernelFamily = std::variant<Bandlimited, Heat, Sobolev>;

// Spectral coefficients of a function in the manifold's fixed eigenbasis
// order, covering all levels with lambda <= lambda_max.
struct SpectralCoeffs {
    Manifold manifold;
    double lambda_max = 0.0;
    std::vector<double> values;

    double norm_sq() const;
};

// Value of the represented function at x.
double eval_spectral(const SpectralCoeffs& coeffs, const Point& x);

// A certified truncated tail sum: value plus an upper bound on the neglected mass.
struct TailSum {
    double value = 0.0;
    double neglected_bound = 0.0;
};

// A spectral kernel on a manifold with a certified truncation policy.
//
// Eigenfunctions carry the unnormalized volume measure. The integral-operator
// eigenvalues under the normalized (probability) measure are
// t_l = g(lambda_l) / vol(M); that conversion happens in regression/bounds,
// never here.
class KernelSpec {
public:
    KernelSpec(Manifold manifold, KernelFamily family, double tail_tol = 1e-12);

    const Manifold& manifold() const { return manifold_; }
    const KernelFamily& family() const { return family_; }
    double tail_tol() const { return tail_tol_; }

    double g(double lambda) const;

    bool finite_rank() const;
    // For bandlimited kernels, the level cap Omega^2; infinity otherwise.
    double band_lambda_cap() const;

    // k(x, y), truncated at the smallest level where the certified tail
    // majorant drops below tail_tol relative to the partial sum (bandlimited
    // kernels are summed exactly).
    double eval(const Point& x, const Point& y) const;

    // Symmetric Gram matrix; upper triangle computed, mirrored exactly.
    Eigen::MatrixXd gram(const std::vector<Point>& points) const;

    // Certified upper bound on sum_{lambda_l >= lambda0} g(lambda_l) u_l^2(x)
    // (analytic majorant; +inf where no certificate applies yet).
    double diag_tail_majorant(double lambda0) const;

    // Certified sum_{lambda_l >= lambda0} g(lambda_l) u_l^2(x)  (x-independent
    // on the homogeneous built-ins: each level contributes g * mult / vol).
    TailSum diag_tail(double lambda0) const;

    // Same with g^2 in place of g (used for certified L2 tail bounds of fits).
    TailSum diag_tail_sq(double lambda0) const;

private:
    Manifold manifold_;
    KernelFamily family_;
    double tail_tol_;
};

// RKHS norm squared: sum c_l^2 / g(lambda_l). Throws NotInRkhs if a nonzero
// coefficient sits on a level with g = 0.
double rkhs_norm_sq(const KernelSpec& spec, const SpectralCoeffs& coeffs);

} // namespace mkreg
