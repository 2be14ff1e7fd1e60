#pragma once

#include "mkreg/kernel.hpp"
#include "mkreg/manifold.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mkreg {

struct NamedCondition {
    std::string name;
    bool met = false;
};

// A computed bound next to the quantity it dominates. A report verifies iff
// every condition is met and the margin is nonnegative.
struct BoundReport {
    double measured = 0.0;
    double bound = 0.0;
    double margin = 0.0; // bound - measured
    std::vector<NamedCondition> conditions;
    double epsilon = 0.5;

    bool conditions_met() const {
        for (const auto& c : conditions)
            if (!c.met) return false;
        return true;
    }
    bool verified() const { return conditions_met() && margin >= 0.0; }
};

// N_x(lambda) = sum over levels with lambda_l <= lambda of u_l^2(x).
double counting_function(const Manifold& manifold, const Point& x, double lambda);

struct WeylBound {
    double bound = 0.0;
    double lambda_threshold = 0.0; // validity: lambda >= m (m-1)^2 kappa / (6 eps)
};
WeylBound weyl_bound(int m, double lambda, double epsilon, double kappa);

// Certified truncated heat diagonal k_t(x, x).
double heat_diag(const Manifold& manifold, double t, const Point& x);

// Upper bound (1+eps)/(2 pi t)^{m/2} with its validity condition
// t <= 6 eps / ((m-1)^2 kappa)  (vacuous when kappa = 0 or m = 1).
BoundReport heat_diag_bound(const Manifold& manifold, double t, const Point& x, double epsilon);

// Comparison lower bound at geodesic distance r on a manifold with
// Ricci >= -(m-1) K1; the diagonal case is r = 0. Requires m >= 3.
double heat_lower_bound(int m, double t, double k1, double r);

// Comparison upper bound at distance r on a manifold with sectional
// curvature <= K2. Requires m >= 3 and r < pi / sqrt(K2).
double heat_upper_offdiag(int m, double t, double k2, double r);

// Measured spectral tail sum_{lambda_l >= lambda} e^{-lambda_l t/2} u_l^2(x)
// via certified series.
double heat_tail(const Manifold& manifold, double t, double lambda, const Point& x);

// Tail bound e^{-lambda t/2} * 2(1+eps) sqrt(m)/(2 pi)^m * V_m * lambda^{m/2}
// with its two gates (t within the curvature gate; lambda >= m/t).
BoundReport heat_tail_report(const Manifold& manifold, double t, double lambda, const Point& x,
                             double epsilon);

struct ConcentrationResult {
    double pass_rate = 0.0;
    int trials = 0;
    // 5/25/50/75/95% quantiles of the per-trial statistic.
    std::array<double, 5> quantiles{};
    double threshold = 0.0; // per-trial pass threshold
    long gate_n = 0;        // sample size required by the lemma's gate
};

// Monte Carlo check of the empirical second-moment lower bound on the leading
// p-dimensional eigenspace: per trial, the minimum eigenvalue of
// (vol/n) Phi^T Phi must be >= 1/2.
ConcentrationResult empirical_gram_check(const Manifold& manifold, const KernelSpec& spec, int p,
                                         int n, int trials, double delta, std::uint64_t seed);

// Monte Carlo check of the empirical tail-operator upper bound: per trial, the
// operator norm of the empirical tail second-moment (in the RKHS metric,
// restricted to a certified truncated tail basis) must be <= 2 t_{p+1}.
ConcentrationResult empirical_tail_check(const Manifold& manifold, const KernelSpec& spec, int p,
                                         int n, int trials, double delta, std::uint64_t seed);

} // namespace mkreg
