#pragma once

#include "mkreg/bounds.hpp"
#include "mkreg/kernel.hpp"
#include "mkreg/manifold.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace mkreg {

struct Samples {
    std::vector<Point> points;
    Eigen::VectorXd responses;
    std::optional<SpectralCoeffs> truth; // for error accounting, if synthetic
    double sigma = 0.0;                  // noise level used, if synthetic
};

struct SolverDiagnostics {
    int effective_rank = 0;
    double condition_estimate = 0.0;
    double residual_rel = 0.0; // relative residual of the dual solve
    bool used_pseudoinverse = false;
};

// Fitted estimator f(x) = sum_i a_i k(x, X_i).
struct FitResult {
    KernelSpec spec;
    std::vector<Point> points;
    Eigen::VectorXd weights;
    double alpha = 0.0;
    SolverDiagnostics diagnostics;
};

// Constants feeding the RKHS regression error bound and its gates.
struct TheoremInputs {
    int p = 0;
    double t_p1 = 0.0;    // next operator eigenvalue t_{p+1}
    double k_p = 0.0;     // sup_x sum_{l<=p} v_l^2(x)
    double r_p = 0.0;     // sup_x sum_{l>p} t_l v_l^2(x)
    double trace_tail = 0.0; // tr of the tail operator
    double gamma = 0.0;
    double gamma_prime = 0.0;
    double sigma = 0.0;
    double delta = 0.05;
    double alpha = 0.0;
    long n = 0;
    std::optional<double> f_norm_h; // RKHS norm of the target, when known
    double volume = 0.0;
    std::optional<double> xi_psi1; // sub-exponential norm of the noise (advisory)
};

// Pieces of the high-probability error bound, with the gate booleans.
struct RkhsBoundReport {
    double bias = 0.0;
    double noise = 0.0;
    double total = 0.0;
    std::vector<NamedCondition> conditions;
    bool gates_met() const {
        for (const auto& c : conditions)
            if (!c.met) return false;
        return true;
    }
};

// Regularized empirical risk minimizer: alpha > 0 solves (n alpha I + K) a = Y;
// alpha = 0 takes a = K^+ Y (pseudoinverse with relative cutoff 1e-10).
// Finite-rank kernels are solved in feature space, O(n p^2).
FitResult fit(const KernelSpec& spec, const Samples& samples, double alpha);

double predict(const FitResult& fit, const Point& x);

struct ExpandResult {
    SpectralCoeffs coeffs;
    double tail_l2_bound = 0.0; // certified L2 mass of the fit above lambda_max
};
ExpandResult spectral_expand(const FitResult& fit, double lambda_max);

struct L2ErrorResult {
    double error = 0.0;
    double certified_slack = 0.0; // bound on omitted-tail contribution
};
// Unnormalized L2 error between the fit and a spectrally given truth,
// computed over levels with lambda <= lambda_max.
L2ErrorResult l2_error(const FitResult& fit, const SpectralCoeffs& truth, double lambda_max);

// (sqrt(2 alpha) + 6 sqrt(t_{p+1})) |f*|_H  +  [noisy]
// 4 (1 + sqrt(gamma)/8) (sqrt(p) + 2 sqrt(log 4/delta)) sigma / sqrt(n).
RkhsBoundReport bound_rkhs(const TheoremInputs& inputs, bool noisy);

// Effective bandlimited dimension p(Omega) = 3 sqrt(m) V_m / (2 pi)^m * vol * Omega^m.
double bl_dimension(const Manifold& manifold, double omega);

// Exact K_p, R_p, tr T_{G_perp}, t_{p+1} and the minimal gamma, gamma' for a
// level-boundary cutoff of p eigenfunctions. Throws if p splits a level.
TheoremInputs assumption_constants(const Manifold& manifold, const KernelSpec& spec, int p);

} // namespace mkreg
