#include "mkreg/bounds.hpp"

#include "mkreg/errors.hpp"
#include "mkreg/regression.hpp"
#include "mkreg/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace mkreg {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

void check_epsilon(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 2.0 / 3.0))
        throw InvalidArgument("epsilon must be in (0, 2/3)");
}

double weyl_prefactor(int m, double epsilon) {
    return 2.0 * (1.0 + epsilon) * std::sqrt(static_cast<double>(m)) /
           std::pow(2.0 * kPi, m) * unit_ball_volume(m);
}

// x / sinh(x), continuous at 0.
double x_over_sinh(double x) {
    if (std::fabs(x) < 1e-8) return 1.0;
    return x / std::sinh(x);
}

double x_over_sin(double x) {
    if (std::fabs(x) < 1e-8) return 1.0;
    return x / std::sin(x);
}

std::array<double, 5> quantiles_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto pick = [&](double q) {
        const double idx = q * (static_cast<double>(v.size()) - 1.0);
        const auto lo = static_cast<std::size_t>(idx);
        const std::size_t hi = std::min(lo + 1, v.size() - 1);
        const double w = idx - static_cast<double>(lo);
        return (1.0 - w) * v[lo] + w * v[hi];
    };
    return {pick(0.05), pick(0.25), pick(0.50), pick(0.75), pick(0.95)};
}

// Level boundary lambda for a cutoff of p eigenfunctions.
double level_boundary_lambda(const Manifold& manifold, int p) {
    double cap = 16.0;
    while (true) {
        int count = 0;
        for (const EigLevel& lvl : manifold.levels_up_to(cap)) {
            count += lvl.multiplicity;
            if (count == p) return lvl.lambda;
            if (count > p)
                throw InvalidArgument("p splits an eigen-level");
        }
        cap *= 2.0;
    }
}

} // namespace

double counting_function(const Manifold& manifold, const Point& x, double lambda) {
    if (lambda < 0.0) throw InvalidArgument("counting_function: lambda must be >= 0");
    double sum = 0.0;
    for (const EigLevel& lvl : manifold.levels_up_to(lambda))
        sum += manifold.zonal_level_sum(lvl, x, x);
    return sum;
}

WeylBound weyl_bound(int m, double lambda, double epsilon, double kappa) {
    check_epsilon(epsilon);
    if (lambda < 0.0) throw InvalidArgument("weyl_bound: lambda must be >= 0");
    WeylBound out;
    out.bound = weyl_prefactor(m, epsilon) * std::pow(lambda, 0.5 * m);
    out.lambda_threshold = m * (m - 1.0) * (m - 1.0) * kappa / (6.0 * epsilon);
    return out;
}

double heat_diag(const Manifold& manifold, double t, const Point& x) {
    if (t <= 0.0) throw InvalidArgument("heat_diag: t must be > 0");
    return KernelSpec(manifold, Heat{t}, 1e-14).eval(x, x);
}

BoundReport heat_diag_bound(const Manifold& manifold, double t, const Point& x, double epsilon) {
    check_epsilon(epsilon);
    const int m = manifold.dim();
    const double kappa = manifold.curvature_upper();
    BoundReport report;
    report.epsilon = epsilon;
    report.measured = heat_diag(manifold, t, x);
    report.bound = (1.0 + epsilon) / std::pow(2.0 * kPi * t, 0.5 * m);
    report.margin = report.bound - report.measured;
    // Vacuous when kappa = 0 or m = 1.
    const bool cond = (kappa == 0.0 || m == 1)
                          ? true
                          : t <= 6.0 * epsilon / ((m - 1.0) * (m - 1.0) * kappa);
    report.conditions.push_back({"t <= 6 eps / ((m-1)^2 kappa)", cond});
    return report;
}

double heat_lower_bound(int m, double t, double k1, double r) {
    if (m < 3)
        throw OutOfValidity("heat_lower_bound: the comparison derivation requires m >= 3");
    if (t <= 0.0 || k1 < 0.0 || r < 0.0) throw InvalidArgument("heat_lower_bound: bad inputs");
    const double sinh_factor = std::pow(x_over_sinh(std::sqrt(k1) * r), (m - 1.0) / 2.0);
    return std::exp(-(m - 1.0) * (m - 1.0) * k1 * t / 8.0) * sinh_factor *
           std::exp(-r * r / (2.0 * t)) / std::pow(2.0 * kPi * t, 0.5 * m);
}

double heat_upper_offdiag(int m, double t, double k2, double r) {
    if (m < 3)
        throw OutOfValidity("heat_upper_offdiag: the comparison derivation requires m >= 3");
    if (t <= 0.0 || k2 <= 0.0 || r < 0.0) throw InvalidArgument("heat_upper_offdiag: bad inputs");
    if (r >= kPi / std::sqrt(k2))
        throw OutOfValidity("heat_upper_offdiag: r must be below pi / sqrt(K2)");
    const double sin_factor = std::pow(x_over_sin(std::sqrt(k2) * r), (m - 1.0) / 2.0);
    return std::exp((m - 1.0) * (m - 1.0) * k2 * t / 8.0) * sin_factor *
           std::exp(-r * r / (2.0 * t)) / std::pow(2.0 * kPi * t, 0.5 * m);
}

double heat_tail(const Manifold& manifold, double t, double lambda, const Point& x) {
    if (t <= 0.0) throw InvalidArgument("heat_tail: t must be > 0");
    (void)x; // level sums are x-independent on the built-ins
    const TailSum tail = KernelSpec(manifold, Heat{t}, 1e-14).diag_tail(lambda);
    return tail.value;
}

BoundReport heat_tail_report(const Manifold& manifold, double t, double lambda, const Point& x,
                             double epsilon) {
    check_epsilon(epsilon);
    const int m = manifold.dim();
    const double kappa = manifold.curvature_upper();
    BoundReport report;
    report.epsilon = epsilon;
    report.measured = heat_tail(manifold, t, lambda, x);
    report.bound =
        std::exp(-lambda * t / 2.0) * weyl_prefactor(m, epsilon) * std::pow(lambda, 0.5 * m);
    report.margin = report.bound - report.measured;
    const bool cond_t = (kappa == 0.0 || m == 1)
                            ? true
                            : t <= 6.0 * epsilon / ((m - 1.0) * (m - 1.0) * kappa);
    report.conditions.push_back({"t <= 6 eps / ((m-1)^2 kappa)", cond_t});
    report.conditions.push_back({"lambda >= m / t", lambda >= static_cast<double>(m) / t});
    return report;
}

ConcentrationResult empirical_gram_check(const Manifold& manifold, const KernelSpec& spec, int p,
                                         int n, int trials, double delta, std::uint64_t seed) {
    if (trials < 1) throw InvalidArgument("empirical_gram_check: trials must be >= 1");
    if (n < 1) throw InvalidArgument("empirical_gram_check: n must be >= 1");
    (void)spec; // G depends only on the eigenbasis, not on the filter values
    const double lambda_p = level_boundary_lambda(manifold, p);
    const double vol = manifold.volume();

    const TheoremInputs consts = assumption_constants(manifold, spec, p);
    ConcentrationResult out;
    out.trials = trials;
    out.threshold = 0.5;
    out.gate_n = static_cast<long>(std::ceil(7.0 * consts.k_p * std::log(p / delta)));

    std::vector<double> min_eigs(static_cast<std::size_t>(trials));
    int passes = 0;
    for (int trial = 0; trial < trials; ++trial) {
        const std::vector<Point> pts =
            manifold.sample_uniform(n, derive_seed(seed, static_cast<std::uint64_t>(trial)));
        Eigen::MatrixXd phi(n, p);
        for (int i = 0; i < n; ++i) {
            const std::vector<double> u = manifold.eval_eigenfunctions(pts[static_cast<std::size_t>(i)], lambda_p);
            for (int j = 0; j < p; ++j) phi(i, j) = u[static_cast<std::size_t>(j)];
        }
        // Second moment of the normalized basis vtilde = sqrt(vol) u.
        const Eigen::MatrixXd moment = (vol / n) * (phi.transpose() * phi);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(moment, Eigen::EigenvaluesOnly);
        const double min_eig = es.eigenvalues().minCoeff();
        min_eigs[static_cast<std::size_t>(trial)] = min_eig;
        if (min_eig >= out.threshold) ++passes;
    }
    out.pass_rate = static_cast<double>(passes) / trials;
    out.quantiles = quantiles_of(std::move(min_eigs));
    return out;
}

ConcentrationResult empirical_tail_check(const Manifold& manifold, const KernelSpec& spec, int p,
                                         int n, int trials, double delta, std::uint64_t seed) {
    if (trials < 1) throw InvalidArgument("empirical_tail_check: trials must be >= 1");
    if (n < 1) throw InvalidArgument("empirical_tail_check: n must be >= 1");
    if (spec.finite_rank())
        throw InvalidArgument("empirical_tail_check: needs a kernel with a nontrivial tail");
    const double lambda_p = level_boundary_lambda(manifold, p);
    const EigLevel first_tail = manifold.next_level_after(lambda_p);
    const TheoremInputs consts = assumption_constants(manifold, spec, p);
    const double t_p1 = consts.t_p1;

    // Truncate the tail basis at the first level whose remaining mass is
    // certified below 1e-10 of t_{p+1}.
    double lambda_hi = first_tail.lambda;
    while (spec.diag_tail_majorant(manifold.next_level_after(lambda_hi).lambda) >= 1e-10 * t_p1)
        lambda_hi = manifold.next_level_after(lambda_hi).lambda;

    const int b_lo = manifold.basis_size(lambda_p);
    const int b_hi = manifold.basis_size(lambda_hi);
    const int tail_dim = b_hi - b_lo;

    // sqrt(t_l) vtilde_l = sqrt(g(lambda_l)) u_l (the vol factors cancel).
    std::vector<double> scale(static_cast<std::size_t>(tail_dim));
    {
        int j = 0;
        for (const EigLevel& lvl : manifold.levels_up_to(lambda_hi)) {
            if (lvl.lambda <= lambda_p) continue;
            for (int k = 0; k < lvl.multiplicity; ++k, ++j)
                scale[static_cast<std::size_t>(j)] = std::sqrt(spec.g(lvl.lambda));
        }
    }

    ConcentrationResult out;
    out.trials = trials;
    out.threshold = 2.0 * t_p1;
    out.gate_n = static_cast<long>(std::ceil(
        3.0 * consts.r_p / t_p1 * std::log(2.0 * consts.trace_tail / (t_p1 * delta))));

    std::vector<double> norms(static_cast<std::size_t>(trials));
    int passes = 0;
    for (int trial = 0; trial < trials; ++trial) {
        const std::vector<Point> pts =
            manifold.sample_uniform(n, derive_seed(seed, static_cast<std::uint64_t>(trial)));
        Eigen::MatrixXd w(n, tail_dim);
        for (int i = 0; i < n; ++i) {
            const std::vector<double> u =
                manifold.eval_eigenfunctions(pts[static_cast<std::size_t>(i)], lambda_hi);
            for (int j = 0; j < tail_dim; ++j)
                w(i, j) = scale[static_cast<std::size_t>(j)] *
                          u[static_cast<std::size_t>(b_lo + j)];
        }
        const Eigen::MatrixXd moment = (w.transpose() * w) / static_cast<double>(n);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(moment, Eigen::EigenvaluesOnly);
        const double opnorm = es.eigenvalues().maxCoeff();
        norms[static_cast<std::size_t>(trial)] = opnorm;
        if (opnorm <= out.threshold) ++passes;
    }
    out.pass_rate = static_cast<double>(passes) / trials;
    out.quantiles = quantiles_of(std::move(norms));
    return out;
}

} // namespace mkreg
