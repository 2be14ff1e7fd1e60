#include "mkreg/regression.hpp"

#include "mkreg/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace mkreg {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kRcond = 1e-10;

// Eigenfunction matrix Phi(i, j) = u_j(X_i) for lambda_j <= lambda_max.
Eigen::MatrixXd feature_matrix(const Manifold& manifold, const std::vector<Point>& points,
                               double lambda_max) {
    const int cols = manifold.basis_size(lambda_max);
    Eigen::MatrixXd phi(static_cast<Eigen::Index>(points.size()), cols);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const std::vector<double> u = manifold.eval_eigenfunctions(points[i], lambda_max);
        for (int j = 0; j < cols; ++j) phi(static_cast<Eigen::Index>(i), j) = u[static_cast<std::size_t>(j)];
    }
    return phi;
}

void check_finite(const Eigen::VectorXd& v, const SolverDiagnostics& diag) {
    if (!v.allFinite())
        throw NumericalError("fit: solve produced non-finite weights (condition estimate " +
                             std::to_string(diag.condition_estimate) + ")");
}

// Dual weights for a finite-rank kernel via its feature map: K = Phi Phi^T.
// alpha = 0: a = K^+ Y = U S^{-2} U^T Y from the thin SVD Phi = U S V^T.
// alpha > 0: Woodbury, a = (Y - Phi w) / (n alpha) with
//            (n alpha I_p + Phi^T Phi) w = Phi^T Y.
Eigen::VectorXd solve_finite_rank(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y,
                                  double alpha, SolverDiagnostics& diag) {
    const auto n = phi.rows();
    if (alpha == 0.0) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(phi, Eigen::ComputeThinU);
        const Eigen::VectorXd& s = svd.singularValues();
        const double cutoff = kRcond * s(0);
        Eigen::VectorXd scaled = svd.matrixU().transpose() * y;
        int rank = 0;
        double smin = s(0);
        for (Eigen::Index k = 0; k < s.size(); ++k) {
            if (s(k) > cutoff && s(k) > 0.0) {
                scaled(k) /= s(k) * s(k);
                smin = s(k);
                ++rank;
            } else {
                scaled(k) = 0.0;
            }
        }
        diag.effective_rank = rank;
        diag.condition_estimate = (s(0) * s(0)) / (smin * smin);
        diag.used_pseudoinverse = true;
        return svd.matrixU() * scaled;
    }
    const Eigen::MatrixXd gram_small =
        phi.transpose() * phi +
        static_cast<double>(n) * alpha * Eigen::MatrixXd::Identity(phi.cols(), phi.cols());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram_small, Eigen::EigenvaluesOnly);
    diag.effective_rank = static_cast<int>(phi.cols());
    diag.condition_estimate = es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
    const Eigen::VectorXd w = gram_small.llt().solve(phi.transpose() * y);
    return (y - phi * w) / (static_cast<double>(n) * alpha);
}

Eigen::VectorXd solve_dense(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y, double alpha,
                            SolverDiagnostics& diag) {
    const auto n = gram.rows();
    if (alpha == 0.0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
        const Eigen::VectorXd& ev = es.eigenvalues(); // ascending
        const double emax = ev(n - 1);
        const double cutoff = kRcond * emax;
        Eigen::VectorXd scaled = es.eigenvectors().transpose() * y;
        int rank = 0;
        double emin = emax;
        for (Eigen::Index k = 0; k < n; ++k) {
            if (ev(k) > cutoff && ev(k) > 0.0) {
                scaled(k) /= ev(k);
                emin = std::min(emin, ev(k));
                ++rank;
            } else {
                scaled(k) = 0.0;
            }
        }
        diag.effective_rank = rank;
        diag.condition_estimate = emax / emin;
        diag.used_pseudoinverse = true;
        return es.eigenvectors() * scaled;
    }
    const Eigen::MatrixXd m =
        gram + static_cast<double>(n) * alpha * Eigen::MatrixXd::Identity(n, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    diag.effective_rank = static_cast<int>(n);
    diag.condition_estimate = es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
    Eigen::VectorXd a = m.llt().solve(y);
    const double ynorm = y.norm();
    diag.residual_rel = ynorm > 0.0 ? (m * a - y).norm() / ynorm : 0.0;
    return a;
}

} // namespace

FitResult fit(const KernelSpec& spec, const Samples& samples, double alpha) {
    if (alpha < 0.0) throw InvalidArgument("fit: alpha must be >= 0");
    const auto n = static_cast<Eigen::Index>(samples.points.size());
    if (n < 1 || samples.responses.size() != n)
        throw InvalidArgument("fit: need n >= 1 points with matching responses");

    SolverDiagnostics diag;
    Eigen::VectorXd a;
    if (spec.finite_rank()) {
        const Eigen::MatrixXd phi =
            feature_matrix(spec.manifold(), samples.points, spec.band_lambda_cap());
        a = solve_finite_rank(phi, samples.responses, alpha, diag);
    } else {
        a = solve_dense(spec.gram(samples.points), samples.responses, alpha, diag);
    }
    check_finite(a, diag);
    return FitResult{spec, samples.points, std::move(a), alpha, diag};
}

double predict(const FitResult& fit, const Point& x) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < fit.weights.size(); ++i)
        s += fit.weights(i) * fit.spec.eval(x, fit.points[static_cast<std::size_t>(i)]);
    return s;
}

ExpandResult spectral_expand(const FitResult& fit, double lambda_max) {
    if (lambda_max < 0.0) throw InvalidArgument("spectral_expand: lambda_max must be >= 0");
    const Manifold& manifold = fit.spec.manifold();
    const Eigen::MatrixXd phi = feature_matrix(manifold, fit.points, lambda_max);
    Eigen::VectorXd c = phi.transpose() * fit.weights;
    const std::vector<EigLevel> levels = manifold.levels_up_to(lambda_max);
    Eigen::Index j = 0;
    for (const EigLevel& lvl : levels) {
        const double gl = fit.spec.g(lvl.lambda);
        for (int k = 0; k < lvl.multiplicity; ++k, ++j) c(j) *= gl;
    }

    ExpandResult out{
        SpectralCoeffs{manifold, lambda_max, std::vector<double>(c.data(), c.data() + c.size())},
        0.0};
    // L2 mass of the fit above lambda_max: each tail coefficient is
    // g(lambda) sum_i a_i u(X_i), so by Cauchy-Schwarz the tail norm is at
    // most sum_i |a_i| * sqrt(sum_tail g^2 u^2(X_i)), and the inner sum is
    // level-wise g^2 mult/vol on a homogeneous space.
    if (fit.spec.band_lambda_cap() > lambda_max) {
        const EigLevel next = manifold.next_level_after(lambda_max);
        const TailSum sq = fit.spec.diag_tail_sq(next.lambda);
        out.tail_l2_bound =
            fit.weights.cwiseAbs().sum() * std::sqrt(sq.value + sq.neglected_bound);
    }
    return out;
}

L2ErrorResult l2_error(const FitResult& fit, const SpectralCoeffs& truth, double lambda_max) {
    const ExpandResult exp = spectral_expand(fit, lambda_max);
    const std::vector<double>& chat = exp.coeffs.values;
    const std::vector<double>& ctrue = truth.values;
    const std::size_t fit_basis = chat.size();
    const std::size_t truth_basis = ctrue.size();
    // Truth coefficients are known exactly; compare up to lambda_max and
    // account for the truth's own mass above lambda_max in the slack.
    const std::size_t common = fit.spec.manifold().basis_size(std::min(lambda_max, truth.lambda_max));
    double sum = 0.0;
    for (std::size_t j = 0; j < fit_basis; ++j) {
        const double diff = chat[j] - (j < common && j < truth_basis ? ctrue[j] : 0.0);
        sum += diff * diff;
    }
    double truth_tail = 0.0;
    for (std::size_t j = common; j < truth_basis; ++j) truth_tail += ctrue[j] * ctrue[j];
    return L2ErrorResult{std::sqrt(sum), exp.tail_l2_bound + std::sqrt(truth_tail)};
}

RkhsBoundReport bound_rkhs(const TheoremInputs& in, bool noisy) {
    if (!(in.delta > 0.0 && in.delta < 1.0))
        throw InvalidArgument("bound_rkhs: delta must be in (0, 1)");
    RkhsBoundReport report;

    double f_norm = 0.0;
    if (in.alpha > 0.0 || in.t_p1 > 0.0) {
        if (!in.f_norm_h)
            throw InvalidArgument("bound_rkhs: |f*|_H required when the bias term is nonzero");
        f_norm = *in.f_norm_h;
    }
    report.bias = (std::sqrt(2.0 * in.alpha) + 6.0 * std::sqrt(in.t_p1)) * f_norm;

    if (noisy) {
        report.noise = 4.0 * (1.0 + std::sqrt(in.gamma) / 8.0) *
                       (std::sqrt(static_cast<double>(in.p)) +
                        2.0 * std::sqrt(std::log(4.0 / in.delta))) /
                       std::sqrt(static_cast<double>(in.n)) * in.sigma;
    }
    report.total = report.bias + report.noise;

    const double gate_n = std::max(7.0, 3.0 * in.gamma_prime) * in.k_p *
                          std::log(std::max(2.0, 4.0 * in.gamma) * in.p / in.delta);
    report.conditions.push_back(
        {"n >= (7 v 3 gamma') K_p log((2 v 4 gamma) p / delta)", static_cast<double>(in.n) >= gate_n});
    if (noisy) {
        report.conditions.push_back({"alpha >= 54 t_{p+1}", in.alpha >= 54.0 * in.t_p1});
        // The n/log^2 n condition carries an unspecified universal constant;
        // recorded as advisory, never enforced.
        report.conditions.push_back({"advisory: n/log^2 n vs C (1 v gamma') (K_p/p) (psi1/sigma)^2",
                                     true});
    }
    return report;
}

double bl_dimension(const Manifold& manifold, double omega) {
    if (omega <= 0.0) throw InvalidArgument("bl_dimension: omega must be > 0");
    const int m = manifold.dim();
    return 3.0 * std::sqrt(static_cast<double>(m)) * unit_ball_volume(m) /
           std::pow(2.0 * kPi, m) * manifold.volume() * std::pow(omega, m);
}

TheoremInputs assumption_constants(const Manifold& manifold, const KernelSpec& spec, int p) {
    if (p < 1) throw InvalidArgument("assumption_constants: p must be >= 1");
    // Find the level boundary: p must equal a cumulative multiplicity.
    double lambda_p = -1.0;
    {
        int count = 0;
        double cap = 16.0;
        while (true) {
            const std::vector<EigLevel> levels = manifold.levels_up_to(cap);
            count = 0;
            bool found = false;
            for (const EigLevel& lvl : levels) {
                count += lvl.multiplicity;
                if (count == p) {
                    lambda_p = lvl.lambda;
                    found = true;
                    break;
                }
                if (count > p)
                    throw InvalidArgument("assumption_constants: p splits an eigen-level "
                                          "(the within-level basis is convention-dependent)");
            }
            if (found) break;
            if (count > p) break;
            cap *= 2.0;
        }
        if (lambda_p < 0.0)
            throw InvalidArgument("assumption_constants: p splits an eigen-level");
    }

    TheoremInputs out;
    out.p = p;
    out.volume = manifold.volume();
    const EigLevel next = manifold.next_level_after(lambda_p);
    out.t_p1 = spec.g(next.lambda) / manifold.volume();

    // K_p = vol * N_x(lambda_p); level sums are x-independent on the built-ins.
    double nx = 0.0;
    const Point ref = manifold.sample_uniform(1, 0x9d5ad5fULL)[0];
    for (const EigLevel& lvl : manifold.levels_up_to(lambda_p))
        nx += manifold.zonal_level_sum(lvl, ref, ref);
    out.k_p = manifold.volume() * nx;

    if (out.t_p1 == 0.0) {
        out.r_p = 0.0;
        out.trace_tail = 0.0;
        out.gamma = 0.0;
        out.gamma_prime = 0.0;
        return out;
    }
    const TailSum tail = spec.diag_tail(next.lambda);
    // R_p = sup_x sum_tail t_l vtilde_l^2(x) = sum_tail g(lambda_l) u_l^2(x);
    // on a homogeneous space this equals tr T_{G_perp} = sum_tail g mult / vol.
    out.r_p = tail.value + tail.neglected_bound;
    out.trace_tail = tail.value + tail.neglected_bound;
    out.gamma = out.trace_tail / (out.t_p1 * p);
    out.gamma_prime = out.r_p / (out.t_p1 * out.k_p);
    return out;
}

} // namespace mkreg
