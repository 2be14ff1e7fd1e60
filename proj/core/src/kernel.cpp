#include "mkreg/kernel.hpp"

#include "mkreg/errors.hpp"

#include <cmath>
#include <limits>

namespace mkreg {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Nonasymptotic Weyl constant at epsilon = 1/2: N_x(lambda) <= W_m lambda^{m/2}.
double weyl_constant(int m) {
    return 2.0 * 1.5 * std::sqrt(static_cast<double>(m)) / std::pow(2.0 * kPi, m) *
           unit_ball_volume(m);
}

} // namespace

double SpectralCoeffs::norm_sq() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return s;
}

double eval_spectral(const SpectralCoeffs& coeffs, const Point& x) {
    const std::vector<double> u = coeffs.manifold.eval_eigenfunctions(x, coeffs.lambda_max);
    if (u.size() != coeffs.values.size())
        throw InvalidArgument("eval_spectral: coefficient vector does not match basis size");
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += coeffs.values[i] * u[i];
    return s;
}

KernelSpec::KernelSpec(Manifold manifold, KernelFamily family, double tail_tol)
    : manifold_(std::move(manifold)), family_(family), tail_tol_(tail_tol) {
    if (tail_tol_ <= 0.0) throw InvalidArgument("KernelSpec: tail tolerance must be > 0");
    if (const auto* bl = std::get_if<Bandlimited>(&family_)) {
        if (bl->omega <= 0.0) throw InvalidArgument("KernelSpec: bandlimit must be > 0");
    } else if (const auto* h = std::get_if<Heat>(&family_)) {
        if (h->t <= 0.0) throw InvalidArgument("KernelSpec: heat time must be > 0");
    } else if (const auto* s = std::get_if<Sobolev>(&family_)) {
        if (s->s <= 0.5 * manifold_.dim())
            throw InvalidArgument("KernelSpec: Sobolev order must exceed m/2 for a "
                                  "summable diagonal");
    }
}

double KernelSpec::g(double lambda) const {
    return std::visit(
        [&](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Bandlimited>) {
                return lambda <= f.omega * f.omega ? 1.0 : 0.0;
            } else if constexpr (std::is_same_v<T, Heat>) {
                return std::exp(-lambda * f.t / 2.0);
            } else {
                return std::pow(1.0 + lambda, -f.s);
            }
        },
        family_);
}

bool KernelSpec::finite_rank() const { return std::holds_alternative<Bandlimited>(family_); }

double KernelSpec::band_lambda_cap() const {
    if (const auto* bl = std::get_if<Bandlimited>(&family_)) return bl->omega * bl->omega;
    return kInf;
}

namespace {

// Tail majorant for sum_{lambda_l >= lambda0} e^{-lambda_l t/2} u_l^2(x).
// For any split c in (0,1) with c t inside the curvature gate of the heat
// diagonal bound, the tail is at most e^{-(1-c) lambda0 t/2} (1+eps)/(2 pi c t)^{m/2}
// (eps = 1/2).
double heat_tail_majorant(int m, double kappa, double t, double lambda0) {
    double c = 0.5;
    if (m > 1 && kappa > 0.0) {
        const double gate = 3.0 / ((m - 1.0) * (m - 1.0) * kappa * t);
        c = std::min(c, gate);
    }
    return std::exp(-(1.0 - c) * lambda0 * t / 2.0) * 1.5 / std::pow(2.0 * kPi * c * t, 0.5 * m);
}

// Integral-comparison majorant for sum_{lambda_l >= lambda0} (1+lambda_l)^{-s} u_l^2(x),
// valid once lambda0 clears the Weyl validity threshold.
double sobolev_tail_majorant(int m, double kappa, double s, double lambda0) {
    const double threshold = m * (m - 1.0) * (m - 1.0) * kappa / 3.0;
    if (lambda0 < threshold || lambda0 <= 0.0) return kInf;
    return s * weyl_constant(m) * std::pow(1.0 + lambda0, 0.5 * m - s) / (s - 0.5 * m);
}

} // namespace

double KernelSpec::diag_tail_majorant(double lambda0) const {
    const int m = manifold_.dim();
    const double kappa = manifold_.curvature_upper();
    return std::visit(
        [&](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Bandlimited>) {
                return lambda0 > f.omega * f.omega ? 0.0 : kInf;
            } else if constexpr (std::is_same_v<T, Heat>) {
                return heat_tail_majorant(m, kappa, f.t, lambda0);
            } else {
                return sobolev_tail_majorant(m, kappa, f.s, lambda0);
            }
        },
        family_);
}

namespace {

// Walk eigen-levels in ascending lambda starting at lambda >= lambda_lo,
// calling visit(level). After each level, stop(next_lambda) may end the walk;
// its return is the certified bound on what was left out.
template <typename Visit, typename Stop>
double walk_levels(const Manifold& manifold, double lambda_lo, Visit&& visit, Stop&& stop) {
    double cap = std::max(16.0, 2.0 * lambda_lo + 16.0);
    std::vector<EigLevel> levels = manifold.levels_up_to(cap);
    std::size_t i = 0;
    while (i < levels.size() && levels[i].lambda < lambda_lo) ++i;
    for (int guard = 0; guard < 1000000; ++guard) {
        while (i + 1 >= levels.size()) {
            cap *= 2.0;
            levels = manifold.levels_up_to(cap);
        }
        visit(levels[i]);
        const double next_lambda = levels[i + 1].lambda;
        const double left_out = stop(next_lambda);
        if (left_out >= 0.0) return left_out;
        ++i;
    }
    throw NumericalError("walk_levels: series truncation certificate never reached");
}

} // namespace

double KernelSpec::eval(const Point& x, const Point& y) const {
    if (finite_rank()) {
        double sum = 0.0;
        for (const EigLevel& lvl : manifold_.levels_up_to(band_lambda_cap()))
            sum += manifold_.zonal_level_sum(lvl, x, y);
        return sum;
    }
    // Off-diagonal level sums obey |sum u(x)u(y)| <= mult/vol (Cauchy-Schwarz
    // on the homogeneous diagonal), so the diagonal tail majorant certifies
    // the truncation here too. The absolute floor 1/vol keeps the stop rule
    // meaningful when cancellation drives the partial sum toward zero.
    double partial = 0.0;
    const double floor = 1.0 / manifold_.volume();
    walk_levels(
        manifold_, 0.0,
        [&](const EigLevel& lvl) { partial += g(lvl.lambda) * manifold_.zonal_level_sum(lvl, x, y); },
        [&](double next_lambda) -> double {
            const double maj = diag_tail_majorant(next_lambda);
            if (maj < tail_tol_ * std::max(std::fabs(partial), floor)) return maj;
            return -1.0;
        });
    return partial;
}

Eigen::MatrixXd KernelSpec::gram(const std::vector<Point>& points) const {
    const auto n = static_cast<Eigen::Index>(points.size());
    if (n < 1) throw InvalidArgument("gram: need at least one point");
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            const double v = eval(points[static_cast<std::size_t>(i)],
                                  points[static_cast<std::size_t>(j)]);
            K(i, j) = v;
            K(j, i) = v;
        }
    return K;
}

namespace {

template <typename G, typename Majorant>
TailSum certified_tail(const Manifold& manifold, double lambda0, G&& g_of, Majorant&& majorant) {
    TailSum out;
    const double vol = manifold.volume();
    out.neglected_bound = walk_levels(
        manifold, lambda0,
        [&](const EigLevel& lvl) { out.value += g_of(lvl.lambda) * lvl.multiplicity / vol; },
        [&](double next_lambda) -> double {
            const double maj = majorant(next_lambda);
            if (maj <= 1e-15 * out.value || maj < 1e-300) return maj;
            return -1.0;
        });
    return out;
}

} // namespace

TailSum KernelSpec::diag_tail(double lambda0) const {
    if (finite_rank()) {
        TailSum out;
        const double cap = band_lambda_cap();
        const double vol = manifold_.volume();
        for (const EigLevel& lvl : manifold_.levels_up_to(cap))
            if (lvl.lambda >= lambda0) out.value += lvl.multiplicity / vol;
        return out;
    }
    return certified_tail(
        manifold_, lambda0, [&](double lam) { return g(lam); },
        [&](double lam) { return diag_tail_majorant(lam); });
}

TailSum KernelSpec::diag_tail_sq(double lambda0) const {
    const int m = manifold_.dim();
    const double kappa = manifold_.curvature_upper();
    if (finite_rank()) return diag_tail(lambda0); // g^2 = g for an indicator filter
    if (const auto* h = std::get_if<Heat>(&family_)) {
        const double t2 = 2.0 * h->t;
        return certified_tail(
            manifold_, lambda0, [&](double lam) { return std::exp(-lam * t2 / 2.0); },
            [&](double lam) { return heat_tail_majorant(m, kappa, t2, lam); });
    }
    const double s2 = 2.0 * std::get<Sobolev>(family_).s;
    return certified_tail(
        manifold_, lambda0, [&](double lam) { return std::pow(1.0 + lam, -s2); },
        [&](double lam) { return sobolev_tail_majorant(m, kappa, s2, lam); });
}

double rkhs_norm_sq(const KernelSpec& spec, const SpectralCoeffs& coeffs) {
    if (!(coeffs.manifold == spec.manifold()))
        throw InvalidArgument("rkhs_norm_sq: coefficients and kernel live on different manifolds");
    const std::vector<EigLevel> levels = spec.manifold().levels_up_to(coeffs.lambda_max);
    double sum = 0.0;
    std::size_t j = 0;
    for (const EigLevel& lvl : levels) {
        const double gl = spec.g(lvl.lambda);
        for (int k = 0; k < lvl.multiplicity; ++k, ++j) {
            if (j >= coeffs.values.size())
                throw InvalidArgument("rkhs_norm_sq: coefficient vector shorter than basis");
            const double c = coeffs.values[j];
            if (c == 0.0) continue;
            if (gl == 0.0)
                throw NotInRkhs("rkhs_norm_sq: nonzero coefficient outside the bandlimit");
            sum += c * c / gl;
        }
    }
    if (j != coeffs.values.size())
        throw InvalidArgument("rkhs_norm_sq: coefficient vector longer than basis");
    return sum;
}

} // namespace mkreg
