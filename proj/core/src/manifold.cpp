#include "mkreg/manifold.hpp"

#include "mkreg/errors.hpp"
#include "mkreg/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace mkreg {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kUnitNormTol = 1e-12;

double wrap_angle(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    return t;
}

// Angular separation reduced to [0, pi].
double wrapped_delta(double a, double b) {
    double d = std::fabs(std::fmod(a - b, kTwoPi));
    if (d > kPi) d = kTwoPi - d;
    return d;
}

// Circle level sum at angular separation d: 1/(2pi) for l = 0, cos(l d)/pi else.
double circle_zonal(int l, double d) {
    if (l == 0) return 1.0 / kTwoPi;
    return std::cos(static_cast<double>(l) * d) / kPi;
}

// Nonnegative integer vectors n with |n|^2 == lambda, m components, sorted
// lexicographically.
void nonneg_shell_vectors(int m, int lambda, std::vector<std::array<int, 4>>& out) {
    out.clear();
    std::array<int, 4> cur{};
    const int nmax = static_cast<int>(std::floor(std::sqrt(static_cast<double>(lambda)) + 0.5));
    // Recursive lexicographic enumeration.
    auto rec = [&](auto&& self, int axis, int remaining) -> void {
        if (axis == m) {
            if (remaining == 0) out.push_back(cur);
            return;
        }
        for (int v = 0; v <= nmax && v * v <= remaining; ++v) {
            cur[axis] = v;
            self(self, axis + 1, remaining - v * v);
        }
        cur[axis] = 0;
    };
    rec(rec, 0, lambda);
}

// Multiplicity of the torus level lambda (count of k in Z^m with |k|^2 = lambda):
// each nonnegative representative with z nonzero entries stands for 2^z vectors.
int torus_multiplicity(int m, int lambda) {
    std::vector<std::array<int, 4>> reps;
    nonneg_shell_vectors(m, lambda, reps);
    int count = 0;
    for (const auto& n : reps) {
        int nz = 0;
        for (int i = 0; i < m; ++i)
            if (n[i] != 0) ++nz;
        count += 1 << nz;
    }
    return count;
}

// Associated Legendre P_l^m(x) for all l in [m, lmax], no Condon-Shortley
// phase, unnormalized. out[l - m] = P_l^m(x).
void assoc_legendre_column(int m, int lmax, double x, std::vector<double>& out) {
    out.assign(static_cast<std::size_t>(lmax - m + 1), 0.0);
    const double somx2 = std::sqrt(std::max(0.0, 1.0 - x * x));
    double pmm = 1.0;
    for (int i = 1; i <= m; ++i) pmm *= (2.0 * i - 1.0) * somx2;
    out[0] = pmm;
    if (lmax == m) return;
    double pmmp1 = x * (2.0 * m + 1.0) * pmm;
    out[1] = pmmp1;
    for (int l = m + 2; l <= lmax; ++l) {
        const double p = (x * (2.0 * l - 1.0) * pmmp1 - (l + m - 1.0) * pmm) / (l - m);
        pmm = pmmp1;
        pmmp1 = p;
        out[static_cast<std::size_t>(l - m)] = p;
    }
}

double factorial_d(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// Real spherical harmonics Y_{l,m} at the unit 3-vector u, m = -l..l.
// Polar axis is u[2], azimuth atan2(u[1], u[0]).
void real_sph_harm(int l, const double* u, std::vector<double>& out) {
    out.assign(static_cast<std::size_t>(2 * l + 1), 0.0);
    const double ct = std::clamp(u[2], -1.0, 1.0);
    const double phi = std::atan2(u[1], u[0]);
    std::vector<double> col;
    for (int m = 0; m <= l; ++m) {
        assoc_legendre_column(m, l, ct, col);
        const double plm = col[static_cast<std::size_t>(l - m)];
        const double norm =
            std::sqrt((2.0 * l + 1.0) / (4.0 * kPi) * factorial_d(l - m) / factorial_d(l + m));
        if (m == 0) {
            out[static_cast<std::size_t>(l)] = norm * plm;
        } else {
            const double base = std::sqrt(2.0) * norm * plm;
            out[static_cast<std::size_t>(l + m)] = base * std::cos(m * phi);
            out[static_cast<std::size_t>(l - m)] = base * std::sin(m * phi);
        }
    }
}

// Gegenbauer C_n^{(alpha)}(x) by upward recurrence.
double gegenbauer_c(int n, double alpha, double x) {
    if (n == 0) return 1.0;
    double cm1 = 1.0;
    double c0 = 2.0 * alpha * x;
    for (int k = 2; k <= n; ++k) {
        const double c = (2.0 * x * (k + alpha - 1.0) * c0 - (k + 2.0 * alpha - 2.0) * cm1) / k;
        cm1 = c0;
        c0 = c;
    }
    return c0;
}

// Normalization for the S^3 hyperspherical harmonics (see manifold.hpp).
double s3_norm(int l, int L) {
    return std::pow(2.0, L) * factorial_d(L) *
           std::sqrt(2.0 * (l + 1.0) * factorial_d(l - L) / (kPi * factorial_d(l + L + 1)));
}

} // namespace

Point::Point(std::initializer_list<double> coords) {
    if (coords.size() > 4) throw InvalidArgument("Point: more than 4 coordinates");
    size_ = coords.size();
    std::size_t i = 0;
    for (double v : coords) c_[i++] = v;
}

Point Point::with_size(std::size_t n) {
    Point p;
    p.size_ = n;
    return p;
}

Manifold::Manifold(ManifoldKind kind, int dim, double volume, double kappa, double ricci_k1)
    : kind_(kind), dim_(dim), volume_(volume), kappa_(kappa), ricci_k1_(ricci_k1) {}

Manifold Manifold::circle() {
    return Manifold(ManifoldKind::Circle, 1, kTwoPi, 0.0, 0.0);
}

Manifold Manifold::torus(int m) {
    if (m < 1 || m > 4)
        throw InvalidArgument("Manifold::torus: dimension must be in [1, 4] "
                              "(lattice-shell enumeration is exact there)");
    return Manifold(ManifoldKind::Torus, m, std::pow(kTwoPi, m), 0.0, 0.0);
}

Manifold Manifold::sphere2() {
    return Manifold(ManifoldKind::Sphere2, 2, 4.0 * kPi, 1.0, 0.0);
}

Manifold Manifold::sphere3() {
    return Manifold(ManifoldKind::Sphere3, 3, 2.0 * kPi * kPi, 1.0, 0.0);
}

Point Manifold::point(std::initializer_list<double> coords) const {
    return canonicalize(Point(coords));
}

Point Manifold::canonicalize(Point p) const {
    switch (kind_) {
    case ManifoldKind::Circle:
    case ManifoldKind::Torus: {
        if (static_cast<int>(p.size()) != dim_)
            throw InvalidArgument("point: expected " + std::to_string(dim_) + " angle(s)");
        for (int i = 0; i < dim_; ++i) p[i] = wrap_angle(p[i]);
        return p;
    }
    case ManifoldKind::Sphere2:
    case ManifoldKind::Sphere3: {
        const std::size_t n = (kind_ == ManifoldKind::Sphere2) ? 3 : 4;
        if (p.size() != n)
            throw InvalidArgument("point: expected " + std::to_string(n) + " ambient coordinates");
        double norm2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) norm2 += p[i] * p[i];
        const double norm = std::sqrt(norm2);
        if (std::fabs(norm - 1.0) > kUnitNormTol)
            throw InvalidArgument("point: sphere coordinate is not unit-norm");
        for (std::size_t i = 0; i < n; ++i) p[i] /= norm;
        return p;
    }
    }
    throw InvalidArgument("point: unknown manifold kind");
}

std::vector<EigLevel> Manifold::levels_up_to(double lambda_max) const {
    if (lambda_max < 0.0) throw InvalidArgument("levels_up_to: lambda_max must be >= 0");
    std::vector<EigLevel> levels;
    switch (kind_) {
    case ManifoldKind::Circle: {
        for (int l = 0; static_cast<double>(l) * l <= lambda_max; ++l)
            levels.push_back({l, static_cast<double>(l) * l, l == 0 ? 1 : 2});
        break;
    }
    case ManifoldKind::Torus: {
        const int lmax = static_cast<int>(std::floor(lambda_max));
        int index = 0;
        for (int lam = 0; lam <= lmax; ++lam) {
            const int mult = torus_multiplicity(dim_, lam);
            if (mult > 0) levels.push_back({index++, static_cast<double>(lam), mult});
        }
        break;
    }
    case ManifoldKind::Sphere2: {
        for (int l = 0; static_cast<double>(l) * (l + 1) <= lambda_max; ++l)
            levels.push_back({l, static_cast<double>(l) * (l + 1), 2 * l + 1});
        break;
    }
    case ManifoldKind::Sphere3: {
        for (int l = 0; static_cast<double>(l) * (l + 2) <= lambda_max; ++l)
            levels.push_back({l, static_cast<double>(l) * (l + 2), (l + 1) * (l + 1)});
        break;
    }
    }
    return levels;
}

EigLevel Manifold::next_level_after(double lambda_max) const {
    switch (kind_) {
    case ManifoldKind::Circle: {
        int l = 0;
        while (static_cast<double>(l) * l <= lambda_max) ++l;
        return {l, static_cast<double>(l) * l, 2};
    }
    case ManifoldKind::Torus: {
        int lam = static_cast<int>(std::floor(lambda_max)) + 1;
        if (lam < 1) lam = 1;
        int index = 0;
        for (int v = 0; v < lam; ++v)
            if (torus_multiplicity(dim_, v) > 0) ++index;
        while (true) {
            const int mult = torus_multiplicity(dim_, lam);
            if (mult > 0) return {index, static_cast<double>(lam), mult};
            ++lam;
        }
    }
    case ManifoldKind::Sphere2: {
        int l = 0;
        while (static_cast<double>(l) * (l + 1) <= lambda_max) ++l;
        return {l, static_cast<double>(l) * (l + 1), 2 * l + 1};
    }
    case ManifoldKind::Sphere3: {
        int l = 0;
        while (static_cast<double>(l) * (l + 2) <= lambda_max) ++l;
        return {l, static_cast<double>(l) * (l + 2), (l + 1) * (l + 1)};
    }
    }
    throw InvalidArgument("next_level_after: unknown manifold kind");
}

int Manifold::basis_size(double lambda_max) const {
    int n = 0;
    for (const auto& lvl : levels_up_to(lambda_max)) n += lvl.multiplicity;
    return n;
}

std::vector<double> Manifold::eval_eigenfunctions(const Point& x_in, double lambda_max) const {
    const Point x = canonicalize(x_in);
    std::vector<double> values;
    switch (kind_) {
    case ManifoldKind::Circle: {
        values.push_back(1.0 / std::sqrt(kTwoPi));
        const double inv_sqrt_pi = 1.0 / std::sqrt(kPi);
        for (int l = 1; static_cast<double>(l) * l <= lambda_max; ++l) {
            values.push_back(std::cos(l * x[0]) * inv_sqrt_pi);
            values.push_back(std::sin(l * x[0]) * inv_sqrt_pi);
        }
        break;
    }
    case ManifoldKind::Torus: {
        const int m = dim_;
        const double c0 = 1.0 / std::sqrt(kTwoPi);
        const double c1 = 1.0 / std::sqrt(kPi);
        std::vector<std::array<int, 4>> reps;
        for (const auto& lvl : levels_up_to(lambda_max)) {
            nonneg_shell_vectors(m, static_cast<int>(lvl.lambda), reps);
            for (const auto& n : reps) {
                std::vector<int> active;
                for (int i = 0; i < m; ++i)
                    if (n[i] != 0) active.push_back(i);
                const int patterns = 1 << active.size();
                for (int pat = 0; pat < patterns; ++pat) {
                    double v = 1.0;
                    for (int i = 0; i < m; ++i) {
                        if (n[i] == 0) {
                            v *= c0;
                        } else {
                            // Bit for this axis: 0 = cos, 1 = sin; earliest
                            // active axis is the most significant bit.
                            int bitpos = 0;
                            for (std::size_t a = 0; a < active.size(); ++a)
                                if (active[a] == i)
                                    bitpos = static_cast<int>(active.size() - 1 - a);
                            const bool use_sin = (pat >> bitpos) & 1;
                            const double arg = n[i] * x[i];
                            v *= (use_sin ? std::sin(arg) : std::cos(arg)) * c1;
                        }
                    }
                    values.push_back(v);
                }
            }
        }
        break;
    }
    case ManifoldKind::Sphere2: {
        std::vector<double> harm;
        for (int l = 0; static_cast<double>(l) * (l + 1) <= lambda_max; ++l) {
            const double u[3] = {x[0], x[1], x[2]};
            real_sph_harm(l, u, harm);
            values.insert(values.end(), harm.begin(), harm.end());
        }
        break;
    }
    case ManifoldKind::Sphere3: {
        const double cchi = std::clamp(x[0], -1.0, 1.0);
        const double schi = std::sqrt(std::max(0.0, 1.0 - cchi * cchi));
        double dir[3] = {0.0, 0.0, 1.0};
        if (schi > 1e-15) {
            dir[0] = x[1] / schi;
            dir[1] = x[2] / schi;
            dir[2] = x[3] / schi;
        }
        std::vector<double> harm;
        for (int l = 0; static_cast<double>(l) * (l + 2) <= lambda_max; ++l) {
            for (int L = 0; L <= l; ++L) {
                const double radial = s3_norm(l, L) * std::pow(schi, L) *
                                      gegenbauer_c(l - L, L + 1.0, cchi);
                real_sph_harm(L, dir, harm);
                for (double h : harm) values.push_back(radial * h);
            }
        }
        break;
    }
    }
    return values;
}

double Manifold::zonal_level_sum(const EigLevel& level, const Point& x_in, const Point& y_in) const {
    const Point x = canonicalize(x_in);
    const Point y = canonicalize(y_in);
    switch (kind_) {
    case ManifoldKind::Circle:
        return circle_zonal(level.index, wrapped_delta(x[0], y[0]));
    case ManifoldKind::Torus: {
        std::vector<std::array<int, 4>> reps;
        nonneg_shell_vectors(dim_, static_cast<int>(level.lambda), reps);
        double sum = 0.0;
        for (const auto& n : reps) {
            double prod = 1.0;
            for (int i = 0; i < dim_; ++i) prod *= circle_zonal(n[i], wrapped_delta(x[i], y[i]));
            sum += prod;
        }
        return sum;
    }
    case ManifoldKind::Sphere2: {
        const double c = std::clamp(x[0] * y[0] + x[1] * y[1] + x[2] * y[2], -1.0, 1.0);
        const int l = level.index;
        return (2.0 * l + 1.0) / (4.0 * kPi) * legendre_p(l, c);
    }
    case ManifoldKind::Sphere3: {
        const double c =
            std::clamp(x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3], -1.0, 1.0);
        const int l = level.index;
        return (l + 1.0) / (2.0 * kPi * kPi) * chebyshev_u(l, c);
    }
    }
    throw InvalidArgument("zonal_level_sum: unknown manifold kind");
}

double Manifold::geodesic_distance(const Point& x_in, const Point& y_in) const {
    const Point x = canonicalize(x_in);
    const Point y = canonicalize(y_in);
    switch (kind_) {
    case ManifoldKind::Circle:
        return wrapped_delta(x[0], y[0]);
    case ManifoldKind::Torus: {
        double s = 0.0;
        for (int i = 0; i < dim_; ++i) {
            const double d = wrapped_delta(x[i], y[i]);
            s += d * d;
        }
        return std::sqrt(s);
    }
    case ManifoldKind::Sphere2: {
        const double c = std::clamp(x[0] * y[0] + x[1] * y[1] + x[2] * y[2], -1.0, 1.0);
        return std::acos(c);
    }
    case ManifoldKind::Sphere3: {
        const double c =
            std::clamp(x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3], -1.0, 1.0);
        return std::acos(c);
    }
    }
    throw InvalidArgument("geodesic_distance: unknown manifold kind");
}

std::vector<Point> Manifold::sample_uniform(int n, std::uint64_t seed) const {
    if (n < 1) throw InvalidArgument("sample_uniform: n must be >= 1");
    Rng rng(seed);
    std::vector<Point> points;
    points.reserve(static_cast<std::size_t>(n));
    const std::size_t ncoord =
        (kind_ == ManifoldKind::Sphere2) ? 3 : (kind_ == ManifoldKind::Sphere3) ? 4
                                                                                : static_cast<std::size_t>(dim_);
    for (int i = 0; i < n; ++i) {
        Point p = Point::with_size(ncoord);
        if (kind_ == ManifoldKind::Circle || kind_ == ManifoldKind::Torus) {
            for (std::size_t j = 0; j < ncoord; ++j) p[j] = kTwoPi * rng.uniform();
        } else {
            double norm2 = 0.0;
            do {
                norm2 = 0.0;
                for (std::size_t j = 0; j < ncoord; ++j) {
                    p[j] = rng.gaussian();
                    norm2 += p[j] * p[j];
                }
            } while (norm2 < 1e-24);
            const double inv = 1.0 / std::sqrt(norm2);
            for (std::size_t j = 0; j < ncoord; ++j) p[j] *= inv;
        }
        points.push_back(p);
    }
    return points;
}

double unit_ball_volume(int m) {
    return std::pow(kPi, 0.5 * m) / std::tgamma(0.5 * m + 1.0);
}

double legendre_p(int l, double x) {
    if (l == 0) return 1.0;
    double pm1 = 1.0;
    double p0 = x;
    for (int k = 2; k <= l; ++k) {
        const double p = ((2.0 * k - 1.0) * x * p0 - (k - 1.0) * pm1) / k;
        pm1 = p0;
        p0 = p;
    }
    return p0;
}

double chebyshev_u(int l, double x) {
    if (l == 0) return 1.0;
    double um1 = 1.0;
    double u0 = 2.0 * x;
    for (int k = 2; k <= l; ++k) {
        const double u = 2.0 * x * u0 - um1;
        um1 = u0;
        u0 = u;
    }
    return u0;
}

} // namespace mkreg
