#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace mkreg {

enum class ManifoldKind { Circle, Torus, Sphere2, Sphere3 };

// One Laplace-Beltrami eigen-level: all eigenfunctions sharing an eigenvalue.
struct EigLevel {
    int index = 0;          // level index (0 = constant mode), not function index
    double lambda = 0.0;    // eigenvalue of the Laplacian
    int multiplicity = 1;   // number of orthonormal eigenfunctions at this lambda
};

// A point in intrinsic/ambient coordinates.
//   Circle:  one angle in [0, 2pi)
//   Torus:   m angles in [0, 2pi)
//   Sphere2: unit vector in R^3
//   Sphere3: unit vector in R^4
class Point {
public:
    Point() = default;
    Point(std::initializer_list<double> coords);

    std::size_t size() const { return size_; }
    double operator[](std::size_t i) const { return c_[i]; }
    double& operator[](std::size_t i) { return c_[i]; }

    static Point with_size(std::size_t n);

private:
    std::array<double, 4> c_{};
    std::size_t size_ = 0;
};

// Closed-form Laplace-Beltrami spectral data for the canonical homogeneous
// manifolds. Values are immutable; all operations are pure and reentrant.
//
// Eigenfunctions use the UNNORMALIZED volume measure: integral of u_i u_j over
// the manifold (with the standard volume form) equals delta_ij.
//
// Within-level basis conventions (fixed; spectral coefficient vectors index
// this order):
//   Circle:  constant 1/sqrt(2pi); then per level l >= 1: cos(l theta)/sqrt(pi),
//            sin(l theta)/sqrt(pi).
//   Torus:   products of circle factors. Within a level, nonnegative mode
//            vectors in ascending lexicographic order; for each mode vector,
//            cos/sin patterns over the nonzero axes enumerated as binary
//            counting with cos first and the earliest axis most significant.
//   Sphere2: real spherical harmonics Y_{lm}, m = -l..l (sin branch for m < 0,
//            cos branch for m > 0), polar axis = third ambient coordinate,
//            azimuth = atan2(second, first), no Condon-Shortley phase.
//   Sphere3: hyperspherical harmonics indexed by (l, L, m), L = 0..l,
//            m = -L..L:
//              Y_{lLm}(chi, dir) = N_{lL} sin^L(chi) C_{l-L}^{(L+1)}(cos chi)
//                                    * Y_{Lm}(dir),
//            with ambient x = (cos chi, sin chi * dir), dir a unit 3-vector
//            interpreted with the Sphere2 convention above, and
//              N_{lL} = 2^L L! sqrt( 2 (l+1) (l-L)! / (pi (l+L+1)!) ).
class Manifold {
public:
    static Manifold circle();
    static Manifold torus(int m);   // m in [1, 4]; larger m rejected
    static Manifold sphere2();
    static Manifold sphere3();

    ManifoldKind kind() const { return kind_; }
    int dim() const { return dim_; }
    double volume() const { return volume_; }
    // Upper bound on sectional curvature (kappa).
    double curvature_upper() const { return kappa_; }
    // K1 such that Ricci >= -(m-1) K1; zero for all built-ins.
    double ricci_lower_k1() const { return ricci_k1_; }

    bool operator==(const Manifold& other) const {
        return kind_ == other.kind_ && dim_ == other.dim_;
    }

    // Validates and canonicalizes a point (angles reduced mod 2pi; sphere
    // vectors renormalized if within 1e-12 of unit norm, rejected otherwise).
    Point point(std::initializer_list<double> coords) const;
    Point canonicalize(Point p) const;

    // All eigen-levels with lambda <= lambda_max, ascending.
    std::vector<EigLevel> levels_up_to(double lambda_max) const;

    // Level following the last level with lambda <= lambda_max.
    EigLevel next_level_after(double lambda_max) const;

    // Number of eigenfunctions with lambda <= lambda_max.
    int basis_size(double lambda_max) const;

    // Values of the orthonormal eigenbasis at x, ordered by level then by the
    // within-level convention documented above.
    std::vector<double> eval_eigenfunctions(const Point& x, double lambda_max) const;

    // Sum over the level's eigenfunctions of u(x) u(y), via addition theorems.
    double zonal_level_sum(const EigLevel& level, const Point& x, const Point& y) const;

    double geodesic_distance(const Point& x, const Point& y) const;

    // n i.i.d. points under the normalized volume measure; deterministic in seed.
    std::vector<Point> sample_uniform(int n, std::uint64_t seed) const;

private:
    Manifold(ManifoldKind kind, int dim, double volume, double kappa, double ricci_k1);

    ManifoldKind kind_;
    int dim_;
    double volume_;
    double kappa_;
    double ricci_k1_;
};

// Volume of the unit ball in R^m: pi^{m/2} / Gamma(m/2 + 1).
double unit_ball_volume(int m);

// Legendre polynomial P_l(x) by upward three-term recurrence.
double legendre_p(int l, double x);

// Chebyshev polynomial of the second kind U_l(x) by upward recurrence.
double chebyshev_u(int l, double x);

} // namespace mkreg
