#include <mkreg/bounds.hpp>
#include <mkreg/errors.hpp>

#include <doctest.h>

#include <cmath>

using namespace mkreg;

namespace {
constexpr double kPi = 3.141592653589793238462643;
}

TEST_SUITE_BEGIN("bounds");

TEST_CASE("pointwise counting function") {
    const auto s1 = Manifold::circle();
    const Point x = s1.point({0.4});
    CHECK(counting_function(s1, x, 100.0) ==
          doctest::Approx(1.0 / (2.0 * kPi) + 10.0 / kPi).epsilon(1e-12));
    CHECK(counting_function(s1, x, 0.0) == doctest::Approx(1.0 / (2.0 * kPi)));

    const auto s2 = Manifold::sphere2();
    const Point y = s2.sample_uniform(1, 4)[0];
    CHECK(counting_function(s2, y, 6.0) == doctest::Approx(9.0 / (4.0 * kPi)).epsilon(1e-12));
}

TEST_CASE("counting bound values and validity threshold") {
    const WeylBound b = weyl_bound(1, 100.0, 0.5, 0.0);
    CHECK(b.bound == doctest::Approx(30.0 / kPi).epsilon(1e-12));
    CHECK(b.lambda_threshold == 0.0);

    const WeylBound b4 = weyl_bound(2, 400.0, 0.5, 0.0);
    CHECK(b4.bound / weyl_bound(2, 100.0, 0.5, 0.0).bound == doctest::Approx(4.0));

    CHECK(weyl_bound(3, 4.0, 0.5, 1.0).lambda_threshold == doctest::Approx(4.0));
    CHECK_THROWS_AS(weyl_bound(2, 1.0, 0.7, 0.0), InvalidArgument);
    CHECK_THROWS_AS(weyl_bound(2, 1.0, 0.0, 0.0), InvalidArgument);
}

TEST_CASE("heat diagonal series values") {
    const auto s3 = Manifold::sphere3();
    const Point x = s3.point({0.0, 0.0, 0.0, 1.0});
    // Direct series sum_l e^{-l(l+2) 0.375} (l+1)^2 / (2 pi^2).
    double direct = 0.0;
    for (int l = 0; l <= 20; ++l)
        direct += std::exp(-l * (l + 2.0) * 0.375) * (l + 1.0) * (l + 1.0) / (2.0 * kPi * kPi);
    CHECK(heat_diag(s3, 0.75, x) == doctest::Approx(direct).epsilon(1e-12));
    CHECK(direct == doctest::Approx(0.14224).epsilon(1e-4));

    const auto s1 = Manifold::circle();
    double wrapped = 0.0;
    for (int j = -20; j <= 20; ++j)
        wrapped += std::exp(-std::pow(2.0 * kPi * j, 2)) / std::sqrt(kPi);
    CHECK(heat_diag(s1, 0.5, s1.point({1.0})) == doctest::Approx(wrapped).epsilon(1e-12));

    const auto s2 = Manifold::sphere2();
    CHECK(heat_diag(s2, 80.0, s2.sample_uniform(1, 3)[0]) ==
          doctest::Approx(1.0 / (4.0 * kPi)).epsilon(1e-10));
}

TEST_CASE("heat diagonal upper bound report") {
    const auto s3 = Manifold::sphere3();
    const Point x = s3.sample_uniform(1, 5)[0];
    const BoundReport r = heat_diag_bound(s3, 0.75, x, 0.5);
    CHECK(r.bound == doctest::Approx(1.5 / std::pow(2.0 * kPi * 0.75, 1.5)).epsilon(1e-12));
    CHECK(r.bound == doctest::Approx(0.14663).epsilon(1e-4));
    CHECK(r.conditions_met());
    CHECK(r.verified());
    CHECK(r.margin == doctest::Approx(0.0044).epsilon(0.05));

    const BoundReport beyond = heat_diag_bound(s3, 0.76, x, 0.5);
    CHECK_FALSE(beyond.conditions_met());

    const auto s1 = Manifold::circle();
    const BoundReport flat = heat_diag_bound(s1, 5.0, s1.point({0.0}), 0.5);
    CHECK(flat.conditions_met()); // vacuous when kappa = 0 or m = 1
    CHECK(flat.bound == doctest::Approx(1.5 / std::sqrt(2.0 * kPi * 5.0)));
}

TEST_CASE("comparison lower bound") {
    CHECK(heat_lower_bound(3, 0.75, 0.0, 0.0) ==
          doctest::Approx(std::pow(2.0 * kPi * 0.75, -1.5)).epsilon(1e-12));
    CHECK(heat_lower_bound(3, 0.75, 0.0, 0.0) == doctest::Approx(0.09775).epsilon(1e-3));
    const auto s3 = Manifold::sphere3();
    CHECK(heat_diag(s3, 0.75, s3.sample_uniform(1, 2)[0]) >= heat_lower_bound(3, 0.75, 0.0, 0.0));

    // K1 = 0 reduces to the Euclidean Gaussian at any distance.
    const double r = 1.3, t = 0.5;
    CHECK(heat_lower_bound(3, t, 0.0, r) ==
          doctest::Approx(std::exp(-r * r / (2.0 * t)) / std::pow(2.0 * kPi * t, 1.5)));
    CHECK(heat_lower_bound(4, 1.0, 0.5, 50.0) < 1e-200);
    CHECK_THROWS_AS(heat_lower_bound(2, 1.0, 0.0, 0.0), OutOfValidity);
}

TEST_CASE("comparison upper bound dominates the sphere series") {
    const auto s3 = Manifold::sphere3();
    const KernelSpec heat(s3, Heat{0.5}, 1e-14);
    for (int i = 1; i <= 100; ++i) {
        const double r = 3.1 * i / 101.0;
        const Point x = s3.point({1.0, 0.0, 0.0, 0.0});
        const Point y = s3.point({std::cos(r), std::sin(r), 0.0, 0.0});
        CHECK(heat_upper_offdiag(3, 0.5, 1.0, r) >= heat.eval(x, y) * (1.0 - 1e-12));
    }
    CHECK_THROWS_AS(heat_upper_offdiag(3, 0.5, 1.0, kPi), OutOfValidity);
    CHECK_THROWS_AS(heat_upper_offdiag(2, 0.5, 1.0, 0.5), OutOfValidity);

    // Small-r limit approaches e^{(m-1)^2 K2 t/8} / (2 pi t)^{m/2}.
    const double lim = std::exp(4.0 * 0.5 / 8.0) / std::pow(2.0 * kPi * 0.5, 1.5);
    CHECK(heat_upper_offdiag(3, 0.5, 1.0, 1e-8) == doctest::Approx(lim).epsilon(1e-6));
    // K2 -> 0 approaches the Euclidean Gaussian.
    const double r = 0.7, t = 0.5;
    CHECK(heat_upper_offdiag(3, t, 1e-12, r) ==
          doctest::Approx(std::exp(-r * r / (2.0 * t)) / std::pow(2.0 * kPi * t, 1.5))
              .epsilon(1e-6));
}

TEST_CASE("spectral tail measured against its bound") {
    const auto s1 = Manifold::circle();
    const Point x = s1.point({0.2});
    const double measured = heat_tail(s1, 1.0, 1.0, x);
    double direct = 0.0;
    for (int l = 1; l <= 40; ++l) direct += std::exp(-0.5 * l * l) / kPi;
    CHECK(measured == doctest::Approx(direct).epsilon(1e-12));
    CHECK(measured == doctest::Approx(0.23978).epsilon(1e-4));

    const BoundReport r = heat_tail_report(s1, 1.0, 1.0, x, 0.5);
    CHECK(r.bound == doctest::Approx(std::exp(-0.5) * 3.0 / kPi).epsilon(1e-12));
    CHECK(r.bound == doctest::Approx(0.57919).epsilon(1e-4));
    CHECK(r.verified());

    const BoundReport gated = heat_tail_report(s1, 1.0, 0.5, x, 0.5);
    CHECK_FALSE(gated.conditions_met()); // lambda below m/t

    CHECK(heat_tail(s1, 40.0, 1.0, x) < 1e-8);
}

TEST_CASE("proof-chain consistency at the internal time choice") {
    // e^{-lambda t/2} N_x(lambda) <= heat_diag(t) at t = m/lambda.
    for (const Manifold& mfd : {Manifold::circle(), Manifold::torus(2), Manifold::sphere3()}) {
        const Point x = mfd.sample_uniform(1, 31)[0];
        for (double lambda : {4.0, 16.0, 64.0, 256.0}) {
            const double t = mfd.dim() / lambda;
            const double lhs = std::exp(-lambda * t / 2.0) * counting_function(mfd, x, lambda);
            CHECK(lhs <= heat_diag(mfd, t, x) * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("measured geometry quantities are position independent") {
    for (const Manifold& mfd : {Manifold::circle(), Manifold::sphere2(), Manifold::sphere3()}) {
        const auto xs = mfd.sample_uniform(20, 71);
        const double n0 = counting_function(mfd, xs[0], 50.0);
        const double h0 = heat_diag(mfd, 0.6, xs[0]);
        for (const Point& x : xs) {
            CHECK(std::abs(counting_function(mfd, x, 50.0) - n0) < 1e-9);
            CHECK(std::abs(heat_diag(mfd, 0.6, x) - h0) < 1e-9);
        }
    }
}

TEST_CASE("empirical second-moment lower bound holds at the lemma gate") {
    const auto s1 = Manifold::circle();
    const KernelSpec spec(s1, Heat{1.0});
    // Gate n = ceil(7 K_p log(p/delta)) with K_p = 5, p = 5, delta = 0.05.
    const int gate = static_cast<int>(std::ceil(7.0 * 5.0 * std::log(5.0 / 0.05)));
    CHECK(gate == 162);
    const ConcentrationResult res = empirical_gram_check(s1, spec, 5, gate, 200, 0.05, 99);
    CHECK(res.gate_n <= gate);
    const double slack = 3.0 * std::sqrt(0.05 * 0.95 / 200.0);
    CHECK(res.pass_rate >= 0.95 - slack);

    // p = 1 keeps only the constant mode: the moment matrix is exactly 1.
    const ConcentrationResult one = empirical_gram_check(s1, spec, 1, 1, 5, 0.05, 3);
    CHECK(one.pass_rate == 1.0);
    CHECK(one.quantiles[2] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("empirical tail operator stays below twice its eigenvalue") {
    const auto s1 = Manifold::circle();
    const KernelSpec spec(s1, Heat{1.0});
    const ConcentrationResult res = empirical_tail_check(s1, spec, 5, 64, 200, 0.05, 123);
    CHECK(res.gate_n <= 64);
    const double slack = 3.0 * std::sqrt(0.05 * 0.95 / 200.0);
    CHECK(res.pass_rate >= 0.95 - slack);

    // Large n: the empirical operator norm approaches t_{p+1}, under 2 t_{p+1}.
    const double t_p1 = std::exp(-4.5) / (2.0 * kPi);
    const ConcentrationResult big = empirical_tail_check(s1, spec, 5, 20000, 3, 0.05, 7);
    CHECK(big.quantiles[2] == doctest::Approx(t_p1).epsilon(0.2));
    CHECK(big.pass_rate == 1.0);
}

TEST_SUITE_END();
