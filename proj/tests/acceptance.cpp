// Acceptance gate: one check per shipped guarantee, one PASS/FAIL line each.
// Usage: acceptance [1-9|all]

#include <mkreg/bounds.hpp>
#include <mkreg/harness.hpp>
#include <mkreg/kernel.hpp>
#include <mkreg/manifold.hpp>
#include <mkreg/regression.hpp>
#include <mkreg/rng.hpp>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <string>
#include <vector>

using namespace mkreg;

namespace {

constexpr double kPi = 3.141592653589793238462643;

bool check(bool ok, const char* what, std::string& detail) {
    if (!ok) {
        detail += detail.empty() ? "" : "; ";
        detail += what;
    }
    return ok;
}

// 1. Pointwise eigenvalue-counting bound on s1, t2, s3 at 20 random points.
bool criterion1(std::string& detail) {
    bool ok = true;
    const double eps = 0.5;
    for (const Manifold& mfd : {Manifold::circle(), Manifold::torus(2), Manifold::sphere3()}) {
        const auto pts = mfd.sample_uniform(20, 2024);
        for (double lambda : {4.0, 16.0, 64.0, 100.0, 256.0, 1024.0}) {
            const WeylBound wb = weyl_bound(mfd.dim(), lambda, eps, mfd.curvature_upper());
            if (lambda < wb.lambda_threshold) continue;
            for (const Point& x : pts)
                ok &= check(counting_function(mfd, x, lambda) <= wb.bound, "count above bound",
                            detail);
        }
    }
    const auto s1 = Manifold::circle();
    const double desk = counting_function(s1, s1.point({0.1}), 100.0);
    ok &= check(std::abs(desk - 3.3423) < 5e-4, "circle desk value", detail);
    ok &= check(std::abs(weyl_bound(1, 100.0, eps, 0.0).bound - 9.5493) < 5e-4,
                "circle desk bound", detail);
    return ok;
}

// 2. Heat diagonal [upper and lower] on s3 across 20 times.
bool criterion2(std::string& detail) {
    bool ok = true;
    const auto s3 = Manifold::sphere3();
    const Point x = s3.sample_uniform(1, 9)[0];
    for (int i = 1; i <= 20; ++i) {
        const double t = 0.75 * i / 20.0;
        const double diag = heat_diag(s3, t, x);
        ok &= check(diag <= 1.5 / std::pow(2.0 * kPi * t, 1.5), "upper bound", detail);
        ok &= check(diag >= heat_lower_bound(3, t, 0.0, 0.0), "lower bound", detail);
    }
    const double extreme = heat_diag(s3, 0.75, x);
    ok &= check(std::abs(extreme - 0.14224) < 1e-4, "desk diagonal", detail);
    ok &= check(std::abs(1.5 / std::pow(2.0 * kPi * 0.75, 1.5) - 0.14663) < 1e-4, "desk bound",
                detail);
    return ok;
}

// 3. Spectral tail bound on s1 and s3 across a (t, lambda) grid meeting both gates.
bool criterion3(std::string& detail) {
    bool ok = true;
    for (const BoundRow& row : report_bounds("heat-tail", 3))
        if (row.asserted) ok &= check(row.verified, "tail row violated", detail);
    const auto s1 = Manifold::circle();
    const Point x = s1.point({0.4});
    const BoundReport desk = heat_tail_report(s1, 1.0, 1.0, x, 0.5);
    ok &= check(std::abs(desk.measured - 0.23978) < 1e-4, "desk measured", detail);
    ok &= check(std::abs(desk.bound - 0.57919) < 1e-4, "desk bound", detail);
    ok &= check(desk.verified(), "desk point verified", detail);
    return ok;
}

// 4. Noiseless exact recovery on s1 and s2, 200 trials each.
bool criterion4(std::string& detail) {
    bool ok = true;
    const char* cfgs[] = {
        R"({"manifold":"s1","kernel":{"family":"bandlimited","omega":2.5},
            "target":"random-inband","alpha":0.0,"n":50,"delta":0.05,"trials":200,"seed":404})",
        R"({"manifold":"s2","kernel":{"family":"bandlimited","omega":3.5},
            "target":"random-inband","alpha":0.0,"n":300,"delta":0.05,"trials":200,"seed":405})",
    };
    for (const char* text : cfgs) {
        const Experiment exp(ExperimentConfig::from_json_text(text));
        const SweepResult res = exp.run_sweep(4);
        int good = 0;
        for (const TrialRecord& r : res.records)
            if (r.error_l2_normalized <= 1e-8) ++good;
        ok &= check(good >= 199, "fewer than 199/200 exact recoveries", detail);
    }
    return ok;
}

// 5. Noisy bandlimited rate: slope -0.5 +- 0.1 and gated coverage.
bool criterion5(std::string& detail) {
    const Experiment exp(ExperimentConfig::from_json_text(
        R"({"manifold":"s1","kernel":{"family":"bandlimited","omega":2.5},
            "target":"random-inband","alpha":0.0,"n_grid":[500,1000,2000,4000,8000],
            "noise":{"family":"gaussian","sigma":0.1},"delta":0.05,"trials":50,"seed":505})"));
    const SweepResult res = exp.run_sweep(4);
    bool ok = true;
    ok &= check(res.slope_log_median_vs_log_n.has_value(), "no slope", detail);
    if (res.slope_log_median_vs_log_n)
        ok &= check(std::abs(*res.slope_log_median_vs_log_n + 0.5) <= 0.1, "slope off", detail);
    int gated = 0, covered = 0;
    for (const TrialRecord& r : res.records)
        if (r.gates_met) {
            ++gated;
            if (r.error_l2_normalized <= r.bound_total) ++covered;
        }
    ok &= check(gated > 0, "no gated trials", detail);
    if (gated > 0) {
        const double delta = 0.05;
        const double target = 1.0 - 2.0 * delta;
        const double slack = 3.0 * std::sqrt(target * (1.0 - target) / gated);
        ok &= check(static_cast<double>(covered) / gated >= target - slack, "coverage low",
                    detail);
    }
    return ok;
}

// 6. Heat-kernel regression with the gate alpha: coverage plus noiseless bias.
bool criterion6(std::string& detail) {
    bool ok = true;
    {
        const Experiment exp(ExperimentConfig::from_json_text(
            R"({"manifold":"s1","kernel":{"family":"heat","t":1.0},
                "target":"heat-smooth","alpha":"thm-gate","n":300,
                "noise":{"family":"gaussian","sigma":0.5},
                "delta":0.05,"trials":200,"seed":606})"));
        const SweepResult res = exp.run_sweep(4);
        int gated = 0, covered = 0;
        for (const TrialRecord& r : res.records)
            if (r.gates_met) {
                ++gated;
                if (r.error_l2_normalized <= r.bound_total) ++covered;
            }
        ok &= check(gated == 200, "gates unexpectedly unmet", detail);
        if (gated > 0)
            ok &= check(static_cast<double>(covered) / gated >= 0.9, "noisy coverage", detail);
    }
    {
        const Experiment exp(ExperimentConfig::from_json_text(
            R"({"manifold":"s1","kernel":{"family":"heat","t":1.0},
                "target":"heat-smooth","alpha":"thm-gate","n":300,
                "delta":0.05,"trials":50,"seed":607})"));
        const SweepResult res = exp.run_sweep(4);
        for (const TrialRecord& r : res.records)
            ok &= check(r.error_l2_normalized <= r.bound_bias, "noiseless bias exceeded",
                        detail);
    }
    return ok;
}

// 7. Concentration suites at their lemma gates.
bool criterion7(std::string& detail) {
    bool ok = true;
    const auto s1 = Manifold::circle();
    const KernelSpec spec(s1, Heat{1.0});
    const double slack = 3.0 * std::sqrt(0.05 * 0.95 / 200.0);
    {
        const ConcentrationResult res = empirical_gram_check(s1, spec, 5, 162, 200, 0.05, 707);
        ok &= check(res.gate_n <= 162, "gram gate", detail);
        ok &= check(res.pass_rate >= 0.95 - slack, "gram pass rate", detail);
    }
    {
        const ConcentrationResult res = empirical_tail_check(s1, spec, 5, 30, 200, 0.05, 708);
        ok &= check(res.gate_n <= 30, "tail gate", detail);
        ok &= check(res.pass_rate >= 0.95 - slack, "tail pass rate", detail);
    }
    return ok;
}

// 8. Independent oracles: wrapped Gaussian, explicit zonal products, Monte Carlo error.
bool criterion8(std::string& detail) {
    bool ok = true;
    const auto s1 = Manifold::circle();
    {
        const double t = 0.5;
        const KernelSpec spec(s1, Heat{t}, 1e-14);
        const auto xs = s1.sample_uniform(100, 801);
        const auto ys = s1.sample_uniform(100, 802);
        for (int i = 0; i < 100; ++i) {
            const double d = s1.geodesic_distance(xs[i], ys[i]);
            double oracle = 0.0;
            for (int j = -30; j <= 30; ++j)
                oracle += std::exp(-std::pow(d + 2.0 * kPi * j, 2) / (2.0 * t));
            oracle /= std::sqrt(2.0 * kPi * t);
            ok &= check(std::abs(spec.eval(xs[i], ys[i]) - oracle) <= 1e-9 * oracle,
                        "wrapped-Gaussian mismatch", detail);
        }
    }
    for (const Manifold& mfd : {Manifold::circle(), Manifold::torus(2), Manifold::sphere2(),
                                Manifold::sphere3()}) {
        const double cap = mfd.kind() == ManifoldKind::Sphere3 ? 35.0 : 100.0;
        const auto xs = mfd.sample_uniform(100, 803);
        const auto ys = mfd.sample_uniform(100, 804);
        const auto levels = mfd.levels_up_to(cap);
        for (int i = 0; i < 100; ++i) {
            const auto ux = mfd.eval_eigenfunctions(xs[i], cap);
            const auto uy = mfd.eval_eigenfunctions(ys[i], cap);
            std::size_t off = 0;
            for (const auto& lev : levels) {
                double direct = 0.0;
                for (int j = 0; j < lev.multiplicity; ++j) direct += ux[off + j] * uy[off + j];
                off += static_cast<std::size_t>(lev.multiplicity);
                const double zonal = mfd.zonal_level_sum(lev, xs[i], ys[i]);
                const double scale = std::max(1.0 / mfd.volume(), std::abs(zonal));
                ok &= check(std::abs(direct - zonal) <= 1e-10 * scale, "zonal mismatch", detail);
            }
        }
    }
    {
        const KernelSpec spec(s1, Heat{1.0});
        Rng rng(805);
        std::vector<double> tv(static_cast<std::size_t>(s1.basis_size(4.0)));
        for (double& v : tv) v = rng.gaussian();
        const SpectralCoeffs truth{s1, 4.0, tv};
        Samples s;
        s.points = s1.sample_uniform(60, 806);
        s.responses.resize(60);
        Rng noise(807);
        for (int i = 0; i < 60; ++i)
            s.responses[i] = eval_spectral(truth, s.points[i]) + 0.2 * noise.gaussian();
        const FitResult f = fit(spec, s, 1e-3);
        const L2ErrorResult err = l2_error(f, truth, 30.0);
        const int n = 100000;
        const auto xs = s1.sample_uniform(n, 808);
        double mean = 0.0, m2 = 0.0;
        int cnt = 0;
        for (const Point& x : xs) {
            const double d = predict(f, x) - eval_spectral(truth, x);
            const double sq = d * d;
            ++cnt;
            const double delta = sq - mean;
            mean += delta / cnt;
            m2 += delta * (sq - mean);
        }
        const double vol = s1.volume();
        const double se = std::sqrt(m2 / (cnt - 1.0) / cnt) * vol;
        ok &= check(std::abs(err.error * err.error - mean * vol) <=
                        3.0 * se + err.certified_slack,
                    "Monte Carlo error mismatch", detail);
    }
    return ok;
}

// 9. Sweep output is identical for 1, 4 and 8 worker threads (timing column
// aside, which measures the wall clock by definition).
bool criterion9(std::string& detail) {
    const ExperimentConfig cfg = ExperimentConfig::from_json_text(
        R"({"manifold":"s1","kernel":{"family":"heat","t":1.0},
            "target":"heat-smooth","alpha":0.01,"n_grid":[50,100],
            "noise":{"family":"laplace","sigma":0.25},"delta":0.05,"trials":12,"seed":909})");
    const Experiment exp(cfg);
    auto csv_no_wall = [](const SweepResult& res) {
        std::ostringstream ss;
        write_trial_csv(ss, res.records);
        std::string text = ss.str(), out;
        std::size_t pos = 0;
        while (pos < text.size()) {
            std::size_t eol = text.find("\r\n", pos);
            if (eol == std::string::npos) eol = text.size();
            const std::string line = text.substr(pos, eol - pos);
            out += line.substr(0, line.rfind(','));
            out += '\n';
            pos = eol + 2;
        }
        return out;
    };
    const std::string a = csv_no_wall(exp.run_sweep(1));
    const std::string b = csv_no_wall(exp.run_sweep(4));
    const std::string c = csv_no_wall(exp.run_sweep(8));
    bool ok = true;
    ok &= check(a == b, "1 vs 4 threads differ", detail);
    ok &= check(a == c, "1 vs 8 threads differ", detail);
    ok &= check(!a.empty(), "empty output", detail);
    return ok;
}

} // namespace

int main(int argc, char** argv) {
    using Criterion = bool (*)(std::string&);
    const Criterion criteria[] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                  criterion6, criterion7, criterion8, criterion9};
    const char* names[] = {
        "eigenvalue-counting bound",      "heat diagonal bounds",
        "heat tail bound",                "noiseless exact recovery",
        "noisy rate and coverage",        "heat-kernel regression bound",
        "concentration suites",           "independent oracle equivalence",
        "thread-count determinism",
    };

    int lo = 0, hi = 8;
    if (argc > 1 && std::strcmp(argv[1], "all") != 0) {
        const int k = std::atoi(argv[1]);
        if (k < 1 || k > 9) {
            std::fprintf(stderr, "usage: %s [1-9|all]\n", argv[0]);
            return 2;
        }
        lo = hi = k - 1;
    }

    bool all_ok = true;
    for (int i = lo; i <= hi; ++i) {
        std::string detail;
        bool ok = false;
        try {
            ok = criteria[i](detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("criterion %d (%s): %s%s%s\n", i + 1, names[i], ok ? "PASS" : "FAIL",
                    detail.empty() ? "" : " — ", detail.c_str());
        all_ok &= ok;
    }
    return all_ok ? 0 : 1;
}
