// Command-line front end: regression experiments, parameter sweeps, and
// bound-verification suites over the spectral kernel library.

#include <mkreg/errors.hpp>
#include <mkreg/harness.hpp>
#include <mkreg/regression.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

// Exit codes: 0 success, 1 usage/config error, 2 asserted bound violated,
// 3 numerical failure.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitBoundViolation = 2;
constexpr int kExitNumerical = 3;

void print_sweep_stats(const mkreg::SweepResult& result) {
    std::printf("%10s %14s %14s %14s %10s %8s\n", "n", "median", "q05", "q95", "coverage",
                "gated");
    for (const auto& st : result.stats)
        std::printf("%10ld %14.6g %14.6g %14.6g %10.3f %8d\n", st.n, st.median_error, st.q05,
                    st.q95, st.coverage_gated, st.gated_trials);
    if (result.slope_log_median_vs_log_n)
        std::printf("log-log slope of median error vs n: %.4f\n",
                    *result.slope_log_median_vs_log_n);
}

int run_experiment(const std::string& config_path, const std::string& out_override,
                   int threads, bool want_grid) {
    mkreg::ExperimentConfig cfg = mkreg::ExperimentConfig::from_json_file(config_path);
    if (want_grid != cfg.n_is_grid)
        throw mkreg::InvalidArgument(want_grid ? "sweep needs an n_grid config"
                                               : "regress needs a single-n config");
    if (!out_override.empty()) cfg.out = out_override;

    mkreg::Experiment exp(cfg);
    const mkreg::SweepResult result = exp.run_sweep(threads);

    if (!cfg.out.empty()) {
        mkreg::write_trial_csv_file(cfg.out, result.records);
        std::printf("wrote %zu trial records to %s\n", result.records.size(), cfg.out.c_str());
    } else {
        mkreg::write_trial_csv(std::cout, result.records);
    }
    print_sweep_stats(result);
    return kExitOk;
}

int run_bounds(const std::string& suite, std::uint64_t seed, const std::string& csv_path,
               bool as_json) {
    const std::vector<mkreg::BoundRow> rows = mkreg::report_bounds(suite, seed);
    if (!csv_path.empty()) {
        std::ofstream out(csv_path, std::ios::binary);
        if (!out) throw mkreg::InvalidArgument("cannot open output file: " + csv_path);
        mkreg::write_bound_csv(out, rows);
    } else if (as_json) {
        std::cout << mkreg::bound_rows_json(rows) << "\n";
    } else {
        mkreg::write_bound_csv(std::cout, rows);
    }
    if (!mkreg::all_asserted_verified(rows)) {
        std::fprintf(stderr, "asserted bound violated in suite %s\n", suite.c_str());
        return kExitBoundViolation;
    }
    return kExitOk;
}

int run_constants(const std::string& manifold, const std::string& family, double param, int p,
                  double delta) {
    nlohmann::json cfg = {
        {"manifold", manifold},
        {"kernel",
         {{"family", family},
          {family == "bandlimited" ? "omega" : (family == "heat" ? "t" : "s"), param}}},
        {"target", "zero"},
        {"alpha", 0.0},
        {"n", 1},
        {"seed", 1},
    };
    mkreg::Experiment exp(mkreg::ExperimentConfig::from_json_text(cfg.dump()));
    mkreg::TheoremInputs c = mkreg::assumption_constants(exp.manifold(), exp.kernel(), p);
    c.delta = delta;

    nlohmann::json out = {
        {"p", c.p},
        {"t_p1", c.t_p1},
        {"k_p", c.k_p},
        {"r_p", c.r_p},
        {"trace_tail", c.trace_tail},
        {"gamma", c.gamma},
        {"gamma_prime", c.gamma_prime},
        {"volume", c.volume},
    };
    if (exp.kernel().finite_rank())
        out["bandlimited_dimension"] =
            mkreg::bl_dimension(exp.manifold(), std::sqrt(exp.kernel().band_lambda_cap()));
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral-kernel regression laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_override;
    int threads = 1;

    auto* regress = app.add_subcommand("regress", "run trials at a single sample size");
    regress->add_option("--config", config_path, "JSON experiment config")->required();
    regress->add_option("--out", out_override, "CSV output path (overrides config)");
    regress->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

    auto* sweep = app.add_subcommand("sweep", "run trials over an n grid");
    sweep->add_option("--config", config_path, "JSON experiment config")->required();
    sweep->add_option("--out", out_override, "CSV output path (overrides config)");
    sweep->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

    std::string suite = "all", bounds_csv;
    std::uint64_t bounds_seed = 1;
    bool bounds_json = false;
    auto* bounds = app.add_subcommand("bounds", "verify analytic bounds numerically");
    bounds->add_option("--suite", suite,
                       "weyl | heat-diag | heat-tail | comparison | gram | tail-op | all");
    bounds->add_option("--seed", bounds_seed, "seed for sampled evaluation points");
    bounds->add_option("--csv", bounds_csv, "write rows as CSV to a file");
    bounds->add_flag("--json", bounds_json, "print rows as JSON");

    std::string c_manifold = "s1", c_family = "heat";
    double c_param = 1.0, c_delta = 0.05;
    int c_p = 5;
    auto* constants = app.add_subcommand("constants", "dump the regression-bound constants");
    constants->add_option("--manifold", c_manifold, "s1 | t2 | t3 | t4 | s2 | s3");
    constants->add_option("--kernel", c_family, "bandlimited | heat | sobolev");
    constants->add_option("--param", c_param, "omega / t / s");
    constants->add_option("--p", c_p, "leading-subspace dimension (level boundary)");
    constants->add_option("--delta", c_delta, "failure probability");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (regress->parsed()) return run_experiment(config_path, out_override, threads, false);
        if (sweep->parsed()) return run_experiment(config_path, out_override, threads, true);
        if (bounds->parsed()) return run_bounds(suite, bounds_seed, bounds_csv, bounds_json);
        if (constants->parsed()) return run_constants(c_manifold, c_family, c_param, c_p, c_delta);
    } catch (const mkreg::InvalidArgument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitUsage;
    } catch (const mkreg::NotInRkhs& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitUsage;
    } catch (const mkreg::OutOfValidity& e) {
        std::fprintf(stderr, "out of validity: %s\n", e.what());
        return kExitUsage;
    } catch (const mkreg::NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    }
    return kExitUsage;
}
