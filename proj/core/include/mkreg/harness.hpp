#pragma once

#include "mkreg/bounds.hpp"
#include "mkreg/kernel.hpp"
#include "mkreg/manifold.hpp"
#include "mkreg/regression.hpp"
#include "mkreg/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mkreg {

enum class NoiseFamily { None, Gaussian, Laplace };

// Noise distribution with variance sigma^2. The sub-exponential (psi_1) norm
// inf{c : E exp(|xi|/c) <= 2} is computed numerically at construction and
// carried as advisory metadata.
class NoiseModel {
public:
    static NoiseModel none();
    static NoiseModel gaussian(double sigma);
    static NoiseModel laplace(double sigma);

    NoiseFamily family() const { return family_; }
    double sigma() const { return sigma_; }
    double psi1() const { return psi1_; }

    double sample(Rng& rng) const;

private:
    NoiseModel(NoiseFamily family, double sigma, double psi1)
        : family_(family), sigma_(sigma), psi1_(psi1) {}
    NoiseFamily family_;
    double sigma_;
    double psi1_;
};

// Target function description: a named preset or explicit coefficients.
struct TargetSpec {
    std::string preset; // "zero" | "single-mode" | "random-inband" | "heat-smooth"
    std::optional<double> explicit_lambda_max;
    std::vector<double> explicit_coeffs;

    bool operator==(const TargetSpec&) const = default;
};

// A replayable experiment. Round-trips losslessly through JSON with keys:
// manifold, kernel{family, omega|t|s}, target, alpha, n|n_grid,
// noise{family, sigma}, delta, trials, seed, out.
struct ExperimentConfig {
    std::string manifold = "s1"; // s1 | t1..t4 | s2 | s3
    std::string kernel_family = "bandlimited";
    double kernel_param = 1.0; // omega, t, or s
    TargetSpec target{"random-inband", std::nullopt, {}};
    double alpha = 0.0;
    bool alpha_from_gate = false; // alpha given as "thm-gate"
    std::vector<long> n_grid;    // one entry when a single n was given
    bool n_is_grid = false;
    NoiseFamily noise_family = NoiseFamily::None;
    double noise_sigma = 0.0;
    double delta = 0.05;
    int trials = 200;
    std::uint64_t seed = 1;
    std::string out;

    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig from_json_file(const std::string& path);
    std::string to_json_text() const;

    bool operator==(const ExperimentConfig&) const = default;
};

struct TrialRecord {
    int trial = 0;
    std::uint64_t seed = 0;
    long n = 0;
    double alpha = 0.0;
    double error_l2_normalized = 0.0;
    double bound_total = 0.0;
    double bound_bias = 0.0;
    double bound_noise = 0.0;
    bool gates_met = false;
    double wall_ms = 0.0;
};

struct SweepPointStats {
    long n = 0;
    double median_error = 0.0;
    double q05 = 0.0;
    double q95 = 0.0;
    double coverage_gated = 0.0; // fraction of gated trials with error <= bound
    int gated_trials = 0;
};

struct SweepResult {
    std::vector<TrialRecord> records;
    std::vector<SweepPointStats> stats;
    std::optional<double> slope_log_median_vs_log_n;
};

// Resolved experiment: manifold, kernel, target and bound machinery built once
// from a config. Trials are pure functions of (config, trial index).
class Experiment {
public:
    explicit Experiment(ExperimentConfig config);

    const ExperimentConfig& config() const { return config_; }
    const Manifold& manifold() const { return manifold_; }
    const KernelSpec& kernel() const { return kernel_; }
    const SpectralCoeffs& target() const { return target_; }
    double target_rkhs_norm() const { return target_norm_h_; }
    double alpha() const { return alpha_; }

    TrialRecord run_trial(int trial_index, long n) const;

    // Runs trials at every grid point; deterministic output for any n_threads.
    SweepResult run_sweep(int n_threads = 1) const;

private:
    ExperimentConfig config_;
    Manifold manifold_;
    KernelSpec kernel_;
    SpectralCoeffs target_;
    double target_norm_h_ = 0.0;
    double alpha_ = 0.0;
    double analysis_omega_sq_ = 0.0; // bandlimit split used by the heat-kernel bound
    double error_lambda_cap_ = 0.0;
    NoiseModel noise_;
};

// RFC-4180 CSV of trial records, floats with 17 significant digits. Columns:
// trial,seed,n,alpha,error_l2_normalized,bound_total,bound_bias,bound_noise,gates_met,wall_ms
void write_trial_csv(std::ostream& os, const std::vector<TrialRecord>& records);
void write_trial_csv_file(const std::string& path, const std::vector<TrialRecord>& records);

// One row of a bound-verification suite.
struct BoundRow {
    std::string suite;
    std::string manifold;
    std::string params;
    std::string kind; // "upper": verified iff measured <= bound; "lower": >=
    double measured = 0.0;
    double bound = 0.0;
    double margin = 0.0;
    bool conditions_met = true;
    bool asserted = true; // flagged rows (gates unmet, derivation caveats) are not asserted
    bool verified = true;
};

// Suite selectors: weyl | heat-diag | heat-tail | comparison | gram | tail-op.
std::vector<BoundRow> report_bounds(const std::string& selector, std::uint64_t seed);

void write_bound_csv(std::ostream& os, const std::vector<BoundRow>& rows);
std::string bound_rows_json(const std::vector<BoundRow>& rows);

// True iff every asserted row verified.
bool all_asserted_verified(const std::vector<BoundRow>& rows);

} // namespace mkreg
