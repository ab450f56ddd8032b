#pragma once

#include "fracvar/estimators.hpp"
#include "fracvar/models.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fracvar {

struct ExperimentConfig {
    ProcessModel model = ProcessModel::fbm(0.5);
    std::vector<long> n_values;      // each >= 8; the path is sampled at 2n
    long replications = 1;
    std::uint64_t master_seed = 0;
    bool run_estimators = true;
    bool exact_moments = true;       // Isserlis cross-check (auto-off for n > 4096)
    int threads = 0;                 // 0 = FRACVAR_THREADS env or hardware
    std::string raw_csv_path;        // optional per-replication dump
};

struct KsResult {
    double distance = 0.0;
    double critical = 0.0; // 1.63 / sqrt(M), alpha ~ 0.01
    bool pass = false;
    long count = 0;
};

// Kolmogorov-Smirnov distance of the samples against the standard normal.
KsResult normality_diagnostic(std::vector<double> samples);

struct EstimatorStats {
    std::string name;
    double truth = TheoreticalConstants::nan;
    long valid_count = 0;
    long invalid_count = 0;
    double mean = TheoreticalConstants::nan;     // over valid replications
    double variance = TheoreticalConstants::nan;
    double bias = TheoreticalConstants::nan;     // mean - truth
    double bias_z = TheoreticalConstants::nan;   // (bias - expected_bias)/(sd/sqrt(M))
    double expected_bias = 0.0;                  // AFBM logarithmic bias, else 0
    double stderr_pred = TheoreticalConstants::nan;
    double std_mean = TheoreticalConstants::nan; // standardized estimator stats
    double std_var = TheoreticalConstants::nan;
    double coverage95 = TheoreticalConstants::nan;
};

struct McLevelReport {
    long n = 0;
    long replications = 0;
    long invalid_replications = 0; // nonpositive V_n or V_2n

    // normalized variation statistics at level n and at the sampled level 2n
    double vn_norm_mean = 0.0, vn_norm_var = 0.0;
    double v2n_norm_mean = 0.0, v2n_norm_var = 0.0;
    double vn_target = 0.0; // almost-sure limit
    double vn_z = 0.0, v2n_z = 0.0;

    // sqrt(n)-standardized CLT statistic at level n
    double clt_emp_var = 0.0;
    double clt_var_target = 0.0; // sigma^2 of the model
    KsResult ks;

    // Isserlis oracle cross-checks (raw V moments), when enabled
    bool have_exact = false;
    double vn_raw_mean = 0.0, vn_raw_var = 0.0;
    double v2n_raw_mean = 0.0, v2n_raw_var = 0.0;
    double raw_cov = 0.0;
    double exact_mean_vn_value = 0.0, exact_var_vn_value = 0.0;
    double exact_mean_v2n_value = 0.0, exact_var_v2n_value = 0.0;
    double exact_cov_value = 0.0;
    double mean_z_exact = 0.0, var_z_exact = 0.0;
    double mean2_z_exact = 0.0, var2_z_exact = 0.0, cov_z_exact = 0.0;

    std::vector<EstimatorStats> estimators;
};

struct McReport {
    std::string model;
    std::uint64_t master_seed = 0;
    long replications = 0;
    std::vector<McLevelReport> levels;
};

// Deterministic parallel Monte Carlo: replication r draws its own counter
// stream from (master seed, r), one path at resolution 2n per replication,
// V_n from the even-index subsample. Bit-identical output for any worker
// count.
McReport run_experiment(const ExperimentConfig& config);

int default_thread_count();

} // namespace fracvar
