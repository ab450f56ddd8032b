#pragma once

#include "fracvar/asymptotics.hpp"

#include <optional>
#include <string>

namespace fracvar {

struct Estimate {
    double value = std::numeric_limits<double>::quiet_NaN();
    bool valid = false;
    std::string note; // set when invalid or out of range
};

// 1/2 - log(V_2n / V_n) / (2 log 2); flagged invalid on nonpositive input.
Estimate ratio_estimator(double vn_value, double v2n_value);

// K estimator of the two-parameter FBM; flagged when hk_hat >= 1 (degenerate
// denominator) or the result leaves (0,1) (value still reported).
Estimate k_estimator(double vn_value, double hk_hat, long n, double t1, double t2);

// H = HK / K; propagates validity.
Estimate h_from_hk_k(const Estimate& hk_hat, const Estimate& k_hat);

enum class EstimatorKind { hurst_ratio, k_bifbm, h_bifbm };

// Asymptotic standard error sqrt(variance)/sqrt(n), delta-method variances.
double stderr_for(EstimatorKind kind, const TheoreticalConstants& c, long n);
// Same but with the variance exactly as printed in the source displays.
double stderr_display_for(EstimatorKind kind, const TheoreticalConstants& c, long n);

// Logarithmic bias term of the AFBM ratio estimator (Corollary-14 form, with
// G_{theta*} in place of J in the non-l.a.s.s. regime). Zero in Case I and
// for non-AFBM models. The estimator satisfies
// sqrt(n) (H_hat - H + bias_term) -> N(0, ratio_var), i.e. E[H_hat] - H is
// approximately minus this value.
double afbm_bias_term(const TheoreticalConstants& c, long n);

struct EstimateReport {
    std::string model;
    long n = 0;
    double vn_value = 0.0;
    double v2n_value = 0.0;

    Estimate ratio;               // H, HK or Hmin depending on the model
    std::string ratio_label;      // "H", "HK", "Hmin"
    double ratio_stderr = TheoreticalConstants::nan;
    double ratio_bias = TheoreticalConstants::nan; // expected E[est]-truth, AFBM only

    std::optional<Estimate> k_hat;
    double k_stderr = TheoreticalConstants::nan;
    std::optional<Estimate> h_hat;
    double h_stderr = TheoreticalConstants::nan;
};

// Assemble the full report for a (V_n, V_2n) pair. When `constants` is null
// the standard errors use plug-in FBM constants at the estimated index.
EstimateReport make_report(const TheoreticalConstants* constants, long n,
                           double vn_value, double v2n_value,
                           const std::string& model_name = "");

} // namespace fracvar
