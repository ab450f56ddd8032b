#pragma once

#include "fracvar/models.hpp"
#include "fracvar/quadrature.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace fracvar {

// ---------------------------------------------------------------------------
// The limiting correlation constants rho_gamma(l)
// ---------------------------------------------------------------------------

// Closed form of rho_gamma(l) (five-term second-difference form, log form at
// gamma = 1). The domain is extended below l = 2 by the same formula; at
// gamma = 1 that extension diverges, so l < 2 with |gamma-1| < 1e-6 is a
// domain error. Near gamma = 1 (l >= 2) the log branch plus a first-order
// correction avoids the cancellation in the (gamma-1) denominator.
double rho(double gamma, long l);

// Independent oracle: the quadruple integral evaluated by analytic
// integration of the two inner variables plus iterated 2-D adaptive
// quadrature. Requires l >= 2.
quad::Result rho_numeric(double gamma, long l, double tol = 1e-10);

// ||rho_gamma||^2 = sum_{l>=2} rho(l)^2, truncated where the analytic tail
// bound drops below 1e-12.
double rho_norm_sq(double gamma);

// sum_{l >= lmin} rho(l) rho(l - lag) with the same tail policy.
double rho_lag_series(double gamma, int lag, long lmin);

// ---------------------------------------------------------------------------
// Variance machinery of the central limit theorems
// ---------------------------------------------------------------------------

// Integrals over [0,1] of products of the singularity ingredients.
struct VarianceIngredients {
    double g0_sq = 0.0;
    double gtilde_sq = 0.0;
    double c_diag_sq = 0.0;
    double g0_gtilde = 0.0;
    double g0_c = 0.0;
    double gtilde_c = 0.0;
};

double sigma_sq_general(const VarianceIngredients& ing, double gamma);

struct CovVariances {
    double sigma1_cov_sq = 0.0;
    double sigma2_cov_sq = 0.0;
    double sigma_star_sq = 0.0;
};

CovVariances sigma_covs_general(const VarianceIngredients& ing, double gamma,
                                double sigma_sq);

// ---------------------------------------------------------------------------
// Per-model theoretical constants
// ---------------------------------------------------------------------------

enum class SlowlyVarying { unit, inverse_sqrt_log };
enum class AfbmRegime { not_afbm, lass_case_one, lass_case_two, non_lass };

struct TheoreticalConstants {
    ModelKind kind = ModelKind::fbm;
    double gamma = 0.0;
    SlowlyVarying slowly_varying = SlowlyVarying::unit;

    // ingredient integrals
    double g0_integral = 0.0;
    double gtilde_integral = 0.0;
    double c_diag_integral = 0.0;
    double c_diag_sq_integral = 0.0;
    double rho_norm = 0.0; // ||rho_gamma||^2

    // CLT constants (model scale included)
    double sigma_sq = 0.0;
    double sigma1_cov_sq = 0.0;
    double sigma2_cov_sq = 0.0;
    double sigma_star_sq = 0.0;
    double sigma_cross() const { return std::exp2(gamma - 2.0) * sigma_star_sq; }

    // almost-sure limit of the normalized variation, and the index the
    // V_{2n}/V_n ratio estimator recovers (H, HK or Hmin)
    double as_limit = 0.0;
    double ratio_index = 0.0;

    // ratio-estimator asymptotic variance: the delta-method value and the
    // form printed in the source displays (they differ; see docs/schema.md)
    double ratio_var = 0.0;
    double ratio_var_display = 0.0;

    static constexpr double nan = std::numeric_limits<double>::quiet_NaN();

    // bifbm
    double hurst = nan, k = nan, t1 = nan, t2 = nan;
    double k_var = nan;
    double h_var = nan, h_var_display = nan;
    double eta1 = nan, eta2 = nan, eta3 = nan, eta_sq = nan;

    // afbm
    AfbmRegime regime = AfbmRegime::not_afbm;
    double j_hmin = nan;        // l.a.s.s.
    double g_theta_star = nan;  // non-l.a.s.s.
    double sigma0 = nan;        // Laplace expansion, order 0
    double sigma1_laplace = nan; // Laplace expansion, order 1

    // bias integral phi(h); empty handle means phi == 0
    std::function<double(double)> phi;
    double phi_at(double h) const { return phi ? phi(h) : 0.0; }

    // multiplier that sends V_n to its almost-sure limit: n^{1-gamma}/L(1/n)
    double vn_normalizer(long n) const;
};

TheoreticalConstants fbm_constants(double hurst);
TheoreticalConstants bifbm_constants(double hurst, double k, double t1, double t2);
TheoreticalConstants afbm_lass_constants(const AfbmSegmentModel& model);
TheoreticalConstants afbm_nonlass_constants(const AfbmSegmentModel& model);
TheoreticalConstants constants_for(const ProcessModel& model);

// sqrt(-log h) * 8 int Lambda(theta)(4-2^{2H(theta)}) h^{2(H(theta)-Hmin)} dtheta,
// the curve whose h->0 limit is (4-2^{2Hmin}) G_{theta*}.
double afbm_laplace_curve(const AfbmSegmentModel& model, double h);

// Full-plane AFBM variogram v(t) (quadrature over [0, 2pi)).
double variogram(const HurstProfile& profile, double x, double y, double tol = 1e-12);

// Limit of sqrt(log(1/eps)) eps^{-2Hmin} v(eps t) for a smooth profile.
double variogram_limit(const HurstProfile& profile, double x, double y);

} // namespace fracvar
