#include "fracvar/asymptotics.hpp"

#include "fracvar/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

namespace fracvar {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLog2 = std::numbers::ln2;
constexpr int kStencil[5] = {1, -4, 6, -4, 1};

void check_gamma(double g) {
    if (!(g > 0.0 && g < 2.0))
        throw std::domain_error("rho: gamma must lie in (0,2)");
}

// Smallest L such that sum_{l>L} (l-2)^{-(3+2g)} style tails fall below 1e-12.
long tail_cutoff(double g) {
    const double p = 3.0 + 2.0 * g;
    double l = std::pow(1e12 / p, 1.0 / p) + 3.0;
    return std::clamp(static_cast<long>(l), 64L, 4000000L);
}

double fbm_c_diag(double h) {
    return -h * (2.0 * h - 1.0) * (2.0 * h - 2.0) * (2.0 * h - 3.0);
}

double fbm_g0(double h) { return 4.0 - std::exp2(2.0 * h); }

double fbm_gtilde(double h) {
    return 0.5 * (std::exp2(2.0 * h + 2.0) - 7.0 - std::pow(3.0, 2.0 * h));
}

} // namespace

double rho(double gamma, long l) {
    check_gamma(gamma);
    if (l < 0) throw std::domain_error("rho: lag must be nonnegative");

    const bool near_one = std::abs(gamma - 1.0) < 1e-6;
    if (near_one && l < 2)
        throw std::domain_error("rho: extension below l=2 diverges at gamma=1");

    if (near_one) {
        // log branch plus first-order correction in (gamma - 1)
        double n1 = 0.0, n2 = 0.0;
        for (int i = 0; i < 5; ++i) {
            const double x = std::abs(static_cast<double>(l + i - 2));
            if (x > 0.0) {
                const double lx = std::log(x);
                n1 -= kStencil[i] * x * lx;
                n2 += kStencil[i] * x * lx * lx;
            }
        }
        const double e = gamma - 1.0;
        return (n1 + 0.5 * e * n2) / (-2.0 - e);
    }

    double num = 0.0;
    for (int i = 0; i < 5; ++i) {
        const double x = std::abs(static_cast<double>(l + i - 2));
        if (x > 0.0) num += kStencil[i] * std::pow(x, 2.0 - gamma);
    }
    const double den = (gamma - 2.0) * (gamma - 1.0) * gamma * (gamma + 1.0);
    return num / den;
}

quad::Result rho_numeric(double gamma, long l, double tol) {
    check_gamma(gamma);
    if (l < 2)
        throw std::domain_error("rho_numeric: integral representation needs l >= 2");

    // Two inner variables integrate in closed form:
    //   int_{u-1}^{u} dv int_{x-1}^{x} (v-y)^{-2-gamma} dy
    //     = [ (u-x-1)^{-gamma} - 2 (u-x)^{-gamma} + (u-x+1)^{-gamma} ] / (gamma (gamma+1))
    // =: D2(u-x). The remaining double integral over the unit square in (u,x)
    // depends on w = u - x alone, so it equals the integral of D2 against the
    // triangular pushforward density 1 - |w - l| on [l-1, l+1].
    const double g = gamma;
    const double scale = 1.0 / (g * (g + 1.0));
    auto d2 = [g, scale](double w) {
        return scale * (std::pow(w - 1.0, -g) - 2.0 * std::pow(w, -g) +
                        std::pow(w + 1.0, -g));
    };
    const double lo = static_cast<double>(l - 1);
    const double hi = static_cast<double>(l + 1);
    const double mid = static_cast<double>(l);

    quad::Result total;
    total.converged = true;

    double a = lo;
    if (l == 2) {
        // D2 has an integrable (w-1)^{-gamma} singularity at the left
        // endpoint; the substitution w = 1 + t^q makes the integrand C^2.
        const double strip = 0.5;
        const int q = std::max(2, static_cast<int>(std::ceil(3.0 / (2.0 - g))));
        quad::Options opts;
        opts.abs_tol = tol / 3.0;
        // On [1, 1+strip] the weight equals w - 1 = t^q exactly; keeping the
        // singular product in terms of t^q avoids the 1 + t^q rounding that
        // would otherwise produce inf * 0.
        quad::Result corner = quad::integrate(
            [&](double t) {
                const double tq = std::pow(t, q);
                const double jac = q * std::pow(t, q - 1);
                const double singular = std::pow(tq, 1.0 - g);
                const double smooth =
                    (-2.0 * std::pow(1.0 + tq, -g) + std::pow(2.0 + tq, -g)) * tq;
                return scale * (singular + smooth) * jac;
            },
            0.0, std::pow(strip, 1.0 / q), opts);
        total.value += corner.value;
        total.error += corner.error;
        total.converged = total.converged && corner.converged;
        total.panels += corner.panels;
        a = lo + strip;
    }

    quad::Options opts;
    opts.abs_tol = tol / 3.0;
    const double splits[1] = {mid};
    quad::Result main = quad::integrate(
        [&](double w) { return d2(w) * (1.0 - std::abs(w - mid)); }, a, hi, opts,
        std::span<const double>(splits, 1));
    total.value += main.value;
    total.error += main.error;
    total.converged = total.converged && main.converged && total.error <= tol;
    total.panels += main.panels;
    return total;
}

double rho_norm_sq(double gamma) {
    check_gamma(gamma);
    const long lmax = tail_cutoff(gamma);
    CompensatedSum acc;
    for (long l = 2; l <= lmax; ++l) {
        const double r = rho(gamma, l);
        acc.add(r * r);
    }
    return acc.value();
}

double rho_lag_series(double gamma, int lag, long lmin) {
    check_gamma(gamma);
    if (lmin < lag + 2)
        throw std::domain_error("rho_lag_series: lmin must keep both lags >= 2");
    const long lmax = tail_cutoff(gamma) + lag;
    CompensatedSum acc;
    for (long l = lmin; l <= lmax; ++l) acc.add(rho(gamma, l) * rho(gamma, l - lag));
    return acc.value();
}

double sigma_sq_general(const VarianceIngredients& ing, double gamma) {
    return 2.0 * ing.g0_sq + 4.0 * ing.gtilde_sq +
           4.0 * rho_norm_sq(gamma) * ing.c_diag_sq;
}

CovVariances sigma_covs_general(const VarianceIngredients& ing, double gamma,
                                double sigma_sq) {
    CovVariances out;
    out.sigma1_cov_sq = 2.0 * ing.gtilde_sq + 4.0 * rho(gamma, 2) * ing.g0_c +
                        4.0 * rho(gamma, 3) * ing.gtilde_c +
                        4.0 * ing.c_diag_sq * rho_lag_series(gamma, 2, 4);
    out.sigma2_cov_sq = 4.0 * ing.g0_gtilde + 4.0 * rho(gamma, 2) * ing.gtilde_c +
                        4.0 * ing.c_diag_sq * rho_lag_series(gamma, 1, 3);
    out.sigma_star_sq = 3.0 * sigma_sq + out.sigma1_cov_sq + 4.0 * out.sigma2_cov_sq;
    return out;
}

double TheoreticalConstants::vn_normalizer(long n) const {
    double f = std::pow(static_cast<double>(n), 1.0 - gamma);
    if (slowly_varying == SlowlyVarying::inverse_sqrt_log)
        f *= std::sqrt(std::log(static_cast<double>(n)));
    return f;
}

TheoreticalConstants fbm_constants(double hurst) {
    if (!(hurst > 0.0 && hurst < 1.0))
        throw ModelError("fbm_constants: Hurst index must lie in (0,1)");

    TheoreticalConstants c;
    c.kind = ModelKind::fbm;
    c.hurst = hurst;
    c.gamma = 2.0 - 2.0 * hurst;
    c.slowly_varying = SlowlyVarying::unit;

    const double g0 = fbm_g0(hurst);
    const double gt = fbm_gtilde(hurst);
    const double cd = fbm_c_diag(hurst);
    c.g0_integral = g0;
    c.gtilde_integral = gt;
    c.c_diag_integral = cd;
    c.c_diag_sq_integral = cd * cd;
    c.rho_norm = rho_norm_sq(c.gamma);

    VarianceIngredients ing;
    ing.g0_sq = g0 * g0;
    ing.gtilde_sq = gt * gt;
    ing.c_diag_sq = cd * cd;
    ing.g0_gtilde = g0 * gt;
    ing.g0_c = g0 * cd;
    ing.gtilde_c = gt * cd;

    c.sigma_sq = 2.0 * ing.g0_sq + 4.0 * ing.gtilde_sq + 4.0 * c.rho_norm * ing.c_diag_sq;
    CovVariances cv = sigma_covs_general(ing, c.gamma, c.sigma_sq);
    c.sigma1_cov_sq = cv.sigma1_cov_sq;
    c.sigma2_cov_sq = cv.sigma2_cov_sq;
    c.sigma_star_sq = cv.sigma_star_sq;

    c.as_limit = g0;
    c.ratio_index = hurst;

    const double num = 3.0 * c.sigma_sq - std::exp2(2.0 - 2.0 * hurst) * c.sigma_star_sq;
    c.ratio_var = num / (8.0 * g0 * g0 * kLog2 * kLog2);
    c.ratio_var_display = num / (4.0 * g0 * kLog2);
    return c;
}

TheoreticalConstants bifbm_constants(double hurst, double k, double t1, double t2) {
    if (!(t1 > 0.0 && t2 > t1))
        throw ModelError("bifbm_constants: requires 0 < T1 < T2");
    const double hk = hurst * k;
    TheoreticalConstants base = fbm_constants(hk);

    // All singularity ingredients scale by kappa = (T2-T1)^{2HK} 2^{1-K}.
    const double span = t2 - t1;
    const double kappa = std::pow(span, 2.0 * hk) * std::exp2(1.0 - k);

    TheoreticalConstants c = base;
    c.kind = ModelKind::bifbm;
    c.hurst = hurst;
    c.k = k;
    c.t1 = t1;
    c.t2 = t2;
    c.g0_integral *= kappa;
    c.gtilde_integral *= kappa;
    c.c_diag_integral *= kappa;
    c.c_diag_sq_integral *= kappa * kappa;
    c.sigma_sq *= kappa * kappa;
    c.sigma1_cov_sq *= kappa * kappa;
    c.sigma2_cov_sq *= kappa * kappa;
    c.sigma_star_sq *= kappa * kappa;
    c.as_limit *= kappa;
    c.ratio_index = hk;

    // Estimator variances. sigF/starF are the FBM(HK) constants; the ratio
    // estimator is scale invariant so kappa drops out of the delta-method
    // value, while the display keeps the printed factors.
    const double sigF = base.sigma_sq;
    const double starF = base.sigma_star_sq;
    const double c0 = base.g0_integral; // 4 - 2^{2HK}
    const double num = 3.0 * sigF - std::exp2(2.0 - 2.0 * hk) * starF;

    c.ratio_var = base.ratio_var;
    c.ratio_var_display =
        num * std::pow(span, 4.0 * hk) / (std::exp2(k + 1.0) * c0 * kLog2);

    c.k_var = sigF / (c0 * c0 * kLog2 * kLog2);

    c.eta1 = std::exp2(2.0 * k - 2.0) * sigF /
             (c0 * c0 * kLog2 * kLog2 * std::pow(span, 4.0 * hk));
    c.eta2 = std::exp2(k - 1.0) * num / (4.0 * c0 * kLog2);
    c.eta3 = std::exp2(2.0 * k - 2.0) *
             (std::exp2(-2.0 * hk) * starF - sigF) /
             (2.0 * c0 * c0 * kLog2 * kLog2 * std::pow(span, 2.0 * hk));
    c.eta_sq = (hurst * hurst / (k * k)) * c.eta1 + (1.0 / (k * k)) * c.eta2 -
               (2.0 * hurst / (k * k)) * c.eta3;
    c.h_var_display = std::pow(span, 4.0 * hk) / std::exp2(2.0 * (k - 1.0)) * c.eta_sq;

    const double cov_hk_k =
        (std::exp2(-2.0 * hk) * starF - sigF) / (2.0 * c0 * c0 * kLog2 * kLog2);
    c.h_var = (1.0 / (k * k)) * c.ratio_var + (hurst * hurst / (k * k)) * c.k_var -
              (2.0 * hurst / (k * k)) * cov_hk_k;
    return c;
}

namespace {

// Model constants shared by both AFBM regimes: everything is the FBM(Hmin)
// constant scaled by the angular mass (J in the l.a.s.s. case, G_{theta*}
// otherwise).
TheoreticalConstants afbm_scaled_constants(double h_min, double mass) {
    TheoreticalConstants base = fbm_constants(h_min);
    TheoreticalConstants c = base;
    c.kind = ModelKind::afbm_segment;
    c.hurst = h_min;
    c.g0_integral *= mass;
    c.gtilde_integral *= mass;
    c.c_diag_integral *= mass;
    c.c_diag_sq_integral *= mass * mass;
    c.sigma_sq *= mass * mass;
    c.sigma1_cov_sq *= mass * mass;
    c.sigma2_cov_sq *= mass * mass;
    c.sigma_star_sq *= mass * mass;
    c.as_limit = base.g0_integral * mass;
    c.ratio_index = h_min;
    c.ratio_var = base.ratio_var;
    // Corollaries 12/19 print the angular mass to the first power here.
    const double num =
        3.0 * base.sigma_sq - std::exp2(2.0 - 2.0 * h_min) * base.sigma_star_sq;
    c.ratio_var_display = mass * num / (4.0 * base.g0_integral * kLog2);
    return c;
}

std::vector<double> profile_level_crossings(const HurstProfile& profile, double level) {
    std::vector<double> out;
    if (profile.kind() != HurstProfile::Kind::smooth) return out;
    if (level >= profile.h_max() || level <= profile.h_min()) return out;
    const double ts = profile.theta_star();
    for (int side = -1; side <= 1; side += 2) {
        double lo = 0.0, hi = 0.5 * kPi; // offsets from theta*; H monotone per side
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            if (profile(ts + side * mid) < level)
                lo = mid;
            else
                hi = mid;
        }
        out.push_back(reduce_angle_pi(ts + side * 0.5 * (lo + hi)));
    }
    return out;
}

} // namespace

TheoreticalConstants afbm_lass_constants(const AfbmSegmentModel& model) {
    if (model.profile.kind() == HurstProfile::Kind::smooth)
        throw ModelError("afbm_lass_constants: minimizing set has measure zero "
                         "(use the non-l.a.s.s. constants)");

    auto kernel = std::make_shared<AfbmKernel>(model);
    const double h_min = model.profile.h_min();

    const double j =
        kernel->lambda_integral([h_min](double h) { return h == h_min ? 1.0 : 0.0; });

    TheoreticalConstants c = afbm_scaled_constants(h_min, j);
    c.slowly_varying = SlowlyVarying::unit;
    c.j_hmin = j;

    double intermediate = 0.0;
    for (const auto& seg : model.profile.segments())
        if (seg.value > h_min && seg.value <= h_min + 0.25)
            intermediate += seg.end - seg.start;

    if (intermediate == 0.0) {
        c.regime = AfbmRegime::lass_case_one;
    } else {
        c.regime = AfbmRegime::lass_case_two;
        c.phi = [kernel, h_min](double h) {
            return kernel->lambda_integral([h_min, h](double hh) {
                if (hh > h_min && hh <= h_min + 0.25)
                    return (4.0 - std::exp2(2.0 * hh)) *
                           std::pow(h, 2.0 * (hh - h_min));
                return 0.0;
            });
        };
    }
    return c;
}

TheoreticalConstants afbm_nonlass_constants(const AfbmSegmentModel& model) {
    if (model.profile.kind() != HurstProfile::Kind::smooth)
        throw ModelError("afbm_nonlass_constants: requires a smooth profile with a "
                         "measure-zero minimizing set");

    const double h_min = model.profile.h_min();
    const double ts = model.profile.theta_star();
    const double h2 = model.profile.h2();
    const double h3 = model.profile.h3();

    const double lam_star = lambda_weight(ts, model);
    const double g_star = 8.0 * lam_star * std::sqrt(kPi / h2);

    TheoreticalConstants c = afbm_scaled_constants(h_min, g_star);
    c.slowly_varying = SlowlyVarying::inverse_sqrt_log;
    c.regime = AfbmRegime::non_lass;
    c.g_theta_star = g_star;

    const double g0f = fbm_g0(h_min);
    c.sigma0 = g0f * g_star / (16.0 * std::sqrt(kPi));

    // Lambda'(theta*) by a fourth-order central difference.
    const double step = 1e-5;
    auto lam = [&](double th) { return lambda_weight(th, model); };
    const double lam_d1 = (-lam(ts + 2 * step) + 8.0 * lam(ts + step) -
                           8.0 * lam(ts - step) + lam(ts - 2 * step)) /
                          (12.0 * step);
    c.sigma1_laplace =
        (2.0 / h2) * (0.5 * lam_d1 * g0f - h3 * lam_star / (3.0 * h2));

    auto kernel = std::make_shared<AfbmKernel>(model);
    std::vector<double> crossings = profile_level_crossings(model.profile, h_min + 0.25);
    c.phi = [kernel, h_min, g0f, g_star, crossings](double h) {
        const double integral = kernel->lambda_integral(
            [h_min, h](double hh) {
                if (hh <= h_min + 0.25)
                    return (4.0 - std::exp2(2.0 * hh)) * std::pow(h, 2.0 * (hh - h_min));
                return 0.0;
            },
            crossings);
        return std::sqrt(-std::log(h)) * integral - g0f * g_star;
    };
    return c;
}

TheoreticalConstants constants_for(const ProcessModel& model) {
    switch (model.kind()) {
    case ModelKind::fbm:
        return fbm_constants(model.as_fbm().hurst);
    case ModelKind::bifbm: {
        const auto& m = model.as_bifbm();
        return bifbm_constants(m.hurst, m.k, m.t1, m.t2);
    }
    case ModelKind::afbm_segment: {
        const auto& m = model.as_afbm();
        if (m.profile.kind() == HurstProfile::Kind::smooth)
            return afbm_nonlass_constants(m);
        return afbm_lass_constants(m);
    }
    }
    throw ModelError("constants_for: unknown model kind");
}

double afbm_laplace_curve(const AfbmSegmentModel& model, double h) {
    if (!(h > 0.0 && h < 1.0))
        throw std::domain_error("afbm_laplace_curve: h must lie in (0,1)");
    AfbmKernel kernel(model);
    const double h_min = model.profile.h_min();
    const double integral = kernel.lambda_integral([h_min, h](double hh) {
        return (4.0 - std::exp2(2.0 * hh)) * std::pow(h, 2.0 * (hh - h_min));
    });
    return std::sqrt(-std::log(h)) * integral;
}

double variogram(const HurstProfile& profile, double x, double y, double tol) {
    const double alpha = std::atan2(y, x);
    std::vector<double> splits;
    for (int m = -2; m <= 4; ++m) {
        double s = alpha + 0.5 * kPi + m * kPi;
        if (s > 0.0 && s < 2.0 * kPi) splits.push_back(s);
    }
    quad::Options opts;
    opts.abs_tol = tol;
    double integral = quad::integrate_or_throw(
        [&](double th) {
            const double h = profile(th);
            const double c1 = c_norm(1, h);
            const double proj = std::abs(x * std::cos(th) + y * std::sin(th));
            return c1 * c1 * std::pow(proj, 2.0 * h);
        },
        0.0, 2.0 * kPi, opts, splits, "variogram quadrature");
    return integral / 8.0;
}

double variogram_limit(const HurstProfile& profile, double x, double y) {
    if (profile.kind() != HurstProfile::Kind::smooth)
        throw ModelError("variogram_limit: requires a smooth profile");
    const double rho_t = std::hypot(x, y);
    if (rho_t == 0.0) return 0.0;
    const double alpha = std::atan2(y, x);
    const double h_min = profile.h_min();
    const double c1 = c_norm(1, h_min);
    // H has two antipodal minimizers on [0, 2pi), each contributing a full
    // Gaussian mass sqrt(pi/(H'' log(1/eps))) to the Laplace asymptotics of
    // the variogram integral, hence the 1/4.
    return c1 * c1 / 4.0 * std::pow(rho_t, 2.0 * h_min) *
           std::pow(std::abs(std::cos(alpha - profile.theta_star())), 2.0 * h_min) *
           std::sqrt(kPi / profile.h2());
}

} // namespace fracvar
