#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fracvar/asymptotics.hpp"
#include "fracvar/models.hpp"
#include "fracvar/numeric.hpp"
#include "fracvar/quadvar.hpp"

#include <cmath>
#include <numbers>

using namespace fracvar;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kLog2 = std::numbers::ln2;

double fbm_c(double h) { return -h * (2 * h - 1) * (2 * h - 2) * (2 * h - 3); }
} // namespace

TEST_CASE("rho closed form") {
    CHECK(rho(1.0, 2) == doctest::Approx(10 * std::log(2.0) - 6 * std::log(3.0))
                             .epsilon(1e-14));
    CHECK(rho(1.0, 2) == doctest::Approx(0.33979807359079495).epsilon(1e-14));
    CHECK(rho(0.5, 3) == doctest::Approx(0.07741497734040778).epsilon(1e-13));
    CHECK(rho(1.7, 2) == doctest::Approx(0.68365352700875773).epsilon(1e-13));

    SUBCASE("domain errors") {
        CHECK_THROWS_AS(rho(0.0, 3), std::domain_error);
        CHECK_THROWS_AS(rho(2.0, 3), std::domain_error);
        CHECK_THROWS_AS(rho(-1.0, 3), std::domain_error);
        CHECK_THROWS_AS(rho(1.0, 0), std::domain_error);
        CHECK_THROWS_AS(rho(1.0 + 1e-8, 1), std::domain_error);
    }

    SUBCASE("near-gamma-1 branch is continuous") {
        for (long l : {2L, 5L, 20L}) {
            const double left = rho(1.0 - 5e-7, l);
            const double right = rho(1.0 + 5e-7, l);
            const double mid = rho(1.0, l);
            CHECK(std::abs(0.5 * (left + right) - mid) < 1e-10);
            CHECK(std::abs(left - right) < 1e-5);
        }
        // straddle the switch: values on both sides of |gamma-1| = 1e-6 agree
        for (long l : {2L, 7L}) {
            const double in_branch = rho(1.0 + 0.99e-6, l);
            const double out_branch = rho(1.0 + 1.01e-6, l);
            CHECK(in_branch == doctest::Approx(out_branch).epsilon(1e-7));
        }
    }

    SUBCASE("decay sandwich (l+2)^{-2-g} <= rho <= (l-2)^{-2-g}") {
        for (double g : {0.3, 1.0, 1.7}) {
            for (long l = 4; l <= 200; l += 7) {
                const double r = rho(g, l);
                CHECK(r > 0.0);
                CHECK(r <= std::pow(static_cast<double>(l - 2), -2.0 - g) * (1 + 1e-12));
                CHECK(r >= std::pow(static_cast<double>(l + 2), -2.0 - g) * (1 - 1e-12));
            }
        }
    }
}

TEST_CASE("rho_numeric oracle equivalence") {
    for (double g : {0.3, 1.0, 1.7}) {
        for (long l = 2; l <= 10; ++l) {
            quad::Result r = rho_numeric(g, l);
            CHECK(r.converged);
            CHECK(r.value == doctest::Approx(rho(g, l)).epsilon(1e-8));
            CHECK(std::abs(r.value - rho(g, l)) < 1e-8);
        }
    }
    CHECK_THROWS_AS(rho_numeric(0.5, 1), std::domain_error);
}

TEST_CASE("rho_norm_sq") {
    CHECK(rho_norm_sq(1.0) >= rho(1.0, 2) * rho(1.0, 2));
    CHECK(rho_norm_sq(1.0) == doctest::Approx(0.11822060901624339).epsilon(1e-10));

    SUBCASE("partial sums are monotone") {
        double partial = 0.0;
        for (long l = 2; l <= 50; ++l) {
            const double r = rho(0.7, l);
            partial += r * r;
            CHECK(partial <= rho_norm_sq(0.7) * (1 + 1e-13));
        }
    }

    SUBCASE("tail bound at L=1e4 for gamma=0.3") {
        // sum_{l>L} rho^2 <= (L-2)^{-(3+2g)}/(3+2g)
        const double bound = std::pow(1e4 - 2.0, -3.6) / 3.6;
        CHECK(bound < 1e-12);
    }
}

TEST_CASE("sigma_sq_general") {
    VarianceIngredients zero;
    CHECK(sigma_sq_general(zero, 0.7) == 0.0);

    VarianceIngredients ing;
    ing.g0_sq = 4.0;
    ing.gtilde_sq = 1.0;
    ing.c_diag_sq = 0.0;
    CHECK(sigma_sq_general(ing, 1.0) == doctest::Approx(12.0).epsilon(1e-15));

    SUBCASE("linear in each ingredient") {
        VarianceIngredients a, b;
        a.g0_sq = 1.0;
        b.gtilde_sq = 2.0;
        VarianceIngredients ab;
        ab.g0_sq = 1.0;
        ab.gtilde_sq = 2.0;
        CHECK(sigma_sq_general(ab, 0.9) ==
              doctest::Approx(sigma_sq_general(a, 0.9) + sigma_sq_general(b, 0.9))
                  .epsilon(1e-15));
    }
}

TEST_CASE("sigma_covs_general") {
    SUBCASE("zero C and gtilde") {
        VarianceIngredients ing;
        ing.g0_sq = 4.0;
        const double sig = sigma_sq_general(ing, 1.2);
        CovVariances cv = sigma_covs_general(ing, 1.2, sig);
        CHECK(cv.sigma1_cov_sq == 0.0);
        CHECK(cv.sigma2_cov_sq == 0.0);
        CHECK(cv.sigma_star_sq == doctest::Approx(3.0 * sig).epsilon(1e-15));
    }
}

TEST_CASE("fbm constants") {
    SUBCASE("H = 0.5") {
        TheoreticalConstants c = fbm_constants(0.5);
        CHECK(c.gamma == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(c.sigma_sq == doctest::Approx(12.0).epsilon(1e-14));
        CHECK(c.gtilde_integral == doctest::Approx(-1.0).epsilon(1e-14));
        CHECK(c.c_diag_integral == doctest::Approx(0.0).epsilon(1e-20));
        CHECK(c.sigma1_cov_sq == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(c.sigma2_cov_sq == doctest::Approx(-8.0).epsilon(1e-14));
        CHECK(c.sigma_star_sq == doctest::Approx(6.0).epsilon(1e-13));
        CHECK(c.sigma_cross() == doctest::Approx(3.0).epsilon(1e-13));
        CHECK(c.as_limit == doctest::Approx(2.0).epsilon(1e-15));
        // display form of the ratio-estimator variance: 24/(8 log 2)
        CHECK(c.ratio_var_display ==
              doctest::Approx(4.3280851226668902).epsilon(1e-13));
        // delta-method value: 24/(32 log^2 2)
        CHECK(c.ratio_var == doctest::Approx(1.5610267357542058).epsilon(1e-13));
    }

    SUBCASE("extended-rho identities (l = 0, 1) on 20 H values") {
        for (int i = 1; i <= 20; ++i) {
            const double h = i / 21.0;
            const double g = 2.0 - 2.0 * h;
            const double g0 = 4.0 - std::exp2(2.0 * h);
            const double gt =
                0.5 * (std::exp2(2.0 * h + 2.0) - 7.0 - std::pow(3.0, 2.0 * h));
            CHECK(std::abs(fbm_c(h) * rho(g, 0) - g0) < 1e-10);
            CHECK(std::abs(fbm_c(h) * rho(g, 1) - gt) < 1e-10);
        }
    }

    SUBCASE("consistency identities at H in {0.3, 0.6, 0.8}") {
        for (double h : {0.3, 0.6, 0.8}) {
            TheoreticalConstants c = fbm_constants(h);
            CHECK(std::abs(c.c_diag_integral * rho(c.gamma, 0) - c.g0_integral) < 1e-10);
            CHECK(std::abs(c.c_diag_integral * rho(c.gamma, 1) - c.gtilde_integral) <
                  1e-10);
        }
    }

    SUBCASE("Sigma structure") {
        TheoreticalConstants c = fbm_constants(0.7);
        CHECK(c.sigma_cross() ==
              doctest::Approx(std::exp2(c.gamma - 2.0) * c.sigma_star_sq)
                  .epsilon(1e-15));
    }
}

TEST_CASE("Isserlis variance limits match sigma^2") {
    // n^{3-2gamma} Var V_n -> sigma^2; Richardson-extrapolated over n, 512/1024
    for (double h : {0.3, 0.5, 0.7}) {
        TheoreticalConstants c = fbm_constants(h);
        auto scaled = [&](int n) {
            auto dc = increment_cov(cov_grid(ProcessModel::fbm(h), n));
            return std::pow(static_cast<double>(n), 3.0 - 2.0 * c.gamma) *
                   exact_var_vn(dc);
        };
        const double a1 = scaled(512), a2 = scaled(1024);
        const double extrapolated = 2.0 * a2 - a1;
        CHECK(extrapolated == doctest::Approx(c.sigma_sq).epsilon(0.04));
    }
}

TEST_CASE("bivariate limit matches 2^{gamma-2} sigma*^2") {
    for (double h : {0.3, 0.7}) {
        TheoreticalConstants c = fbm_constants(h);
        auto scaled = [&](int n) {
            auto fine = increment_cov(cov_grid(ProcessModel::fbm(h), 2 * n));
            return std::exp2(1.0 - c.gamma) *
                   std::pow(static_cast<double>(n), 3.0 - 2.0 * c.gamma) *
                   exact_cov_vn_v2n(fine);
        };
        const double a1 = scaled(256), a2 = scaled(512);
        const double extrapolated = 2.0 * a2 - a1;
        CHECK(extrapolated == doctest::Approx(c.sigma_cross()).epsilon(0.05));
    }
}

TEST_CASE("bifbm constants") {
    SUBCASE("K=1, unit span reduces to fbm") {
        TheoreticalConstants c = bifbm_constants(0.7, 1.0, 1.0, 2.0);
        TheoreticalConstants f = fbm_constants(0.7);
        CHECK(c.as_limit == doctest::Approx(f.as_limit).epsilon(1e-10));
        CHECK(c.sigma_sq == doctest::Approx(f.sigma_sq).epsilon(1e-10));
        CHECK(c.ratio_var == doctest::Approx(f.ratio_var).epsilon(1e-10));
        // Eq. 61 at K=1, span=1 has denominator 2^{K+1} = 4: identical to the
        // section-2.4 display
        CHECK(c.ratio_var_display ==
              doctest::Approx(f.ratio_var_display).epsilon(1e-10));
    }

    SUBCASE("H=0.6, K=0.5 window [1,2]") {
        TheoreticalConstants c = bifbm_constants(0.6, 0.5, 1.0, 2.0);
        CHECK(c.gamma == doctest::Approx(1.4).epsilon(1e-15));
        CHECK(c.as_limit == doctest::Approx(3.5133073244197939).epsilon(1e-14));
        // CLT variance of Eq. 59: kappa^2 sigma^2_FBM,HK
        TheoreticalConstants f = fbm_constants(0.3);
        CHECK(c.sigma_sq == doctest::Approx(2.0 * f.sigma_sq).epsilon(1e-13));
        CHECK(c.ratio_index == doctest::Approx(0.3).epsilon(1e-15));
    }

    SUBCASE("K estimator variance, Eq. 63") {
        TheoreticalConstants c = bifbm_constants(0.6, 0.5, 1.0, 2.0);
        TheoreticalConstants f = fbm_constants(0.3);
        const double c0 = 4.0 - std::exp2(0.6);
        CHECK(c.k_var ==
              doctest::Approx(f.sigma_sq / (c0 * c0 * kLog2 * kLog2)).epsilon(1e-13));
    }
}

TEST_CASE("afbm l.a.s.s. constants") {
    SUBCASE("constant profile: J = 8 int Lambda, phi == 0") {
        AfbmSegmentModel m{HurstProfile::constant(0.6), 1.0, 0.0, 0.0};
        TheoreticalConstants c = afbm_lass_constants(m);
        AfbmKernel kernel(m);
        const double j = kernel.lambda_integral([](double) { return 1.0; });
        CHECK(c.j_hmin == doctest::Approx(j).epsilon(1e-12));
        CHECK(c.regime == AfbmRegime::lass_case_one);
        CHECK(c.phi_at(1e-3) == 0.0);
        CHECK(c.as_limit ==
              doctest::Approx((4.0 - std::exp2(1.2)) * j).epsilon(1e-12));
    }

    SUBCASE("two-level profile, Hbar > Hmin + 1/4 is Case I") {
        AfbmSegmentModel m{HurstProfile::piecewise({0.0, kPi / 2}, {0.4, 0.8}), 1.0,
                           0.0, 0.0};
        TheoreticalConstants c = afbm_lass_constants(m);
        CHECK(c.regime == AfbmRegime::lass_case_one);
        CHECK(c.phi_at(1e-4) == 0.0);
    }

    SUBCASE("two-level profile at the boundary Hbar = Hmin + 1/4: phi = A sqrt(h)") {
        AfbmSegmentModel m{HurstProfile::piecewise({0.0, kPi / 2}, {0.4, 0.65}), 1.0,
                           0.0, 0.0};
        TheoreticalConstants c = afbm_lass_constants(m);
        CHECK(c.regime == AfbmRegime::lass_case_two);
        // J_{Hmin + 1/4} is the Lambda mass of the upper level
        AfbmKernel kernel(m);
        const double j_bar =
            kernel.lambda_integral([](double h) { return h == 0.65 ? 1.0 : 0.0; });
        const double a = (4.0 - std::exp2(2.0 * 0.65)) * j_bar;
        for (double h : {1e-2, 1e-4, 1e-6})
            CHECK(c.phi_at(h) == doctest::Approx(a * std::sqrt(h)).epsilon(1e-9));
    }

    SUBCASE("smooth profile is the wrong regime") {
        AfbmSegmentModel m{HurstProfile::smooth(1.0, 0.3, 1.0), 1.0, 0.0, 1.0};
        CHECK_THROWS_AS(afbm_lass_constants(m), ModelError);
    }
}

TEST_CASE("afbm non-l.a.s.s. constants") {
    AfbmSegmentModel m{HurstProfile::smooth(1.0, 0.3, 1.0, 0.0), 1.0, 0.0, 1.0};
    TheoreticalConstants c = afbm_nonlass_constants(m);

    SUBCASE("G and the sigma0 identity") {
        const double lam = lambda_weight(1.0, m);
        CHECK(c.g_theta_star ==
              doctest::Approx(8.0 * lam * std::sqrt(kPi / 1.0)).epsilon(1e-13));
        // 16 sqrt(pi) sigma0 = (4 - 2^{2Hmin}) G (exact identity)
        CHECK(16.0 * std::sqrt(kPi) * c.sigma0 ==
              doctest::Approx((4.0 - std::exp2(0.6)) * c.g_theta_star)
                  .epsilon(1e-14));
        CHECK(c.slowly_varying == SlowlyVarying::inverse_sqrt_log);
    }

    SUBCASE("sigma1 vanishes for a symmetric profile observed along theta*") {
        // omega = theta* makes Lambda'(theta*) = 0; h3 = 0 kills the other term
        CHECK(std::abs(c.sigma1_laplace) < 1e-9);
    }

    SUBCASE("sigma1 is nonzero off-axis") {
        AfbmSegmentModel m2{HurstProfile::smooth(1.0, 0.3, 1.0, 0.0), 1.0, 0.0, 0.3};
        TheoreticalConstants c2 = afbm_nonlass_constants(m2);
        CHECK(std::abs(c2.sigma1_laplace) > 1e-6);
    }

    SUBCASE("Laplace curve converges monotonically to the limit") {
        double prev_gap = 1e9;
        for (double h : {1e-4, 1e-6, 1e-8, 1e-10}) {
            const double gap = std::abs(afbm_laplace_curve(m, h) - c.as_limit);
            CHECK(gap < prev_gap);
            prev_gap = gap;
        }
        CHECK(prev_gap / c.as_limit < 0.15);
    }

    SUBCASE("phi at h = 1/n shrinks") {
        const double p1 = std::abs(c.phi_at(1.0 / 1024.0));
        const double p2 = std::abs(c.phi_at(1.0 / 16384.0));
        CHECK(p2 < p1);
    }
}

TEST_CASE("variogram and its Laplace limit") {
    HurstProfile prof = HurstProfile::smooth(1.0, 0.3, 1.0, 0.0);

    SUBCASE("limit vanishes at rho(t)=0 and along theta* + pi/2") {
        CHECK(variogram_limit(prof, 0.0, 0.0) == 0.0);
        const double a = 1.0 + kPi / 2;
        // cos(pi/2) only vanishes to machine precision
        CHECK(std::abs(variogram_limit(prof, std::cos(a), std::sin(a))) < 1e-9);
    }

    SUBCASE("scaled variogram approaches the limit") {
        const double x = std::cos(0.6), y = std::sin(0.6);
        const double limit = variogram_limit(prof, x, y);
        const double eps = 1e-6;
        const double v = variogram(prof, eps * x, eps * y, 1e-16);
        const double scaled = v * std::sqrt(-std::log(eps)) / std::pow(eps, 0.6);
        CHECK(scaled == doctest::Approx(limit).epsilon(0.15));
        const double eps2 = 1e-9;
        const double v2 = variogram(prof, eps2 * x, eps2 * y, 1e-18);
        const double scaled2 = v2 * std::sqrt(-std::log(eps2)) / std::pow(eps2, 0.6);
        CHECK(std::abs(scaled2 - limit) < std::abs(scaled - limit));
    }
}
