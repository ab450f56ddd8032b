#include "fracvar/estimators.hpp"

#include "fracvar/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fracvar {

namespace {
constexpr double kLog2 = std::numbers::ln2;
}

Estimate ratio_estimator(double vn_value, double v2n_value) {
    Estimate e;
    if (!(vn_value > 0.0) || !(v2n_value > 0.0)) {
        e.note = "invalid sample: nonpositive quadratic variation";
        return e;
    }
    e.value = 0.5 - std::log(v2n_value / vn_value) / (2.0 * kLog2);
    e.valid = true;
    return e;
}

Estimate k_estimator(double vn_value, double hk_hat, long n, double t1, double t2) {
    Estimate e;
    if (!(vn_value > 0.0)) {
        e.note = "invalid sample: nonpositive quadratic variation";
        return e;
    }
    if (!(hk_hat < 1.0)) {
        e.note = "degenerate denominator: HK estimate >= 1";
        return e;
    }
    const double c0 = 4.0 - std::exp2(2.0 * hk_hat);
    const double span = t2 - t1;
    const double arg = std::pow(static_cast<double>(n), 2.0 * hk_hat - 1.0) * vn_value /
                       (c0 * std::pow(span, 2.0 * hk_hat));
    if (!(arg > 0.0)) {
        e.note = "invalid sample: nonpositive argument of the K logarithm";
        return e;
    }
    e.value = 1.0 - std::log(arg) / kLog2;
    e.valid = e.value > 0.0 && e.value < 1.0;
    if (!e.valid) e.note = "estimate outside (0,1)";
    return e;
}

Estimate h_from_hk_k(const Estimate& hk_hat, const Estimate& k_hat) {
    Estimate e;
    if (std::isnan(hk_hat.value) || std::isnan(k_hat.value) || k_hat.value == 0.0) {
        e.note = "undefined: missing or zero K estimate";
        return e;
    }
    e.value = hk_hat.value / k_hat.value;
    e.valid = hk_hat.valid && k_hat.valid;
    if (!e.valid) e.note = "inherited invalid input";
    return e;
}

namespace {

double variance_of(EstimatorKind kind, const TheoreticalConstants& c, bool display) {
    switch (kind) {
    case EstimatorKind::hurst_ratio:
        return display ? c.ratio_var_display : c.ratio_var;
    case EstimatorKind::k_bifbm:
        if (std::isnan(c.k_var))
            throw ModelError("stderr_for: K estimator needs bifbm constants");
        return c.k_var;
    case EstimatorKind::h_bifbm:
        if (std::isnan(c.h_var))
            throw ModelError("stderr_for: H estimator needs bifbm constants");
        return display ? c.h_var_display : c.h_var;
    }
    throw ModelError("stderr_for: unknown estimator kind");
}

} // namespace

double stderr_for(EstimatorKind kind, const TheoreticalConstants& c, long n) {
    const double v = variance_of(kind, c, false);
    if (!(v >= 0.0))
        throw NumericalError("stderr_for: negative asymptotic variance "
                             "(possible regime violation)",
                             v);
    return std::sqrt(v / static_cast<double>(n));
}

double stderr_display_for(EstimatorKind kind, const TheoreticalConstants& c, long n) {
    const double v = variance_of(kind, c, true);
    if (!(v >= 0.0))
        throw NumericalError("stderr_display_for: negative asymptotic variance", v);
    return std::sqrt(v / static_cast<double>(n));
}

double afbm_bias_term(const TheoreticalConstants& c, long n) {
    if (c.regime == AfbmRegime::not_afbm || c.regime == AfbmRegime::lass_case_one ||
        !c.phi)
        return 0.0;
    // (4 - 2^{2Hmin}) J in Case II, (4 - 2^{2Hmin}) G_{theta*} otherwise
    const double base = c.as_limit;
    const double nd = static_cast<double>(n);
    return std::log((base + c.phi(0.5 / nd)) / (base + c.phi(1.0 / nd))) /
           (2.0 * kLog2);
}

EstimateReport make_report(const TheoreticalConstants* constants, long n,
                           double vn_value, double v2n_value,
                           const std::string& model_name) {
    EstimateReport rep;
    rep.model = model_name;
    rep.n = n;
    rep.vn_value = vn_value;
    rep.v2n_value = v2n_value;
    rep.ratio = ratio_estimator(vn_value, v2n_value);

    TheoreticalConstants plugin;
    const TheoreticalConstants* c = constants;
    if (!c) {
        rep.ratio_label = "H";
        if (!rep.ratio.valid) return rep;
        // plug-in: treat the path as FBM at the estimated index
        double h = std::clamp(rep.ratio.value, 1e-3, 1.0 - 1e-3);
        plugin = fbm_constants(h);
        c = &plugin;
    } else {
        switch (c->kind) {
        case ModelKind::fbm: rep.ratio_label = "H"; break;
        case ModelKind::bifbm: rep.ratio_label = "HK"; break;
        case ModelKind::afbm_segment: rep.ratio_label = "Hmin"; break;
        }
    }

    rep.ratio_stderr = stderr_for(EstimatorKind::hurst_ratio, *c, n);
    if (c->kind == ModelKind::afbm_segment)
        rep.ratio_bias = -afbm_bias_term(*c, n);

    if (c->kind == ModelKind::bifbm) {
        rep.k_hat = k_estimator(vn_value, rep.ratio.value, n, c->t1, c->t2);
        rep.k_stderr = stderr_for(EstimatorKind::k_bifbm, *c, n);
        rep.h_hat = h_from_hk_k(rep.ratio, *rep.k_hat);
        rep.h_stderr = stderr_for(EstimatorKind::h_bifbm, *c, n);
    }
    return rep;
}

} // namespace fracvar
