#include "fracvar/models.hpp"

#include "fracvar/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace fracvar {

namespace {
constexpr double kPi = std::numbers::pi;

void check_hurst(double h, const char* who) {
    if (!(h > 0.0 && h < 1.0))
        throw ModelError(std::string(who) + ": Hurst index must lie in (0,1)");
}

double pow_abs(double x, double p) { return std::pow(std::abs(x), p); }
} // namespace

double fbm_cov(double s, double t, double hurst) {
    check_hurst(hurst, "fbm_cov");
    const double th = 2.0 * hurst;
    return 0.5 * (pow_abs(s, th) + pow_abs(t, th) - pow_abs(s - t, th));
}

double bifbm_cov(double s, double t, double hurst, double k) {
    check_hurst(hurst, "bifbm_cov");
    // K = 1 is the FBM reduction and stays legal for the kernel
    if (!(k > 0.0 && k <= 1.0))
        throw ModelError("bifbm_cov: K must lie in (0,1]");
    if (s < 0.0 || t < 0.0)
        throw ModelError("bifbm_cov: requires s,t >= 0");
    const double th = 2.0 * hurst;
    return std::exp2(-k) *
           (std::pow(std::pow(s, th) + std::pow(t, th), k) - pow_abs(s - t, th * k));
}

double bifbm_segment_cov(double s, double t, const BifbmModel& m) {
    return bifbm_cov(m.tau(s), m.tau(t), m.hurst, m.k);
}

double c_norm(int d, double hurst) {
    if (d < 1) throw ModelError("c_norm: dimension must be >= 1");
    check_hurst(hurst, "c_norm");
    const double num = std::pow(kPi, 0.5 * (d + 1)) * std::tgamma(hurst + 0.5);
    const double den = hurst * std::tgamma(2.0 * hurst) * std::sin(hurst * kPi) *
                       std::tgamma(hurst + 0.5 * d);
    return std::sqrt(num / den);
}

double lambda_weight(double theta, const AfbmSegmentModel& m) {
    const double h = m.profile(theta);
    const double c2 = c_norm(2, m.profile.h_min());
    return c_norm(1, h) * std::pow(m.length, 2.0 * h) *
           pow_abs(std::cos(theta - m.omega), 2.0 * h) / (8.0 * c2 * c2);
}

// ---------------------------------------------------------------------------
// AfbmKernel
// ---------------------------------------------------------------------------

AfbmKernel::AfbmKernel(AfbmSegmentModel model, double tol)
    : model_(std::move(model)), tol_(tol) {
    if (!(model_.length > 0.0)) throw ModelError("afbm: segment length must be positive");
    if (model_.eps < 0.0) throw ModelError("afbm: eps must be nonnegative");

    const double sing = reduce_angle_pi(model_.omega + 0.5 * kPi);
    if (sing > 0.0 && sing < kPi) splits_.push_back(sing);
    for (const auto& s : model_.profile.segments())
        if (s.start > 0.0 && s.start < kPi) splits_.push_back(s.start);
    std::sort(splits_.begin(), splits_.end());

    if (model_.profile.kind() != HurstProfile::Kind::smooth) {
        // Constant H per segment: W(x) = 4 sum_i coeff_i x^{2 H_i} with
        // coeff_i = Lambda-amplitude * int_seg |cos(theta-omega)|^{2 H_i}.
        separable_ = true;
        const double c2 = c_norm(2, model_.profile.h_min());
        const double norm = 1.0 / (8.0 * c2 * c2);
        for (const auto& seg : model_.profile.segments()) {
            const double h = seg.value;
            const double amp = c_norm(1, h) * std::pow(model_.length, 2.0 * h) * norm;
            quad::Options opts;
            opts.abs_tol = tol_ / (16.0 * model_.profile.segments().size());
            const double omega = model_.omega;
            double integral = quad::integrate_or_throw(
                [h, omega](double th) { return pow_abs(std::cos(th - omega), 2.0 * h); },
                seg.start, seg.end, opts, splits_, "afbm segment weight quadrature");
            seg_coeff_.push_back(amp * integral);
            seg_h_.push_back(h);
        }
    }
}

quad::Result AfbmKernel::w_detailed(double x) const {
    const double ax = std::abs(x);
    if (separable_) {
        quad::Result r;
        for (size_t i = 0; i < seg_coeff_.size(); ++i)
            r.value += seg_coeff_[i] * std::pow(ax, 2.0 * seg_h_[i]);
        r.value *= 4.0;
        r.error = tol_ * 0.5 * std::max(1.0, ax * ax);
        r.converged = true;
        return r;
    }
    const AfbmSegmentModel& m = model_;
    quad::Options opts;
    opts.abs_tol = tol_ / 4.0;
    quad::Result r = quad::integrate(
        [&m, ax](double th) { return lambda_weight(th, m) * std::pow(ax, 2.0 * m.profile(th)); },
        0.0, kPi, opts, splits_);
    r.value *= 4.0;
    r.error *= 4.0;
    return r;
}

double AfbmKernel::w(double x) const {
    quad::Result r = w_detailed(x);
    if (!r.converged)
        throw NumericalError("afbm covariance quadrature did not converge", r.error);
    return r.value;
}

double AfbmKernel::cov(double s, double t) const {
    return w(s + model_.eps) + w(t + model_.eps) - w(s - t);
}

double AfbmKernel::lambda_integral(const std::function<double(double)>& factor_of_h,
                                   std::span<const double> extra_splits,
                                   double tol) const {
    std::vector<double> splits(splits_.begin(), splits_.end());
    splits.insert(splits.end(), extra_splits.begin(), extra_splits.end());
    std::sort(splits.begin(), splits.end());
    const AfbmSegmentModel& m = model_;
    quad::Options opts;
    opts.abs_tol = tol / 8.0;
    double integral = quad::integrate_or_throw(
        [&m, &factor_of_h](double th) {
            return lambda_weight(th, m) * factor_of_h(m.profile(th));
        },
        0.0, kPi, opts, splits, "afbm lambda quadrature");
    return 8.0 * integral;
}

quad::Result afbm_segment_cov_detailed(double s, double t, const AfbmSegmentModel& m,
                                       double tol) {
    if (s < 0.0 || s > 1.0 || t < 0.0 || t > 1.0)
        throw ModelError("afbm_segment_cov: s,t must lie in [0,1]");
    AfbmKernel kernel(m, tol);
    quad::Result a = kernel.w_detailed(s + m.eps);
    quad::Result b = kernel.w_detailed(t + m.eps);
    quad::Result c = kernel.w_detailed(s - t);
    quad::Result out;
    out.value = a.value + b.value - c.value;
    out.error = a.error + b.error + c.error;
    out.converged = a.converged && b.converged && c.converged;
    out.panels = a.panels + b.panels + c.panels;
    return out;
}

double afbm_segment_cov(double s, double t, const AfbmSegmentModel& m, double tol) {
    quad::Result r = afbm_segment_cov_detailed(s, t, m, tol);
    if (!r.converged)
        throw NumericalError("afbm covariance quadrature did not converge", r.error);
    return r.value;
}

// ---------------------------------------------------------------------------
// ProcessModel
// ---------------------------------------------------------------------------

ProcessModel ProcessModel::fbm(double hurst) {
    check_hurst(hurst, "ProcessModel::fbm");
    ProcessModel p;
    p.kind_ = ModelKind::fbm;
    p.data_ = FbmModel{hurst};
    return p;
}

ProcessModel ProcessModel::bifbm(double hurst, double k, double t1, double t2) {
    check_hurst(hurst, "ProcessModel::bifbm");
    if (!(k > 0.0 && k <= 1.0))
        throw ModelError("ProcessModel::bifbm: K must lie in (0,1]");
    if (!(t1 > 0.0 && t2 > t1))
        throw ModelError("bifbm requires 0 < T1 < T2");
    ProcessModel p;
    p.kind_ = ModelKind::bifbm;
    p.data_ = BifbmModel{hurst, k, t1, t2};
    return p;
}

ProcessModel ProcessModel::afbm_segment(HurstProfile profile, double length,
                                        double eps, double omega) {
    if (!(length > 0.0)) throw ModelError("afbm requires positive segment length");
    if (eps < 0.0) throw ModelError("afbm requires eps >= 0");
    if (!(omega >= 0.0 && omega < 2.0 * kPi))
        throw ModelError("afbm requires omega in [0, 2*pi)");
    if (profile.kind() == HurstProfile::Kind::smooth) {
        double d = reduce_angle_pi(omega - profile.theta_star() - 0.5 * kPi);
        if (std::min(d, kPi - d) < 1e-9)
            throw ModelError("afbm smooth profile requires omega != theta* + pi/2 (mod pi)");
    }
    ProcessModel p;
    p.kind_ = ModelKind::afbm_segment;
    p.data_ = AfbmSegmentModel{std::move(profile), length, eps, omega};
    return p;
}

const FbmModel& ProcessModel::as_fbm() const { return std::get<FbmModel>(data_); }
const BifbmModel& ProcessModel::as_bifbm() const { return std::get<BifbmModel>(data_); }
const AfbmSegmentModel& ProcessModel::as_afbm() const {
    return std::get<AfbmSegmentModel>(data_);
}

const AfbmKernel& ProcessModel::afbm_kernel() const {
    if (!kernel_) kernel_ = std::make_shared<AfbmKernel>(as_afbm());
    return *kernel_;
}

double ProcessModel::cov(double s, double t) const {
    switch (kind_) {
    case ModelKind::fbm:
        return fbm_cov(s, t, as_fbm().hurst);
    case ModelKind::bifbm:
        return bifbm_segment_cov(s, t, as_bifbm());
    case ModelKind::afbm_segment:
        return afbm_kernel().cov(s, t);
    }
    return 0.0;
}

std::string ProcessModel::name() const {
    std::ostringstream os;
    switch (kind_) {
    case ModelKind::fbm:
        os << "fbm(H=" << as_fbm().hurst << ")";
        break;
    case ModelKind::bifbm: {
        const auto& m = as_bifbm();
        os << "bifbm(H=" << m.hurst << ",K=" << m.k << ",T1=" << m.t1 << ",T2=" << m.t2
           << ")";
        break;
    }
    case ModelKind::afbm_segment: {
        const auto& m = as_afbm();
        os << "afbm(";
        switch (m.profile.kind()) {
        case HurstProfile::Kind::constant:
            os << "H=" << m.profile.h_min();
            break;
        case HurstProfile::Kind::piecewise_constant:
            os << "piecewise,Hmin=" << m.profile.h_min() << ",Hmax=" << m.profile.h_max();
            break;
        case HurstProfile::Kind::smooth:
            os << "smooth,Hmin=" << m.profile.h_min() << ",theta*=" << m.profile.theta_star();
            break;
        }
        os << ",L=" << m.length << ",eps=" << m.eps << ",omega=" << m.omega << ")";
        break;
    }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// CovGrid
// ---------------------------------------------------------------------------

double CovGrid::max_diagonal() const {
    double m = 0.0;
    for (int i = 0; i <= n; ++i) m = std::max(m, at(i, i));
    return m;
}

CovGrid cov_grid(const ProcessModel& model, int n) {
    if (n < 4) throw ModelError("cov_grid: resolution must be >= 4");

    CovGrid g;
    g.kind = model.kind();
    g.n = n;
    g.values.assign(static_cast<size_t>(n + 1) * (n + 1), 0.0);

    if (model.kind() == ModelKind::afbm_segment) {
        const AfbmKernel& kernel = model.afbm_kernel();
        const double eps = model.as_afbm().eps;
        std::vector<double> wdiag(n + 1), wdiff(n + 1);
        for (int k = 0; k <= n; ++k) {
            wdiag[k] = kernel.w(static_cast<double>(k) / n + eps);
            wdiff[k] = kernel.w(static_cast<double>(k) / n);
        }
        for (int j = 0; j <= n; ++j)
            for (int k = 0; k <= j; ++k) {
                double v = wdiag[j] + wdiag[k] - wdiff[j - k];
                g.at(j, k) = v;
                g.at(k, j) = v;
            }
    } else {
        for (int j = 0; j <= n; ++j)
            for (int k = 0; k <= j; ++k) {
                double v = model.cov(static_cast<double>(j) / n, static_cast<double>(k) / n);
                g.at(j, k) = v;
                g.at(k, j) = v;
            }
    }

    for (int i = 0; i <= n; ++i)
        if (g.at(i, i) < 0.0)
            throw ModelError("cov_grid: negative variance on the diagonal");
    return g;
}

} // namespace fracvar
