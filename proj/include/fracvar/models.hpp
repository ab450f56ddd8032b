#pragma once

#include "fracvar/profile.hpp"
#include "fracvar/quadrature.hpp"

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace fracvar {

// ---------------------------------------------------------------------------
// Covariance kernels
// ---------------------------------------------------------------------------

// FBM covariance (1/2)(|s|^{2H} + |t|^{2H} - |s-t|^{2H}).
double fbm_cov(double s, double t, double hurst);

// Two-parameter FBM covariance 2^{-K}((s^{2H}+t^{2H})^K - |s-t|^{2HK}),
// restricted to s,t >= 0.
double bifbm_cov(double s, double t, double hurst, double k);

// Normalization constant C(d,H) of the harmonizable representation.
double c_norm(int d, double hurst);

struct FbmModel {
    double hurst;
};

struct BifbmModel {
    double hurst;
    double k;
    double t1;
    double t2;
    double tau(double t) const { return (t2 - t1) * t + t1; }
};

struct AfbmSegmentModel {
    HurstProfile profile;
    double length = 1.0; // L
    double eps = 0.0;    // distance of the near endpoint from the origin, in units of L
    double omega = 0.0;  // segment angle
};

// bifbm kernel reparametrized to [0,1] through tau.
double bifbm_segment_cov(double s, double t, const BifbmModel& m);

// Angular weight of the segment-restricted AFBM covariance.
double lambda_weight(double theta, const AfbmSegmentModel& m);

// Segment-restricted AFBM covariance, adaptive quadrature split at the
// |cos|^{2H} singular angles (absolute tolerance `tol` per theta-integral).
double afbm_segment_cov(double s, double t, const AfbmSegmentModel& m,
                        double tol = 1e-10);

// Same value with the quadrature error estimate attached, for convergence tests.
quad::Result afbm_segment_cov_detailed(double s, double t, const AfbmSegmentModel& m,
                                       double tol = 1e-10);

// One-dimensional building block W(x) = 4 * int_0^pi Lambda(theta) |x|^{2H(theta)} dtheta.
// The segment covariance is W(s+eps) + W(t+eps) - W(|s-t|), which lets a whole
// grid be tabulated from O(n) quadratures.
class AfbmKernel {
public:
    explicit AfbmKernel(AfbmSegmentModel model, double tol = 1e-10);

    const AfbmSegmentModel& model() const { return model_; }
    double w(double x) const;
    quad::Result w_detailed(double x) const;
    double cov(double s, double t) const;

    // 8 * int_0^pi Lambda(theta) * factor(H(theta)) dtheta; the asymptotic
    // constants (J, phi, Laplace integrals) are all of this shape.
    double lambda_integral(const std::function<double(double)>& factor_of_h,
                           std::span<const double> extra_splits = {},
                           double tol = 1e-12) const;

    const std::vector<double>& singular_angles() const { return splits_; }

private:
    AfbmSegmentModel model_;
    double tol_;
    std::vector<double> splits_; // singular angles and profile breakpoints in (0, pi)
    // Piecewise-constant fast path: W(x) = 4 * sum_i coeff_i * x^{2 H_i}.
    bool separable_ = false;
    std::vector<double> seg_coeff_;
    std::vector<double> seg_h_;
};

// ---------------------------------------------------------------------------
// Process model
// ---------------------------------------------------------------------------

enum class ModelKind { fbm, bifbm, afbm_segment };

class ProcessModel {
public:
    static ProcessModel fbm(double hurst);
    static ProcessModel bifbm(double hurst, double k, double t1, double t2);
    static ProcessModel afbm_segment(HurstProfile profile, double length = 1.0,
                                     double eps = 0.0, double omega = 0.0);

    ModelKind kind() const { return kind_; }
    const FbmModel& as_fbm() const;
    const BifbmModel& as_bifbm() const;
    const AfbmSegmentModel& as_afbm() const;
    const AfbmKernel& afbm_kernel() const; // cached

    // Covariance R(s,t) on the unit interval.
    double cov(double s, double t) const;

    std::string name() const;

private:
    ModelKind kind_ = ModelKind::fbm;
    std::variant<FbmModel, BifbmModel, AfbmSegmentModel> data_;
    mutable std::shared_ptr<AfbmKernel> kernel_;
};

// ---------------------------------------------------------------------------
// Covariance grid
// ---------------------------------------------------------------------------

struct CovGrid {
    ModelKind kind = ModelKind::fbm;
    int n = 0;                  // resolution; matrix is (n+1) x (n+1)
    std::vector<double> values; // row-major, symmetric

    double at(int j, int k) const { return values[static_cast<size_t>(j) * (n + 1) + k]; }
    double& at(int j, int k) { return values[static_cast<size_t>(j) * (n + 1) + k]; }
    double max_diagonal() const;
};

// Tabulate R(j/n, k/n), j,k = 0..n. Requires n >= 4.
CovGrid cov_grid(const ProcessModel& model, int n);

} // namespace fracvar
