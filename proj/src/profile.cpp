#include "fracvar/profile.hpp"

#include "fracvar/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fracvar {

namespace {
constexpr double kPi = std::numbers::pi;

void check_hurst_range(double h) {
    if (!(h > 0.0 && h < 1.0))
        throw ModelError("Hurst value must lie in (0,1)");
}
} // namespace

double reduce_angle_pi(double theta) {
    double t = std::fmod(theta, kPi);
    if (t < 0.0) t += kPi;
    return t;
}

HurstProfile HurstProfile::constant(double h) {
    check_hurst_range(h);
    HurstProfile p;
    p.kind_ = Kind::constant;
    p.h_min_ = p.h_max_ = h;
    p.segments_ = {{0.0, kPi, h}};
    return p;
}

HurstProfile HurstProfile::piecewise(std::vector<double> breakpoints,
                                     std::vector<double> values) {
    if (breakpoints.empty() || breakpoints.size() != values.size())
        throw ModelError("piecewise profile needs matching breakpoints and values");
    if (breakpoints.front() != 0.0)
        throw ModelError("piecewise profile must start at theta = 0");
    for (size_t i = 0; i < breakpoints.size(); ++i) {
        if (!(breakpoints[i] >= 0.0 && breakpoints[i] < kPi))
            throw ModelError("piecewise breakpoints must lie in [0, pi)");
        if (i > 0 && !(breakpoints[i] > breakpoints[i - 1]))
            throw ModelError("piecewise breakpoints must be strictly increasing");
        check_hurst_range(values[i]);
    }

    HurstProfile p;
    p.kind_ = Kind::piecewise_constant;
    p.h_min_ = *std::min_element(values.begin(), values.end());
    p.h_max_ = *std::max_element(values.begin(), values.end());
    for (size_t i = 0; i < breakpoints.size(); ++i) {
        double end = (i + 1 < breakpoints.size()) ? breakpoints[i + 1] : kPi;
        p.segments_.push_back({breakpoints[i], end, values[i]});
    }
    return p;
}

HurstProfile HurstProfile::smooth(double theta_star, double h_min, double h2,
                                  double h3) {
    check_hurst_range(h_min);
    if (!(h2 > 0.0))
        throw ModelError("smooth profile requires H''(theta*) > 0");
    if (!(theta_star >= 0.0 && theta_star < kPi))
        throw ModelError("theta* must lie in [0, pi)");

    HurstProfile p;
    p.kind_ = Kind::smooth;
    p.theta_star_ = theta_star;
    p.h_min_ = h_min;
    p.h2_ = h2;
    p.h3_ = h3;

    // Scan the period: values must stay in (0,1) and theta* must be the
    // unique minimizer (guards overly large h3).
    double hmax = h_min;
    const int nscan = 4096;
    for (int i = 0; i < nscan; ++i) {
        double t = kPi * i / nscan;
        double h = p(t);
        if (!(h > 0.0 && h < 1.0))
            throw ModelError("smooth profile leaves (0,1)");
        hmax = std::max(hmax, h);
        double dt = reduce_angle_pi(t - theta_star);
        dt = std::min(dt, kPi - dt);
        if (dt > 1e-3 && h <= h_min)
            throw ModelError("smooth profile: theta* is not the unique minimizer");
    }
    p.h_max_ = hmax;

    // Finite-difference validation of the supplied derivatives.
    const double step = 1e-4;
    auto at = [&](double t) { return p(t); };
    double fd2 = (at(theta_star + step) - 2.0 * at(theta_star) + at(theta_star - step)) /
                 (step * step);
    double fd3 = (at(theta_star + 2 * step) - 2.0 * at(theta_star + step) +
                  2.0 * at(theta_star - step) - at(theta_star - 2 * step)) /
                 (2.0 * step * step * step);
    if (std::abs(fd2 - h2) > 1e-4 * std::max(1.0, std::abs(h2)) ||
        std::abs(fd3 - h3) > 1e-2 * std::max(1.0, std::abs(h3)))
        throw ModelError("smooth profile: stored derivatives disagree with finite differences");

    return p;
}

double HurstProfile::operator()(double theta) const {
    const double t = reduce_angle_pi(theta);
    switch (kind_) {
    case Kind::constant:
        return h_min_;
    case Kind::piecewise_constant: {
        for (const auto& s : segments_)
            if (t >= s.start && t < s.end) return s.value;
        return segments_.back().value; // t == pi cannot happen after reduction
    }
    case Kind::smooth: {
        const double d = t - theta_star_;
        const double s = std::sin(d), c = std::cos(d);
        return h_min_ + 0.5 * h2_ * s * s + (h3_ / 6.0) * s * s * s * c;
    }
    }
    return h_min_;
}

double HurstProfile::minimizing_measure() const {
    switch (kind_) {
    case Kind::constant:
        return kPi;
    case Kind::piecewise_constant: {
        double m = 0.0;
        for (const auto& s : segments_)
            if (s.value == h_min_) m += s.end - s.start;
        return m;
    }
    case Kind::smooth:
        return 0.0;
    }
    return 0.0;
}

} // namespace fracvar
