#pragma once

#include <cstddef>
#include <vector>

namespace fracvar {

// Directional Hurst index H(theta). Directions are identified modulo pi, so
// evaluation reduces the angle into [0, pi) first; that makes every profile
// satisfy H(theta) = H(theta + pi) (evenness on the sphere).
class HurstProfile {
public:
    enum class Kind { constant, piecewise_constant, smooth };

    static HurstProfile constant(double h);
    // segment i covers [breakpoints[i], breakpoints[i+1]) with value values[i];
    // the last segment wraps to pi. breakpoints[0] must be 0.
    static HurstProfile piecewise(std::vector<double> breakpoints,
                                  std::vector<double> values);
    // Smooth family H(t) = h_min + (h2/2) sin^2(t - t*) + (h3/6) sin^3(t - t*) cos(t - t*),
    // which realises H(t*) = h_min, H''(t*) = h2, H'''(t*) = h3 exactly.
    static HurstProfile smooth(double theta_star, double h_min, double h2,
                               double h3 = 0.0);

    Kind kind() const { return kind_; }
    double operator()(double theta) const;

    double h_min() const { return h_min_; }
    double h_max() const { return h_max_; }

    // smooth accessors
    double theta_star() const { return theta_star_; }
    double h2() const { return h2_; }
    double h3() const { return h3_; }

    // piecewise accessors ([start, end) in [0, pi], value)
    struct Segment {
        double start, end, value;
    };
    const std::vector<Segment>& segments() const { return segments_; }

    // Lebesgue measure of {theta in [0, pi): H(theta) = h_min}.
    double minimizing_measure() const;

private:
    HurstProfile() = default;

    Kind kind_ = Kind::constant;
    double h_min_ = 0.5, h_max_ = 0.5;
    double theta_star_ = 0.0, h2_ = 0.0, h3_ = 0.0;
    std::vector<Segment> segments_;
};

// Reduce an angle into [0, pi).
double reduce_angle_pi(double theta);

} // namespace fracvar
