#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

namespace fracvar {

// Thrown when a quadrature or factorization cannot reach its target accuracy.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double achieved_error)
        : std::runtime_error(what), achieved_error_(achieved_error) {}
    double achieved_error() const { return achieved_error_; }

private:
    double achieved_error_;
};

// Thrown when model parameters or data violate a documented precondition.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Neumaier-compensated accumulator. Long nonnegative sums (V_n at n = 2^14,
// Isserlis double sums) need better than naive rounding.
class CompensatedSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double compensated_total(std::span<const double> xs);

// Standard normal CDF.
double norm_cdf(double x);

// Inverse of the standard normal CDF (Wichura's AS 241, double precision).
// p must lie in (0,1).
double norm_quantile(double p);

} // namespace fracvar
