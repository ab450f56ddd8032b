#pragma once

#include "fracvar/models.hpp"
#include "fracvar/sampling.hpp"

#include <span>
#include <vector>

namespace fracvar {

// Second-order increments DX_k = X_{(k+1)/n} + X_{(k-1)/n} - 2 X_{k/n}.
struct SecondIncrements {
    int n = 0;
    std::vector<double> values; // k = 1..n-1
};

SecondIncrements second_increments(std::span<const double> path);
inline SecondIncrements second_increments(const PathSample& p) {
    return second_increments(std::span<const double>(p.values));
}

// Second-order quadratic variation V_n = sum DX_k^2, compensated summation.
double vn(std::span<const double> path);
inline double vn(const PathSample& p) { return vn(std::span<const double>(p.values)); }

// Covariance d_{jk} = E[DX_j DX_k], tabulated by the 9-point tensor second
// difference of the covariance grid.
struct IncrementCovariance {
    int n = 0;
    std::vector<double> d; // (n-1)^2 row-major, 1-based increment indices
    double at(int j, int k) const { // j,k in 1..n-1
        return d[static_cast<size_t>(j - 1) * (n - 1) + (k - 1)];
    }
};

IncrementCovariance increment_cov(const CovGrid& grid);

// Exact finite-n moments of V_n via Isserlis' theorem.
double exact_mean_vn(const IncrementCovariance& dcov);
double exact_var_vn(const IncrementCovariance& dcov);

// E V_n straight from the kernel, O(n) work, no grid materialization. For
// stationary-increment kernels (FBM, AFBM segment) this costs O(1) kernel
// evaluations.
double exact_mean_vn(const ProcessModel& model, long n);

// Exact Cov(V_n, V_2n) from the refinement identity
// DX_k^(n) = DX_{2k+1}^(2n) + DX_{2k-1}^(2n) + 2 DX_{2k}^(2n);
// `fine` must be the increment covariance at resolution 2n.
double exact_cov_vn_v2n(const IncrementCovariance& fine);

} // namespace fracvar
