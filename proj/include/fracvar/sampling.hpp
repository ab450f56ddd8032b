#pragma once

#include "fracvar/models.hpp"
#include "fracvar/rng.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace fracvar {

// Lower-triangular factor of a (possibly jittered) covariance grid, stored
// column-major so it can come straight out of LAPACK.
struct CovFactor {
    int n = 0;                  // grid resolution; matrix dimension is n+1
    std::vector<double> lower;  // column-major (n+1)^2, lower triangle valid
    double jitter = 0.0;        // diagonal jitter actually applied
    std::vector<int> zero_rows; // a.s.-zero coordinates (zero variance)

    int dim() const { return n + 1; }
    double at(int i, int j) const { // L(i,j), i >= j
        return lower[static_cast<size_t>(j) * dim() + i];
    }
    // y = L z for a standard normal vector z of length dim().
    std::vector<double> apply(std::span<const double> z) const;
};

// Symmetric factorization with a diagonal jitter ladder: the plain Cholesky is
// tried first; on failure the jitter starts at 1e-12 * max diagonal and
// escalates tenfold at most four times. Exactly-zero-variance coordinates are
// pinned to zero and excluded from the factorization.
CovFactor factorize(CovGrid grid);

struct PathSample {
    int n = 0;
    std::vector<double> values; // X_{k/n}, k = 0..n
    std::uint64_t stream_key = 0;
};

// Draw one exact Gaussian path; deterministic in (factor, stream state).
// An optional mean function t -> M(t) is added after sampling.
PathSample sample_path(const CovFactor& factor, CounterStream& stream,
                       const std::function<double(double)>* mean = nullptr);

} // namespace fracvar
