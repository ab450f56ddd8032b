#include "fracvar/sampling.hpp"

#include "fracvar/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

extern "C" {
void dpotrf_(const char* uplo, const int* n, double* a, const int* lda, int* info);
}

namespace fracvar {

std::vector<double> CovFactor::apply(std::span<const double> z) const {
    const int m = dim();
    std::vector<double> y(m, 0.0);
    // column sweep keeps the access contiguous in the column-major factor
    for (int j = 0; j < m; ++j) {
        const double zj = z[j];
        if (zj == 0.0) continue;
        const double* col = lower.data() + static_cast<size_t>(j) * m;
        for (int i = j; i < m; ++i) y[i] += col[i] * zj;
    }
    return y;
}

CovFactor factorize(CovGrid grid) {
    const int m = grid.n + 1;
    const double max_diag = grid.max_diagonal();

    CovFactor f;
    f.n = grid.n;

    for (int i = 0; i < m; ++i) {
        if (grid.at(i, i) < 0.0)
            throw ModelError("factorize: negative variance on the diagonal");
        if (grid.at(i, i) == 0.0) f.zero_rows.push_back(i);
    }

    // Work on the submatrix of nonzero-variance coordinates.
    std::vector<int> keep;
    keep.reserve(m);
    {
        size_t zi = 0;
        for (int i = 0; i < m; ++i) {
            if (zi < f.zero_rows.size() && f.zero_rows[zi] == i) {
                ++zi;
                continue;
            }
            keep.push_back(i);
        }
    }
    const int r = static_cast<int>(keep.size());

    std::vector<double> packed(static_cast<size_t>(r) * r);
    for (int j = 0; j < r; ++j)
        for (int i = 0; i < r; ++i)
            packed[static_cast<size_t>(j) * r + i] = grid.at(keep[i], keep[j]);
    grid.values.clear();
    grid.values.shrink_to_fit();

    std::vector<double> work;
    double jitter = 0.0;
    int info = -1;
    for (int attempt = 0; attempt <= 5; ++attempt) {
        work = packed;
        if (jitter > 0.0)
            for (int i = 0; i < r; ++i) work[static_cast<size_t>(i) * r + i] += jitter;
        info = 0;
        const char uplo = 'L';
        if (r > 0) dpotrf_(&uplo, &r, work.data(), &r, &info);
        if (info == 0) break;
        jitter = (jitter == 0.0) ? 1e-12 * max_diag : 10.0 * jitter;
    }
    if (info != 0)
        throw ModelError("factorize: covariance grid is not positive definite "
                         "(Cholesky failed after jitter escalation, info=" +
                         std::to_string(info) + ")");
    packed.clear();
    packed.shrink_to_fit();

    f.jitter = jitter;
    f.lower.assign(static_cast<size_t>(m) * m, 0.0);
    for (int j = 0; j < r; ++j) {
        double* col = f.lower.data() + static_cast<size_t>(keep[j]) * m;
        for (int i = j; i < r; ++i) col[keep[i]] = work[static_cast<size_t>(j) * r + i];
    }
    return f;
}

PathSample sample_path(const CovFactor& factor, CounterStream& stream,
                       const std::function<double(double)>* mean) {
    const int m = factor.dim();
    std::vector<double> z(m);
    stream.fill_normals(z);

    PathSample p;
    p.n = factor.n;
    p.stream_key = stream.key();
    p.values = factor.apply(z);
    if (mean) {
        for (int k = 0; k < m; ++k)
            p.values[k] += (*mean)(static_cast<double>(k) / factor.n);
    }
    return p;
}

} // namespace fracvar
