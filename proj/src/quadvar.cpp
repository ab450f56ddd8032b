#include "fracvar/quadvar.hpp"

#include "fracvar/numeric.hpp"

#include <cmath>

namespace fracvar {

SecondIncrements second_increments(std::span<const double> path) {
    const int n = static_cast<int>(path.size()) - 1;
    if (n < 3) throw ModelError("second_increments: need resolution n >= 3");
    SecondIncrements inc;
    inc.n = n;
    inc.values.resize(n - 1);
    for (int k = 1; k <= n - 1; ++k)
        inc.values[k - 1] = path[k + 1] + path[k - 1] - 2.0 * path[k];
    return inc;
}

double vn(std::span<const double> path) {
    const int n = static_cast<int>(path.size()) - 1;
    if (n < 3) throw ModelError("vn: need resolution n >= 3");
    CompensatedSum acc;
    for (int k = 1; k <= n - 1; ++k) {
        const double dx = path[k + 1] + path[k - 1] - 2.0 * path[k];
        acc.add(dx * dx);
    }
    return acc.value();
}

IncrementCovariance increment_cov(const CovGrid& grid) {
    const int n = grid.n;
    if (n < 3) throw ModelError("increment_cov: need resolution n >= 3");

    // second difference along k first, then along j
    std::vector<double> t(static_cast<size_t>(n + 1) * (n - 1));
    for (int i = 0; i <= n; ++i)
        for (int k = 1; k <= n - 1; ++k)
            t[static_cast<size_t>(i) * (n - 1) + (k - 1)] =
                grid.at(i, k + 1) + grid.at(i, k - 1) - 2.0 * grid.at(i, k);

    IncrementCovariance dc;
    dc.n = n;
    dc.d.resize(static_cast<size_t>(n - 1) * (n - 1));
    for (int j = 1; j <= n - 1; ++j)
        for (int k = 1; k <= n - 1; ++k) {
            const size_t col = static_cast<size_t>(k - 1);
            dc.d[static_cast<size_t>(j - 1) * (n - 1) + col] =
                t[static_cast<size_t>(j + 1) * (n - 1) + col] +
                t[static_cast<size_t>(j - 1) * (n - 1) + col] -
                2.0 * t[static_cast<size_t>(j) * (n - 1) + col];
        }
    return dc;
}

double exact_mean_vn(const IncrementCovariance& dcov) {
    CompensatedSum acc;
    for (int k = 1; k <= dcov.n - 1; ++k) acc.add(dcov.at(k, k));
    return acc.value();
}

double exact_var_vn(const IncrementCovariance& dcov) {
    CompensatedSum acc;
    const int n = dcov.n;
    for (int k = 1; k <= n - 1; ++k) {
        const double dkk = dcov.at(k, k);
        acc.add(2.0 * dkk * dkk);
    }
    for (int j = 2; j <= n - 1; ++j)
        for (int k = 1; k < j; ++k) {
            const double djk = dcov.at(j, k);
            acc.add(4.0 * djk * djk);
        }
    return acc.value();
}

double exact_mean_vn(const ProcessModel& model, long n) {
    if (n < 3) throw ModelError("exact_mean_vn: need resolution n >= 3");
    const double nd = static_cast<double>(n);
    switch (model.kind()) {
    case ModelKind::fbm: {
        const double h = model.as_fbm().hurst;
        return (n - 1) * std::pow(nd, -2.0 * h) * (4.0 - std::exp2(2.0 * h));
    }
    case ModelKind::afbm_segment: {
        // d_kk collapses to 8 W(1/n) - 2 W(2/n) by stationarity of increments
        const AfbmKernel& kernel = model.afbm_kernel();
        return (n - 1) * (8.0 * kernel.w(1.0 / nd) - 2.0 * kernel.w(2.0 / nd));
    }
    case ModelKind::bifbm: {
        CompensatedSum acc;
        static const int w[3] = {1, -2, 1};
        for (long k = 1; k <= n - 1; ++k) {
            double dkk = 0.0;
            for (int a = -1; a <= 1; ++a)
                for (int b = -1; b <= 1; ++b)
                    dkk += w[a + 1] * w[b + 1] *
                           model.cov((k + a) / nd, (k + b) / nd);
            acc.add(dkk);
        }
        return acc.value();
    }
    }
    throw ModelError("exact_mean_vn: unknown model kind");
}

double exact_cov_vn_v2n(const IncrementCovariance& fine) {
    const int m = fine.n; // 2n
    if (m % 2 != 0 || m < 6)
        throw ModelError("exact_cov_vn_v2n: fine resolution must be even and >= 6");
    const int n = m / 2;

    // Cov(V_n, V_2n) = S1 + ... + S6 over the level-2n increment covariances.
    CompensatedSum acc;
    for (int k = 1; k <= n - 1; ++k) {
        for (int j = 1; j <= m - 1; ++j) {
            const double a = fine.at(2 * k + 1, j); // S1: 2 a^2
            const double b = fine.at(2 * k - 1, j); // S2: 2 b^2
            const double c = fine.at(2 * k, j);     // S3: 8 c^2
            acc.add(2.0 * a * a + 2.0 * b * b + 8.0 * c * c + 4.0 * a * b +
                    8.0 * a * c + 8.0 * b * c);
        }
    }
    return acc.value();
}

} // namespace fracvar
