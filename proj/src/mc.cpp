#include "fracvar/mc.hpp"

#include "fracvar/numeric.hpp"
#include "fracvar/quadvar.hpp"
#include "fracvar/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

namespace fracvar {

int default_thread_count() {
    if (const char* env = std::getenv("FRACVAR_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

KsResult normality_diagnostic(std::vector<double> samples) {
    if (samples.size() < 100)
        throw std::domain_error("normality_diagnostic: need at least 100 samples");
    std::sort(samples.begin(), samples.end());
    const double m = static_cast<double>(samples.size());
    double d = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
        const double f = norm_cdf(samples[i]);
        d = std::max(d, std::abs((i + 1) / m - f));
        d = std::max(d, std::abs(f - i / m));
    }
    KsResult out;
    out.distance = d;
    out.critical = 1.63 / std::sqrt(m);
    out.pass = d < out.critical;
    out.count = static_cast<long>(samples.size());
    return out;
}

namespace {

struct RepRecord {
    double vn = 0.0, v2n = 0.0;
    bool valid = false;
    Estimate ratio, k_hat, h_hat;
};

struct Moments {
    long count = 0;
    double mean = 0.0, var = 0.0, m4 = 0.0;
};

Moments moments_of(const std::vector<double>& xs) {
    Moments m;
    m.count = static_cast<long>(xs.size());
    if (xs.empty()) return m;
    CompensatedSum s;
    for (double x : xs) s.add(x);
    m.mean = s.value() / m.count;
    CompensatedSum s2, s4;
    for (double x : xs) {
        const double d = x - m.mean;
        s2.add(d * d);
        s4.add(d * d * d * d);
    }
    m.var = (m.count > 1) ? s2.value() / (m.count - 1) : 0.0;
    m.m4 = s4.value() / m.count;
    return m;
}

// z-score of an observed sample variance against a target, with the standard
// error sqrt((m4 - var^2)/M) estimated from the sample itself.
double variance_z(const Moments& m, double target) {
    if (m.count < 2) return 0.0;
    const double se = std::sqrt(std::max(m.m4 - m.var * m.var, 0.0) / m.count);
    return se > 0.0 ? (m.var - target) / se : 0.0;
}

EstimatorStats summarize_estimator(const std::string& name, double truth,
                                   double expected_bias, double stderr_pred,
                                   const std::vector<RepRecord>& records,
                                   const Estimate RepRecord::* field) {
    EstimatorStats st;
    st.name = name;
    st.truth = truth;
    st.expected_bias = expected_bias;
    st.stderr_pred = stderr_pred;

    std::vector<double> values;
    values.reserve(records.size());
    for (const auto& r : records) {
        const Estimate& e = r.*field;
        if (e.valid)
            values.push_back(e.value);
        else
            ++st.invalid_count;
    }
    st.valid_count = static_cast<long>(values.size());
    if (values.empty()) return st;

    Moments m = moments_of(values);
    st.mean = m.mean;
    st.variance = m.var;
    st.bias = m.mean - truth;
    const double se_mean = std::sqrt(m.var / m.count);
    st.bias_z = se_mean > 0.0 ? (st.bias - expected_bias) / se_mean : 0.0;

    if (stderr_pred > 0.0) {
        CompensatedSum sm, sv;
        long cover = 0;
        for (double v : values) {
            const double z = (v - truth - expected_bias) / stderr_pred;
            sm.add(z);
            sv.add(z * z);
            if (std::abs(z) <= 1.959963984540054) ++cover;
        }
        const double zm = sm.value() / m.count;
        st.std_mean = zm;
        st.std_var = (m.count > 1) ? (sv.value() - m.count * zm * zm) / (m.count - 1) : 0.0;
        st.coverage95 = static_cast<double>(cover) / m.count;
    }
    return st;
}

} // namespace

McReport run_experiment(const ExperimentConfig& config) {
    if (config.replications < 1)
        throw ModelError("run_experiment: need at least one replication");
    for (long n : config.n_values)
        if (n < 8) throw ModelError("run_experiment: every n must be >= 8");
    if (config.n_values.empty())
        throw ModelError("run_experiment: no n values given");

    const TheoreticalConstants constants = constants_for(config.model);
    const long m_reps = config.replications;
    const int nthreads =
        std::max(1, config.threads > 0 ? config.threads : default_thread_count());

    McReport report;
    report.model = config.model.name();
    report.master_seed = config.master_seed;
    report.replications = m_reps;

    std::ofstream raw;
    if (!config.raw_csv_path.empty()) {
        raw.open(config.raw_csv_path);
        if (!raw) throw ModelError("run_experiment: cannot open raw CSV path");
        raw << "rep,n,vn,v2n,ratio,ratio_valid,k,k_valid,h,h_valid\n";
    }

    for (long n : config.n_values) {
        const long fine_n = 2 * n;
        CovGrid grid = cov_grid(config.model, static_cast<int>(fine_n));

        McLevelReport level;
        level.n = n;
        level.replications = m_reps;

        const bool want_exact = config.exact_moments && fine_n <= 8192;
        if (want_exact) {
            // level-n grid is the even-index subsample of the fine grid
            CovGrid coarse;
            coarse.kind = grid.kind;
            coarse.n = static_cast<int>(n);
            coarse.values.resize(static_cast<size_t>(n + 1) * (n + 1));
            for (long j = 0; j <= n; ++j)
                for (long k = 0; k <= n; ++k)
                    coarse.at(static_cast<int>(j), static_cast<int>(k)) =
                        grid.at(static_cast<int>(2 * j), static_cast<int>(2 * k));
            IncrementCovariance dc_fine = increment_cov(grid);
            IncrementCovariance dc_coarse = increment_cov(coarse);
            level.have_exact = true;
            level.exact_mean_vn_value = exact_mean_vn(dc_coarse);
            level.exact_var_vn_value = exact_var_vn(dc_coarse);
            level.exact_mean_v2n_value = exact_mean_vn(dc_fine);
            level.exact_var_v2n_value = exact_var_vn(dc_fine);
            level.exact_cov_value = exact_cov_vn_v2n(dc_fine);
        }

        const CovFactor factor = factorize(std::move(grid));

        std::vector<RepRecord> records(m_reps);
        std::atomic<long> next{0};
        auto worker = [&]() {
            std::vector<double> coarse_path(n + 1);
            for (;;) {
                const long r = next.fetch_add(1);
                if (r >= m_reps) break;
                CounterStream stream =
                    CounterStream::for_replication(config.master_seed, r);
                PathSample path = sample_path(factor, stream);
                for (long k = 0; k <= n; ++k) coarse_path[k] = path.values[2 * k];

                RepRecord& rec = records[r];
                rec.vn = vn(std::span<const double>(coarse_path));
                rec.v2n = vn(path);
                rec.valid = rec.vn > 0.0 && rec.v2n > 0.0;
                if (config.run_estimators && rec.valid) {
                    rec.ratio = ratio_estimator(rec.vn, rec.v2n);
                    if (config.model.kind() == ModelKind::bifbm) {
                        rec.k_hat = k_estimator(rec.vn, rec.ratio.value, n,
                                                constants.t1, constants.t2);
                        rec.h_hat = h_from_hk_k(rec.ratio, rec.k_hat);
                    }
                }
            }
        };
        if (nthreads == 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            pool.reserve(nthreads);
            for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
        }

        // fixed-order aggregation
        const double norm_n = constants.vn_normalizer(n);
        const double norm_2n = constants.vn_normalizer(fine_n);
        std::vector<double> vn_norm, v2n_norm, vn_raw, v2n_raw, clt_samples;
        vn_norm.reserve(m_reps);
        for (const auto& rec : records) {
            if (!rec.valid) {
                ++level.invalid_replications;
                continue;
            }
            vn_raw.push_back(rec.vn);
            v2n_raw.push_back(rec.v2n);
            vn_norm.push_back(norm_n * rec.vn);
            v2n_norm.push_back(norm_2n * rec.v2n);
        }

        level.vn_target = constants.as_limit;
        Moments mv = moments_of(vn_norm);
        Moments mv2 = moments_of(v2n_norm);
        level.vn_norm_mean = mv.mean;
        level.vn_norm_var = mv.var;
        level.v2n_norm_mean = mv2.mean;
        level.v2n_norm_var = mv2.var;
        if (mv.count > 1 && mv.var > 0.0)
            level.vn_z = (mv.mean - constants.as_limit) / std::sqrt(mv.var / mv.count);
        if (mv2.count > 1 && mv2.var > 0.0)
            level.v2n_z = (mv2.mean - constants.as_limit) / std::sqrt(mv2.var / mv2.count);

        level.clt_var_target = constants.sigma_sq;
        const double sqn = std::sqrt(static_cast<double>(n));
        const double sig = std::sqrt(constants.sigma_sq);
        clt_samples.reserve(vn_norm.size());
        for (double x : vn_norm) clt_samples.push_back(sqn * (x - constants.as_limit));
        Moments mc = moments_of(clt_samples);
        level.clt_emp_var = mc.var;
        if (clt_samples.size() >= 100) {
            std::vector<double> standardized;
            standardized.reserve(clt_samples.size());
            for (double x : clt_samples) standardized.push_back(x / sig);
            level.ks = normality_diagnostic(std::move(standardized));
        }

        if (level.have_exact) {
            Moments rawn = moments_of(vn_raw);
            Moments raw2 = moments_of(v2n_raw);
            level.vn_raw_mean = rawn.mean;
            level.vn_raw_var = rawn.var;
            level.v2n_raw_mean = raw2.mean;
            level.v2n_raw_var = raw2.var;
            if (rawn.count > 1) {
                level.mean_z_exact = (rawn.mean - level.exact_mean_vn_value) /
                                     std::sqrt(rawn.var / rawn.count);
                level.var_z_exact = variance_z(rawn, level.exact_var_vn_value);
                level.mean2_z_exact = (raw2.mean - level.exact_mean_v2n_value) /
                                      std::sqrt(raw2.var / raw2.count);
                level.var2_z_exact = variance_z(raw2, level.exact_var_v2n_value);
                // empirical covariance and its standard error
                CompensatedSum sc, sc2;
                for (size_t i = 0; i < vn_raw.size(); ++i) {
                    const double a = vn_raw[i] - rawn.mean;
                    const double b = v2n_raw[i] - raw2.mean;
                    sc.add(a * b);
                    sc2.add(a * b * a * b);
                }
                const long cnt = static_cast<long>(vn_raw.size());
                level.raw_cov = sc.value() / (cnt - 1);
                const double m22 = sc2.value() / cnt;
                const double se_cov =
                    std::sqrt(std::max(m22 - level.raw_cov * level.raw_cov, 0.0) / cnt);
                level.cov_z_exact =
                    se_cov > 0.0 ? (level.raw_cov - level.exact_cov_value) / se_cov : 0.0;
            }
        }

        if (config.run_estimators) {
            const double bias =
                (config.model.kind() == ModelKind::afbm_segment)
                    ? -afbm_bias_term(constants, n)
                    : 0.0;
            level.estimators.push_back(summarize_estimator(
                config.model.kind() == ModelKind::bifbm
                    ? "hk_ratio"
                    : (config.model.kind() == ModelKind::afbm_segment ? "hmin_ratio"
                                                                      : "h_ratio"),
                constants.ratio_index, bias,
                stderr_for(EstimatorKind::hurst_ratio, constants, n), records,
                &RepRecord::ratio));
            if (config.model.kind() == ModelKind::bifbm) {
                level.estimators.push_back(summarize_estimator(
                    "k", constants.k, 0.0,
                    stderr_for(EstimatorKind::k_bifbm, constants, n), records,
                    &RepRecord::k_hat));
                level.estimators.push_back(summarize_estimator(
                    "h", constants.hurst, 0.0,
                    stderr_for(EstimatorKind::h_bifbm, constants, n), records,
                    &RepRecord::h_hat));
            }
        }

        if (raw.is_open()) {
            raw.precision(17);
            for (long r = 0; r < m_reps; ++r) {
                const RepRecord& rec = records[r];
                raw << r << ',' << n << ',' << rec.vn << ',' << rec.v2n << ','
                    << rec.ratio.value << ',' << rec.ratio.valid << ',' << rec.k_hat.value
                    << ',' << rec.k_hat.valid << ',' << rec.h_hat.value << ','
                    << rec.h_hat.valid << '\n';
            }
        }

        report.levels.push_back(std::move(level));
    }
    return report;
}

} // namespace fracvar
