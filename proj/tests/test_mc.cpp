#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fracvar/json_io.hpp"
#include "fracvar/mc.hpp"
#include "fracvar/numeric.hpp"
#include "fracvar/quadvar.hpp"
#include "fracvar/rng.hpp"
#include "fracvar/sampling.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

using namespace fracvar;

TEST_CASE("normality diagnostic") {
    SUBCASE("standard normal samples pass") {
        CounterStream s(404);
        std::vector<double> x(2000);
        for (auto& v : x) v = s.next_normal();
        KsResult r = normality_diagnostic(std::move(x));
        CHECK(r.pass);
        CHECK(r.critical == doctest::Approx(1.63 / std::sqrt(2000.0)).epsilon(1e-12));
    }

    SUBCASE("constant samples fail") {
        std::vector<double> x(500, 0.29);
        KsResult r = normality_diagnostic(std::move(x));
        CHECK_FALSE(r.pass);
        CHECK(r.distance > 0.3);
    }

    SUBCASE("shifted samples fail") {
        CounterStream s(7);
        std::vector<double> x(5000);
        for (auto& v : x) v = s.next_normal() + 0.5;
        CHECK_FALSE(normality_diagnostic(std::move(x)).pass);
    }

    std::vector<double> tiny(50, 0.0);
    CHECK_THROWS_AS(normality_diagnostic(std::move(tiny)), std::domain_error);
}

TEST_CASE("run_experiment validation") {
    ExperimentConfig cfg;
    cfg.model = ProcessModel::fbm(0.5);
    cfg.n_values = {};
    CHECK_THROWS_AS(run_experiment(cfg), ModelError);
    cfg.n_values = {4};
    CHECK_THROWS_AS(run_experiment(cfg), ModelError);
    cfg.n_values = {8};
    cfg.replications = 0;
    CHECK_THROWS_AS(run_experiment(cfg), ModelError);
}

TEST_CASE("single replication report equals the direct computation") {
    ExperimentConfig cfg;
    cfg.model = ProcessModel::fbm(0.7);
    cfg.n_values = {16};
    cfg.replications = 1;
    cfg.master_seed = 99;
    McReport rep = run_experiment(cfg);
    REQUIRE(rep.levels.size() == 1);
    const McLevelReport& lv = rep.levels[0];

    // recompute the single path by hand
    CovGrid g = cov_grid(cfg.model, 32);
    CovFactor f = factorize(std::move(g));
    CounterStream s = CounterStream::for_replication(99, 0);
    PathSample p = sample_path(f, s);
    std::vector<double> coarse(17);
    for (int k = 0; k <= 16; ++k) coarse[k] = p.values[2 * k];
    const double v16 = vn(std::span<const double>(coarse));
    const double v32 = vn(p);

    TheoreticalConstants c = fbm_constants(0.7);
    CHECK(lv.vn_norm_mean == doctest::Approx(c.vn_normalizer(16) * v16).epsilon(1e-14));
    CHECK(lv.v2n_norm_mean ==
          doctest::Approx(c.vn_normalizer(32) * v32).epsilon(1e-14));
    REQUIRE(!lv.estimators.empty());
    CHECK(lv.estimators[0].mean ==
          doctest::Approx(ratio_estimator(v16, v32).value).epsilon(1e-14));
}

TEST_CASE("determinism across worker counts") {
    ExperimentConfig cfg;
    cfg.model = ProcessModel::bifbm(0.6, 0.5, 1.0, 2.0);
    cfg.n_values = {16, 32};
    cfg.replications = 200;
    cfg.master_seed = 1234;

    std::string dumps[3];
    const int workers[3] = {1, 4, 8};
    for (int i = 0; i < 3; ++i) {
        cfg.threads = workers[i];
        dumps[i] = mc_report_to_json(run_experiment(cfg)).dump();
    }
    CHECK(dumps[0] == dumps[1]);
    CHECK(dumps[0] == dumps[2]);
}

TEST_CASE("subsample coherence (refinement identity per replication)") {
    CovGrid g = cov_grid(ProcessModel::fbm(0.6), 64);
    CovFactor f = factorize(std::move(g));
    for (long r = 0; r < 20; ++r) {
        CounterStream s = CounterStream::for_replication(555, r);
        PathSample p = sample_path(f, s);
        auto fine_inc = second_increments(p);
        std::vector<double> coarse(33);
        for (int k = 0; k <= 32; ++k) coarse[k] = p.values[2 * k];
        auto coarse_inc = second_increments(std::span<const double>(coarse));
        for (int k = 1; k <= 31; ++k) {
            const double combined = fine_inc.values[2 * k] + fine_inc.values[2 * k - 2] +
                                    2.0 * fine_inc.values[2 * k - 1];
            CHECK(coarse_inc.values[k - 1] ==
                  doctest::Approx(combined).epsilon(1e-11));
        }
    }
}

TEST_CASE("empirical moments match the Isserlis oracle for every model") {
    std::vector<ProcessModel> models = {
        ProcessModel::fbm(0.5), ProcessModel::fbm(0.7),
        ProcessModel::bifbm(0.6, 0.5, 1.0, 2.0),
        ProcessModel::afbm_segment(
            HurstProfile::piecewise({0.0, std::numbers::pi / 2}, {0.4, 0.8}), 1.0,
            0.0, 0.0)};
    for (const auto& model : models) {
        ExperimentConfig cfg;
        cfg.model = model;
        cfg.n_values = {8};
        cfg.replications = 50000;
        cfg.master_seed = 31416;
        McReport rep = run_experiment(cfg);
        const McLevelReport& lv = rep.levels[0];
        REQUIRE(lv.have_exact);
        CHECK(std::abs(lv.mean_z_exact) < 5.0);
        CHECK(std::abs(lv.var_z_exact) < 5.0);
        CHECK(std::abs(lv.mean2_z_exact) < 5.0);
        CHECK(std::abs(lv.var2_z_exact) < 5.0);
        CHECK(std::abs(lv.cov_z_exact) < 5.0);
    }
}

TEST_CASE("raw csv dump is written in replication order") {
    ExperimentConfig cfg;
    cfg.model = ProcessModel::fbm(0.5);
    cfg.n_values = {8};
    cfg.replications = 10;
    cfg.master_seed = 5;
    cfg.raw_csv_path = "mc_raw_test.csv";
    run_experiment(cfg);

    std::ifstream in("mc_raw_test.csv");
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "rep,n,vn,v2n,ratio,ratio_valid,k,k_valid,h,h_valid");
    int count = 0;
    std::string line;
    while (std::getline(in, line)) {
        CHECK(line.rfind(std::to_string(count) + ",8,", 0) == 0);
        ++count;
    }
    CHECK(count == 10);
    std::remove("mc_raw_test.csv");
}

TEST_CASE("counter stream basics") {
    CounterStream a(42), b(42), c(43);
    CHECK(a.next_u64() == b.next_u64());
    CHECK(a.next_u64() != c.next_u64());
    for (int i = 0; i < 1000; ++i) {
        const double u = a.next_uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }

    SUBCASE("normals by inversion have the right first moments") {
        CounterStream s(9);
        double m1 = 0.0, m2 = 0.0;
        const int n = 200000;
        for (int i = 0; i < n; ++i) {
            const double z = s.next_normal();
            m1 += z;
            m2 += z * z;
        }
        m1 /= n;
        m2 /= n;
        CHECK(std::abs(m1) < 5.0 / std::sqrt(static_cast<double>(n)));
        CHECK(std::abs(m2 - 1.0) < 5.0 * std::sqrt(2.0 / n));
    }

    SUBCASE("quantile round trip") {
        for (double p : {1e-12, 0.001, 0.3, 0.5, 0.975, 1.0 - 1e-9}) {
            CHECK(norm_cdf(norm_quantile(p)) == doctest::Approx(p).epsilon(1e-9));
        }
        CHECK_THROWS_AS(norm_quantile(0.0), std::domain_error);
        CHECK_THROWS_AS(norm_quantile(1.0), std::domain_error);
    }
}
