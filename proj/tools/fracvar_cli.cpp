// fracvar: simulation, quadratic variations and Hurst-type estimation for
// fractional Gaussian models (FBM, two-parameter FBM, AFBM segments).

#include "fracvar/asymptotics.hpp"
#include "fracvar/estimators.hpp"
#include "fracvar/json_io.hpp"
#include "fracvar/mc.hpp"
#include "fracvar/models.hpp"
#include "fracvar/numeric.hpp"
#include "fracvar/quadvar.hpp"
#include "fracvar/sampling.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using fracvar::json;

struct ModelFlags {
    std::string config_path;
    std::string type;
    double hurst = -1.0;
    double k = -1.0;
    double t1 = -1.0;
    double t2 = -1.0;
    std::string profile_type;
    std::vector<double> breakpoints;
    std::vector<double> h_values;
    double theta_star = -1.0;
    double h_min = -1.0;
    double h2 = -1.0;
    double h3 = 0.0;
    bool h3_set = false;
    double length = -1.0;
    double eps = -1.0;
    double omega = -1.0;
};

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON config file (see docs/schema.md)");
    cmd->add_option("--model", f.type, "model type: fbm | bifbm | afbm");
    cmd->add_option("--hurst", f.hurst, "Hurst index H (fbm, bifbm, constant profile)");
    cmd->add_option("--k", f.k, "second index K (bifbm)");
    cmd->add_option("--t1", f.t1, "observation window start T1 (bifbm)");
    cmd->add_option("--t2", f.t2, "observation window end T2 (bifbm)");
    cmd->add_option("--profile", f.profile_type,
                    "afbm profile: constant | piecewise | smooth");
    cmd->add_option("--breakpoints", f.breakpoints,
                    "piecewise profile breakpoints in [0,pi), first must be 0")
        ->delimiter(',');
    cmd->add_option("--h-values", f.h_values, "piecewise profile values")->delimiter(',');
    cmd->add_option("--theta-star", f.theta_star, "smooth profile minimizer");
    cmd->add_option("--h-min", f.h_min, "smooth profile minimum H");
    cmd->add_option("--h2", f.h2, "smooth profile H''(theta*)");
    auto* oh3 = cmd->add_option("--h3", f.h3, "smooth profile H'''(theta*)");
    cmd->callback([oh3, &f]() { f.h3_set = oh3->count() > 0; });
    cmd->add_option("--length", f.length, "afbm segment length L");
    cmd->add_option("--eps", f.eps, "afbm segment offset eps");
    cmd->add_option("--omega", f.omega, "afbm segment angle omega");
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw fracvar::ModelError("cannot open config file: " + path);
    json j;
    in >> j;
    return j;
}

// Merge config-file model with inline flags. The model type may not be
// changed silently; scalar flags override scalar fields.
json model_json_from_flags(const ModelFlags& f, const json* config_model) {
    json j = config_model ? *config_model : json::object();
    if (!f.type.empty()) {
        if (config_model && j.contains("type") && j["type"] != f.type)
            throw CLI::ValidationError("--model conflicts with the config file model type");
        j["type"] = f.type;
    }
    if (!j.contains("type"))
        throw CLI::ValidationError("no model given (use --model or --config)");

    const std::string type = j["type"].get<std::string>();
    if (f.hurst >= 0.0) {
        if (type == "afbm")
            j["profile"] = {{"type", "constant"}, {"hurst", f.hurst}};
        else
            j["hurst"] = f.hurst;
    }
    if (f.k >= 0.0) j["k"] = f.k;
    if (f.t1 >= 0.0) j["t1"] = f.t1;
    if (f.t2 >= 0.0) j["t2"] = f.t2;
    if (type == "afbm") {
        json p = j.value("profile", json::object());
        if (!f.profile_type.empty()) p["type"] = f.profile_type;
        if (!f.breakpoints.empty()) p["breakpoints"] = f.breakpoints;
        if (!f.h_values.empty()) p["values"] = f.h_values;
        if (f.theta_star >= 0.0) p["theta_star"] = f.theta_star;
        if (f.h_min >= 0.0) p["h_min"] = f.h_min;
        if (f.h2 >= 0.0) p["h2"] = f.h2;
        if (f.h3_set) p["h3"] = f.h3;
        if (f.hurst >= 0.0 && !p.contains("type")) p["type"] = "constant";
        if (f.hurst >= 0.0 && p["type"] == "constant") p["hurst"] = f.hurst;
        j["profile"] = p;
        if (f.length >= 0.0) j["length"] = f.length;
        if (f.eps >= 0.0) j["eps"] = f.eps;
        if (f.omega >= 0.0) j["omega"] = f.omega;
    }
    return j;
}

fracvar::ProcessModel build_model(const ModelFlags& f) {
    std::optional<json> config;
    const json* config_model = nullptr;
    if (!f.config_path.empty()) {
        config = load_json_file(f.config_path);
        config_model = config->contains("model") ? &(*config)["model"] : &*config;
    }
    return fracvar::model_from_json(model_json_from_flags(f, config_model));
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw fracvar::ModelError("cannot open output file: " + path);
    out << content;
}

std::string json_dump(const json& j) { return j.dump(2) + "\n"; }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fractional Gaussian process simulation and quadratic-variation "
                 "estimation"};
    app.require_subcommand(1);

    // ----- constants -----
    auto* c_cmd = app.add_subcommand(
        "constants", "evaluate the asymptotic constants of a model");
    ModelFlags c_flags;
    add_model_flags(c_cmd, c_flags);
    long c_n = 0;
    std::string c_out;
    c_cmd->add_option("--n", c_n, "also report stderr and bias term at this n");
    c_cmd->add_option("--output,-o", c_out, "output file (default stdout)");

    // ----- cov -----
    auto* g_cmd = app.add_subcommand("cov", "dump a covariance grid or a single value");
    ModelFlags g_flags;
    add_model_flags(g_cmd, g_flags);
    long g_n = 16;
    double g_s = -1.0, g_t = -1.0;
    std::string g_out;
    g_cmd->add_option("--n", g_n, "grid resolution (grid is (n+1)x(n+1))");
    g_cmd->add_option("--s", g_s, "evaluate R(s,t) at this s instead of a grid");
    g_cmd->add_option("--t", g_t, "evaluate R(s,t) at this t instead of a grid");
    g_cmd->add_option("--output,-o", g_out, "output file (default stdout)");

    // ----- simulate -----
    auto* s_cmd = app.add_subcommand("simulate", "draw one exact sample path as CSV");
    ModelFlags s_flags;
    add_model_flags(s_cmd, s_flags);
    long s_n = 256;
    std::uint64_t s_seed = 0;
    std::string s_out;
    s_cmd->add_option("--n", s_n, "grid resolution");
    s_cmd->add_option("--seed", s_seed, "master seed");
    s_cmd->add_option("--output,-o", s_out, "output file (default stdout)");

    // ----- quadvar -----
    auto* q_cmd = app.add_subcommand(
        "quadvar", "second-order quadratic variation of a path, with optional "
                   "exact moments");
    ModelFlags q_flags;
    add_model_flags(q_cmd, q_flags);
    std::string q_in, q_out;
    bool q_exact = false;
    q_cmd->add_option("--input,-i", q_in, "path CSV (header t,value)")->required();
    q_cmd->add_flag("--exact", q_exact,
                    "include Isserlis mean/variance (needs a model)");
    q_cmd->add_option("--output,-o", q_out, "output file (default stdout)");

    // ----- estimate -----
    auto* e_cmd = app.add_subcommand(
        "estimate", "Hurst-type estimates from a path CSV (resolution 2n; V_n "
                    "uses the even-index subsample)");
    ModelFlags e_flags;
    add_model_flags(e_cmd, e_flags);
    std::string e_in, e_out;
    e_cmd->add_option("--input,-i", e_in, "path CSV (header t,value)")->required();
    e_cmd->add_option("--output,-o", e_out, "output file (default stdout)");

    // ----- mc -----
    auto* m_cmd = app.add_subcommand("mc", "seeded parallel Monte Carlo experiment");
    ModelFlags m_flags;
    add_model_flags(m_cmd, m_flags);
    std::vector<long> m_n;
    long m_reps = 0;
    std::uint64_t m_seed = 0;
    bool m_seed_set = false, m_no_est = false, m_no_exact = false;
    int m_threads = 0;
    std::string m_out, m_raw;
    m_cmd->add_option("--n", m_n, "n values (comma separated)")->delimiter(',');
    m_cmd->add_option("--reps", m_reps, "replication count M");
    auto* seed_opt = m_cmd->add_option("--seed", m_seed, "master seed");
    m_cmd->callback([seed_opt, &m_seed_set]() { m_seed_set = seed_opt->count() > 0; });
    m_cmd->add_flag("--no-estimators", m_no_est, "skip the estimator pass");
    m_cmd->add_flag("--no-exact", m_no_exact, "skip the Isserlis cross-check");
    m_cmd->add_option("--threads", m_threads,
                      "worker threads (default: FRACVAR_THREADS or hardware)");
    m_cmd->add_option("--raw-csv", m_raw, "per-replication CSV dump");
    m_cmd->add_option("--output,-o", m_out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*c_cmd) {
            fracvar::ProcessModel model = build_model(c_flags);
            fracvar::TheoreticalConstants c = fracvar::constants_for(model);
            json j = fracvar::constants_to_json(c);
            if (c_n > 0) {
                j["n"] = c_n;
                j["ratio_stderr"] = fracvar::stderr_for(
                    fracvar::EstimatorKind::hurst_ratio, c, c_n);
                j["bias_term"] = fracvar::afbm_bias_term(c, c_n);
                if (c.phi) j["phi_1_over_n"] = c.phi_at(1.0 / static_cast<double>(c_n));
            }
            write_output(c_out, json_dump(j));
        } else if (*g_cmd) {
            fracvar::ProcessModel model = build_model(g_flags);
            if (g_s >= 0.0 || g_t >= 0.0) {
                if (g_s < 0.0 || g_t < 0.0)
                    throw fracvar::ModelError("cov: need both --s and --t");
                json j;
                j["s"] = g_s;
                j["t"] = g_t;
                j["value"] = model.cov(g_s, g_t);
                write_output(g_out, json_dump(j));
            } else {
                fracvar::CovGrid grid = fracvar::cov_grid(model, static_cast<int>(g_n));
                std::ostringstream os;
                char buf[32];
                for (int j = 0; j <= grid.n; ++j) {
                    for (int k = 0; k <= grid.n; ++k) {
                        std::snprintf(buf, sizeof(buf), "%.17g", grid.at(j, k));
                        os << buf << (k == grid.n ? '\n' : ',');
                    }
                }
                write_output(g_out, os.str());
            }
        } else if (*s_cmd) {
            fracvar::ProcessModel model = build_model(s_flags);
            fracvar::CovGrid grid = fracvar::cov_grid(model, static_cast<int>(s_n));
            fracvar::CovFactor factor = fracvar::factorize(std::move(grid));
            fracvar::CounterStream stream =
                fracvar::CounterStream::for_replication(s_seed, 0);
            fracvar::PathSample path = fracvar::sample_path(factor, stream);
            std::ostringstream os;
            fracvar::write_path_csv(os, path);
            write_output(s_out, os.str());
        } else if (*q_cmd) {
            std::ifstream in(q_in);
            if (!in) throw fracvar::ModelError("cannot open input: " + q_in);
            std::vector<double> values = fracvar::read_path_csv(in);
            const long n = static_cast<long>(values.size()) - 1;
            json j;
            j["n"] = n;
            j["vn"] = fracvar::vn(std::span<const double>(values));
            if (q_exact) {
                fracvar::ProcessModel model = build_model(q_flags);
                fracvar::CovGrid grid = fracvar::cov_grid(model, static_cast<int>(n));
                fracvar::IncrementCovariance dc = fracvar::increment_cov(grid);
                j["exact_mean_vn"] = fracvar::exact_mean_vn(dc);
                j["exact_var_vn"] = fracvar::exact_var_vn(dc);
            }
            write_output(q_out, json_dump(j));
        } else if (*e_cmd) {
            std::ifstream in(e_in);
            if (!in) throw fracvar::ModelError("cannot open input: " + e_in);
            std::vector<double> fine = fracvar::read_path_csv(in);
            const long fine_n = static_cast<long>(fine.size()) - 1;
            if (fine_n % 2 != 0 || fine_n < 8)
                throw fracvar::ModelError(
                    "estimate: path resolution must be even and >= 8");
            const long n = fine_n / 2;
            std::vector<double> coarse(n + 1);
            for (long k = 0; k <= n; ++k) coarse[k] = fine[2 * k];
            const double v_n = fracvar::vn(std::span<const double>(coarse));
            const double v_2n = fracvar::vn(std::span<const double>(fine));

            std::optional<fracvar::TheoreticalConstants> constants;
            std::string model_name;
            const bool have_model = !e_flags.type.empty() || !e_flags.config_path.empty();
            if (have_model) {
                fracvar::ProcessModel model = build_model(e_flags);
                constants = fracvar::constants_for(model);
                model_name = model.name();
            }
            fracvar::EstimateReport rep = fracvar::make_report(
                constants ? &*constants : nullptr, n, v_n, v_2n, model_name);
            if (!rep.ratio.valid)
                throw fracvar::ModelError("estimate: " + rep.ratio.note);
            write_output(e_out, json_dump(fracvar::report_to_json(rep)));
        } else if (*m_cmd) {
            fracvar::ExperimentConfig config;
            if (!m_flags.config_path.empty()) {
                json j = load_json_file(m_flags.config_path);
                if (j.contains("model") && !m_flags.type.empty()) {
                    // let model flags override via the shared path
                    json merged = model_json_from_flags(m_flags, &j["model"]);
                    j["model"] = merged;
                }
                config = fracvar::experiment_from_json(j);
            } else {
                config.model = build_model(m_flags);
            }
            if (!m_n.empty()) config.n_values = m_n;
            if (m_reps > 0) config.replications = m_reps;
            if (m_seed_set) config.master_seed = m_seed;
            if (m_no_est) config.run_estimators = false;
            if (m_no_exact) config.exact_moments = false;
            if (m_threads > 0) config.threads = m_threads;
            if (!m_raw.empty()) config.raw_csv_path = m_raw;

            fracvar::McReport rep = fracvar::run_experiment(config);
            write_output(m_out, json_dump(fracvar::mc_report_to_json(rep)));
        }
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
