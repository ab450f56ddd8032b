#include "fracvar/json_io.hpp"

#include "fracvar/numeric.hpp"
#include "fracvar/sampling.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace fracvar {

namespace {

json finite_or_null(double x) {
    if (std::isfinite(x)) return x;
    return nullptr;
}

json estimate_to_json(const Estimate& e) {
    json j;
    j["value"] = finite_or_null(e.value);
    j["valid"] = e.valid;
    if (!e.note.empty()) j["note"] = e.note;
    return j;
}

} // namespace

json model_to_json(const ProcessModel& model) {
    json j;
    switch (model.kind()) {
    case ModelKind::fbm:
        j["type"] = "fbm";
        j["hurst"] = model.as_fbm().hurst;
        break;
    case ModelKind::bifbm: {
        const auto& m = model.as_bifbm();
        j["type"] = "bifbm";
        j["hurst"] = m.hurst;
        j["k"] = m.k;
        j["t1"] = m.t1;
        j["t2"] = m.t2;
        break;
    }
    case ModelKind::afbm_segment: {
        const auto& m = model.as_afbm();
        j["type"] = "afbm";
        j["length"] = m.length;
        j["eps"] = m.eps;
        j["omega"] = m.omega;
        json p;
        switch (m.profile.kind()) {
        case HurstProfile::Kind::constant:
            p["type"] = "constant";
            p["hurst"] = m.profile.h_min();
            break;
        case HurstProfile::Kind::piecewise_constant: {
            p["type"] = "piecewise";
            std::vector<double> breaks, values;
            for (const auto& s : m.profile.segments()) {
                breaks.push_back(s.start);
                values.push_back(s.value);
            }
            p["breakpoints"] = breaks;
            p["values"] = values;
            break;
        }
        case HurstProfile::Kind::smooth:
            p["type"] = "smooth";
            p["theta_star"] = m.profile.theta_star();
            p["h_min"] = m.profile.h_min();
            p["h2"] = m.profile.h2();
            p["h3"] = m.profile.h3();
            break;
        }
        j["profile"] = p;
        break;
    }
    }
    return j;
}

ProcessModel model_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "fbm") return ProcessModel::fbm(j.at("hurst").get<double>());
    if (type == "bifbm")
        return ProcessModel::bifbm(j.at("hurst").get<double>(), j.at("k").get<double>(),
                                   j.at("t1").get<double>(), j.at("t2").get<double>());
    if (type == "afbm") {
        const json& p = j.at("profile");
        const std::string ptype = p.at("type").get<std::string>();
        HurstProfile profile = HurstProfile::constant(0.5);
        if (ptype == "constant") {
            profile = HurstProfile::constant(p.at("hurst").get<double>());
        } else if (ptype == "piecewise") {
            profile = HurstProfile::piecewise(
                p.at("breakpoints").get<std::vector<double>>(),
                p.at("values").get<std::vector<double>>());
        } else if (ptype == "smooth") {
            profile = HurstProfile::smooth(
                p.at("theta_star").get<double>(), p.at("h_min").get<double>(),
                p.at("h2").get<double>(), p.value("h3", 0.0));
        } else {
            throw ModelError("unknown profile type: " + ptype);
        }
        return ProcessModel::afbm_segment(std::move(profile), j.value("length", 1.0),
                                          j.value("eps", 0.0), j.value("omega", 0.0));
    }
    throw ModelError("unknown model type: " + type);
}

json constants_to_json(const TheoreticalConstants& c) {
    json j;
    switch (c.kind) {
    case ModelKind::fbm: j["model"] = "fbm"; break;
    case ModelKind::bifbm: j["model"] = "bifbm"; break;
    case ModelKind::afbm_segment: j["model"] = "afbm"; break;
    }
    j["gamma"] = c.gamma;
    j["slowly_varying"] =
        c.slowly_varying == SlowlyVarying::unit ? "unit" : "inv_sqrt_log";
    j["g0_integral"] = c.g0_integral;
    j["gtilde_integral"] = c.gtilde_integral;
    j["c_diag_integral"] = c.c_diag_integral;
    j["c_diag_sq_integral"] = c.c_diag_sq_integral;
    j["rho_norm_sq"] = c.rho_norm;
    j["sigma_sq"] = c.sigma_sq;
    j["sigma1_cov_sq"] = c.sigma1_cov_sq;
    j["sigma2_cov_sq"] = c.sigma2_cov_sq;
    j["sigma_star_sq"] = c.sigma_star_sq;
    j["sigma_cross"] = c.sigma_cross();
    j["as_limit"] = c.as_limit;
    j["ratio_index"] = c.ratio_index;
    j["ratio_var"] = c.ratio_var;
    j["ratio_var_display"] = c.ratio_var_display;
    if (c.kind == ModelKind::bifbm) {
        j["hurst"] = c.hurst;
        j["k"] = c.k;
        j["t1"] = c.t1;
        j["t2"] = c.t2;
        j["k_var"] = c.k_var;
        j["h_var"] = c.h_var;
        j["h_var_display"] = c.h_var_display;
        j["eta1"] = c.eta1;
        j["eta2"] = c.eta2;
        j["eta3"] = c.eta3;
        j["eta_sq"] = c.eta_sq;
    }
    if (c.kind == ModelKind::afbm_segment) {
        switch (c.regime) {
        case AfbmRegime::lass_case_one: j["regime"] = "lass_case_one"; break;
        case AfbmRegime::lass_case_two: j["regime"] = "lass_case_two"; break;
        case AfbmRegime::non_lass: j["regime"] = "non_lass"; break;
        default: break;
        }
        j["h_min"] = c.ratio_index;
        if (std::isfinite(c.j_hmin)) j["j_hmin"] = c.j_hmin;
        if (std::isfinite(c.g_theta_star)) {
            j["g_theta_star"] = c.g_theta_star;
            j["sigma0"] = c.sigma0;
            j["sigma1"] = c.sigma1_laplace;
        }
    }
    return j;
}

json report_to_json(const EstimateReport& r) {
    json j;
    if (!r.model.empty()) j["model"] = r.model;
    j["n"] = r.n;
    j["vn"] = r.vn_value;
    j["v2n"] = r.v2n_value;
    j["estimate_label"] = r.ratio_label;
    j["estimate"] = estimate_to_json(r.ratio);
    j["stderr"] = finite_or_null(r.ratio_stderr);
    if (std::isfinite(r.ratio_bias)) j["bias"] = r.ratio_bias;
    if (r.k_hat) {
        j["k_estimate"] = estimate_to_json(*r.k_hat);
        j["k_stderr"] = finite_or_null(r.k_stderr);
    }
    if (r.h_hat) {
        j["h_estimate"] = estimate_to_json(*r.h_hat);
        j["h_stderr"] = finite_or_null(r.h_stderr);
    }
    return j;
}

json mc_report_to_json(const McReport& r) {
    json j;
    j["model"] = r.model;
    j["seed"] = r.master_seed;
    j["replications"] = r.replications;
    json levels = json::array();
    for (const auto& lv : r.levels) {
        json l;
        l["n"] = lv.n;
        l["replications"] = lv.replications;
        l["invalid_replications"] = lv.invalid_replications;
        l["vn_norm_mean"] = lv.vn_norm_mean;
        l["vn_norm_var"] = lv.vn_norm_var;
        l["v2n_norm_mean"] = lv.v2n_norm_mean;
        l["v2n_norm_var"] = lv.v2n_norm_var;
        l["vn_target"] = lv.vn_target;
        l["vn_z"] = lv.vn_z;
        l["v2n_z"] = lv.v2n_z;
        l["clt_emp_var"] = lv.clt_emp_var;
        l["clt_var_target"] = lv.clt_var_target;
        if (lv.ks.count > 0) {
            l["ks_distance"] = lv.ks.distance;
            l["ks_critical"] = lv.ks.critical;
            l["ks_pass"] = lv.ks.pass;
        }
        if (lv.have_exact) {
            l["vn_raw_mean"] = lv.vn_raw_mean;
            l["vn_raw_var"] = lv.vn_raw_var;
            l["v2n_raw_mean"] = lv.v2n_raw_mean;
            l["v2n_raw_var"] = lv.v2n_raw_var;
            l["raw_cov"] = lv.raw_cov;
            l["exact_mean_vn"] = lv.exact_mean_vn_value;
            l["exact_var_vn"] = lv.exact_var_vn_value;
            l["exact_mean_v2n"] = lv.exact_mean_v2n_value;
            l["exact_var_v2n"] = lv.exact_var_v2n_value;
            l["exact_cov_vn_v2n"] = lv.exact_cov_value;
            l["mean_z_exact"] = lv.mean_z_exact;
            l["var_z_exact"] = lv.var_z_exact;
            l["mean2_z_exact"] = lv.mean2_z_exact;
            l["var2_z_exact"] = lv.var2_z_exact;
            l["cov_z_exact"] = lv.cov_z_exact;
        }
        json ests = json::array();
        for (const auto& e : lv.estimators) {
            json je;
            je["name"] = e.name;
            je["truth"] = e.truth;
            je["valid"] = e.valid_count;
            je["invalid"] = e.invalid_count;
            je["mean"] = finite_or_null(e.mean);
            je["variance"] = finite_or_null(e.variance);
            je["bias"] = finite_or_null(e.bias);
            je["bias_z"] = finite_or_null(e.bias_z);
            je["expected_bias"] = e.expected_bias;
            je["stderr_pred"] = finite_or_null(e.stderr_pred);
            je["std_mean"] = finite_or_null(e.std_mean);
            je["std_var"] = finite_or_null(e.std_var);
            je["coverage95"] = finite_or_null(e.coverage95);
            ests.push_back(je);
        }
        l["estimators"] = ests;
        levels.push_back(l);
    }
    j["levels"] = levels;
    return j;
}

json experiment_to_json(const ExperimentConfig& c) {
    json j;
    j["model"] = model_to_json(c.model);
    j["n"] = c.n_values;
    j["replications"] = c.replications;
    j["seed"] = c.master_seed;
    j["estimators"] = c.run_estimators;
    j["exact_moments"] = c.exact_moments;
    if (c.threads > 0) j["threads"] = c.threads;
    if (!c.raw_csv_path.empty()) j["raw_csv"] = c.raw_csv_path;
    return j;
}

ExperimentConfig experiment_from_json(const json& j) {
    ExperimentConfig c;
    c.model = model_from_json(j.at("model"));
    if (j.at("n").is_array())
        c.n_values = j.at("n").get<std::vector<long>>();
    else
        c.n_values = {j.at("n").get<long>()};
    c.replications = j.value("replications", 1L);
    c.master_seed = j.value("seed", 0ULL);
    c.run_estimators = j.value("estimators", true);
    c.exact_moments = j.value("exact_moments", true);
    c.threads = j.value("threads", 0);
    c.raw_csv_path = j.value("raw_csv", std::string());
    return c;
}

void write_path_csv(std::ostream& os, const PathSample& path) {
    os << "t,value\n";
    char buf[64];
    for (int k = 0; k <= path.n; ++k) {
        const double t = static_cast<double>(k) / path.n;
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", t, path.values[k]);
        os << buf;
    }
}

std::vector<double> read_path_csv(std::istream& is) {
    std::vector<double> values;
    std::string line;
    if (!std::getline(is, line))
        throw ModelError("path CSV: empty input");
    if (line.rfind("t,", 0) != 0)
        throw ModelError("path CSV: expected header 't,value'");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ModelError("path CSV: malformed row: " + line);
        values.push_back(std::stod(line.substr(comma + 1)));
    }
    if (values.size() < 4) throw ModelError("path CSV: too few rows");
    return values;
}

} // namespace fracvar
