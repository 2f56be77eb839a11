// modalbridge command-line tool. Talks to the library only through the C API.
#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <string>
#include <vector>

#include "config.hpp"
#include "modalbridge/modalbridge.h"
#include "output.hpp"

namespace {

using mbcli::ConfigError;
using nlohmann::ordered_json;

enum Exit { kOk = 0, kValidationFailed = 1, kConfig = 2, kNumerical = 3, kUnsupported = 4 };

struct ApiFailure {
    mb_status status;
    std::string message;
};

void check(mb_status s) {
    if (s != MB_OK) throw ApiFailure{s, mb_last_error()};
}

int exit_code(mb_status s) {
    switch (s) {
        case MB_ERR_CONFIG:
        case MB_ERR_PARAMETER:
        case MB_ERR_SYNTAX: return kConfig;
        case MB_ERR_UNSUPPORTED: return kUnsupported;
        default: return kNumerical;
    }
}

struct Common {
    std::string config;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out;
    std::string format;
};

struct ModelHandle {
    mb_model* p = nullptr;
    ModelHandle() = default;
    ModelHandle(const ModelHandle&) = delete;
    ModelHandle& operator=(const ModelHandle&) = delete;
    ~ModelHandle() { mb_model_free(p); }
};

mbcli::RunConfig load(const Common& c) {
    if (c.config.empty()) throw ConfigError("--config is required for this command");
    return mbcli::load_config(c.config);
}

void make_model(const mbcli::RunConfig& cfg, ModelHandle& h) {
    if (!cfg.model) throw ConfigError("model: required block is missing");
    const auto& m = *cfg.model;
    for (auto [field, source] : {std::pair{"model.h1", &m.h1}, std::pair{"model.h2", &m.h2}})
        if (mb_drift_check(source->c_str(), nullptr, nullptr) != MB_OK)
            throw ConfigError(std::string(field) + ": " + mb_last_error());
    const mb_status s = mb_model_create(m.hurst, m.rho, m.x0, m.y0, m.T, m.h1.c_str(), m.h2.c_str(),
                                        m.holder_gamma.value_or(0.0), &h.p);
    if (s == MB_ERR_SYNTAX || s == MB_ERR_PARAMETER || s == MB_ERR_DOMAIN)
        throw ConfigError(std::string("model: ") + mb_last_error());
    check(s);
}

std::string output_path(const Common& c, const std::string& name) {
    if (c.out.empty()) return {};
    std::filesystem::create_directories(c.out);
    return (std::filesystem::path(c.out) / name).string();
}

void require_format(const Common& c, std::initializer_list<const char*> allowed) {
    if (c.format.empty()) return;
    for (const char* a : allowed)
        if (c.format == a) return;
    throw ConfigError("--format " + c.format + " is not available for this command");
}

ordered_json finite_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

void print_warnings(const mb_ensemble* e) {
    for (int i = 0; i < mb_ensemble_warning_count(e); ++i) std::cerr << "warning: " << mb_ensemble_warning(e, i) << "\n";
}

// ---- kernel ----

int cmd_kernel(const Common& c) {
    require_format(c, {"csv"});
    const auto cfg = load(c);
    const mbcli::KernelBlock k = cfg.kernel.value_or(mbcli::KernelBlock{});
    double hurst = 0.0;
    if (k.hurst)
        hurst = *k.hurst;
    else if (cfg.model)
        hurst = cfg.model->hurst;
    else
        throw ConfigError("kernel.hurst: required when no model block is given");
    mbcli::CsvWriter csv({"t", "s", "K_hyp", "K_alt", "abs_rel_diff"});
    for (int i = 1; i <= k.n; ++i) {
        const double t = k.t_max * i / k.n;
        for (int j = 0; j < k.n; ++j) {
            const double s = t * (j + 0.5) / k.n;
            double a = 0.0, b = 0.0;
            check(mb_kernel(hurst, t, s, &a, &b));
            csv.row({t, s, a, b, std::abs(a - b) / std::abs(a)});
        }
    }
    mbcli::emit(output_path(c, "kernel.csv"), csv.str());
    return kOk;
}

// ---- modal path ----

struct PathColumns {
    std::vector<double> t, x, y, m11, m12, m21, m22;
    explicit PathColumns(int n) : t(n + 1), x(n + 1), y(n + 1), m11(n + 1), m12(n + 1), m21(n + 1), m22(n + 1) {}
};

PathColumns modal_columns(const mb_model* model, int n, double x, double y) {
    PathColumns p(n);
    check(mb_modal_path(model, n, x, y, p.t.data(), p.x.data(), p.y.data(), p.m11.data(), p.m12.data(), p.m21.data(),
                        p.m22.data()));
    return p;
}

std::string path_csv(const PathColumns& p) {
    mbcli::CsvWriter csv({"t", "x_path", "y_path", "m11", "m12", "m21", "m22"});
    for (std::size_t i = 0; i < p.t.size(); ++i) csv.row({p.t[i], p.x[i], p.y[i], p.m11[i], p.m12[i], p.m21[i], p.m22[i]});
    return csv.str();
}

std::string label(const char* name, double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s_%g", name, v);
    return buf;
}

int cmd_figure_grid(const Common& c) {
    require_format(c, {"csv", "svg"});
    const int n = mb_figure_steps();
    Common where = c;
    if (where.out.empty()) where.out = ".";
    std::vector<mbcli::SvgSeries> series;
    for (int k = 0; k < mb_figure_curve_count(); ++k) {
        double hurst = 0.0, rho = 0.0;
        check(mb_figure_curve(k, &hurst, &rho));
        ModelHandle m;
        check(mb_model_create(hurst, rho, 0.0, 0.0, 1.0, "0", "0", 0.0, &m.p));
        const PathColumns p = modal_columns(m.p, n, 1.0, 1.0);
        mbcli::emit(output_path(where, "modal_path_" + label("rho", rho) + "_" + label("H", hurst) + ".csv"), path_csv(p));
        char name[32];
        std::snprintf(name, sizeof name, "H = %g", hurst);
        series.push_back({name, p.x, p.y});
        if (k % 4 == 3) {
            char title[64];
            std::snprintf(title, sizeof title, "Modal paths from (0,0) to (1,1), rho = %g", rho);
            mbcli::emit(output_path(where, "modal_paths_" + label("rho", rho) + ".svg"), mbcli::svg_chart(title, "x", "y", series));
            series.clear();
        }
    }
    return kOk;
}

int cmd_modal_path(const Common& c, bool figure_grid) {
    if (figure_grid) return cmd_figure_grid(c);
    require_format(c, {"csv", "svg"});
    const auto cfg = load(c);
    ModelHandle m;
    make_model(cfg, m);
    const mbcli::ModalPathBlock b = cfg.modal_path.value_or(mbcli::ModalPathBlock{});
    if (!b.endpoint) throw ConfigError("modal_path.endpoint: required field is missing");
    const PathColumns p = modal_columns(m.p, b.n, b.endpoint->first, b.endpoint->second);
    if (c.format == "svg") {
        char name[48];
        std::snprintf(name, sizeof name, "H = %g, rho = %g", cfg.model->hurst, cfg.model->rho);
        mbcli::emit(output_path(c, "modal_path.svg"), mbcli::svg_chart("Modal path", "x", "y", {{name, p.x, p.y}}));
    } else {
        mbcli::emit(output_path(c, "modal_path.csv"), path_csv(p));
    }
    return kOk;
}

// ---- density ----

int cmd_density(const Common& c) {
    require_format(c, {"json", "csv"});
    const auto cfg = load(c);
    ModelHandle m;
    make_model(cfg, m);
    if (!cfg.density) throw ConfigError("density: required block is missing");
    const char* cls = mb_drift_class_name(mb_model_drift_class(m.p));
    ordered_json rows = ordered_json::array();
    mbcli::CsvWriter csv({"x", "y", "phi", "omega_1", "omega_full", "alpha", "p_hat_leading", "p_hat_full"});
    for (auto [x, y] : cfg.density->endpoints) {
        mb_density d{};
        check(mb_density_approx(m.p, x, y, cfg.density->n, &d));
        rows.push_back({{"x", x},
                        {"y", y},
                        {"phi", d.phi},
                        {"omega_1", d.omega_1},
                        {"omega_full", d.omega_full},
                        {"alpha", finite_or_null(d.alpha)},
                        {"p_hat_leading", d.p_hat_leading},
                        {"p_hat_full", d.p_hat_full},
                        {"drift_class", cls}});
        csv.row({x, y, d.phi, d.omega_1, d.omega_full, d.alpha, d.p_hat_leading, d.p_hat_full});
    }
    if (c.format == "csv") {
        mbcli::emit(output_path(c, "density.csv"), csv.str());
    } else {
        ordered_json j;
        j["drift_class"] = cls;
        j["endpoints"] = rows;
        mbcli::emit(output_path(c, "density.json"), j.dump(2) + "\n");
    }
    return kOk;
}

// ---- Monte Carlo ----

mb_sim_config sim_config(const mbcli::SimBlock& s, const Common& c) {
    mb_sim_config out;
    mb_sim_config_default(&out);
    out.n_paths = s.n_paths;
    out.n_steps = s.n_steps;
    out.seed = c.seed_set ? c.seed : s.seed;
    out.estimator = s.bin ? MB_ESTIMATOR_BIN : MB_ESTIMATOR_KDE;
    out.width_x = s.width_x;
    out.width_y = s.width_y;
    out.chunk_size = s.chunk_size;
    out.keep_paths = 0;
    return out;
}

int cmd_simulate(const Common& c) {
    require_format(c, {"json", "csv"});
    const auto cfg = load(c);
    ModelHandle m;
    make_model(cfg, m);
    if (!cfg.simulation) throw ConfigError("simulation: required block is missing");
    const auto& s = *cfg.simulation;
    if (!s.endpoint) throw ConfigError("simulation.endpoint: required field is missing");
    const mb_sim_config sc = sim_config(s, c);
    mb_ensemble* raw = nullptr;
    check(mb_simulate(m.p, &sc, &raw));
    std::unique_ptr<mb_ensemble, decltype(&mb_ensemble_free)> ens(raw, &mb_ensemble_free);
    print_warnings(ens.get());
    mb_estimate e{};
    check(mb_ensemble_estimate(ens.get(), s.endpoint->first, s.endpoint->second, sc.estimator, sc.width_x, sc.width_y, &e));

    // with stdout as the sink only one document can be written, so write_terminals needs --out
    const bool terminals = (s.write_terminals && !c.out.empty()) || c.format == "csv";
    if (terminals) {
        const auto n = static_cast<std::size_t>(mb_ensemble_size(ens.get()));
        std::vector<double> tx(n), ty(n);
        check(mb_ensemble_terminals(ens.get(), tx.data(), ty.data()));
        mbcli::CsvWriter csv({"x_T", "y_T"});
        for (std::size_t i = 0; i < n; ++i) csv.row({tx[i], ty[i]});
        if (c.format == "csv" && c.out.empty()) {
            mbcli::emit("", csv.str());
            return kOk;
        }
        mbcli::emit(output_path(c, "terminals.csv"), csv.str());
    }
    ordered_json j;
    j["estimate"] = e.value;
    j["std_err"] = e.std_err;
    j["n_effective"] = e.n_effective;
    j["n_paths"] = sc.n_paths;
    j["n_steps"] = sc.n_steps;
    j["seed"] = sc.seed;
    j["estimator"] = s.bin ? "bin" : "kde";
    j["endpoint"] = {s.endpoint->first, s.endpoint->second};
    j["fingerprint"] = mb_ensemble_fingerprint(ens.get());
    ordered_json warnings = ordered_json::array();
    for (int i = 0; i < mb_ensemble_warning_count(ens.get()); ++i) warnings.push_back(mb_ensemble_warning(ens.get(), i));
    j["warnings"] = warnings;
    if (c.format != "csv" || !c.out.empty()) mbcli::emit(output_path(c, "simulate.json"), j.dump(2) + "\n");
    return kOk;
}

int cmd_bridge_mc(const Common& c) {
    require_format(c, {"json", "csv"});
    const auto cfg = load(c);
    ModelHandle m;
    make_model(cfg, m);
    if (!cfg.bridge_mc) throw ConfigError("bridge_mc: required block is missing");
    const auto& s = *cfg.bridge_mc;
    if (!s.endpoint) throw ConfigError("bridge_mc.endpoint: required field is missing");
    const mb_sim_config sc = sim_config(s, c);
    mb_bridge_estimate b{};
    check(mb_bridge_mc(m.p, s.endpoint->first, s.endpoint->second, &sc, &b));
    if (c.format == "csv") {
        mbcli::CsvWriter csv({"x", "y", "estimate", "std_err", "discretization_bias_estimate"});
        csv.row({s.endpoint->first, s.endpoint->second, b.value, b.std_err, b.discretization_bias});
        mbcli::emit(output_path(c, "bridge_mc.csv"), csv.str());
        return kOk;
    }
    ordered_json j;
    j["estimate"] = b.value;
    j["std_err"] = b.std_err;
    j["discretization_bias_estimate"] = b.discretization_bias;
    j["n_paths"] = b.n_paths;
    j["n_steps"] = sc.n_steps;
    j["seed"] = sc.seed;
    j["endpoint"] = {s.endpoint->first, s.endpoint->second};
    mbcli::emit(output_path(c, "bridge_mc.json"), j.dump(2) + "\n");
    return kOk;
}

// ---- validate ----

int cmd_validate(const Common& c, bool quick, const std::vector<int>& criteria, double kappa_fault) {
    require_format(c, {"json"});
    if (!c.config.empty()) (void)load(c);
    if (kappa_fault != 1.0) mb_set_kappa_fault(kappa_fault);
    int all = 0;
    char* json = nullptr;
    check(mb_validate(quick ? 1 : 0, c.seed_set ? c.seed : 20240611, criteria.empty() ? nullptr : criteria.data(),
                      static_cast<int>(criteria.size()), &all, &json));
    const std::string report(json);
    mb_string_free(json);
    const auto parsed = ordered_json::parse(report);
    for (const auto& r : parsed["criteria"])
        std::cerr << (r["passed"].get<bool>() ? "PASS" : "FAIL") << "  criterion " << r["id"].get<int>() << " ("
                  << r["name"].get<std::string>() << "): " << r["detail"].get<std::string>() << "\n";
    mbcli::emit(output_path(c, "validate.json"), report + "\n");
    return all ? kOk : kValidationFailed;
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "JSON configuration document");
    sub->add_option_function<std::uint64_t>(
        "--seed", [&c](const std::uint64_t& s) { c.seed = s, c.seed_set = true; }, "RNG seed (overrides the config)");
    sub->add_option("--out", c.out, "output directory (stdout when omitted)");
    sub->add_option("--format", c.format, "output format")->check(CLI::IsMember({"csv", "json", "svg"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Modal-path density approximation for mixed Brownian/fractional systems"};
    app.require_subcommand(1);
    Common common;
    bool figure_grid = false;
    bool quick = false;
    std::vector<int> criteria;
    double kappa_fault = 1.0;

    auto* kernel = app.add_subcommand("kernel", "tabulate K_H by both closed forms");
    auto* modal = app.add_subcommand("modal-path", "modal path and its coefficient functions");
    auto* dens = app.add_subcommand("density", "modal-path density approximation at endpoints");
    auto* sim = app.add_subcommand("simulate", "forward Monte Carlo density estimate");
    auto* bmc = app.add_subcommand("bridge-mc", "bridge-measure Monte Carlo density estimate");
    auto* val = app.add_subcommand("validate", "run the acceptance suite");
    for (auto* s : {kernel, modal, dens, sim, bmc, val}) add_common(s, common);
    modal->add_flag("--figure-grid", figure_grid, "write the 16-curve figure preset");
    val->add_flag("--quick", quick, "reduced sample sizes");
    val->add_option("--criteria", criteria, "criterion ids to run (default all)")->delimiter(',');
    val->add_option("--kappa-fault", kappa_fault, "test hook: scale kappa_H by this factor")->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*kernel) return cmd_kernel(common);
        if (*modal) return cmd_modal_path(common, figure_grid);
        if (*dens) return cmd_density(common);
        if (*sim) return cmd_simulate(common);
        if (*bmc) return cmd_bridge_mc(common);
        if (*val) return cmd_validate(common, quick, criteria, kappa_fault);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const ApiFailure& f) {
        std::cerr << mb_status_name(f.status) << " error: " << f.message << "\n";
        return exit_code(f.status);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumerical;
    }
    return kConfig;
}
