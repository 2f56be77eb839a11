#include "modalbridge/modalbridge.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <json.hpp>
#include <optional>
#include <string>

#include "modalbridge/density.hpp"
#include "modalbridge/driftspec.hpp"
#include "modalbridge/errors.hpp"
#include "modalbridge/fbm_kernel.hpp"
#include "modalbridge/mc.hpp"
#include "modalbridge/parallel.hpp"
#include "modalbridge/validate.hpp"

using namespace modalbridge;

struct mb_model {
    drift::ModelSpec spec;
};

struct mb_ensemble {
    mc::PathEnsemble data;
};

namespace {

thread_local std::string last_error;

mb_status status_of(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Domain: return MB_ERR_DOMAIN;
        case ErrorKind::Syntax: return MB_ERR_SYNTAX;
        case ErrorKind::Evaluation: return MB_ERR_EVALUATION;
        case ErrorKind::Conditioning: return MB_ERR_CONDITIONING;
        case ErrorKind::Parameter: return MB_ERR_PARAMETER;
        case ErrorKind::Unsupported: return MB_ERR_UNSUPPORTED;
        case ErrorKind::Config: return MB_ERR_CONFIG;
    }
    return MB_ERR_INTERNAL;
}

template <class F>
mb_status guarded(F&& body) {
    try {
        body();
        last_error.clear();
        return MB_OK;
    } catch (const Error& e) {
        last_error = e.what();
        return status_of(e.kind());
    } catch (const std::exception& e) {
        last_error = e.what();
        return MB_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown failure";
        return MB_ERR_INTERNAL;
    }
}

void require(const void* p, const char* what) {
    if (p == nullptr) throw DomainError(std::string(what) + " must not be null");
}

char* dup_string(const std::string& s) {
    auto* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

mc::SimConfig to_config(const mb_sim_config* c) {
    require(c, "config");
    mc::SimConfig out;
    out.n_paths = c->n_paths;
    out.n_steps = c->n_steps;
    out.seed = c->seed;
    out.estimator = {c->estimator == MB_ESTIMATOR_BIN ? mc::EstimatorKind::Bin : mc::EstimatorKind::KDE, c->width_x,
                     c->width_y};
    out.chunk_size = c->chunk_size;
    out.keep_paths = c->keep_paths != 0;
    return out;
}

}  // namespace

extern "C" {

const char* mb_last_error(void) { return last_error.c_str(); }

const char* mb_status_name(mb_status status) {
    switch (status) {
        case MB_OK: return "ok";
        case MB_ERR_DOMAIN: return "domain";
        case MB_ERR_SYNTAX: return "syntax";
        case MB_ERR_EVALUATION: return "evaluation";
        case MB_ERR_CONDITIONING: return "conditioning";
        case MB_ERR_PARAMETER: return "parameter";
        case MB_ERR_UNSUPPORTED: return "unsupported";
        case MB_ERR_CONFIG: return "config";
        case MB_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

void mb_string_free(char* s) { std::free(s); }

void mb_set_threads(int workers) { set_worker_count(workers < 0 ? 0 : workers); }

void mb_set_kappa_fault(double factor) { fbm::set_kappa_fault_factor(factor); }

mb_status mb_kernel(double hurst, double t, double s, double* k_hyp, double* k_alt) {
    return guarded([&] {
        const fbm::Hurst h(hurst);
        if (k_hyp) *k_hyp = fbm::kernel_hyp(t, s, h);
        if (k_alt) *k_alt = fbm::kernel_alt(t, s, h);
    });
}

mb_status mb_kappa(double hurst, double* kappa) {
    return guarded([&] {
        require(kappa, "kappa");
        *kappa = fbm::Hurst(hurst).kappa();
    });
}

mb_status mb_drift_check(const char* source, size_t* offset, char** canonical) {
    return guarded([&] {
        require(source, "source");
        try {
            const auto e = drift::parse_drift(source);
            if (canonical) *canonical = dup_string(drift::print_drift(e));
        } catch (const drift::SyntaxError& s) {
            if (offset) *offset = s.offset();
            throw;
        }
    });
}

mb_status mb_drift_eval(const char* source, double t, double x, double y, double* value) {
    return guarded([&] {
        require(source, "source");
        require(value, "value");
        *value = drift::eval_drift(drift::parse_drift(source), t, x, y);
    });
}

mb_status mb_model_create(double hurst, double rho, double x0, double y0, double T, const char* h1, const char* h2,
                          double holder_gamma, mb_model** out) {
    return guarded([&] {
        require(out, "out");
        *out = nullptr;
        require(h1, "h1");
        require(h2, "h2");
        std::optional<double> gamma;
        if (holder_gamma > 0.0) gamma = holder_gamma;
        auto spec = drift::make_model(hurst, rho, x0, y0, T, drift::parse_drift(h1), drift::parse_drift(h2), gamma);
        *out = new mb_model{std::move(spec)};
    });
}

void mb_model_free(mb_model* model) { delete model; }

mb_drift_class mb_model_drift_class(const mb_model* model) {
    switch (model->spec.drift_class) {
        case drift::DriftClass::TimeOnly: return MB_DRIFT_TIME_ONLY;
        case drift::DriftClass::Linear: return MB_DRIFT_LINEAR;
        case drift::DriftClass::General: return MB_DRIFT_GENERAL;
    }
    return MB_DRIFT_GENERAL;
}

const char* mb_drift_class_name(mb_drift_class c) {
    switch (c) {
        case MB_DRIFT_TIME_ONLY: return drift::to_string(drift::DriftClass::TimeOnly);
        case MB_DRIFT_LINEAR: return drift::to_string(drift::DriftClass::Linear);
        case MB_DRIFT_GENERAL: return drift::to_string(drift::DriftClass::General);
    }
    return "unknown";
}

mb_status mb_model_assumptions(const mb_model* model, int samples, uint64_t seed, char** json) {
    return guarded([&] {
        require(model, "model");
        require(json, "json");
        const auto r = drift::validate_assumptions(model->spec, drift::default_box(model->spec), samples, seed);
        nlohmann::ordered_json j;
        j["lipschitz_estimate"] = r.lipschitz_estimate;
        j["linear_growth_estimate"] = r.linear_growth_estimate;
        j["contraction_horizon"] = std::isfinite(r.contraction_horizon) ? nlohmann::ordered_json(r.contraction_horizon)
                                                                         : nlohmann::ordered_json(nullptr);
        j["holder_quotient"] = r.holder_quotient ? nlohmann::ordered_json(*r.holder_quotient) : nlohmann::ordered_json(nullptr);
        j["violations"] = r.violations;
        *json = dup_string(j.dump());
    });
}

mb_status mb_modal_path(const mb_model* model, int n, double x, double y, double* t, double* x_path, double* y_path,
                        double* m11, double* m12, double* m21, double* m22) {
    return guarded([&] {
        require(model, "model");
        const fbm::TimeGrid grid(model->spec.T, n);
        const auto p = bridge::modal_path(model->spec, grid, x, y);
        for (int i = 0; i <= n; ++i) {
            const auto u = static_cast<std::size_t>(i);
            if (t) t[i] = grid.node(i);
            if (x_path) x_path[i] = p.x_path[u];
            if (y_path) y_path[i] = p.y_path[u];
            if (m11) m11[i] = p.coeffs.m11[u];
            if (m12) m12[i] = p.coeffs.m12[u];
            if (m21) m21[i] = p.coeffs.m21[u];
            if (m22) m22[i] = p.coeffs.m22[u];
        }
    });
}

mb_status mb_density_approx(const mb_model* model, double x, double y, int n, mb_density* out) {
    return guarded([&] {
        require(model, "model");
        require(out, "out");
        const auto a = density::approx_density(model->spec, x, y, n);
        *out = {a.phi, a.omega_1, a.omega_full, a.alpha, a.p_hat, a.p_hat_full};
    });
}

void mb_sim_config_default(mb_sim_config* config) {
    if (config == nullptr) return;
    const mc::SimConfig d;
    config->n_paths = d.n_paths;
    config->n_steps = d.n_steps;
    config->seed = d.seed;
    config->estimator = d.estimator.kind == mc::EstimatorKind::Bin ? MB_ESTIMATOR_BIN : MB_ESTIMATOR_KDE;
    config->width_x = d.estimator.wx;
    config->width_y = d.estimator.wy;
    config->chunk_size = d.chunk_size;
    config->keep_paths = d.keep_paths ? 1 : 0;
}

mb_status mb_simulate(const mb_model* model, const mb_sim_config* config, mb_ensemble** out) {
    return guarded([&] {
        require(model, "model");
        require(out, "out");
        *out = nullptr;
        auto ens = mc::simulate_forward(model->spec, to_config(config));
        *out = new mb_ensemble{std::move(ens)};
    });
}

void mb_ensemble_free(mb_ensemble* ensemble) { delete ensemble; }

int64_t mb_ensemble_size(const mb_ensemble* ensemble) {
    return ensemble ? static_cast<int64_t>(ensemble->data.terminal_x.size()) : 0;
}

mb_status mb_ensemble_terminals(const mb_ensemble* ensemble, double* x, double* y) {
    return guarded([&] {
        require(ensemble, "ensemble");
        const auto& d = ensemble->data;
        if (x) std::copy(d.terminal_x.begin(), d.terminal_x.end(), x);
        if (y) std::copy(d.terminal_y.begin(), d.terminal_y.end(), y);
    });
}

int mb_ensemble_warning_count(const mb_ensemble* ensemble) {
    return ensemble ? static_cast<int>(ensemble->data.warnings.size()) : 0;
}

const char* mb_ensemble_warning(const mb_ensemble* ensemble, int index) {
    if (ensemble == nullptr || index < 0 || index >= mb_ensemble_warning_count(ensemble)) return nullptr;
    return ensemble->data.warnings[static_cast<std::size_t>(index)].c_str();
}

const char* mb_ensemble_fingerprint(const mb_ensemble* ensemble) {
    return ensemble ? ensemble->data.fingerprint.c_str() : nullptr;
}

mb_status mb_ensemble_estimate(const mb_ensemble* ensemble, double x, double y, mb_estimator_kind kind, double width_x,
                               double width_y, mb_estimate* out) {
    return guarded([&] {
        require(ensemble, "ensemble");
        require(out, "out");
        const mc::Estimator est{kind == MB_ESTIMATOR_BIN ? mc::EstimatorKind::Bin : mc::EstimatorKind::KDE, width_x, width_y};
        const auto e = mc::estimate_density_at(ensemble->data, x, y, est);
        *out = {e.value, e.std_err, e.n_effective};
    });
}

mb_status mb_bridge_mc(const mb_model* model, double x, double y, const mb_sim_config* config, mb_bridge_estimate* out) {
    return guarded([&] {
        require(model, "model");
        require(out, "out");
        const auto b = mc::bridge_mc_density(model->spec, x, y, to_config(config));
        *out = {b.value, b.std_err, b.discretization_bias, b.n_paths};
    });
}

mb_status mb_validate(int quick, uint64_t seed, const int* criteria, int count, int* all_passed, char** json) {
    return guarded([&] {
        validate::Options o;
        o.quick = quick != 0;
        o.seed = seed;
        if (criteria != nullptr)
            for (int i = 0; i < count; ++i) {
                if (criteria[i] < 1 || criteria[i] > validate::kCriterionCount)
                    throw ConfigError("criterion id " + std::to_string(criteria[i]) + " is not in 1..11");
                o.only.push_back(criteria[i]);
            }
        const auto report = validate::run(o);
        if (all_passed) *all_passed = report.all_passed() ? 1 : 0;
        if (json) {
            nlohmann::ordered_json j;
            j["scale"] = o.quick ? "quick" : "full";
            j["seed"] = seed;
            j["all_passed"] = report.all_passed();
            j["criteria"] = nlohmann::ordered_json::array();
            for (const auto& r : report.results)
                j["criteria"].push_back({{"id", r.id},
                                         {"name", r.name},
                                         {"passed", r.passed},
                                         {"seconds", r.seconds},
                                         {"budget_seconds", r.budget_seconds},
                                         {"detail", r.detail}});
            *json = dup_string(j.dump(2));
        }
    });
}

int mb_figure_curve_count(void) { return 16; }

mb_status mb_figure_curve(int index, double* hurst, double* rho) {
    return guarded([&] {
        if (index < 0 || index >= 16) throw DomainError("figure curve index must be in 0..15");
        if (rho) *rho = validate::kFigureRhos[index / 4];
        if (hurst) *hurst = validate::kFigureHursts[index % 4];
    });
}

int mb_figure_steps(void) { return validate::kFigureSteps; }

}  // extern "C"
