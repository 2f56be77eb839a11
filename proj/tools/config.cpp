#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <json.hpp>
#include <sstream>

namespace mbcli {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(path + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            throw ConfigError(path + "." + key + ": unknown key");
    }
}

double number(const json& obj, const std::string& path, const char* key, std::optional<double> fallback = {}) {
    const std::string field = path + "." + key;
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(field + ": required field is missing");
    }
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(field + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(field + ": must be finite");
    return d;
}

std::int64_t integer(const json& obj, const std::string& path, const char* key, std::int64_t fallback, std::int64_t lo) {
    const std::string field = path + "." + key;
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(field + ": expected an integer");
    const auto i = v.get<std::int64_t>();
    if (i < lo) throw ConfigError(field + ": must be at least " + std::to_string(lo));
    return i;
}

std::string text(const json& obj, const std::string& path, const char* key, const char* fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) throw ConfigError(path + "." + key + ": expected a string");
    return v.get<std::string>();
}

bool flag(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) return false;
    const json& v = obj.at(key);
    if (!v.is_boolean()) throw ConfigError(path + "." + key + ": expected true or false");
    return v.get<bool>();
}

std::pair<double, double> point(const json& v, const std::string& field) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError(field + ": expected [x, y]");
    const double x = v[0].get<double>();
    const double y = v[1].get<double>();
    if (!std::isfinite(x) || !std::isfinite(y)) throw ConfigError(field + ": must be finite");
    return {x, y};
}

void check_open(double v, double lo, double hi, const std::string& field) {
    if (!(v > lo && v < hi)) {
        std::ostringstream s;
        s << field << ": " << v << " is outside (" << lo << ", " << hi << ")";
        throw ConfigError(s.str());
    }
}

ModelBlock parse_model(const json& j) {
    const std::string p = "model";
    check_keys(j, p, {"hurst", "rho", "x0", "y0", "T", "h1", "h2", "holder_gamma"});
    ModelBlock m;
    m.hurst = number(j, p, "hurst");
    check_open(m.hurst, 0.0, 1.0, "model.hurst");
    m.rho = number(j, p, "rho", 0.0);
    check_open(m.rho, -1.0, 1.0, "model.rho");
    m.x0 = number(j, p, "x0", 0.0);
    m.y0 = number(j, p, "y0", 0.0);
    m.T = number(j, p, "T");
    if (!(m.T > 0.0)) throw ConfigError("model.T: must be positive");
    m.h1 = text(j, p, "h1", "0");
    m.h2 = text(j, p, "h2", "0");
    if (j.contains("holder_gamma")) {
        const double g = number(j, p, "holder_gamma");
        if (!(g > 0.0 && g <= 1.0)) throw ConfigError("model.holder_gamma: must lie in (0, 1]");
        m.holder_gamma = g;
    }
    return m;
}

KernelBlock parse_kernel(const json& j) {
    const std::string p = "kernel";
    check_keys(j, p, {"hurst", "t_max", "n"});
    KernelBlock k;
    if (j.contains("hurst")) {
        k.hurst = number(j, p, "hurst");
        check_open(*k.hurst, 0.0, 1.0, "kernel.hurst");
    }
    k.t_max = number(j, p, "t_max", 1.0);
    if (!(k.t_max > 0.0)) throw ConfigError("kernel.t_max: must be positive");
    k.n = static_cast<int>(integer(j, p, "n", 20, 2));
    if (k.n > 2000) throw ConfigError("kernel.n: must be at most 2000");
    return k;
}

ModalPathBlock parse_modal_path(const json& j) {
    const std::string p = "modal_path";
    check_keys(j, p, {"n", "endpoint"});
    ModalPathBlock b;
    b.n = static_cast<int>(integer(j, p, "n", 1000, 1));
    if (b.n > 1000000) throw ConfigError("modal_path.n: must be at most 1000000");
    if (j.contains("endpoint")) b.endpoint = point(j.at("endpoint"), "modal_path.endpoint");
    return b;
}

DensityBlock parse_density(const json& j) {
    const std::string p = "density";
    check_keys(j, p, {"n", "endpoints"});
    DensityBlock b;
    b.n = static_cast<int>(integer(j, p, "n", 1000, 2));
    if (b.n > 20000) throw ConfigError("density.n: must be at most 20000");
    if (!j.contains("endpoints")) throw ConfigError("density.endpoints: required field is missing");
    const json& e = j.at("endpoints");
    if (!e.is_array() || e.empty()) throw ConfigError("density.endpoints: expected a non-empty array of [x, y]");
    for (std::size_t i = 0; i < e.size(); ++i)
        b.endpoints.push_back(point(e[i], "density.endpoints[" + std::to_string(i) + "]"));
    return b;
}

SimBlock parse_sim(const json& j, const std::string& p, bool with_estimator) {
    if (with_estimator)
        check_keys(j, p,
                   {"n_paths", "n_steps", "seed", "chunk_size", "endpoint", "estimator", "width_x", "width_y",
                    "write_terminals"});
    else
        check_keys(j, p, {"n_paths", "n_steps", "seed", "chunk_size", "endpoint"});
    SimBlock s;
    s.n_paths = integer(j, p, "n_paths", s.n_paths, 1);
    s.n_steps = static_cast<int>(integer(j, p, "n_steps", s.n_steps, 2));
    if (j.contains("seed")) {
        const json& v = j.at("seed");
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
            throw ConfigError(p + ".seed: expected a non-negative integer");
        s.seed = v.get<std::uint64_t>();
    }
    s.chunk_size = static_cast<int>(integer(j, p, "chunk_size", s.chunk_size, 1));
    if (j.contains("endpoint")) s.endpoint = point(j.at("endpoint"), p + ".endpoint");
    if (with_estimator) {
        const std::string kind = text(j, p, "estimator", "kde");
        if (kind != "kde" && kind != "bin") throw ConfigError(p + ".estimator: expected \"kde\" or \"bin\"");
        s.bin = kind == "bin";
        s.width_x = number(j, p, "width_x", s.width_x);
        s.width_y = number(j, p, "width_y", s.width_y);
        if (!(s.width_x > 0.0)) throw ConfigError(p + ".width_x: must be positive");
        if (!(s.width_y > 0.0)) throw ConfigError(p + ".width_y: must be positive");
        s.write_terminals = flag(j, p, "write_terminals");
    }
    return s;
}

}  // namespace

RunConfig parse_config(const std::string& source) {
    json doc;
    try {
        doc = json::parse(source);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    check_keys(doc, "config", {"model", "kernel", "modal_path", "density", "simulation", "bridge_mc"});
    RunConfig c;
    if (doc.contains("model")) c.model = parse_model(doc.at("model"));
    if (doc.contains("kernel")) c.kernel = parse_kernel(doc.at("kernel"));
    if (doc.contains("modal_path")) c.modal_path = parse_modal_path(doc.at("modal_path"));
    if (doc.contains("density")) c.density = parse_density(doc.at("density"));
    if (doc.contains("simulation")) c.simulation = parse_sim(doc.at("simulation"), "simulation", true);
    if (doc.contains("bridge_mc")) c.bridge_mc = parse_sim(doc.at("bridge_mc"), "bridge_mc", false);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return parse_config(s.str());
}

}  // namespace mbcli
