#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mbcli {

/// Raised for malformed configuration documents; the message names the offending field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ModelBlock {
    double hurst = 0.5;
    double rho = 0.0;
    double x0 = 0.0;
    double y0 = 0.0;
    double T = 1.0;
    std::string h1 = "0";
    std::string h2 = "0";
    std::optional<double> holder_gamma;
};

struct KernelBlock {
    std::optional<double> hurst;
    double t_max = 1.0;
    int n = 20;
};

struct ModalPathBlock {
    int n = 1000;
    std::optional<std::pair<double, double>> endpoint;
};

struct DensityBlock {
    int n = 1000;
    std::vector<std::pair<double, double>> endpoints;
};

struct SimBlock {
    std::int64_t n_paths = 10000;
    int n_steps = 128;
    std::uint64_t seed = 0;
    bool bin = false;
    double width_x = 0.1;
    double width_y = 0.1;
    int chunk_size = 4096;
    bool write_terminals = false;
    std::optional<std::pair<double, double>> endpoint;
};

struct RunConfig {
    std::optional<ModelBlock> model;
    std::optional<KernelBlock> kernel;
    std::optional<ModalPathBlock> modal_path;
    std::optional<DensityBlock> density;
    std::optional<SimBlock> simulation;
    std::optional<SimBlock> bridge_mc;
};

/// Parses and schema-checks a whole document. Unknown keys anywhere are rejected.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace mbcli
