#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsjd/models.hpp"

namespace rsjd {

struct Numerics {
    int cos_terms = 256;
    double cos_range = 10.0;  // truncation half-widths L
    std::uint64_t seed = 42;
    std::size_t paths = 10000;
    double step = 1e-3;
    double horizon = 1.0;
    int density_terms = 1 << 11;
};

struct AppConfig {
    ModelConfig model;
    Market market;
    Numerics numerics;
    std::vector<double> xi_sweep;  // dispersion-surface sweep values
};

/// Schema violation; the message carries a JSON-pointer-style path.
struct ConfigError : std::runtime_error {
    ConfigError(const std::string& path, const std::string& what)
        : std::runtime_error(path + ": " + what) {}
};

AppConfig parse_config(const std::string& json_text);
AppConfig load_config_file(const std::string& path);

const std::vector<std::string>& preset_names();  // fig1..fig4
std::string preset_text(const std::string& name);
AppConfig load_preset(const std::string& name);

/// 12 significant digits, locale independent.
std::string format_sig(double v);

CosPricerConfig pricer_config(const Numerics& numerics);

}  // namespace rsjd
