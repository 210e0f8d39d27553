#include "rsjd/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rsjd {

using nlohmann::json;

namespace {

const json& member(const json& j, const std::string& path, const std::string& key) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) throw ConfigError(path + "/" + key, "missing required field");
    return *it;
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    return j.get<double>();
}

double number_field(const json& j, const std::string& path, const std::string& key) {
    return number(member(j, path, key), path + "/" + key);
}

double number_or(const json& j, const std::string& path, const std::string& key, double fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    return number(j.at(key), path + "/" + key);
}

std::string string_field(const json& j, const std::string& path, const std::string& key) {
    const json& v = member(j, path, key);
    if (!v.is_string()) throw ConfigError(path + "/" + key, "expected a string");
    return v.get<std::string>();
}

std::vector<double> number_list(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "/" + std::to_string(i)));
    return out;
}

RandomiserSpec parse_randomiser(const json& j, const std::string& path) {
    const std::string family = string_field(j, path, "family");
    RandomiserSpec spec;
    try {
        if (family == "normal")
            spec = RandomiserSpec::normal(number_field(j, path, "mean"),
                                          number_field(j, path, "stddev"));
        else if (family == "exponential")
            spec = RandomiserSpec::exponential(number_field(j, path, "rate"));
        else if (family == "uniform")
            spec = RandomiserSpec::uniform(number_field(j, path, "lo"),
                                           number_field(j, path, "hi"));
        else if (family == "point-mass")
            spec = RandomiserSpec::point_mass(number_field(j, path, "value"));
        else
            throw ConfigError(path + "/family", "unknown family '" + family + "'");
        if (j.contains("truncate")) spec = spec.truncated(number(j.at("truncate"), path + "/truncate"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    } catch (const std::domain_error& e) {
        throw ConfigError(path, e.what());
    }
    return spec;
}

Component parse_component(const json& j, const std::string& path) {
    const json& drift_json = member(j, path, "drift");
    const std::string drift_kind = string_field(drift_json, path + "/drift", "kind");
    DriftRule drift;
    if (drift_kind == "merton-risk-neutral")
        drift = DriftRule::merton_risk_neutral(number_field(drift_json, path + "/drift", "rate"));
    else if (drift_kind == "constant")
        drift = DriftRule::constant(number_field(drift_json, path + "/drift", "value"));
    else if (drift_kind == "affine")
        drift = DriftRule::affine(number_field(drift_json, path + "/drift", "c0"),
                                  number_field(drift_json, path + "/drift", "c1"));
    else
        throw ConfigError(path + "/drift/kind", "unknown drift rule '" + drift_kind + "'");

    VolRule vol = VolRule::identity();
    if (j.contains("vol")) {
        const json& vol_json = j.at("vol");
        const std::string vol_kind = string_field(vol_json, path + "/vol", "kind");
        if (vol_kind == "identity")
            vol = VolRule::identity();
        else if (vol_kind == "constant")
            vol = VolRule::constant(number_field(vol_json, path + "/vol", "value"));
        else
            throw ConfigError(path + "/vol/kind", "unknown vol rule '" + vol_kind + "'");
    }

    JumpSpec jumps;
    if (j.contains("jumps")) {
        const json& jj = j.at("jumps");
        jumps.intensity = number_or(jj, path + "/jumps", "intensity", 0.0);
        jumps.mean = number_or(jj, path + "/jumps", "mean", 0.0);
        jumps.stddev = number_or(jj, path + "/jumps", "stddev", 0.0);
    }

    const auto order = static_cast<int>(number_or(j, path, "order", 7));
    if (order < 1 || order > kDefaultMaxOrder)
        throw ConfigError(path + "/order", "order must lie in [1, 10]");

    try {
        return Component(drift, vol, jumps, parse_randomiser(member(j, path, "randomiser"), path + "/randomiser"),
                         order);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    } catch (const std::domain_error& e) {
        throw ConfigError(path, e.what());
    }
}

SwitchingConfig parse_switching(const json& j, const std::string& path) {
    SwitchingConfig sw;
    const std::string mode = string_field(j, path, "mode");
    if (mode == "none") {
        sw.mode = SwitchingConfig::Mode::None;
    } else if (mode == "deterministic") {
        sw.mode = SwitchingConfig::Mode::Deterministic;
        sw.times = number_list(member(j, path, "times"), path + "/times");
    } else if (mode == "fixed-count" || mode == "fully-stochastic") {
        sw.mode = mode == "fixed-count" ? SwitchingConfig::Mode::FixedCount
                                        : SwitchingConfig::Mode::FullyStochastic;
        const json& laws = member(j, path, "sojourns");
        if (!laws.is_array() || laws.empty())
            throw ConfigError(path + "/sojourns", "expected a non-empty array");
        for (std::size_t i = 0; i < laws.size(); ++i)
            sw.sojourns.laws.push_back(
                parse_randomiser(laws[i], path + "/sojourns/" + std::to_string(i)));
        if (j.contains("orders"))
            for (double v : number_list(j.at("orders"), path + "/orders"))
                sw.sojourns.orders.push_back(static_cast<int>(v));
        sw.switches = static_cast<int>(number_or(j, path, "switches", 1));
        sw.max_switches = static_cast<int>(number_or(j, path, "max_switches", 4));
        sw.tail_tol = number_or(j, path, "tail", 0.06);
        if (sw.switches < 0) throw ConfigError(path + "/switches", "must be >= 0");
        if (sw.max_switches < 0) throw ConfigError(path + "/max_switches", "must be >= 0");
    } else if (mode == "markov") {
        sw.mode = SwitchingConfig::Mode::Markov;
        sw.initial = number_list(member(j, path, "p"), path + "/p");
        const json& q = member(j, path, "Q");
        if (!q.is_array()) throw ConfigError(path + "/Q", "expected a matrix");
        for (std::size_t i = 0; i < q.size(); ++i)
            sw.generator.push_back(number_list(q[i], path + "/Q/" + std::to_string(i)));
    } else {
        throw ConfigError(path + "/mode", "unknown switching mode '" + mode + "'");
    }
    return sw;
}

}  // namespace

AppConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("invalid JSON: ") + e.what());
    }

    AppConfig cfg;
    cfg.model.x0 = number_or(root, "", "x0", 0.0);

    const json& comps = member(root, "", "components");
    if (!comps.is_array() || comps.empty())
        throw ConfigError("/components", "expected a non-empty array");
    for (std::size_t i = 0; i < comps.size(); ++i)
        cfg.model.components.push_back(
            parse_component(comps[i], "/components/" + std::to_string(i)));

    cfg.model.switching = parse_switching(member(root, "", "switching"), "/switching");

    if (root.contains("market")) {
        const json& m = root.at("market");
        cfg.market.spot = number_or(m, "/market", "spot", 1.0);
        cfg.market.rate = number_or(m, "/market", "rate", 0.0);
        if (m.contains("strikes")) cfg.market.strikes = number_list(m.at("strikes"), "/market/strikes");
        if (m.contains("expiries"))
            cfg.market.expiries = number_list(m.at("expiries"), "/market/expiries");
        if (m.contains("kind")) {
            const std::string kind = string_field(m, "/market", "kind");
            if (kind == "call")
                cfg.market.kind = OptionKind::Call;
            else if (kind == "put")
                cfg.market.kind = OptionKind::Put;
            else
                throw ConfigError("/market/kind", "expected 'call' or 'put'");
        }
        if (!(cfg.market.spot > 0.0)) throw ConfigError("/market/spot", "must be > 0");
        double prev = 0.0;
        for (std::size_t i = 0; i < cfg.market.strikes.size(); ++i) {
            if (cfg.market.strikes[i] <= prev)
                throw ConfigError("/market/strikes/" + std::to_string(i),
                                  "strikes must be positive and ascending");
            prev = cfg.market.strikes[i];
        }
        for (std::size_t i = 0; i < cfg.market.expiries.size(); ++i)
            if (!(cfg.market.expiries[i] > 0.0))
                throw ConfigError("/market/expiries/" + std::to_string(i), "must be > 0");
    }

    if (root.contains("numerics")) {
        const json& n = root.at("numerics");
        cfg.numerics.cos_terms = static_cast<int>(number_or(n, "/numerics", "cos_terms", 256));
        cfg.numerics.cos_range = number_or(n, "/numerics", "cos_range", 10.0);
        cfg.numerics.seed = static_cast<std::uint64_t>(number_or(n, "/numerics", "seed", 42));
        cfg.numerics.paths =
            static_cast<std::size_t>(number_or(n, "/numerics", "paths", 10000));
        cfg.numerics.step = number_or(n, "/numerics", "step", 1e-3);
        cfg.numerics.horizon = number_or(n, "/numerics", "horizon", 1.0);
        if (cfg.numerics.cos_terms < 8) throw ConfigError("/numerics/cos_terms", "too few terms");
        if (!(cfg.numerics.step > 0.0)) throw ConfigError("/numerics/step", "must be > 0");
        if (!(cfg.numerics.horizon > 0.0)) throw ConfigError("/numerics/horizon", "must be > 0");
    }

    if (root.contains("sweep")) {
        const json& s = root.at("sweep");
        if (s.contains("xi")) cfg.xi_sweep = number_list(s.at("xi"), "/sweep/xi");
    }
    return cfg;
}

AppConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

namespace {

// Calm regime N(0.15, 0.1^2), excited N(0.3, 1), r = 0.05, no jumps,
// order-7 quadrature throughout; the two components alternate.
constexpr const char* kCalmExcitedComponents = R"([
    {
      "drift": {"kind": "merton-risk-neutral", "rate": 0.05},
      "vol": {"kind": "identity"},
      "randomiser": {"family": "normal", "mean": 0.15, "stddev": 0.1},
      "order": 7
    },
    {
      "drift": {"kind": "merton-risk-neutral", "rate": 0.05},
      "vol": {"kind": "identity"},
      "randomiser": {"family": "normal", "mean": 0.3, "stddev": 1.0},
      "order": 7
    }
  ])";

std::string fig1_json() {
    return std::string(R"({
  "x0": 0.0,
  "components": )") + kCalmExcitedComponents + R"(,
  "switching": {"mode": "deterministic", "times": [0.5, 1.0, 1.5]},
  "market": {"spot": 1.0, "rate": 0.05, "strikes": [0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4], "expiries": [2.0], "kind": "call"},
  "numerics": {"seed": 42, "paths": 10000, "step": 0.001, "horizon": 2.0}
}
)";
}

std::string fig2_json() {
    return std::string(R"({
  "x0": 0.0,
  "components": )") + kCalmExcitedComponents + R"(,
  "switching": {"mode": "deterministic", "times": [0.5, 1.0]},
  "market": {"spot": 1.0, "rate": 0.05, "strikes": [0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4], "expiries": [1.5], "kind": "call"},
  "numerics": {"seed": 42, "paths": 10000, "step": 0.001, "horizon": 1.5}
}
)";
}

std::string fig3_json() {
    return std::string(R"({
  "x0": 0.0,
  "components": )") + kCalmExcitedComponents + R"(,
  "switching": {
    "mode": "fixed-count",
    "sojourns": [{"family": "exponential", "rate": 2.0}],
    "orders": [7],
    "switches": 1
  },
  "market": {"spot": 1.0, "rate": 0.05, "strikes": [0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4], "expiries": [0.5, 0.75, 1.0], "kind": "call"},
  "numerics": {"seed": 42, "paths": 10000, "step": 0.001, "horizon": 1.0}
}
)";
}

std::string fig4_json() {
    return std::string(R"({
  "x0": 0.0,
  "components": )") + kCalmExcitedComponents + R"(,
  "switching": {
    "mode": "fully-stochastic",
    "sojourns": [{"family": "exponential", "rate": 2.0}],
    "orders": [7],
    "max_switches": 4,
    "tail": 0.06
  },
  "market": {"spot": 1.0, "rate": 0.05, "strikes": [0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4], "expiries": [1.0], "kind": "call"},
  "numerics": {"seed": 42, "paths": 10000, "step": 0.001, "horizon": 1.0},
  "sweep": {"xi": [0.0, 0.25, 0.5, 0.75, 1.0]}
}
)";
}

}  // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"fig1", "fig2", "fig3", "fig4"};
    return names;
}

std::string preset_text(const std::string& name) {
    if (name == "fig1") return fig1_json();
    if (name == "fig2") return fig2_json();
    if (name == "fig3") return fig3_json();
    if (name == "fig4") return fig4_json();
    throw ConfigError("", "unknown preset '" + name + "' (expected fig1..fig4)");
}

AppConfig load_preset(const std::string& name) { return parse_config(preset_text(name)); }

std::string format_sig(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

CosPricerConfig pricer_config(const Numerics& numerics) {
    CosPricerConfig cfg;
    cfg.initial_terms = numerics.cos_terms;
    cfg.half_widths = numerics.cos_range;
    return cfg;
}

}  // namespace rsjd
