#pragma once

#include <string>
#include <vector>

#include "rsjd/markov.hpp"
#include "rsjd/pricing.hpp"
#include "rsjd/processes.hpp"
#include "rsjd/switching.hpp"

namespace rsjd {

/// Switching mechanism selector plus its parameters; unused fields are
/// ignored by the modes that do not need them.
struct SwitchingConfig {
    enum class Mode { None, Deterministic, FixedCount, FullyStochastic, Markov };
    Mode mode = Mode::None;
    std::vector<double> times;  // deterministic switch times
    SojournSpec sojourns;       // fixed-count / fully-stochastic
    int switches = 1;           // fixed-count
    int max_switches = 4;       // fully-stochastic cap
    double tail_tol = 0.06;
    std::vector<std::vector<double>> generator;  // markov
    std::vector<double> initial;
};

struct ModelConfig {
    std::vector<Component> components;  // cycled to the regime count a mode needs
    SwitchingConfig switching;
    double x0 = 0.0;
};

std::vector<Component> cycle_components(const std::vector<Component>& base, std::size_t n);

/// CF of X(t) under the configured model. The returned callable owns all
/// prepared state (schedules, sojourn trees, count pmf), so per-u calls
/// are cheap and the provider outlives the config.
ChfFn model_chf(const ModelConfig& config, double t);

/// The deterministic-switching schedule of a config (mode Deterministic,
/// or None for a single never-switching regime).
Schedule deterministic_schedule(const ModelConfig& config);

/// Two-regime calm/excited experiment family: randomised Black-Scholes
/// components b(theta) = r - theta^2/2, sigma(theta) = theta with normal
/// randomisers, calm N(0.15, 0.1^2) and excited N(0.3, 1).
struct TwoRegimeSetup {
    double rate = 0.05;
    double calm_mean = 0.15, calm_sd = 0.1;
    double excited_mean = 0.3, excited_sd = 1.0;
    int order = 7;
    JumpSpec jumps{};

    Component calm() const;
    Component excited() const;
    Component excited_with_sd(double xi) const;
};

struct SurfacePoint {
    std::string model;
    double strike = 0.0;
    double sweep = 0.0;  // expiry or xi_1, depending on the experiment
    double iv = 0.0;
    double price = 0.0;
};

/// Implied-vol surface against expiry: one calm->excited switch at T/2
/// (deterministic), an exponential sojourn with mean T/2 (stochastic), and
/// the excited model with no switch. Rows ordered (model, strike, sweep).
std::vector<SurfacePoint> expiry_surface(const TwoRegimeSetup& setup, const Market& market,
                                         const CosPricerConfig& pricer = {});

/// Implied-vol surface against the excited randomiser's standard
/// deviation at a fixed expiry: deterministic and stochastic one-switch
/// models plus the fully stochastic alternating model.
std::vector<SurfacePoint> dispersion_surface(const TwoRegimeSetup& setup, const Market& market,
                                             const std::vector<double>& xi_values,
                                             double expiry, int max_switches, double tail_tol,
                                             const CosPricerConfig& pricer = {});

}  // namespace rsjd
