#include <complex>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rsjd/config.hpp"
#include "rsjd/cos.hpp"
#include "rsjd/localvol.hpp"
#include "rsjd/math.hpp"
#include "rsjd/models.hpp"
#include "rsjd/montecarlo.hpp"
#include "rsjd/pricing.hpp"

namespace {

using namespace rsjd;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitValidation = 4;

struct ConfigSource {
    std::string file;
    std::string preset;

    AppConfig load() const {
        if (!file.empty()) return load_config_file(file);
        if (!preset.empty()) return load_preset(preset);
        throw ConfigError("", "pass --config FILE or --preset NAME");
    }
};

void add_source(CLI::App* cmd, ConfigSource& src) {
    cmd->add_option("--config", src.file, "model configuration file (JSON)");
    cmd->add_option("--preset", src.preset, "bundled preset (fig1..fig4)");
}

std::string mode_name(SwitchingConfig::Mode mode) {
    switch (mode) {
        case SwitchingConfig::Mode::None: return "no-switch";
        case SwitchingConfig::Mode::Deterministic: return "deterministic";
        case SwitchingConfig::Mode::FixedCount: return "stochastic";
        case SwitchingConfig::Mode::FullyStochastic: return "fully-stochastic";
        case SwitchingConfig::Mode::Markov: return "markov";
    }
    return "?";
}

int run_quad(const std::string& family, double mean, double stddev, double rate, double lo,
             double hi, double value, double truncate, bool has_truncate, int order) {
    RandomiserSpec spec;
    if (family == "normal")
        spec = RandomiserSpec::normal(mean, stddev);
    else if (family == "exponential")
        spec = RandomiserSpec::exponential(rate);
    else if (family == "uniform")
        spec = RandomiserSpec::uniform(lo, hi);
    else if (family == "point-mass")
        spec = RandomiserSpec::point_mass(value);
    else
        throw ConfigError("/family", "unknown family '" + family + "'");
    if (has_truncate) spec = spec.truncated(truncate);

    const auto rule = quadrature_rule(spec, order);
    std::cout << "node,weight\n";
    for (int i = 0; i < rule.order(); ++i)
        std::cout << format_sig(rule.nodes[i]) << "," << format_sig(rule.weights[i]) << "\n";
    std::cerr << "# " << spec.describe() << ", order " << rule.order() << " of " << rule.requested
              << " requested, max |node| = " << format_sig(rule.max_abs_node()) << "\n";
    return 0;
}

int run_chf(const ConfigSource& src, double t, double umax, int points) {
    const AppConfig cfg = src.load();
    const double horizon = t > 0.0 ? t : cfg.numerics.horizon;
    const ChfFn chf = model_chf(cfg.model, horizon);
    std::cout << "u,re,im\n";
    for (int i = 0; i < points; ++i) {
        const double u = -umax + 2.0 * umax * i / (points - 1);
        const auto phi = chf(u);
        std::cout << format_sig(u) << "," << format_sig(phi.real()) << ","
                  << format_sig(phi.imag()) << "\n";
    }
    return 0;
}

int run_density(const ConfigSource& src, double t, double xmin, double xmax, int points) {
    const AppConfig cfg = src.load();
    const double horizon = t > 0.0 ? t : cfg.numerics.horizon;
    const ChfFn chf = model_chf(cfg.model, horizon);
    const CosDensity density(chf, cos_range_from_chf(chf, cfg.numerics.cos_range),
                             cfg.numerics.density_terms);
    if (xmin >= xmax) {
        xmin = density.range().a;
        xmax = density.range().b;
    }
    std::cout << "x,f\n";
    for (int i = 0; i < points; ++i) {
        const double x = xmin + (xmax - xmin) * i / (points - 1);
        std::cout << format_sig(x) << "," << format_sig(density.pdf(x)) << "\n";
    }
    return 0;
}

int run_price(const ConfigSource& src) {
    const AppConfig cfg = src.load();
    if (cfg.market.strikes.empty() || cfg.market.expiries.empty())
        throw ConfigError("/market", "price needs strikes and expiries");
    std::cout << "K,T,price,iv\n";
    for (double T : cfg.market.expiries) {
        const ChfFn chf = model_chf(cfg.model, T);
        const auto prices = cos_prices(chf, cfg.market.kind, cfg.market.spot, cfg.market.rate, T,
                                       cfg.market.strikes, pricer_config(cfg.numerics));
        for (std::size_t s = 0; s < cfg.market.strikes.size(); ++s) {
            const double iv = implied_vol(prices[s], cfg.market.kind, cfg.market.spot,
                                          cfg.market.strikes[s], cfg.market.rate, T);
            std::cout << format_sig(cfg.market.strikes[s]) << "," << format_sig(T) << ","
                      << format_sig(prices[s]) << "," << format_sig(iv) << "\n";
        }
    }
    return 0;
}

void print_surface(const std::vector<SurfacePoint>& rows) {
    std::cout << "model,K,T_or_xi,iv,price\n";
    for (const auto& row : rows)
        std::cout << row.model << "," << format_sig(row.strike) << "," << format_sig(row.sweep)
                  << "," << format_sig(row.iv) << "," << format_sig(row.price) << "\n";
}

int run_surface(const ConfigSource& src, const std::string& figure) {
    if (figure == "fig3") {
        const AppConfig cfg = load_preset("fig3");
        print_surface(expiry_surface(TwoRegimeSetup{}, cfg.market, pricer_config(cfg.numerics)));
        return 0;
    }
    if (figure == "fig4") {
        const AppConfig cfg = load_preset("fig4");
        print_surface(dispersion_surface(TwoRegimeSetup{}, cfg.market, cfg.xi_sweep,
                                         cfg.market.expiries.at(0),
                                         cfg.model.switching.max_switches,
                                         cfg.model.switching.tail_tol,
                                         pricer_config(cfg.numerics)));
        return 0;
    }
    if (!figure.empty()) throw ConfigError("", "unknown figure '" + figure + "'");

    const AppConfig cfg = src.load();
    if (cfg.market.strikes.empty() || cfg.market.expiries.empty())
        throw ConfigError("/market", "iv-surface needs strikes and expiries");
    std::vector<SurfacePoint> rows;
    for (double T : cfg.market.expiries) {
        const ChfFn chf = model_chf(cfg.model, T);
        const auto prices = cos_prices(chf, cfg.market.kind, cfg.market.spot, cfg.market.rate, T,
                                       cfg.market.strikes, pricer_config(cfg.numerics));
        for (std::size_t s = 0; s < cfg.market.strikes.size(); ++s) {
            SurfacePoint pt;
            pt.model = mode_name(cfg.model.switching.mode);
            pt.strike = cfg.market.strikes[s];
            pt.sweep = T;
            pt.price = prices[s];
            pt.iv = implied_vol(prices[s], cfg.market.kind, cfg.market.spot, cfg.market.strikes[s],
                                cfg.market.rate, T);
            rows.push_back(pt);
        }
    }
    print_surface(rows);
    return 0;
}

int run_simulate(const ConfigSource& src, std::size_t paths_override, bool localvol,
                 bool common_noise) {
    const AppConfig cfg = src.load();
    const auto& num = cfg.numerics;
    const std::size_t paths = paths_override > 0 ? paths_override : num.paths;

    std::cout << "path_id,t,x\n";
    const auto mode = cfg.model.switching.mode;
    const bool deterministic_mode = mode == SwitchingConfig::Mode::None ||
                                    mode == SwitchingConfig::Mode::Deterministic;
    if (localvol || deterministic_mode) {
        if (localvol) {
            EulerConfig euler;
            euler.horizon = num.horizon;
            euler.step = num.step;
            euler.paths = paths;
            euler.seed = num.seed;
            for (double t = 0.0; t <= num.horizon + 1e-12; t += 10 * num.step)
                euler.record_times.push_back(std::min(t, num.horizon));
            EulerResult result;
            if (deterministic_mode) {
                result = euler_simulate(deterministic_schedule(cfg.model), euler);
            } else if (mode == SwitchingConfig::Mode::FixedCount) {
                result = euler_simulate_fixed_count(
                    cycle_components(cfg.model.components, cfg.model.switching.switches + 1),
                    cfg.model.switching.sojourns, cfg.model.x0, cfg.model.switching.switches,
                    euler);
            } else {
                throw ConfigError("/switching/mode",
                                  "--localvol supports deterministic and fixed-count switching");
            }
            for (std::size_t p = 0; p < paths; ++p)
                for (std::size_t k = 0; k < result.times.size(); ++k)
                    std::cout << p << "," << format_sig(result.times[k]) << ","
                              << format_sig(result.values[k][p]) << "\n";
        } else {
            const Schedule sched = deterministic_schedule(cfg.model);
            PathConfig pc{paths, num.seed, common_noise};
            const PathSet set = simulate_composite_paths(sched, num.horizon, num.step, pc);
            for (std::size_t p = 0; p < paths; ++p)
                for (std::size_t k = 0; k < set.times.size(); ++k)
                    std::cout << p << "," << format_sig(set.times[k]) << ","
                              << format_sig(set.values[p][k]) << "\n";
        }
        return 0;
    }

    // Stochastic-switching and Markov modes: terminal samples.
    PathConfig pc{paths, num.seed, common_noise};
    std::vector<double> terminal;
    if (mode == SwitchingConfig::Mode::FixedCount)
        terminal = simulate_fixed_count_terminal(
            cycle_components(cfg.model.components, cfg.model.switching.switches + 1),
            cfg.model.switching.sojourns, cfg.model.x0, num.horizon,
            cfg.model.switching.switches, pc);
    else if (mode == SwitchingConfig::Mode::FullyStochastic)
        terminal = simulate_fully_stochastic_terminal(
            cycle_components(cfg.model.components, cfg.model.switching.max_switches + 1),
            cfg.model.switching.sojourns, cfg.model.x0, num.horizon,
            cfg.model.switching.max_switches, pc);
    else
        terminal = simulate_markov_terminal(
            MarkovSpec(cycle_components(cfg.model.components, cfg.model.switching.initial.size()),
                       cfg.model.switching.generator, cfg.model.switching.initial),
            num.horizon, pc);
    for (std::size_t p = 0; p < terminal.size(); ++p)
        std::cout << p << "," << format_sig(num.horizon) << "," << format_sig(terminal[p])
                  << "\n";
    return 0;
}

int run_validate(const ConfigSource& src, std::size_t paths_override) {
    AppConfig cfg;
    if (!src.file.empty() || !src.preset.empty())
        cfg = src.load();
    else
        cfg = load_preset("fig1");
    const std::size_t n = paths_override > 0 ? paths_override : 100000;
    bool all_ok = true;
    auto report = [&all_ok](const std::string& name, double measured, double bound) {
        const bool ok = measured <= bound;
        all_ok = all_ok && ok;
        std::cout << (ok ? "PASS" : "FAIL") << " " << name << " measured=" << format_sig(measured)
                  << " bound=" << format_sig(bound) << "\n";
    };

    // COS pricing against the Black-Scholes closed form.
    {
        double worst = 0.0;
        for (double sigma : {0.1, 0.2, 0.4}) {
            const ChfFn chf = [sigma](double u) {
                const std::complex<double> psi =
                    -kI * u * (0.05 - 0.5 * sigma * sigma) + 0.5 * u * u * sigma * sigma;
                return std::exp(-psi);
            };
            const auto prices =
                cos_prices(chf, OptionKind::Call, 1.0, 0.05, 1.0, {0.8, 1.0, 1.4});
            int idx = 0;
            for (double strike : {0.8, 1.0, 1.4}) {
                const double bs = black_scholes_price(OptionKind::Call, 1.0, strike, 0.05, 1.0, sigma);
                worst = std::max(worst, std::abs(prices[idx++] - bs));
            }
        }
        report("cos-vs-black-scholes", worst, 1e-6);
    }

    // Analytic CF against the simulation oracle for the configured model.
    {
        const double t = cfg.numerics.horizon;
        const ChfFn chf = model_chf(cfg.model, t);
        PathConfig pc{n, cfg.numerics.seed, false};
        std::vector<double> terminal;
        const auto mode = cfg.model.switching.mode;
        if (mode == SwitchingConfig::Mode::Deterministic)
            terminal = simulate_composite_terminal(deterministic_schedule(cfg.model), t, pc);
        else if (mode == SwitchingConfig::Mode::None)
            terminal = simulate_single_regime_terminal(cfg.model.components.at(0), cfg.model.x0,
                                                       t, pc);
        else if (mode == SwitchingConfig::Mode::FixedCount)
            terminal = simulate_fixed_count_terminal(
                cycle_components(cfg.model.components, cfg.model.switching.switches + 1),
                cfg.model.switching.sojourns, cfg.model.x0, t, cfg.model.switching.switches, pc);
        else if (mode == SwitchingConfig::Mode::FullyStochastic)
            terminal = simulate_fully_stochastic_terminal(
                cycle_components(cfg.model.components, cfg.model.switching.max_switches + 1),
                cfg.model.switching.sojourns, cfg.model.x0, t,
                cfg.model.switching.max_switches, pc);
        else
            terminal = simulate_markov_terminal(
                MarkovSpec(
                    cycle_components(cfg.model.components, cfg.model.switching.initial.size()),
                    cfg.model.switching.generator, cfg.model.switching.initial),
                t, pc);

        const std::vector<double> u_grid{0.5, 1.0, 2.0};
        const auto emp = empirical_chf(terminal, u_grid);
        double worst = 0.0;
        for (std::size_t i = 0; i < u_grid.size(); ++i)
            worst = std::max(worst, std::abs(emp[i] - chf(u_grid[i])));
        report("model-chf-vs-monte-carlo", worst, chf_error_radius(n));
    }

    // CF sanity on a u grid.
    {
        const ChfFn chf = model_chf(cfg.model, cfg.numerics.horizon);
        double worst_mod = 0.0, worst_conj = 0.0;
        for (double u = 0.25; u <= 5.0; u += 0.25) {
            worst_mod = std::max(worst_mod, std::abs(chf(u)) - 1.0);
            worst_conj = std::max(worst_conj, std::abs(chf(-u) - std::conj(chf(u))));
        }
        report("chf-modulus-bound", worst_mod, 1e-10);
        report("chf-conjugate-symmetry", worst_conj, 1e-12);
    }

    // Concatenated-driver checks for switching schedules.
    if (cfg.model.switching.mode == SwitchingConfig::Mode::Deterministic &&
        !cfg.model.switching.times.empty() &&
        cfg.numerics.horizon > cfg.model.switching.times.back()) {
        const auto sched = deterministic_schedule(cfg.model);
        const auto drivers =
            driver_checks(sched, cfg.numerics.horizon, std::min<std::size_t>(n, 50000),
                          cfg.numerics.seed + 1);
        report("driver-brownian-variance", std::abs(drivers.bm_var - drivers.var_time),
               drivers.bm_var_tol);
        report("driver-brownian-covariance", std::abs(drivers.bm_cov - drivers.cov_time),
               drivers.bm_cov_tol);
        const bool poisson_ok = drivers.poisson_ok();
        all_ok = all_ok && poisson_ok;
        std::cout << (poisson_ok ? "PASS" : "FAIL") << " driver-poisson-chi-square p="
                  << format_sig(drivers.poisson_p) << " threshold=0.01\n";
        report("driver-cross-switch-correlation", std::abs(drivers.cross_corr),
               drivers.cross_corr_tol);
    }

    return all_ok ? 0 : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomised regime-switching jump-diffusion toolkit"};
    app.require_subcommand(1);

    // quad
    auto* quad = app.add_subcommand("quad", "print Gauss quadrature nodes/weights");
    std::string family = "normal";
    double mean = 0.0, stddev = 1.0, rate = 1.0, lo = 0.0, hi = 1.0, value = 0.0, trunc = 0.0;
    int order = 7;
    quad->add_option("--family", family, "normal|exponential|uniform|point-mass");
    quad->add_option("--mean", mean);
    quad->add_option("--stddev", stddev);
    quad->add_option("--rate", rate);
    quad->add_option("--lo", lo);
    quad->add_option("--hi", hi);
    quad->add_option("--value", value);
    auto* trunc_opt = quad->add_option("--truncate", trunc, "right truncation bound");
    quad->add_option("--order", order);

    // chf / density / price / iv-surface / simulate / validate / preset
    ConfigSource src;
    auto* chf_cmd = app.add_subcommand("chf", "emit the model CF on a u grid");
    add_source(chf_cmd, src);
    double t = 0.0, umax = 10.0;
    int points = 101;
    chf_cmd->add_option("--time", t, "evaluation time (default: numerics horizon)");
    chf_cmd->add_option("--umax", umax);
    chf_cmd->add_option("--points", points);

    auto* dens_cmd = app.add_subcommand("density", "emit the model density on an x grid");
    add_source(dens_cmd, src);
    double xmin = 0.0, xmax = 0.0;
    dens_cmd->add_option("--time", t);
    dens_cmd->add_option("--xmin", xmin);
    dens_cmd->add_option("--xmax", xmax);
    dens_cmd->add_option("--points", points);

    auto* price_cmd = app.add_subcommand("price", "COS option prices over the market grid");
    add_source(price_cmd, src);

    auto* surf_cmd = app.add_subcommand("iv-surface", "implied volatility surface CSV");
    add_source(surf_cmd, src);
    std::string figure;
    surf_cmd->add_option("--figure", figure, "fig3|fig4 experiment recipes");

    auto* sim_cmd = app.add_subcommand("simulate", "simulate trajectories / terminal samples");
    add_source(sim_cmd, src);
    std::size_t paths = 0;
    bool localvol = false, common_noise = false;
    sim_cmd->add_option("--paths", paths);
    sim_cmd->add_flag("--localvol", localvol, "simulate the mimicking local-vol SDE");
    sim_cmd->add_flag("--common-noise", common_noise, "share the Brownian stream across paths");

    auto* val_cmd = app.add_subcommand("validate", "run the MC-vs-analytic checks");
    add_source(val_cmd, src);
    val_cmd->add_option("--paths", paths);

    auto* preset_cmd = app.add_subcommand("preset", "print a bundled preset JSON");
    std::string preset_name;
    preset_cmd->add_option("name", preset_name, "fig1..fig4")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (quad->parsed())
            return run_quad(family, mean, stddev, rate, lo, hi, value, trunc,
                            trunc_opt->count() > 0, order);
        if (chf_cmd->parsed()) return run_chf(src, t, umax, points);
        if (dens_cmd->parsed()) return run_density(src, t, xmin, xmax, points);
        if (price_cmd->parsed()) return run_price(src);
        if (surf_cmd->parsed()) return run_surface(src, figure);
        if (sim_cmd->parsed()) return run_simulate(src, paths, localvol, common_noise);
        if (val_cmd->parsed()) return run_validate(src, paths);
        if (preset_cmd->parsed()) {
            std::cout << preset_text(preset_name);
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
