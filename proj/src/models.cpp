#include "rsjd/models.hpp"

#include <algorithm>
#include <memory>
#include <stdexcept>

#include "rsjd/math.hpp"
#include "rsjd/parallel.hpp"

namespace rsjd {

std::vector<Component> cycle_components(const std::vector<Component>& base, std::size_t n) {
    if (base.empty()) throw std::invalid_argument("cycle_components: no components");
    std::vector<Component> out;
    out.reserve(n);
    for (std::size_t j = 0; j < n; ++j) out.push_back(base[j % base.size()]);
    return out;
}

Schedule deterministic_schedule(const ModelConfig& config) {
    switch (config.switching.mode) {
        case SwitchingConfig::Mode::None:
            return Schedule(cycle_components(config.components, 1), {}, config.x0);
        case SwitchingConfig::Mode::Deterministic:
            return Schedule(cycle_components(config.components, config.switching.times.size() + 1),
                            config.switching.times, config.x0);
        default:
            throw std::invalid_argument(
                "deterministic_schedule: model does not switch deterministically");
    }
}

ChfFn model_chf(const ModelConfig& config, double t) {
    const double x0 = config.x0;
    switch (config.switching.mode) {
        case SwitchingConfig::Mode::None: {
            auto comp = std::make_shared<Component>(cycle_components(config.components, 1)[0]);
            return [comp, x0, t](double u) {
                return std::exp(kI * u * x0) * randomised_chf(*comp, t, u);
            };
        }
        case SwitchingConfig::Mode::Deterministic: {
            auto sched = std::make_shared<Schedule>(deterministic_schedule(config));
            return [sched, t](double u) { return composite_chf(*sched, t, u); };
        }
        case SwitchingConfig::Mode::FixedCount: {
            auto fixed = std::make_shared<FixedCountChf>(
                cycle_components(config.components, config.switching.switches + 1),
                config.switching.sojourns, x0, t, config.switching.switches);
            return [fixed](double u) { return (*fixed)(u); };
        }
        case SwitchingConfig::Mode::FullyStochastic: {
            auto full = std::make_shared<FullyStochasticChf>(
                cycle_components(config.components, config.switching.max_switches + 1),
                config.switching.sojourns, x0, t, config.switching.max_switches,
                config.switching.tail_tol);
            return [full](double u) { return (*full)(u); };
        }
        case SwitchingConfig::Mode::Markov: {
            auto spec = std::make_shared<MarkovSpec>(
                cycle_components(config.components, config.switching.initial.size()),
                config.switching.generator, config.switching.initial);
            return [spec, x0, t](double u) {
                return std::exp(kI * u * x0) * chf_markov(*spec, t, u);
            };
        }
    }
    throw std::invalid_argument("model_chf: unknown switching mode");
}

Component TwoRegimeSetup::calm() const {
    return Component(DriftRule::merton_risk_neutral(rate), VolRule::identity(), jumps,
                     RandomiserSpec::normal(calm_mean, calm_sd), order);
}

Component TwoRegimeSetup::excited() const { return excited_with_sd(excited_sd); }

Component TwoRegimeSetup::excited_with_sd(double xi) const {
    return Component(DriftRule::merton_risk_neutral(rate), VolRule::identity(), jumps,
                     RandomiserSpec::normal(excited_mean, xi), order);
}

namespace {

void sort_rows(std::vector<SurfacePoint>& rows) {
    std::sort(rows.begin(), rows.end(), [](const SurfacePoint& a, const SurfacePoint& b) {
        if (a.model != b.model) return a.model < b.model;
        if (a.strike != b.strike) return a.strike < b.strike;
        return a.sweep < b.sweep;
    });
}

void append_rows(std::vector<SurfacePoint>& rows, const std::string& model, const Market& market,
                 double sweep, double expiry, const std::vector<double>& prices) {
    for (std::size_t s = 0; s < market.strikes.size(); ++s) {
        SurfacePoint pt;
        pt.model = model;
        pt.strike = market.strikes[s];
        pt.sweep = sweep;
        pt.price = prices[s];
        pt.iv = implied_vol(prices[s], market.kind, market.spot, market.strikes[s], market.rate,
                            expiry);
        rows.push_back(pt);
    }
}

}  // namespace

std::vector<SurfacePoint> expiry_surface(const TwoRegimeSetup& setup, const Market& market,
                                         const CosPricerConfig& pricer) {
    const Component calm = setup.calm();
    const Component excited = setup.excited();

    struct Cell {
        std::string model;
        double expiry;
        std::vector<double> prices;
    };
    std::vector<Cell> cells;
    for (double T : market.expiries)
        for (const char* name : {"deterministic", "stochastic", "no-switch"})
            cells.push_back({name, T, {}});

    parallel_for(cells.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            auto& cell = cells[i];
            const double T = cell.expiry;
            ChfFn chf;
            if (cell.model == "deterministic") {
                auto sched = std::make_shared<Schedule>(std::vector<Component>{calm, excited},
                                                        std::vector<double>{0.5 * T});
                chf = [sched, T](double u) { return composite_chf(*sched, T, u); };
            } else if (cell.model == "stochastic") {
                SojournSpec sojourns{{RandomiserSpec::exponential(2.0 / T)}, {setup.order}};
                auto fixed = std::make_shared<FixedCountChf>(
                    std::vector<Component>{calm, excited}, sojourns, 0.0, T, 1);
                chf = [fixed](double u) { return (*fixed)(u); };
            } else {
                chf = [&excited, T](double u) { return randomised_chf(excited, T, u); };
            }
            cell.prices = cos_prices(chf, market.kind, market.spot, market.rate, T,
                                     market.strikes, pricer);
        }
    });

    std::vector<SurfacePoint> rows;
    for (const auto& cell : cells)
        append_rows(rows, cell.model, market, cell.expiry, cell.expiry, cell.prices);
    sort_rows(rows);
    return rows;
}

std::vector<SurfacePoint> dispersion_surface(const TwoRegimeSetup& setup, const Market& market,
                                             const std::vector<double>& xi_values, double expiry,
                                             int max_switches, double tail_tol,
                                             const CosPricerConfig& pricer) {
    const Component calm = setup.calm();

    struct Cell {
        std::string model;
        double xi;
        std::vector<double> prices;
    };
    std::vector<Cell> cells;
    for (double xi : xi_values)
        for (const char* name : {"deterministic", "stochastic", "fully-stochastic"})
            cells.push_back({name, xi, {}});

    parallel_for(cells.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            auto& cell = cells[i];
            const Component excited = setup.excited_with_sd(cell.xi);
            const double T = expiry;
            const SojournSpec sojourns{{RandomiserSpec::exponential(2.0 / T)}, {setup.order}};
            ChfFn chf;
            if (cell.model == "deterministic") {
                auto sched = std::make_shared<Schedule>(std::vector<Component>{calm, excited},
                                                        std::vector<double>{0.5 * T});
                chf = [sched, T](double u) { return composite_chf(*sched, T, u); };
            } else if (cell.model == "stochastic") {
                auto fixed = std::make_shared<FixedCountChf>(
                    std::vector<Component>{calm, excited}, sojourns, 0.0, T, 1);
                chf = [fixed](double u) { return (*fixed)(u); };
            } else {
                std::vector<Component> alternating;
                for (int m = 0; m <= max_switches; ++m)
                    alternating.push_back(m % 2 == 0 ? calm : excited);
                auto full = std::make_shared<FullyStochasticChf>(alternating, sojourns, 0.0, T,
                                                                 max_switches, tail_tol);
                chf = [full](double u) { return (*full)(u); };
            }
            cell.prices = cos_prices(chf, market.kind, market.spot, market.rate, T,
                                     market.strikes, pricer);
        }
    });

    std::vector<SurfacePoint> rows;
    for (const auto& cell : cells)
        append_rows(rows, cell.model, market, cell.xi, expiry, cell.prices);
    sort_rows(rows);
    return rows;
}

}  // namespace rsjd
