#pragma once

#include <cstdint>
#include <vector>

#include "rsjd/processes.hpp"
#include "rsjd/switching.hpp"

namespace rsjd {

struct LocalVolCoefficients {
    double drift = 0.0;      // mu_bar(t, x)
    double variance = 0.0;   // sigma_bar^2(t, x)
    std::size_t regime = 0;  // active regime whose beta/gamma entered the ratio
    bool tail_fallback = false;
};

/// Mimicking coefficients at a fixed time, reusable across x: the
/// density-weighted ratios over all randomiser node combinations of the
/// regimes reached by t. Ratios run in log space, subtracting the largest
/// log density; when every combination underflows, the dominant
/// combination's coefficients are returned (the tail limit).
class LocalVolSlice {
public:
    LocalVolSlice(const Schedule& sched, double t);

    LocalVolCoefficients at(double x) const;

    /// Sandwich bounds: min/max of gamma^2 over the active regime's nodes.
    double min_variance() const { return min_var_; }
    double max_variance() const { return max_var_; }
    double time() const { return t_; }

    /// Ratio pieces relative to exp(log_scale), for aggregation across
    /// leaf mixtures: den = sum of exp(log density - log_scale) and the
    /// beta / gamma^2 weighted counterparts.
    struct RawRatio {
        double log_scale;
        double den, num_mu, num_g2;
        double fallback_mu, fallback_g2;  // dominant combination (tail limit)
    };
    RawRatio raw_at(double x) const;

    std::size_t regime() const { return regime_; }

private:
    struct Combo {
        double log_w;
        NormalMixture law;
        double beta;
        double gamma2;
    };
    std::vector<Combo> combos_;
    double t_;
    std::size_t regime_ = 0;
    bool dirac_ = false;  // t == 0: every combination has the same (Dirac) density
    double min_var_ = 0.0, max_var_ = 0.0;
};

/// Coefficients of the fixed-count stochastic-switching local-vol model:
/// the ratio runs over the enlarged (sojourn-tree leaf x randomiser node)
/// mixture, each leaf contributing a deterministic-switching slice at its
/// realised switching times. Supported for switches <= 2; the combination
/// count grows multiplicatively beyond that.
class StochasticLocalVolSlice {
public:
    StochasticLocalVolSlice(const std::vector<Component>& components, const SojournTree& tree,
                            double x0, double t);

    LocalVolCoefficients at(double x) const;
    double min_variance() const { return min_var_; }
    double max_variance() const { return max_var_; }

private:
    std::vector<double> leaf_log_w_;
    std::vector<LocalVolSlice> leaves_;
    double min_var_ = 0.0, max_var_ = 0.0;
};

LocalVolCoefficients localvol_coefficients(const Schedule& sched, double t, double x);

struct EulerConfig {
    double horizon = 1.0;
    double step = 1e-3;
    std::size_t paths = 1000;
    std::uint64_t seed = 1;
    /// Observation times to record (grid-aligned); empty records only the
    /// terminal time.
    std::vector<double> record_times;
    /// Evaluate coefficients through a per-step x-table with linear
    /// interpolation instead of per-path ratio sums.
    bool tabulated = true;
    int table_points = 512;
};

struct EulerResult {
    std::vector<double> times;
    std::vector<std::vector<double>> values;  // values[time index][path]
    bool sandwich_ok = true;
    double min_variance_seen = 0.0;
    double max_variance_seen = 0.0;

    const std::vector<double>& at_time(double t) const;
};

/// Euler-Maruyama for the local-volatility jump diffusion of the schedule.
/// The time grid is the step lattice with every switch and observation
/// time spliced in exactly. Paths use counter-based streams keyed by
/// (seed, path), so results do not depend on the thread count.
EulerResult euler_simulate(const Schedule& sched, const EulerConfig& config);

/// Euler-Maruyama for the stochastic-switching local-vol model; the
/// sojourn tree is built once at the simulation horizon and every leaf's
/// switching times are spliced into the step grid.
EulerResult euler_simulate_fixed_count(const std::vector<Component>& components,
                                       const SojournSpec& sojourns, double x0, int switches,
                                       const EulerConfig& config);

}  // namespace rsjd
