#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "rsjd/markov.hpp"
#include "rsjd/processes.hpp"
#include "rsjd/switching.hpp"

namespace rsjd {

struct PathConfig {
    std::size_t paths = 100000;
    std::uint64_t seed = 1;
    /// Share one Brownian stream across paths (randomisers, sojourn times
    /// and jumps stay path-specific).
    bool common_noise = false;
    /// Draw randomisers and sojourns from their continuum laws instead of
    /// the quadrature representation. The toolkit's models are the
    /// quadrature mixtures (the local-volatility laws), so the default
    /// validates the CF identities exactly; the continuum mode measures
    /// the quadrature discretisation error instead.
    bool continuous_randomisers = false;
};

/// Terminal samples of the deterministic-switching composite process.
/// Exact in law: one randomiser draw per regime at t = 0+, then the
/// regime's conditional increment over its time shift.
std::vector<double> simulate_composite_terminal(const Schedule& sched, double t,
                                                const PathConfig& cfg);

/// Terminal samples with one randomiser draw per regime (no switching).
std::vector<double> simulate_single_regime_terminal(const Component& comp, double x0, double t,
                                                    const PathConfig& cfg);

/// Terminal samples with `switches` stochastic switches by t; the sojourn
/// vector is rejection-sampled on the conditioning event sum(zeta) < t.
std::vector<double> simulate_fixed_count_terminal(const std::vector<Component>& components,
                                                  const SojournSpec& sojourns, double x0,
                                                  double t, int switches, const PathConfig& cfg);

/// Terminal samples with a stochastic switch count, conditioned on at most
/// `max_switches` switches (matching the truncated, renormalised count
/// distribution of the analytic CF).
std::vector<double> simulate_fully_stochastic_terminal(const std::vector<Component>& components,
                                                       const SojournSpec& sojourns, double x0,
                                                       double t, int max_switches,
                                                       const PathConfig& cfg);

/// Terminal samples of the Markov-modulated model: exact chain simulation;
/// within a visit of length L in state j the increment follows the
/// exponent-averaged Levy law, i.e. a normal with mean L * sum_n w_n b(t_n)
/// and variance L * sum_n w_n sigma^2(t_n) plus the state's jump part.
std::vector<double> simulate_markov_terminal(const MarkovSpec& spec, double t,
                                             const PathConfig& cfg);

/// Gridded trajectories of the deterministic-switching composite process.
struct PathSet {
    std::vector<double> times;
    std::vector<std::vector<double>> values;   // values[path][time index]
    std::vector<std::vector<double>> thetas;   // randomiser draws per path, per regime
};

PathSet simulate_composite_paths(const Schedule& sched, double horizon, double step,
                                 const PathConfig& cfg);

std::vector<std::complex<double>> empirical_chf(std::span<const double> samples,
                                                std::span<const double> u_grid);

/// Half-width of the CLT confidence band used throughout: 4 / sqrt(n).
double chf_error_radius(std::size_t n);

struct Histogram {
    double lo = 0.0, hi = 0.0;
    std::vector<double> density;  // normalised bin heights

    double pdf(double x) const;
};

Histogram empirical_density(std::span<const double> samples, int bins = 200);

/// Kolmogorov-Smirnov statistic against a model cdf; `samples` need not be
/// sorted. The 1% critical value is 1.63 / sqrt(n).
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Concatenated-driver checks: the spliced Brownian motion has
/// Var[W(t)] = t and Cov[W(t), W(u)] = min(t, u) across switches, and the
/// spliced Poisson counts stay Poisson with independent increments.
struct DriverReport {
    std::size_t paths = 0;
    double var_time = 0.0;
    double bm_var = 0.0, bm_var_tol = 0.0;         // |bm_var - var_time| <= tol
    double cov_time = 0.0;
    double bm_cov = 0.0, bm_cov_tol = 0.0;         // |bm_cov - cov_time| <= tol
    double poisson_p = 1.0;                        // chi-square GOF across a switch
    double cross_corr = 0.0, cross_corr_tol = 0.0; // counts on either side of a switch

    bool bm_var_ok() const { return std::abs(bm_var - var_time) <= bm_var_tol; }
    bool bm_cov_ok() const { return std::abs(bm_cov - cov_time) <= bm_cov_tol; }
    bool poisson_ok() const { return poisson_p > 0.01; }
    bool independence_ok() const { return std::abs(cross_corr) <= cross_corr_tol; }
    bool passed() const { return bm_var_ok() && bm_cov_ok() && poisson_ok() && independence_ok(); }
};

DriverReport driver_checks(const Schedule& sched, double horizon, std::size_t paths,
                           std::uint64_t seed);

}  // namespace rsjd
