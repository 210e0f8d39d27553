#pragma once

#include <complex>
#include <vector>

#include "rsjd/processes.hpp"
#include "rsjd/quadrature.hpp"

namespace rsjd {

/// Sojourn-time laws zeta_1..zeta_M (positive support) and the tree orders
/// L_1..L_M. Shorter lists are cycled, so an i.i.d. model needs one entry.
struct SojournSpec {
    std::vector<RandomiserSpec> laws;
    std::vector<int> orders;

    const RandomiserSpec& law(std::size_t j) const { return laws[j % laws.size()]; }
    int order(std::size_t j) const { return orders.empty() ? 7 : orders[j % orders.size()]; }
    bool valid() const { return !laws.empty(); }
};

/// Quadrature tree over sojourn times built by successive right
/// truncation: level j conditions zeta_j on the time left before the
/// horizon given the prefix of earlier nodes. Leaves carry realised
/// switching times (partial sums) and the product weight V.
struct SojournTree {
    struct Leaf {
        std::vector<double> switch_times;
        double weight;
    };
    std::vector<Leaf> leaves;
    int depth = 0;
    double horizon = 0.0;
    double pruned_weight = 0.0;  // mass dropped (zero-probability branches / tiny weights)
    int pruned_branches = 0;

    double total_weight() const;
};

inline constexpr std::size_t kMaxTreeLeaves = 100000;

SojournTree build_sojourn_tree(const SojournSpec& sojourns, double horizon, int switches,
                               int max_order = kDefaultMaxOrder,
                               std::size_t max_leaves = kMaxTreeLeaves,
                               double prune_tol = 1e-14);

/// Characteristic function of the composite process with exactly
/// `switches` stochastic switches by the fixed horizon t (leaf-weighted
/// deterministic-switching CFs). Builds the sojourn tree once; evaluation
/// over a u-grid reuses it.
class FixedCountChf {
public:
    FixedCountChf(std::vector<Component> components, const SojournSpec& sojourns, double x0,
                  double t, int switches);

    std::complex<double> operator()(double u) const;
    const SojournTree& tree() const { return tree_; }
    double horizon() const { return t_; }

private:
    std::vector<Component> components_;
    double x0_;
    double t_;
    SojournTree tree_;
    std::vector<std::vector<double>> leaf_shifts_;  // per leaf: s_0..s_M at t
    double weight_norm_;
};

std::complex<double> chf_fixed_switches(const std::vector<Component>& components,
                                        const SojournSpec& sojourns, double x0, double t,
                                        double u, int switches);

/// Distribution of the number of switches by `horizon`, truncated at
/// m = max considered; pmf(m) = P[S_m <= t] - P[S_{m+1} <= t].
struct SwitchCountDistribution {
    double horizon = 0.0;
    std::vector<double> pmf;      // m = 0..M_max, not renormalised
    double truncated_mass = 0.0;  // q = P[M(t) > M_max]
    double tail_target = 0.0;
    bool tail_target_met = true;

    std::vector<double> renormalised() const;  // pmf / (1 - q)
};

/// Exact Erlang/Poisson identity for i.i.d. exponential sojourns,
/// deterministic count for point masses, trapezoidal cdf convolution on a
/// 2^12 grid otherwise (approximate).
SwitchCountDistribution switch_count_pmf(const SojournSpec& sojourns, double horizon,
                                         int max_switches, double tail_tol);

/// CF with a stochastic number of switches: pmf-weighted mixture of
/// fixed-count CFs with the truncated, renormalised count distribution.
class FullyStochasticChf {
public:
    FullyStochasticChf(std::vector<Component> components, const SojournSpec& sojourns,
                       double x0, double t, int max_switches, double tail_tol = 0.06);

    std::complex<double> operator()(double u) const;
    const SwitchCountDistribution& count_distribution() const { return counts_; }

private:
    SwitchCountDistribution counts_;
    std::vector<double> weights_;  // renormalised pmf
    std::vector<FixedCountChf> fixed_;
};

std::complex<double> chf_fully_stochastic(const std::vector<Component>& components,
                                          const SojournSpec& sojourns, double x0, double t,
                                          double u, int max_switches, double tail_tol = 0.06);

}  // namespace rsjd
