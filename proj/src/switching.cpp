#include "rsjd/switching.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rsjd/math.hpp"

namespace rsjd {

double SojournTree::total_weight() const {
    double acc = 0.0;
    for (const auto& leaf : leaves) acc += leaf.weight;
    return acc;
}

namespace {

struct TreeBuilder {
    const SojournSpec& sojourns;
    double horizon;
    int switches;
    int max_order;
    std::size_t max_leaves;
    double prune_tol;
    SojournTree tree;

    void grow(int level, double prefix_weight, double prefix_sum, std::vector<double>& times) {
        if (level == switches) {
            tree.leaves.push_back({times, prefix_weight});
            return;
        }
        const double bound = horizon - prefix_sum;
        const auto& law = sojourns.law(level);
        if (bound <= 0.0 || (law.is_degenerate() && law.degenerate_value() >= bound)) {
            tree.pruned_weight += prefix_weight;
            ++tree.pruned_branches;
            return;
        }
        const auto rule = quadrature_rule(law.truncated(bound), sojourns.order(level), max_order);
        for (int i = 0; i < rule.order(); ++i) {
            const double w = prefix_weight * rule.weights[i];
            if (w < prune_tol) {
                tree.pruned_weight += w;
                ++tree.pruned_branches;
                continue;
            }
            times.push_back(prefix_sum + rule.nodes[i]);
            grow(level + 1, w, prefix_sum + rule.nodes[i], times);
            times.pop_back();
        }
    }
};

}  // namespace

SojournTree build_sojourn_tree(const SojournSpec& sojourns, double horizon, int switches,
                               int max_order, std::size_t max_leaves, double prune_tol) {
    if (!(horizon > 0.0)) throw std::invalid_argument("build_sojourn_tree: horizon must be > 0");
    if (switches < 0) throw std::invalid_argument("build_sojourn_tree: negative switch count");
    if (switches > 0 && !sojourns.valid())
        throw std::invalid_argument("build_sojourn_tree: no sojourn laws given");

    std::size_t bound = 1;
    for (int j = 0; j < switches; ++j) {
        bound *= static_cast<std::size_t>(sojourns.order(j));
        if (bound > max_leaves)
            throw std::invalid_argument("build_sojourn_tree: leaf count would exceed the cap");
    }
    for (int j = 0; j < switches; ++j) {
        if (sojourns.order(j) > max_order)
            throw std::invalid_argument("build_sojourn_tree: tree order beyond max_order");
        if (sojourns.law(j).lower() < 0.0)
            throw std::invalid_argument("build_sojourn_tree: sojourn laws need positive support");
    }

    TreeBuilder builder{sojourns, horizon, switches, max_order, max_leaves, prune_tol, {}};
    builder.tree.depth = switches;
    builder.tree.horizon = horizon;
    std::vector<double> times;
    builder.grow(0, 1.0, 0.0, times);
    return builder.tree;
}

FixedCountChf::FixedCountChf(std::vector<Component> components, const SojournSpec& sojourns,
                             double x0, double t, int switches)
    : components_(std::move(components)),
      x0_(x0),
      t_(t),
      tree_(build_sojourn_tree(sojourns, t, switches)) {
    if (static_cast<int>(components_.size()) != switches + 1)
        throw std::invalid_argument("FixedCountChf: need one component per regime");
    weight_norm_ = tree_.total_weight();
    if (weight_norm_ <= 0.0)
        throw std::domain_error("FixedCountChf: conditioning event has zero quadrature mass");

    leaf_shifts_.reserve(tree_.leaves.size());
    for (const auto& leaf : tree_.leaves) {
        std::vector<double> shifts(switches + 1);
        for (int j = 0; j <= switches; ++j) {
            const double start = j == 0 ? 0.0 : leaf.switch_times[j - 1];
            const double stop = j == switches ? t : leaf.switch_times[j];
            shifts[j] = stop - start;
        }
        leaf_shifts_.push_back(std::move(shifts));
    }
}

std::complex<double> FixedCountChf::operator()(double u) const {
    // psi(u; theta_n) per regime, shared across leaves.
    std::vector<std::vector<std::complex<double>>> psi(components_.size());
    for (std::size_t j = 0; j < components_.size(); ++j) {
        const auto& rule = components_[j].rule();
        psi[j].resize(rule.order());
        for (int n = 0; n < rule.order(); ++n)
            psi[j][n] = levy_exponent(components_[j], rule.nodes[n], u);
    }

    std::complex<double> acc = 0.0;
    for (std::size_t l = 0; l < tree_.leaves.size(); ++l) {
        std::complex<double> term = tree_.leaves[l].weight;
        for (std::size_t j = 0; j < components_.size(); ++j) {
            const double s = leaf_shifts_[l][j];
            if (s <= 0.0) continue;
            const auto& rule = components_[j].rule();
            std::complex<double> inner = 0.0;
            for (int n = 0; n < rule.order(); ++n)
                inner += rule.weights[n] * std::exp(-s * psi[j][n]);
            term *= inner;
        }
        acc += term;
    }
    return std::exp(kI * u * x0_) * acc / weight_norm_;
}

std::complex<double> chf_fixed_switches(const std::vector<Component>& components,
                                        const SojournSpec& sojourns, double x0, double t,
                                        double u, int switches) {
    return FixedCountChf(components, sojourns, x0, t, switches)(u);
}

std::vector<double> SwitchCountDistribution::renormalised() const {
    std::vector<double> out = pmf;
    const double norm = 1.0 - truncated_mass;
    if (norm <= 0.0) throw std::domain_error("switch count distribution: no mass below the cap");
    for (auto& p : out) p /= norm;
    return out;
}

namespace {

bool all_iid_exponential(const SojournSpec& s, int m, double& rate) {
    rate = 0.0;
    for (int j = 0; j <= m; ++j) {
        const auto& law = s.law(j);
        if (law.family != RandomiserSpec::Family::Exponential || law.right_bound) return false;
        if (j == 0)
            rate = law.a;
        else if (law.a != rate)
            return false;
    }
    return true;
}

bool all_point_mass(const SojournSpec& s, int m) {
    for (int j = 0; j <= m; ++j)
        if (!s.law(j).is_degenerate()) return false;
    return true;
}

}  // namespace

SwitchCountDistribution switch_count_pmf(const SojournSpec& sojourns, double horizon,
                                         int max_switches, double tail_tol) {
    if (!(horizon > 0.0)) throw std::invalid_argument("switch_count_pmf: horizon must be > 0");
    if (max_switches < 0) throw std::invalid_argument("switch_count_pmf: negative cap");

    SwitchCountDistribution dist;
    dist.horizon = horizon;
    dist.tail_target = tail_tol;
    dist.pmf.assign(max_switches + 1, 0.0);

    double rate = 0.0;
    if (max_switches == 0 || all_iid_exponential(sojourns, max_switches, rate)) {
        if (max_switches == 0) {
            // P[M(t) = 0] = P[zeta_1 > t].
            dist.pmf[0] = 1.0 - cdf(sojourns.valid() ? sojourns.law(0)
                                                     : RandomiserSpec::point_mass(horizon + 1.0),
                                    horizon);
            dist.truncated_mass = 1.0 - dist.pmf[0];
        } else {
            // Erlang partial sums <=> Poisson counts.
            const double mean = rate * horizon;
            double log_pk = -mean;
            double cum = 0.0;
            for (int m = 0; m <= max_switches; ++m) {
                dist.pmf[m] = std::exp(log_pk);
                cum += dist.pmf[m];
                log_pk += std::log(mean) - std::log(m + 1.0);
            }
            dist.truncated_mass = std::max(0.0, 1.0 - cum);
        }
    } else if (all_point_mass(sojourns, max_switches)) {
        double s = 0.0;
        int count = 0;
        for (int m = 1; m <= max_switches + 1; ++m) {
            s += sojourns.law(m - 1).degenerate_value();
            if (s <= horizon)
                count = m;
            else
                break;
        }
        if (count > max_switches) {
            dist.truncated_mass = 1.0;
        } else {
            dist.pmf[count] = 1.0;
        }
    } else {
        // cdf of partial sums on a uniform grid, one convolution per level.
        constexpr int kGrid = 1 << 12;
        const double dx = horizon / kGrid;
        std::vector<double> F(kGrid + 1, 1.0);  // P[S_0 <= x] = 1 on x >= 0
        std::vector<double> prev_at_t(max_switches + 2);
        prev_at_t[0] = 1.0;
        for (int m = 1; m <= max_switches + 1; ++m) {
            const auto& law = sojourns.law(m - 1);
            std::vector<double> G(kGrid + 1, 0.0);
            if (law.is_degenerate()) {
                const double z0 = law.degenerate_value();
                for (int i = 0; i <= kGrid; ++i) {
                    const double x = i * dx - z0;
                    if (x < 0.0) continue;
                    const double pos = x / dx;
                    const int lo = std::min(static_cast<int>(pos), kGrid);
                    const double frac = pos - lo;
                    G[i] = lo >= kGrid ? F[kGrid] : (1.0 - frac) * F[lo] + frac * F[lo + 1];
                }
            } else {
                for (int i = 1; i <= kGrid; ++i) {
                    // trapezoid over z in [0, x_i] of f_zeta(z) F(x_i - z)
                    double acc = 0.5 * (pdf(law, 0.0) * F[i] + pdf(law, i * dx) * F[0]);
                    for (int k = 1; k < i; ++k) acc += pdf(law, k * dx) * F[i - k];
                    G[i] = std::min(acc * dx, 1.0);
                }
            }
            F = std::move(G);
            prev_at_t[m] = F[kGrid];
        }
        for (int m = 0; m <= max_switches; ++m) dist.pmf[m] = prev_at_t[m] - prev_at_t[m + 1];
        dist.truncated_mass = prev_at_t[max_switches + 1];
    }

    dist.tail_target_met = dist.truncated_mass <= tail_tol;
    return dist;
}

FullyStochasticChf::FullyStochasticChf(std::vector<Component> components,
                                       const SojournSpec& sojourns, double x0, double t,
                                       int max_switches, double tail_tol)
    : counts_(switch_count_pmf(sojourns, t, max_switches, tail_tol)) {
    if (static_cast<int>(components.size()) < max_switches + 1)
        throw std::invalid_argument(
            "FullyStochasticChf: need components for every switch count up to the cap");
    const auto renorm = counts_.renormalised();
    for (int m = 0; m <= max_switches; ++m) {
        if (renorm[m] <= 0.0) continue;  // impossible counts get no model
        std::vector<Component> regime(components.begin(), components.begin() + m + 1);
        fixed_.emplace_back(std::move(regime), sojourns, x0, t, m);
        weights_.push_back(renorm[m]);
    }
}

std::complex<double> FullyStochasticChf::operator()(double u) const {
    std::complex<double> acc = 0.0;
    for (std::size_t m = 0; m < fixed_.size(); ++m) acc += weights_[m] * fixed_[m](u);
    return acc;
}

std::complex<double> chf_fully_stochastic(const std::vector<Component>& components,
                                          const SojournSpec& sojourns, double x0, double t,
                                          double u, int max_switches, double tail_tol) {
    return FullyStochasticChf(components, sojourns, x0, t, max_switches, tail_tol)(u);
}

}  // namespace rsjd
