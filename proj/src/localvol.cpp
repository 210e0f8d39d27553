#include "rsjd/localvol.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "rsjd/math.hpp"
#include "rsjd/parallel.hpp"
#include "rsjd/rng.hpp"

namespace rsjd {

namespace {
constexpr double kLogUnderflow = -690.0;  // ~log(1e-300)
constexpr double kTimeTol = 1e-12;
}  // namespace

LocalVolSlice::LocalVolSlice(const Schedule& sched, double t) : t_(t) {
    if (t < 0.0) throw std::domain_error("LocalVolSlice: negative time");
    regime_ = sched.active_regime(t);
    dirac_ = t <= kTimeTol;

    const auto& active_rule = sched.component(regime_).rule();
    min_var_ = std::numeric_limits<double>::infinity();
    max_var_ = 0.0;
    for (double node : active_rule.nodes) {
        const double g2 = sqr(sched.component(regime_).vol(node));
        min_var_ = std::min(min_var_, g2);
        max_var_ = std::max(max_var_, g2);
    }

    // Odometer over the node combinations of regimes 0..active.
    std::vector<int> idx(regime_ + 1, 0);
    std::vector<double> thetas(regime_ + 1);
    for (;;) {
        double log_w = 0.0;
        for (std::size_t j = 0; j <= regime_; ++j) {
            const auto& rule = sched.component(j).rule();
            thetas[j] = rule.nodes[idx[j]];
            log_w += std::log(rule.weights[idx[j]]);
        }
        Combo combo;
        combo.log_w = log_w;
        if (!dirac_) combo.law = conditional_composite_law(sched, thetas, t);
        combo.beta = sched.component(regime_).drift(thetas[regime_]);
        combo.gamma2 = sqr(sched.component(regime_).vol(thetas[regime_]));
        combos_.push_back(std::move(combo));

        std::size_t j = 0;
        for (; j <= regime_; ++j) {
            if (++idx[j] < sched.component(j).rule().order()) break;
            idx[j] = 0;
        }
        if (j > regime_) break;
    }
}

LocalVolSlice::RawRatio LocalVolSlice::raw_at(double x) const {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_idx = 0;
    std::vector<double> logs(combos_.size());
    for (std::size_t i = 0; i < combos_.size(); ++i) {
        logs[i] = combos_[i].log_w + (dirac_ ? 0.0 : combos_[i].law.logpdf(x));
        if (logs[i] > best) {
            best = logs[i];
            best_idx = i;
        }
    }
    RawRatio raw;
    raw.log_scale = best;
    raw.den = raw.num_mu = raw.num_g2 = 0.0;
    raw.fallback_mu = combos_[best_idx].beta;
    raw.fallback_g2 = combos_[best_idx].gamma2;
    if (!std::isfinite(best)) return raw;
    for (std::size_t i = 0; i < combos_.size(); ++i) {
        const double r = std::exp(logs[i] - best);
        raw.den += r;
        raw.num_mu += r * combos_[i].beta;
        raw.num_g2 += r * combos_[i].gamma2;
    }
    return raw;
}

LocalVolCoefficients LocalVolSlice::at(double x) const {
    LocalVolCoefficients out;
    out.regime = regime_;
    const RawRatio raw = raw_at(x);
    if (raw.log_scale < kLogUnderflow) {
        out.tail_fallback = true;
        out.drift = raw.fallback_mu;
        out.variance = raw.fallback_g2;
        return out;
    }
    out.drift = raw.num_mu / raw.den;
    out.variance = raw.num_g2 / raw.den;
    return out;
}

StochasticLocalVolSlice::StochasticLocalVolSlice(const std::vector<Component>& components,
                                                 const SojournTree& tree, double x0, double t) {
    if (tree.leaves.empty())
        throw std::domain_error("StochasticLocalVolSlice: empty sojourn tree");
    const double total = tree.total_weight();
    min_var_ = std::numeric_limits<double>::infinity();
    max_var_ = 0.0;
    for (const auto& leaf : tree.leaves) {
        leaf_log_w_.push_back(std::log(leaf.weight / total));
        leaves_.emplace_back(Schedule(components, leaf.switch_times, x0), t);
        min_var_ = std::min(min_var_, leaves_.back().min_variance());
        max_var_ = std::max(max_var_, leaves_.back().max_variance());
    }
}

LocalVolCoefficients StochasticLocalVolSlice::at(double x) const {
    std::vector<LocalVolSlice::RawRatio> raws(leaves_.size());
    double global = -std::numeric_limits<double>::infinity();
    std::size_t best_leaf = 0;
    for (std::size_t l = 0; l < leaves_.size(); ++l) {
        raws[l] = leaves_[l].raw_at(x);
        const double scale = leaf_log_w_[l] + raws[l].log_scale;
        if (scale > global) {
            global = scale;
            best_leaf = l;
        }
    }
    LocalVolCoefficients out;
    out.regime = leaves_[best_leaf].regime();
    if (global < kLogUnderflow) {
        out.tail_fallback = true;
        out.drift = raws[best_leaf].fallback_mu;
        out.variance = raws[best_leaf].fallback_g2;
        return out;
    }
    double den = 0.0, num_mu = 0.0, num_g2 = 0.0;
    for (std::size_t l = 0; l < leaves_.size(); ++l) {
        const double f = std::exp(leaf_log_w_[l] + raws[l].log_scale - global);
        if (f == 0.0) continue;
        den += f * raws[l].den;
        num_mu += f * raws[l].num_mu;
        num_g2 += f * raws[l].num_g2;
    }
    out.drift = num_mu / den;
    out.variance = num_g2 / den;
    return out;
}

LocalVolCoefficients localvol_coefficients(const Schedule& sched, double t, double x) {
    if (!(t > 0.0)) throw std::domain_error("localvol_coefficients: t must be > 0");
    return LocalVolSlice(sched, t).at(x);
}

const std::vector<double>& EulerResult::at_time(double t) const {
    for (std::size_t i = 0; i < times.size(); ++i)
        if (std::abs(times[i] - t) <= kTimeTol) return values[i];
    throw std::invalid_argument("EulerResult: time was not recorded");
}

namespace {

std::vector<double> build_grid(const std::vector<double>& extra_times, const EulerConfig& cfg) {
    const double T = cfg.horizon;
    if (!(cfg.step > 0.0)) throw std::invalid_argument("euler_simulate: step must be > 0");
    const double ratio = T / cfg.step;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio))
        throw std::invalid_argument("euler_simulate: step must divide the horizon");

    std::vector<double> grid;
    const auto steps = static_cast<std::size_t>(std::llround(ratio));
    grid.reserve(steps + extra_times.size() + 8);
    for (std::size_t k = 0; k <= steps; ++k) grid.push_back(k * cfg.step);
    for (double tau : extra_times)
        if (tau < T) grid.push_back(tau);
    for (double t : cfg.record_times) {
        if (t < 0.0 || t > T + kTimeTol)
            throw std::invalid_argument("euler_simulate: record time outside the horizon");
        grid.push_back(std::min(t, T));
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](double a, double b) { return std::abs(a - b) <= kTimeTol; }),
               grid.end());
    return grid;
}

// Shared Euler-Maruyama loop; make_slice(t) supplies the coefficient field
// for one step, jump_at(t) the active jump part.
template <typename SliceFactory, typename JumpAt>
EulerResult run_euler(double x0, const std::vector<double>& extra_times, const EulerConfig& cfg,
                      SliceFactory&& make_slice, JumpAt&& jump_at) {
    const auto grid = build_grid(extra_times, cfg);
    std::vector<double> record = cfg.record_times;
    if (record.empty()) record.push_back(cfg.horizon);
    std::sort(record.begin(), record.end());

    EulerResult result;
    result.min_variance_seen = std::numeric_limits<double>::infinity();
    result.max_variance_seen = 0.0;

    const std::size_t n = cfg.paths;
    std::vector<double> x(n, x0);
    std::vector<CounterRng> noise, jumps;
    noise.reserve(n);
    jumps.reserve(n);
    for (std::size_t p = 0; p < n; ++p) {
        noise.emplace_back(cfg.seed, p, rng_purpose::kBrownian);
        jumps.emplace_back(cfg.seed, p, rng_purpose::kJumps);
    }

    auto record_if_due = [&](double t) {
        for (double rt : record) {
            if (std::abs(rt - t) <= kTimeTol) {
                result.times.push_back(t);
                result.values.push_back(x);
            }
        }
    };
    record_if_due(0.0);

    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const double t = grid[k];
        const double dt = grid[k + 1] - grid[k];
        const double sqrt_dt = std::sqrt(dt);
        const auto slice = [&] {
            try {
                return make_slice(t);
            } catch (const std::exception& e) {
                throw std::runtime_error("euler_simulate: coefficient evaluation failed at step " +
                                         std::to_string(k) + " (t=" + std::to_string(t) +
                                         "): " + e.what());
            }
        }();
        const JumpSpec jump_spec = jump_at(t);
        const double jump_rate = jump_spec.intensity * dt;
        const bool thin = jump_rate < 0.01;

        double lo = x[0], hi = x[0];
        for (double v : x) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const double margin =
            1.0 + 8.0 * std::sqrt(slice.max_variance() * dt) + std::abs(slice.at(lo).drift) * dt;
        lo -= margin;
        hi += margin;

        // Per-step coefficient table; linear interpolation keeps values
        // inside the sandwich bounds.
        std::vector<double> tab_mu, tab_var;
        double dx = 0.0;
        if (cfg.tabulated) {
            const int pts = std::max(cfg.table_points, 8);
            tab_mu.resize(pts);
            tab_var.resize(pts);
            dx = (hi - lo) / (pts - 1);
            for (int i = 0; i < pts; ++i) {
                const auto c = slice.at(lo + i * dx);
                tab_mu[i] = c.drift;
                tab_var[i] = c.variance;
            }
        }

        std::mutex extremes_mutex;
        double step_min = std::numeric_limits<double>::infinity();
        double step_max = 0.0;
        parallel_for(n, [&](std::size_t begin, std::size_t end) {
            double wmin = std::numeric_limits<double>::infinity(), wmax = 0.0;
            for (std::size_t p = begin; p < end; ++p) {
                double mu, var;
                if (cfg.tabulated && x[p] >= lo && x[p] <= hi) {
                    const double pos = (x[p] - lo) / dx;
                    const auto cell = std::min(static_cast<std::size_t>(pos), tab_mu.size() - 2);
                    const double frac = pos - cell;
                    mu = (1.0 - frac) * tab_mu[cell] + frac * tab_mu[cell + 1];
                    var = (1.0 - frac) * tab_var[cell] + frac * tab_var[cell + 1];
                } else {
                    const auto c = slice.at(x[p]);
                    mu = c.drift;
                    var = c.variance;
                }
                wmin = std::min(wmin, var);
                wmax = std::max(wmax, var);
                double dxp = mu * dt + std::sqrt(var) * sqrt_dt * noise[p].normal();
                if (jump_spec.intensity > 0.0) {
                    const int count = thin ? (jumps[p].uniform() < jump_rate ? 1 : 0)
                                           : jumps[p].poisson(jump_rate);
                    for (int c = 0; c < count; ++c)
                        dxp += jump_spec.mean + jump_spec.stddev * jumps[p].normal();
                }
                x[p] += dxp;
            }
            // min/max are exact in floating point, so the merge order
            // cannot change the result.
            const std::lock_guard<std::mutex> lock(extremes_mutex);
            step_min = std::min(step_min, wmin);
            step_max = std::max(step_max, wmax);
        });
        result.min_variance_seen = std::min(result.min_variance_seen, step_min);
        result.max_variance_seen = std::max(result.max_variance_seen, step_max);
        if (step_min < slice.min_variance() - 1e-12 || step_max > slice.max_variance() + 1e-12)
            result.sandwich_ok = false;

        record_if_due(grid[k + 1]);
    }
    return result;
}

}  // namespace

EulerResult euler_simulate(const Schedule& sched, const EulerConfig& cfg) {
    return run_euler(
        sched.x0(), sched.switch_times(), cfg,
        [&sched](double t) { return LocalVolSlice(sched, t); },
        [&sched](double t) { return sched.component(sched.active_regime(t)).jumps(); });
}

EulerResult euler_simulate_fixed_count(const std::vector<Component>& components,
                                       const SojournSpec& sojourns, double x0, int switches,
                                       const EulerConfig& cfg) {
    if (switches > 2)
        throw std::invalid_argument(
            "euler_simulate_fixed_count: the enlarged mixture is limited to two switches");
    if (static_cast<int>(components.size()) != switches + 1)
        throw std::invalid_argument("euler_simulate_fixed_count: component count mismatch");
    const SojournTree tree = build_sojourn_tree(sojourns, cfg.horizon, switches);
    std::vector<double> extra;
    for (const auto& leaf : tree.leaves)
        extra.insert(extra.end(), leaf.switch_times.begin(), leaf.switch_times.end());
    // the mimicking construction leaves one shared jump part across regimes
    const JumpSpec shared_jumps = components[0].jumps();
    return run_euler(
        x0, extra, cfg,
        [&](double t) { return StochasticLocalVolSlice(components, tree, x0, t); },
        [&shared_jumps](double) { return shared_jumps; });
}

}  // namespace rsjd
