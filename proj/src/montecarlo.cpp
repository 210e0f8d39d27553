#include "rsjd/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rsjd/math.hpp"
#include "rsjd/parallel.hpp"
#include "rsjd/rng.hpp"

namespace rsjd {

namespace {

constexpr std::size_t kMaxRejectionTries = 1000000;

double conditional_increment(const Component& comp, double theta, double s, CounterRng& noise,
                             CounterRng& jump_rng) {
    double dx = comp.drift(theta) * s + comp.vol(theta) * std::sqrt(s) * noise.normal();
    const auto& j = comp.jumps();
    if (j.intensity > 0.0) {
        const int count = jump_rng.poisson(j.intensity * s);
        for (int k = 0; k < count; ++k) dx += j.mean + j.stddev * jump_rng.normal();
    }
    return dx;
}

// One randomiser realisation: a quadrature node by default, a continuum
// draw in diagnostic mode.
double draw_theta(const Component& comp, bool continuous, double u01) {
    if (continuous) return sample(comp.randomiser(), u01);
    const auto& rule = comp.rule();
    double cum = 0.0;
    for (int i = 0; i < rule.order(); ++i) {
        cum += rule.weights[i];
        if (u01 <= cum) return rule.nodes[i];
    }
    return rule.nodes.back();
}

// Terminal value of a deterministic-switching composite given realised
// switch times; draws one randomiser per reached regime.
double composite_terminal_one(const std::vector<Component>& comps,
                              const std::vector<double>& lengths, double x0, bool continuous,
                              CounterRng& noise, CounterRng& rnd, CounterRng& jump_rng) {
    double x = x0;
    for (std::size_t j = 0; j < lengths.size(); ++j) {
        if (lengths[j] <= 0.0) break;
        const double theta = draw_theta(comps[j], continuous, rnd.uniform());
        x += conditional_increment(comps[j], theta, lengths[j], noise, jump_rng);
    }
    return x;
}

}  // namespace

std::vector<double> simulate_composite_terminal(const Schedule& sched, double t,
                                                const PathConfig& cfg) {
    std::vector<double> lengths(sched.regimes());
    for (std::size_t j = 0; j < sched.regimes(); ++j) lengths[j] = sched.time_shift(j, t);
    std::vector<double> out(cfg.paths);
    parallel_for(cfg.paths, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            CounterRng noise(cfg.seed, cfg.common_noise ? 0 : p, rng_purpose::kBrownian);
            CounterRng rnd(cfg.seed, p, rng_purpose::kRandomiser);
            CounterRng jump_rng(cfg.seed, p, rng_purpose::kJumps);
            out[p] = composite_terminal_one(sched.components(), lengths, sched.x0(),
                                            cfg.continuous_randomisers, noise, rnd, jump_rng);
        }
    });
    return out;
}

std::vector<double> simulate_single_regime_terminal(const Component& comp, double x0, double t,
                                                    const PathConfig& cfg) {
    std::vector<double> out(cfg.paths);
    parallel_for(cfg.paths, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            CounterRng noise(cfg.seed, cfg.common_noise ? 0 : p, rng_purpose::kBrownian);
            CounterRng rnd(cfg.seed, p, rng_purpose::kRandomiser);
            CounterRng jump_rng(cfg.seed, p, rng_purpose::kJumps);
            const double theta = draw_theta(comp, cfg.continuous_randomisers, rnd.uniform());
            out[p] = x0 + conditional_increment(comp, theta, t, noise, jump_rng);
        }
    });
    return out;
}

namespace {

// Regime lengths from a tree leaf's realised switching times.
std::vector<double> leaf_lengths(const SojournTree::Leaf& leaf, double t) {
    std::vector<double> lengths(leaf.switch_times.size() + 1);
    double prev = 0.0;
    for (std::size_t j = 0; j < leaf.switch_times.size(); ++j) {
        lengths[j] = leaf.switch_times[j] - prev;
        prev = leaf.switch_times[j];
    }
    lengths.back() = t - prev;
    return lengths;
}

std::size_t sample_index(const std::vector<double>& cumulative, double u01) {
    std::size_t i = 0;
    while (i + 1 < cumulative.size() && u01 > cumulative[i]) ++i;
    return i;
}

std::vector<double> cumulative_of(const std::vector<double>& w) {
    std::vector<double> cum(w.size());
    double acc = 0.0;
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) {
        acc += w[i] / total;
        cum[i] = acc;
    }
    return cum;
}

}  // namespace

std::vector<double> simulate_fixed_count_terminal(const std::vector<Component>& components,
                                                  const SojournSpec& sojourns, double x0,
                                                  double t, int switches,
                                                  const PathConfig& cfg) {
    if (static_cast<int>(components.size()) != switches + 1)
        throw std::invalid_argument("simulate_fixed_count_terminal: component count mismatch");

    // Default: sample the sojourn vector from the tree's leaf law, which
    // is the model behind chf_fixed_switches.
    std::vector<std::vector<double>> lengths_by_leaf;
    std::vector<double> leaf_cum;
    if (!cfg.continuous_randomisers) {
        if (switches == 0) {
            lengths_by_leaf = {{t}};
            leaf_cum = {1.0};
        } else {
            const SojournTree tree = build_sojourn_tree(sojourns, t, switches);
            if (tree.leaves.empty())
                throw std::domain_error("simulate_fixed_count_terminal: empty sojourn tree");
            std::vector<double> weights;
            for (const auto& leaf : tree.leaves) {
                lengths_by_leaf.push_back(leaf_lengths(leaf, t));
                weights.push_back(leaf.weight);
            }
            leaf_cum = cumulative_of(weights);
        }
    }

    std::vector<double> out(cfg.paths);
    parallel_for(cfg.paths, [&](std::size_t begin, std::size_t end) {
        std::vector<double> lengths(switches + 1);
        for (std::size_t p = begin; p < end; ++p) {
            CounterRng noise(cfg.seed, cfg.common_noise ? 0 : p, rng_purpose::kBrownian);
            CounterRng rnd(cfg.seed, p, rng_purpose::kRandomiser);
            CounterRng jump_rng(cfg.seed, p, rng_purpose::kJumps);
            CounterRng soj(cfg.seed, p, rng_purpose::kSojourn);

            if (!cfg.continuous_randomisers) {
                const auto& picked = lengths_by_leaf[sample_index(leaf_cum, soj.uniform())];
                out[p] = composite_terminal_one(components, picked, x0, false, noise, rnd,
                                                jump_rng);
                continue;
            }

            // Rejection on the conditioning event sum(zeta) < t.
            double total = 0.0;
            for (std::size_t tries = 0;; ++tries) {
                if (tries >= kMaxRejectionTries)
                    throw std::runtime_error(
                        "simulate_fixed_count_terminal: conditioning event too rare");
                total = 0.0;
                for (int j = 0; j < switches; ++j) {
                    lengths[j] = sample(sojourns.law(j), soj.uniform());
                    total += lengths[j];
                }
                if (total < t) break;
            }
            lengths[switches] = t - total;
            out[p] = composite_terminal_one(components, lengths, x0, true, noise, rnd, jump_rng);
        }
    });
    return out;
}

std::vector<double> simulate_fully_stochastic_terminal(const std::vector<Component>& components,
                                                       const SojournSpec& sojourns, double x0,
                                                       double t, int max_switches,
                                                       const PathConfig& cfg) {
    if (static_cast<int>(components.size()) < max_switches + 1)
        throw std::invalid_argument("simulate_fully_stochastic_terminal: too few components");

    // Default: switch count from the truncated, renormalised pmf, then the
    // matching tree's leaf law -- the mixture behind chf_fully_stochastic.
    std::vector<double> count_cum;
    std::vector<std::vector<std::vector<double>>> lengths_by_count;  // [m][leaf] -> lengths
    std::vector<std::vector<double>> leaf_cum_by_count;
    if (!cfg.continuous_randomisers) {
        const auto dist = switch_count_pmf(sojourns, t, max_switches, 1.0);
        count_cum = cumulative_of(dist.renormalised());
        lengths_by_count.resize(max_switches + 1);
        leaf_cum_by_count.resize(max_switches + 1);
        const auto renorm = dist.renormalised();
        for (int m = 0; m <= max_switches; ++m) {
            if (renorm[m] <= 0.0) continue;
            if (m == 0) {
                lengths_by_count[0] = {{t}};
                leaf_cum_by_count[0] = {1.0};
                continue;
            }
            const SojournTree tree = build_sojourn_tree(sojourns, t, m);
            std::vector<double> weights;
            for (const auto& leaf : tree.leaves) {
                lengths_by_count[m].push_back(leaf_lengths(leaf, t));
                weights.push_back(leaf.weight);
            }
            leaf_cum_by_count[m] = cumulative_of(weights);
        }
    }

    std::vector<double> out(cfg.paths);
    parallel_for(cfg.paths, [&](std::size_t begin, std::size_t end) {
        std::vector<double> lengths;
        for (std::size_t p = begin; p < end; ++p) {
            CounterRng noise(cfg.seed, cfg.common_noise ? 0 : p, rng_purpose::kBrownian);
            CounterRng rnd(cfg.seed, p, rng_purpose::kRandomiser);
            CounterRng jump_rng(cfg.seed, p, rng_purpose::kJumps);
            CounterRng soj(cfg.seed, p, rng_purpose::kSojourn);

            if (!cfg.continuous_randomisers) {
                const std::size_t m = sample_index(count_cum, soj.uniform());
                const auto& leaves = lengths_by_count[m];
                const auto& picked =
                    leaves.size() == 1
                        ? leaves[0]
                        : leaves[sample_index(leaf_cum_by_count[m], soj.uniform())];
                std::vector<Component> regime(components.begin(),
                                              components.begin() + picked.size());
                out[p] = composite_terminal_one(regime, picked, x0, false, noise, rnd, jump_rng);
                continue;
            }

            // Conditioned on at most max_switches switches by t, matching
            // the truncated count distribution of the analytic CF.
            for (std::size_t tries = 0;; ++tries) {
                if (tries >= kMaxRejectionTries)
                    throw std::runtime_error(
                        "simulate_fully_stochastic_terminal: conditioning event too rare");
                lengths.clear();
                double total = 0.0;
                int m = 0;
                bool overflow = false;
                for (;;) {
                    const double z = sample(sojourns.law(m), soj.uniform());
                    if (total + z > t) break;
                    total += z;
                    lengths.push_back(z);
                    if (++m > max_switches) {
                        overflow = true;
                        break;
                    }
                }
                if (!overflow) {
                    lengths.push_back(t - total);
                    break;
                }
            }
            std::vector<Component> regime(components.begin(),
                                          components.begin() + lengths.size());
            out[p] = composite_terminal_one(regime, lengths, x0, true, noise, rnd, jump_rng);
        }
    });
    return out;
}

std::vector<double> simulate_markov_terminal(const MarkovSpec& spec, double t,
                                             const PathConfig& cfg) {
    const std::size_t states = spec.states();
    std::vector<double> avg_drift(states), avg_var(states);
    for (std::size_t j = 0; j < states; ++j) {
        const auto& comp = spec.components[j];
        const auto& rule = comp.rule();
        double bd = 0.0, bv = 0.0;
        for (int n = 0; n < rule.order(); ++n) {
            bd += rule.weights[n] * comp.drift(rule.nodes[n]);
            bv += rule.weights[n] * sqr(comp.vol(rule.nodes[n]));
        }
        avg_drift[j] = bd;
        avg_var[j] = bv;
    }

    std::vector<double> out(cfg.paths);
    parallel_for(cfg.paths, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            CounterRng noise(cfg.seed, cfg.common_noise ? 0 : p, rng_purpose::kBrownian);
            CounterRng chain(cfg.seed, p, rng_purpose::kChain);
            CounterRng jump_rng(cfg.seed, p, rng_purpose::kJumps);

            std::size_t state = 0;
            {
                const double u = chain.uniform();
                double cum = 0.0;
                for (std::size_t j = 0; j < states; ++j) {
                    cum += spec.initial[j];
                    if (u <= cum) {
                        state = j;
                        break;
                    }
                }
            }
            double remaining = t, mean = 0.0, var = 0.0, jump_sum = 0.0;
            while (remaining > 0.0) {
                const double rate = -spec.generator[state][state];
                const double hold =
                    rate > 0.0 ? chain.exponential(rate) : std::numeric_limits<double>::infinity();
                const double visit = std::min(hold, remaining);
                mean += avg_drift[state] * visit;
                var += avg_var[state] * visit;
                const auto& j = spec.components[state].jumps();
                if (j.intensity > 0.0) {
                    const int count = jump_rng.poisson(j.intensity * visit);
                    for (int k = 0; k < count; ++k)
                        jump_sum += j.mean + j.stddev * jump_rng.normal();
                }
                remaining -= visit;
                if (hold < remaining + visit) {
                    // transition kernel Q[state][k] / rate
                    const double u = chain.uniform() * rate;
                    double cum = 0.0;
                    for (std::size_t k = 0; k < states; ++k) {
                        if (k == state) continue;
                        cum += spec.generator[state][k];
                        if (u <= cum) {
                            state = k;
                            break;
                        }
                    }
                }
            }
            out[p] = mean + std::sqrt(var) * noise.normal() + jump_sum;
        }
    });
    return out;
}

PathSet simulate_composite_paths(const Schedule& sched, double horizon, double step,
                                 const PathConfig& cfg) {
    if (!(step > 0.0) || !(horizon > 0.0))
        throw std::invalid_argument("simulate_composite_paths: bad horizon/step");
    const double ratio = horizon / step;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio))
        throw std::invalid_argument("simulate_composite_paths: step must divide the horizon");

    std::vector<double> grid;
    for (std::size_t k = 0; k <= static_cast<std::size_t>(std::llround(ratio)); ++k)
        grid.push_back(k * step);
    for (double tau : sched.switch_times())
        if (tau < horizon) grid.push_back(tau);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
               grid.end());

    PathSet set;
    set.times = grid;
    set.values.assign(cfg.paths, std::vector<double>(grid.size(), sched.x0()));
    set.thetas.assign(cfg.paths, std::vector<double>(sched.regimes(), 0.0));

    parallel_for(cfg.paths, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            CounterRng noise(cfg.seed, cfg.common_noise ? 0 : p, rng_purpose::kBrownian);
            CounterRng rnd(cfg.seed, p, rng_purpose::kRandomiser);
            CounterRng jump_rng(cfg.seed, p, rng_purpose::kJumps);
            auto& path = set.values[p];
            auto& th = set.thetas[p];
            for (std::size_t j = 0; j < sched.regimes(); ++j)
                th[j] = draw_theta(sched.component(j), cfg.continuous_randomisers, rnd.uniform());
            double x = sched.x0();
            for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
                const std::size_t a = sched.active_regime(grid[k]);
                x += conditional_increment(sched.component(a), th[a], grid[k + 1] - grid[k],
                                           noise, jump_rng);
                path[k + 1] = x;
            }
        }
    });
    return set;
}

std::vector<std::complex<double>> empirical_chf(std::span<const double> samples,
                                                std::span<const double> u_grid) {
    std::vector<std::complex<double>> out(u_grid.size());
    parallel_for(u_grid.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            std::complex<double> acc = 0.0;
            for (double x : samples) acc += std::exp(kI * u_grid[i] * x);
            out[i] = acc / static_cast<double>(samples.size());
        }
    });
    return out;
}

double chf_error_radius(std::size_t n) { return 4.0 / std::sqrt(static_cast<double>(n)); }

double Histogram::pdf(double x) const {
    if (x < lo || x >= hi || density.empty()) return 0.0;
    const double w = (hi - lo) / density.size();
    return density[static_cast<std::size_t>((x - lo) / w)];
}

Histogram empirical_density(std::span<const double> samples, int bins) {
    Histogram h;
    if (samples.empty() || bins < 1) return h;
    auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    h.lo = *lo_it;
    h.hi = *hi_it + 1e-12;
    h.density.assign(bins, 0.0);
    const double w = (h.hi - h.lo) / bins;
    for (double x : samples) {
        auto b = static_cast<std::size_t>((x - h.lo) / w);
        h.density[std::min(b, h.density.size() - 1)] += 1.0;
    }
    for (auto& d : h.density) d /= samples.size() * w;
    return h;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::max(std::abs(f - (i + 1) / n), std::abs(f - i / n)));
    }
    return d;
}

DriverReport driver_checks(const Schedule& sched, double horizon, std::size_t paths,
                           std::uint64_t seed) {
    if (sched.switch_times().empty())
        throw std::invalid_argument("driver_checks: need at least one switch");
    if (!(horizon > sched.switch_times().back()))
        throw std::invalid_argument("driver_checks: horizon must pass the last switch");

    DriverReport report;
    report.paths = paths;
    report.var_time = horizon;
    const double tau1 = sched.tau(1);
    report.cov_time = sched.switch_times().size() > 1
                          ? 0.5 * (sched.tau(1) + sched.tau(2))
                          : 0.5 * (tau1 + horizon);

    // Jump windows straddling the first switch.
    double delta = std::min(tau1, horizon - tau1);
    for (std::size_t j = 1; j < sched.switch_times().size(); ++j)
        delta = std::min(delta, sched.tau(j + 1) - sched.tau(j));
    delta *= 0.4;
    const double lam0 = sched.component(0).jumps().intensity;
    const double lam1 = sched.component(1).jumps().intensity;

    std::vector<double> w_u(paths), w_t(paths);
    std::vector<int> count_a(paths), count_b(paths);
    const double u_time = report.cov_time;

    parallel_for(paths, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            CounterRng noise(seed, p, rng_purpose::kBrownian);
            CounterRng jump_rng(seed, p, rng_purpose::kJumps);
            // W(t) = sum_j W_j(s_j(t)); per regime, draw the increment up
            // to s_j(u) and then the remainder up to s_j(t).
            double at_u = 0.0, at_t = 0.0;
            for (std::size_t j = 0; j < sched.regimes(); ++j) {
                const double su = sched.time_shift(j, u_time);
                const double st = sched.time_shift(j, horizon);
                double wj = su > 0.0 ? std::sqrt(su) * noise.normal() : 0.0;
                at_u += wj;
                if (st > su) wj += std::sqrt(st - su) * noise.normal();
                at_t += wj;
            }
            w_u[p] = at_u;
            w_t[p] = at_t;
            count_a[p] = lam0 > 0.0 ? jump_rng.poisson(lam0 * delta) : 0;
            count_b[p] = lam1 > 0.0 ? jump_rng.poisson(lam1 * delta) : 0;
        }
    });

    const double n = static_cast<double>(paths);
    double mu_u = 0.0, mu_t = 0.0;
    for (std::size_t p = 0; p < paths; ++p) {
        mu_u += w_u[p];
        mu_t += w_t[p];
    }
    mu_u /= n;
    mu_t /= n;
    double var_t = 0.0, cov = 0.0;
    for (std::size_t p = 0; p < paths; ++p) {
        var_t += sqr(w_t[p] - mu_t);
        cov += (w_t[p] - mu_t) * (w_u[p] - mu_u);
    }
    var_t /= n - 1;
    cov /= n - 1;
    report.bm_var = var_t;
    report.bm_var_tol = 3.0 * horizon * std::sqrt(2.0 / (n - 1));
    report.bm_cov = cov;
    report.bm_cov_tol = 3.0 * std::sqrt((horizon * u_time + sqr(u_time)) / (n - 1));

    // Chi-square of the spliced counts against Poisson(lam0*d + lam1*d).
    const double mean_counts = (lam0 + lam1) * delta;
    if (mean_counts > 0.0) {
        std::vector<double> observed;
        for (std::size_t p = 0; p < paths; ++p) {
            const auto k = static_cast<std::size_t>(count_a[p] + count_b[p]);
            if (observed.size() <= k) observed.resize(k + 1, 0.0);
            observed[k] += 1.0;
        }
        std::vector<double> expected(observed.size(), 0.0);
        double pk = std::exp(-mean_counts);
        double rest = n;
        for (std::size_t k = 0; k + 1 < expected.size(); ++k) {
            expected[k] = n * pk;
            rest -= expected[k];
            pk *= mean_counts / (k + 1.0);
        }
        expected.back() = std::max(rest, 0.0);  // tail bin
        // merge bins until every expected count is at least 5
        std::vector<double> obs_m, exp_m;
        double o = 0.0, e = 0.0;
        for (std::size_t k = 0; k < expected.size(); ++k) {
            o += observed[k];
            e += expected[k];
            if (e >= 5.0) {
                obs_m.push_back(o);
                exp_m.push_back(e);
                o = e = 0.0;
            }
        }
        if (e > 0.0 && !exp_m.empty()) {
            obs_m.back() += o;
            exp_m.back() += e;
        }
        double chi2 = 0.0;
        for (std::size_t k = 0; k < exp_m.size(); ++k) chi2 += sqr(obs_m[k] - exp_m[k]) / exp_m[k];
        const double dof = static_cast<double>(exp_m.size()) - 1.0;
        report.poisson_p = dof > 0.0 ? gamma_q(0.5 * dof, 0.5 * chi2) : 1.0;

        double ma = 0.0, mb = 0.0;
        for (std::size_t p = 0; p < paths; ++p) {
            ma += count_a[p];
            mb += count_b[p];
        }
        ma /= n;
        mb /= n;
        double va = 0.0, vb = 0.0, cab = 0.0;
        for (std::size_t p = 0; p < paths; ++p) {
            va += sqr(count_a[p] - ma);
            vb += sqr(count_b[p] - mb);
            cab += (count_a[p] - ma) * (count_b[p] - mb);
        }
        report.cross_corr = cab / std::sqrt(va * vb);
    } else {
        report.poisson_p = 1.0;
        report.cross_corr = 0.0;
    }
    report.cross_corr_tol = 3.0 / std::sqrt(n);
    return report;
}

}  // namespace rsjd
