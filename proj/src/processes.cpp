#include "rsjd/processes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rsjd/math.hpp"

namespace rsjd {

namespace {
constexpr double kPoissonTailTol = 1e-12;
}

double JumpSpec::compensator() const {
    if (intensity == 0.0) return 0.0;
    return std::expm1(mean + 0.5 * sqr(stddev));
}

Component::Component(DriftRule drift, VolRule vol, JumpSpec jumps, RandomiserSpec randomiser,
                     int order)
    : drift_(drift),
      vol_(vol),
      jumps_(jumps),
      randomiser_(std::move(randomiser)),
      order_(order),
      rule_(quadrature_rule(randomiser_, order)) {
    if (jumps_.intensity < 0.0) throw std::invalid_argument("Component: negative jump intensity");
    if (jumps_.stddev < 0.0) throw std::invalid_argument("Component: negative jump stddev");
}

double Component::drift(double theta) const {
    switch (drift_.kind) {
        case DriftRule::Kind::MertonRiskNeutral:
            return drift_.rate - 0.5 * sqr(vol(theta)) -
                   jumps_.intensity * jumps_.compensator();
        case DriftRule::Kind::Constant: return drift_.c0;
        case DriftRule::Kind::Affine: return drift_.c0 + drift_.c1 * theta;
    }
    return 0.0;
}

double Component::vol(double theta) const {
    return vol_.kind == VolRule::Kind::Identity ? theta : vol_.value;
}

Component Component::with_randomiser(RandomiserSpec r) const {
    return Component(drift_, vol_, jumps_, std::move(r), order_);
}

std::complex<double> levy_exponent(const Component& comp, double theta, double u) {
    const auto& j = comp.jumps();
    std::complex<double> psi =
        -kI * u * comp.drift(theta) + 0.5 * sqr(u) * sqr(comp.vol(theta));
    if (j.intensity > 0.0)
        psi -= j.intensity * (std::exp(kI * u * j.mean - 0.5 * sqr(u) * sqr(j.stddev)) - 1.0);
    return psi;
}

std::complex<double> conditional_chf(const Component& comp, double theta, double t, double u) {
    return std::exp(-t * levy_exponent(comp, theta, u));
}

std::complex<double> randomised_chf(const Component& comp, double t, double u) {
    const auto& rule = comp.rule();
    std::complex<double> acc = 0.0;
    for (int n = 0; n < rule.order(); ++n)
        acc += rule.weights[n] * conditional_chf(comp, rule.nodes[n], t, u);
    return acc;
}

double conditional_density(const Component& comp, double theta, double t, double x) {
    return conditional_law(comp, theta, t).pdf(x);
}

NormalMixture conditional_law(const Component& comp, double theta, double t) {
    if (!(t > 0.0)) throw std::domain_error("conditional_law: t must be > 0 (Dirac otherwise)");
    const double m = comp.drift(theta) * t;
    const double v = sqr(comp.vol(theta)) * t;
    const auto& j = comp.jumps();
    NormalMixture law;
    if (j.intensity == 0.0) {
        law.terms.push_back({0.0, m, v});
        return law;
    }
    const double rate = j.intensity * t;
    double log_pk = -rate;  // log Poisson(rate) pmf at k = 0
    double cum = 0.0;
    for (int k = 0; cum < 1.0 - kPoissonTailTol; ++k) {
        law.terms.push_back({log_pk, m + k * j.mean, v + k * sqr(j.stddev)});
        cum += std::exp(log_pk);
        log_pk += std::log(rate) - std::log(k + 1.0);
    }
    return law;
}

double NormalMixture::logpdf(double x) const {
    if (terms.size() == 1)
        return terms[0].log_w + norm_logpdf(x, terms[0].mean, terms[0].var);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms) best = std::max(best, t.log_w + norm_logpdf(x, t.mean, t.var));
    if (!std::isfinite(best)) return best;
    double acc = 0.0;
    for (const auto& t : terms)
        acc += std::exp(t.log_w + norm_logpdf(x, t.mean, t.var) - best);
    return best + std::log(acc);
}

double NormalMixture::pdf(double x) const {
    const double lp = logpdf(x);
    return std::isfinite(lp) ? std::exp(lp) : 0.0;
}

double NormalMixture::mean() const {
    double acc = 0.0;
    for (const auto& t : terms) acc += std::exp(t.log_w) * t.mean;
    return acc;
}

Schedule::Schedule(std::vector<Component> components, std::vector<double> switch_times, double x0)
    : components_(std::move(components)), switch_times_(std::move(switch_times)), x0_(x0) {
    if (components_.size() != switch_times_.size() + 1)
        throw std::invalid_argument("Schedule: need one component per regime (M+1 for M switches)");
    double prev = 0.0;
    for (double tau : switch_times_) {
        if (!(tau > prev)) throw std::invalid_argument("Schedule: switch times must be strictly increasing and > 0");
        prev = tau;
    }
}

double Schedule::tau(std::size_t j) const {
    if (j == 0) return 0.0;
    return switch_times_.at(j - 1);
}

double Schedule::time_shift(std::size_t j, double t) const {
    const double start = tau(j);
    if (t < start) return 0.0;
    if (j == regimes() - 1) return t - start;
    return std::min(t, tau(j + 1)) - start;
}

std::size_t Schedule::active_regime(double t) const {
    if (t < 0.0) throw std::domain_error("active_regime: negative time");
    std::size_t j = 0;
    while (j + 1 < regimes() && t >= tau(j + 1)) ++j;
    return j;
}

std::complex<double> composite_chf(const Schedule& sched, double t, double u) {
    std::complex<double> acc = std::exp(kI * u * sched.x0());
    for (std::size_t j = 0; j < sched.regimes(); ++j) {
        const double s = sched.time_shift(j, t);
        if (s <= 0.0) break;  // later regimes contribute a unit factor
        acc *= randomised_chf(sched.component(j), s, u);
    }
    return acc;
}

NormalMixture conditional_composite_law(const Schedule& sched, std::span<const double> thetas,
                                        double t) {
    if (!(t > 0.0))
        throw std::domain_error("conditional_composite_law: t must be > 0 (Dirac otherwise)");
    double mean = sched.x0();
    double var = 0.0;
    // Jump mixture across regimes, convolved one regime at a time.
    std::vector<NormalMixture::Term> mix{{0.0, 0.0, 0.0}};
    for (std::size_t j = 0; j < sched.regimes(); ++j) {
        const double s = sched.time_shift(j, t);
        if (s <= 0.0) break;
        if (j >= thetas.size())
            throw std::invalid_argument("conditional_composite_law: theta combination too short");
        const auto& comp = sched.component(j);
        const double theta = thetas[j];
        mean += comp.drift(theta) * s;
        var += sqr(comp.vol(theta)) * s;
        const auto& jumps = comp.jumps();
        if (jumps.intensity > 0.0) {
            const double rate = jumps.intensity * s;
            std::vector<NormalMixture::Term> next;
            double log_pk = -rate;
            double cum = 0.0;
            for (int k = 0; cum < 1.0 - kPoissonTailTol; ++k) {
                for (const auto& m : mix)
                    next.push_back({m.log_w + log_pk, m.mean + k * jumps.mean,
                                    m.var + k * sqr(jumps.stddev)});
                cum += std::exp(log_pk);
                log_pk += std::log(rate) - std::log(k + 1.0);
            }
            mix = std::move(next);
        }
    }
    NormalMixture law;
    law.terms.reserve(mix.size());
    for (const auto& m : mix) law.terms.push_back({m.log_w, mean + m.mean, var + m.var});
    if (var <= 0.0 && law.terms.size() == 1 && law.terms[0].var <= 0.0)
        throw std::domain_error("conditional_composite_law: degenerate law (zero variance)");
    return law;
}

namespace {
CosDensity build_mixture_cos(const Schedule& sched, double t, int terms, double half_widths) {
    if (!(t > 0.0)) throw std::domain_error("MixtureDensity: t must be > 0");
    const ChfFn chf = [&sched, t](double u) { return composite_chf(sched, t, u); };
    return CosDensity(chf, cos_range_from_chf(chf, half_widths), terms);
}
}  // namespace

MixtureDensity::MixtureDensity(const Schedule& sched, double t, int terms,
                               double range_half_widths)
    : cos_(build_mixture_cos(sched, t, terms, range_half_widths)) {}

}  // namespace rsjd
