#pragma once

#include <complex>
#include <span>
#include <vector>

#include "rsjd/cos.hpp"
#include "rsjd/quadrature.hpp"

namespace rsjd {

/// Compound-Poisson jump part: intensity per unit time, normal jump sizes.
struct JumpSpec {
    double intensity = 0.0;
    double mean = 0.0;
    double stddev = 0.0;

    /// k = E[e^eta] - 1, the martingale compensator of the jump part.
    double compensator() const;
};

/// Drift as a function of the regime's randomiser value.
struct DriftRule {
    enum class Kind { MertonRiskNeutral, Constant, Affine };
    Kind kind = Kind::Constant;
    double rate = 0.0;          // r (merton-risk-neutral)
    double c0 = 0.0, c1 = 0.0;  // constant / affine coefficients

    static DriftRule merton_risk_neutral(double r) { return {Kind::MertonRiskNeutral, r, 0, 0}; }
    static DriftRule constant(double c) { return {Kind::Constant, 0, c, 0}; }
    static DriftRule affine(double c0, double c1) { return {Kind::Affine, 0, c0, c1}; }
};

/// Volatility as a function of the regime's randomiser value.
struct VolRule {
    enum class Kind { Identity, Constant };
    Kind kind = Kind::Identity;
    double value = 0.0;

    static VolRule identity() { return {Kind::Identity, 0}; }
    static VolRule constant(double s) { return {Kind::Constant, s}; }
};

/// One regime's jump diffusion: conditional on a randomiser value theta it
/// is a Levy process with drift b(theta), volatility sigma(theta) and the
/// given jump part. The quadrature rule for the randomiser is built once
/// at construction; instances are immutable and safe to share.
class Component {
public:
    Component(DriftRule drift, VolRule vol, JumpSpec jumps, RandomiserSpec randomiser,
              int order = 7);

    double drift(double theta) const;  // b(theta)
    double vol(double theta) const;    // sigma(theta)

    const JumpSpec& jumps() const { return jumps_; }
    const RandomiserSpec& randomiser() const { return randomiser_; }
    const QuadratureRule& rule() const { return rule_; }
    const DriftRule& drift_rule() const { return drift_; }
    const VolRule& vol_rule() const { return vol_; }
    int order() const { return order_; }

    /// Same component with a different randomiser (rule rebuilt).
    Component with_randomiser(RandomiserSpec r) const;

private:
    DriftRule drift_;
    VolRule vol_;
    JumpSpec jumps_;
    RandomiserSpec randomiser_;
    int order_;
    QuadratureRule rule_;
};

/// Characteristic exponent psi(u; theta) with the convention
/// phi(u; Y^theta(t)) = exp(-t psi); Re psi >= 0 and psi(0) = 0. The usual
/// Levy-Khintchine exponent (phi = e^{+t Psi}) is Psi = -psi.
std::complex<double> levy_exponent(const Component& comp, double theta, double u);

/// exp(-t psi(u; theta))
std::complex<double> conditional_chf(const Component& comp, double theta, double t, double u);

/// Quadrature form sum_n w_n exp(-t psi(u; theta_n)).
std::complex<double> randomised_chf(const Component& comp, double t, double u);

/// Exact density of the conditional component at t > 0 (Poisson-weighted
/// normal mixture, tail truncated at 1e-12).
double conditional_density(const Component& comp, double theta, double t, double x);

/// Deterministic switching schedule: regime j runs on [tau_j, tau_{j+1});
/// components.size() == switch_times.size() + 1.
class Schedule {
public:
    Schedule(std::vector<Component> components, std::vector<double> switch_times,
             double x0 = 0.0);

    std::size_t regimes() const { return components_.size(); }
    const Component& component(std::size_t j) const { return components_[j]; }
    const std::vector<Component>& components() const { return components_; }
    const std::vector<double>& switch_times() const { return switch_times_; }
    double x0() const { return x0_; }

    double tau(std::size_t j) const;  // tau_0 = 0
    /// Time already spent in regime j by time t.
    double time_shift(std::size_t j, double t) const;
    /// Largest j with tau_j <= t.
    std::size_t active_regime(double t) const;

private:
    std::vector<Component> components_;
    std::vector<double> switch_times_;
    double x0_;
};

/// phi(u; X(t)) = e^{iux0} prod_j sum_n w_n phi(u; Y^theta_n(s_j(t))).
std::complex<double> composite_chf(const Schedule& sched, double t, double u);

/// Weighted normal mixture with log-space weights; the exact law of a
/// conditional (composite) process at a fixed time.
struct NormalMixture {
    struct Term {
        double log_w;
        double mean;
        double var;
    };
    std::vector<Term> terms;

    double pdf(double x) const;
    double logpdf(double x) const;
    double mean() const;
};

/// Law of Y^theta(t), t > 0.
NormalMixture conditional_law(const Component& comp, double theta, double t);

/// Law of x0 + sum_j Y_j^{theta_j}(s_j(t)) for a fixed randomiser
/// combination. Only regimes reached by t contribute; `thetas` must cover
/// at least the active regime index.
NormalMixture conditional_composite_law(const Schedule& sched, std::span<const double> thetas,
                                        double t);

/// Quadrature mixture density of the composite process at fixed t,
/// recovered by Fourier-cosine inversion of composite_chf.
class MixtureDensity {
public:
    MixtureDensity(const Schedule& sched, double t, int terms = 1 << 11,
                   double range_half_widths = 10.0);

    double operator()(double x) const { return cos_.pdf(x); }
    double cdf(double x) const { return cos_.cdf(x); }
    const CosRange& range() const { return cos_.range(); }

private:
    CosDensity cos_;
};

}  // namespace rsjd
