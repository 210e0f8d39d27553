#include "rsjd/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rsjd/math.hpp"

namespace rsjd {

double black_scholes_price(OptionKind kind, double spot, double strike, double rate,
                           double expiry, double sigma) {
    const double df = std::exp(-rate * expiry);
    if (sigma <= 0.0 || expiry <= 0.0) {
        const double fwd = spot / df;
        const double call = df * std::max(fwd - strike, 0.0);
        return kind == OptionKind::Call ? call : call - spot + strike * df;
    }
    const double sq = sigma * std::sqrt(expiry);
    const double d1 = (std::log(spot / strike) + (rate + 0.5 * sqr(sigma)) * expiry) / sq;
    const double d2 = d1 - sq;
    const double call = spot * norm_cdf(d1) - strike * df * norm_cdf(d2);
    return kind == OptionKind::Call ? call : call - spot + strike * df;
}

double black_scholes_vega(double spot, double strike, double rate, double expiry, double sigma) {
    const double sq = sigma * std::sqrt(expiry);
    const double d1 = (std::log(spot / strike) + (rate + 0.5 * sqr(sigma)) * expiry) / sq;
    return spot * norm_pdf(d1) * std::sqrt(expiry);
}

namespace {

// Payoff cosine coefficients of a call on [a, b]:
// V_k = 2/(b-a) * (S0 * chi_k(d, b) - K * psi_k(d, b)), d = log(K/S0).
struct PayoffCoefficients {
    double a, b, spot, strike, d;

    double chi(int k) const {
        const double w = k * kPi / (b - a);
        const double top = std::cos(w * (b - a)) * std::exp(b) + w * std::sin(w * (b - a)) * std::exp(b);
        const double bot = std::cos(w * (d - a)) * std::exp(d) + w * std::sin(w * (d - a)) * std::exp(d);
        return (top - bot) / (1.0 + w * w);
    }
    double psi(int k) const {
        if (k == 0) return b - d;
        const double w = k * kPi / (b - a);
        return (std::sin(w * (b - a)) - std::sin(w * (d - a))) / w;
    }
    double operator()(int k) const {
        return 2.0 / (b - a) * (spot * chi(k) - strike * psi(k));
    }
};

}  // namespace

std::vector<double> cos_prices(const ChfFn& chf, OptionKind kind, double spot, double rate,
                               double expiry, const std::vector<double>& strikes,
                               const CosPricerConfig& config) {
    if (std::abs(chf(0.0) - 1.0) > 1e-10)
        throw std::domain_error("cos_prices: chf(0) != 1, refusing to price");
    const CosRange range = cos_range_from_chf(chf, config.half_widths);
    const double width = range.width();

    std::vector<PayoffCoefficients> payoff;
    payoff.reserve(strikes.size());
    for (double strike : strikes) {
        if (!(strike > 0.0)) throw std::domain_error("cos_prices: strikes must be positive");
        const double d = std::log(strike / spot);
        if (d <= range.a || d >= range.b)
            throw std::domain_error("cos_prices: strike outside the cosine expansion range");
        payoff.push_back({range.a, range.b, spot, strike, d});
    }

    const double df = std::exp(-rate * expiry);
    std::vector<double> sums(strikes.size(), 0.0);
    std::vector<double> prev;
    int done = 0;
    for (int terms = config.initial_terms;; terms *= 2) {
        for (int k = done; k < terms; ++k) {
            const double u = k * kPi / width;
            double re = (chf(u) * std::exp(-kI * u * range.a)).real();
            if (k == 0) re *= 0.5;
            for (std::size_t s = 0; s < strikes.size(); ++s) sums[s] += re * payoff[s](k);
        }
        done = terms;
        std::vector<double> prices(strikes.size());
        for (std::size_t s = 0; s < strikes.size(); ++s) prices[s] = df * sums[s];
        if (!prev.empty()) {
            double drift = 0.0;
            for (std::size_t s = 0; s < strikes.size(); ++s)
                drift = std::max(drift, std::abs(prices[s] - prev[s]));
            if (drift < config.tol || terms >= config.max_terms) {
                if (kind == OptionKind::Put)
                    for (std::size_t s = 0; s < strikes.size(); ++s)
                        prices[s] += strikes[s] * df - spot;
                return prices;
            }
        }
        prev = std::move(prices);
    }
}

double implied_vol(double price, OptionKind kind, double spot, double strike, double rate,
                   double expiry) {
    const double df = std::exp(-rate * expiry);
    const double intrinsic = kind == OptionKind::Call ? std::max(spot - strike * df, 0.0)
                                                      : std::max(strike * df - spot, 0.0);
    const double cap = kind == OptionKind::Call ? spot : strike * df;
    if (!(price > intrinsic) || !(price < cap))
        throw std::domain_error("implied_vol: price outside the no-arbitrage bounds");

    double lo = 1e-10, hi = 1.0;
    while (black_scholes_price(kind, spot, strike, rate, expiry, hi) < price && hi < 64.0)
        hi *= 2.0;

    double sigma = std::clamp(std::sqrt(2.0 * kPi / expiry) * price / spot, 0.05, 2.0);
    for (int it = 0; it < 200; ++it) {
        const double value = black_scholes_price(kind, spot, strike, rate, expiry, sigma);
        const double diff = value - price;
        if (std::abs(diff) < 1e-10) return sigma;
        if (diff > 0.0)
            hi = sigma;
        else
            lo = sigma;
        const double vega = black_scholes_vega(spot, strike, rate, expiry, sigma);
        double next = vega > 1e-12 ? sigma - diff / vega : 0.5 * (lo + hi);
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        sigma = next;
    }
    throw std::runtime_error("implied_vol: no convergence");
}

}  // namespace rsjd
