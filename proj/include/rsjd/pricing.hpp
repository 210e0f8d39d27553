#pragma once

#include <vector>

#include "rsjd/cos.hpp"

namespace rsjd {

enum class OptionKind { Call, Put };

/// Normed-strike market: spot defaults to 1 so a strike of 1 is ATM.
struct Market {
    double spot = 1.0;
    double rate = 0.0;
    std::vector<double> strikes;
    std::vector<double> expiries;
    OptionKind kind = OptionKind::Call;
};

double black_scholes_price(OptionKind kind, double spot, double strike, double rate, double expiry,
                           double sigma);
double black_scholes_vega(double spot, double strike, double rate, double expiry, double sigma);

struct CosPricerConfig {
    int initial_terms = 256;
    int max_terms = 1 << 14;  // doubling stops here
    double half_widths = 10.0;
    double tol = 1e-8;  // successive-doubling agreement
};

/// European prices for all strikes at one expiry from the CF of the
/// log-return X(T) (S_T = spot * e^X). Calls come from the cosine
/// expansion; puts follow by parity. The term count doubles until two
/// successive expansions agree within tol.
std::vector<double> cos_prices(const ChfFn& chf, OptionKind kind, double spot, double rate,
                               double expiry, const std::vector<double>& strikes,
                               const CosPricerConfig& config = {});

/// Black-Scholes volatility reproducing `price`: Newton on vega with a
/// bracketing bisection fallback, |BS(sigma) - price| < 1e-10. Prices at
/// or outside the no-arbitrage bounds raise std::domain_error.
double implied_vol(double price, OptionKind kind, double spot, double strike, double rate,
                   double expiry);

}  // namespace rsjd
