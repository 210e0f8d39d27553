#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace rsjd {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSqrtTwoPi = 2.506628274631000502415765;
inline constexpr std::complex<double> kI{0.0, 1.0};

inline double norm_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrtTwoPi; }

inline double norm_pdf(double x, double mean, double var) {
    const double z = x - mean;
    return std::exp(-0.5 * z * z / var) / std::sqrt(2.0 * kPi * var);
}

inline double norm_logpdf(double x, double mean, double var) {
    const double z = x - mean;
    return -0.5 * z * z / var - 0.5 * std::log(2.0 * kPi * var);
}

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Inverse standard normal cdf (Acklam's rational approximation with one
/// Halley refinement; good to ~1e-15 over (0,1)).
double norm_inv(double p);

/// Regularised upper incomplete gamma Q(a, x) (series / continued
/// fraction), the chi-square tail probability with a = dof/2, x = chi2/2.
double gamma_q(double a, double x);

inline double sqr(double x) { return x * x; }

}  // namespace rsjd
