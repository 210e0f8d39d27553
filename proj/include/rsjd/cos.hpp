#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace rsjd {

/// Characteristic function of a scalar law, evaluated at real u.
using ChfFn = std::function<std::complex<double>(double u)>;

/// First cumulants of the law behind a characteristic function, estimated
/// by central finite differences of log(chf) at u = 0.
struct Cumulants {
    double c1 = 0.0;  // mean
    double c2 = 0.0;  // variance
    double c4 = 0.0;  // fourth cumulant (coarse, clamped at 0)
};

Cumulants cumulants_from_chf(const ChfFn& chf, double h = 1e-4);

/// Truncation interval for a Fourier-cosine expansion,
/// [c1 - L*s, c1 + L*s] with s = sqrt(c2 + sqrt(c4)).
struct CosRange {
    double a = 0.0;
    double b = 0.0;
    double width() const { return b - a; }
};

CosRange cos_range_from_chf(const ChfFn& chf, double half_widths = 10.0);

/// Fourier-cosine series of a density recovered from its characteristic
/// function. pdf values are clamped at zero (the raw series can dip
/// marginally negative in the tails); the cdf comes from the termwise
/// antiderivative of the same series.
class CosDensity {
public:
    CosDensity(const ChfFn& chf, CosRange range, int terms = 1 << 11);

    double pdf(double x) const;
    double cdf(double x) const;
    const CosRange& range() const { return range_; }

private:
    CosRange range_;
    std::vector<double> coef_;  // k = 0 term already halved
};

}  // namespace rsjd
