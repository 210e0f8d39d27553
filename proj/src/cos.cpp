#include "rsjd/cos.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rsjd/math.hpp"

namespace rsjd {

Cumulants cumulants_from_chf(const ChfFn& chf, double h) {
    const auto l1 = std::log(chf(h));
    const auto l2 = std::log(chf(2.0 * h));
    Cumulants c;
    // Fourth-order stencils: Im log phi(h) = c1 h - c3 h^3/6 + ...,
    // Re log phi(h) = -c2 h^2/2 + c4 h^4/24 + ...
    c.c1 = (8.0 * l1.imag() - l2.imag()) / (6.0 * h);
    c.c2 = (l2.real() - 16.0 * l1.real()) / (6.0 * h * h);
    // c4 needs a wider stencil: at h ~ 1e-4 its h^4 signal drowns in
    // rounding noise.
    const double hw = 0.05;
    const double a1 = std::log(chf(hw)).real();
    const double a2 = std::log(chf(2.0 * hw)).real();
    const double c2w = (a2 - 16.0 * a1) / (6.0 * hw * hw);
    c.c4 = std::max(0.0, 24.0 * (a1 + 0.5 * c2w * hw * hw) / (hw * hw * hw * hw));
    return c;
}

CosRange cos_range_from_chf(const ChfFn& chf, double half_widths) {
    const Cumulants c = cumulants_from_chf(chf);
    if (c.c2 < 1e-14)
        throw std::domain_error("cos_range_from_chf: law is (numerically) degenerate");
    const double s = std::sqrt(c.c2 + std::sqrt(c.c4));
    return {c.c1 - half_widths * s, c.c1 + half_widths * s};
}

CosDensity::CosDensity(const ChfFn& chf, CosRange range, int terms) : range_(range) {
    if (!(range.width() > 0.0)) throw std::invalid_argument("CosDensity: empty range");
    if (terms < 2) throw std::invalid_argument("CosDensity: need at least two terms");
    coef_.resize(terms);
    const double w = range.width();
    for (int k = 0; k < terms; ++k) {
        const double u = k * kPi / w;
        const std::complex<double> phi = chf(u);
        coef_[k] = 2.0 / w * (phi * std::exp(-kI * u * range.a)).real();
    }
    coef_[0] *= 0.5;
}

double CosDensity::pdf(double x) const {
    if (x <= range_.a || x >= range_.b) return 0.0;
    const double z = kPi * (x - range_.a) / range_.width();
    double acc = 0.0;
    for (std::size_t k = 0; k < coef_.size(); ++k) acc += coef_[k] * std::cos(k * z);
    return std::max(acc, 0.0);
}

double CosDensity::cdf(double x) const {
    if (x <= range_.a) return 0.0;
    if (x >= range_.b) return 1.0;
    const double w = range_.width();
    const double z = kPi * (x - range_.a) / w;
    double acc = coef_[0] * (x - range_.a);
    for (std::size_t k = 1; k < coef_.size(); ++k)
        acc += coef_[k] * w / (k * kPi) * std::sin(k * z);
    return std::clamp(acc, 0.0, 1.0);
}

}  // namespace rsjd
