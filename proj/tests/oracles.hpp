#pragma once

// Test-only numerical oracles, independent of the library's computation
// paths: brute-force integration for moments and densities, and a
// moment-equation solver for small Gauss rules that avoids the
// Cholesky/Jacobi/eigenvalue pipeline entirely.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "rsjd/quadrature.hpp"

namespace oracles {

inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    if (panels % 2) ++panels;
    const double h = (b - a) / panels;
    double acc = f(a) + f(b);
    for (int i = 1; i < panels; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

inline double adaptive_step(const std::function<double(double)>& f, double a, double b, double fa,
                            double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0) return left + right;
    if (std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_step(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Effective integration bounds for a (possibly truncated) law.
inline std::pair<double, double> support_window(const rsjd::RandomiserSpec& spec) {
    using Family = rsjd::RandomiserSpec::Family;
    double lo, hi;
    switch (spec.family) {
        case Family::Normal:
            lo = spec.a - 15.0 * spec.b;
            hi = spec.a + 15.0 * spec.b;
            break;
        case Family::Exponential:
            lo = 0.0;
            hi = 50.0 / spec.a;
            break;
        case Family::Uniform:
            lo = spec.a;
            hi = spec.b;
            break;
        default:
            throw std::invalid_argument("support_window: degenerate law");
    }
    if (spec.right_bound) hi = std::min(hi, *spec.right_bound);
    return {lo, hi};
}

// Raw moment by numerical integration of x^k f(x).
inline double moment_by_integration(const rsjd::RandomiserSpec& spec, int k) {
    const auto [lo, hi] = support_window(spec);
    return integrate([&spec, k](double x) { return std::pow(x, k) * rsjd::pdf(spec, x); }, lo, hi,
                     1e-13);
}

struct SmallRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss rule from the moment equations: coefficients of the monic
// orthogonal polynomial from a linear solve, nodes from closed-form root
// formulas, weights from the Vandermonde system. Supports n = 1, 2, 3.
inline SmallRule solve_moment_equations(const std::vector<double>& m, int n) {
    if (n < 1 || n > 3) throw std::invalid_argument("solve_moment_equations: n in 1..3");
    // sum_i c_i m_{k+i} = -m_{k+n}, k = 0..n-1, c_n = 1
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) a[k][i] = m[k + i];
        a[k][n] = -m[k + n];
    }
    for (int col = 0; col < n; ++col) {  // Gaussian elimination, partial pivot
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        for (int r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (int c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
        }
    }
    std::vector<double> coef(n);
    for (int r = n - 1; r >= 0; --r) {
        double acc = a[r][n];
        for (int c = r + 1; c < n; ++c) acc -= a[r][c] * coef[c];
        coef[r] = acc / a[r][r];
    }

    SmallRule rule;
    if (n == 1) {
        rule.nodes = {-coef[0]};
    } else if (n == 2) {
        const double p = coef[1], q = coef[0];
        const double disc = std::sqrt(p * p - 4.0 * q);
        rule.nodes = {0.5 * (-p - disc), 0.5 * (-p + disc)};
    } else {
        // depressed cubic x^3 + px + q via the trigonometric formula
        const double b2 = coef[2], b1 = coef[1], b0 = coef[0];
        const double p = b1 - b2 * b2 / 3.0;
        const double q = 2.0 * b2 * b2 * b2 / 27.0 - b2 * b1 / 3.0 + b0;
        constexpr double kTwoThirdsPi = 2.0943951023931953;
        const double r = 2.0 * std::sqrt(-p / 3.0);
        const double phi = std::acos(std::clamp(3.0 * q / (p * r), -1.0, 1.0)) / 3.0;
        for (int k = 0; k < 3; ++k)
            rule.nodes.push_back(r * std::cos(phi - kTwoThirdsPi * k) - b2 / 3.0);
        std::sort(rule.nodes.begin(), rule.nodes.end());
    }

    // Vandermonde for the weights.
    std::vector<std::vector<double>> v(n, std::vector<double>(n + 1, 0.0));
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) v[k][i] = std::pow(rule.nodes[i], k);
        v[k][n] = m[k];
    }
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(v[r][col]) > std::abs(v[piv][col])) piv = r;
        std::swap(v[col], v[piv]);
        for (int r = col + 1; r < n; ++r) {
            const double f = v[r][col] / v[col][col];
            for (int c = col; c <= n; ++c) v[r][c] -= f * v[col][c];
        }
    }
    rule.weights.assign(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double acc = v[r][n];
        for (int c = r + 1; c < n; ++c) acc -= v[r][c] * rule.weights[c];
        rule.weights[r] = acc / v[r][r];
    }
    return rule;
}

}  // namespace oracles
