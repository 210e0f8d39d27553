#pragma once

#include <optional>
#include <string>
#include <vector>

namespace rsjd {

inline constexpr int kDefaultMaxOrder = 10;

/// A scalar distribution used either as a parameter randomiser or as a
/// sojourn-time law. Parameter slots by family:
///   normal(a = mean, b = stddev), exponential(a = rate),
///   uniform(a, b), point_mass(a = value).
/// `right_bound`, when set, right-truncates the law at that point; the
/// density becomes f(x)/F(right_bound) on (lower, right_bound).
struct RandomiserSpec {
    enum class Family { Normal, Exponential, Uniform, PointMass };

    Family family = Family::PointMass;
    double a = 0.0;
    double b = 0.0;
    std::optional<double> right_bound;

    static RandomiserSpec normal(double mean, double stddev);
    static RandomiserSpec exponential(double rate);
    static RandomiserSpec uniform(double lo, double hi);
    static RandomiserSpec point_mass(double value);

    /// Copy of this spec right-truncated at `bound`.
    RandomiserSpec truncated(double bound) const;

    /// True when the law carries no dispersion (point mass, zero-width
    /// normal or uniform).
    bool is_degenerate() const;

    /// Location of the whole mass for a degenerate spec.
    double degenerate_value() const;

    double lower() const;  // infimum of the support
    double upper() const;  // supremum of the support (right_bound if set)

    std::string describe() const;
};

double pdf(const RandomiserSpec& spec, double x);
double cdf(const RandomiserSpec& spec, double x);

/// Inverse-cdf sample from the (possibly truncated) law, u01 in (0,1).
double sample(const RandomiserSpec& spec, double u01);

/// Raw moments m_0..m_upto, closed form per family; truncated normal via
/// the phi-recursion, truncated exponential via the incomplete-gamma
/// recursion. m_0 is always 1.
std::vector<double> raw_moments(const RandomiserSpec& spec, int upto,
                                int max_order = kDefaultMaxOrder);

/// Gauss quadrature pairs (w_i, theta_i), nodes ascending, weights > 0,
/// sum(w) = 1. `requested` records the order asked for; nodes.size() can
/// be smaller when the Hankel moment matrix loses positive definiteness.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    int requested = 0;

    int order() const { return static_cast<int>(nodes.size()); }
    bool degraded() const { return order() < requested; }
    double max_abs_node() const;

    /// sum_i w_i * nodes_i^k
    double moment(int k) const;
};

/// Golub-Welsch from raw moments m_0..m_2N: Cholesky of the (centred,
/// scale-normalised) Hankel matrix, three-term recurrence, symmetric
/// tridiagonal QL with implicit shifts. Falls back to the largest order
/// whose Hankel matrix stays positive definite.
QuadratureRule golub_welsch(const std::vector<double>& moments, int order,
                            int max_order = kDefaultMaxOrder);

/// Rule for a distribution spec; degenerate specs short-circuit to a
/// single-node rule.
QuadratureRule quadrature_rule(const RandomiserSpec& spec, int order,
                               int max_order = kDefaultMaxOrder);

}  // namespace rsjd
