#include "rsjd/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rsjd/math.hpp"

namespace rsjd {

namespace {

constexpr double kDegenerateTol = 1e-14;

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// Pascal triangle rows up to n.
std::vector<std::vector<double>> binomials(int n) {
    std::vector<std::vector<double>> c(n + 1);
    for (int k = 0; k <= n; ++k) {
        c[k].assign(k + 1, 1.0);
        for (int i = 1; i < k; ++i) c[k][i] = c[k - 1][i - 1] + c[k - 1][i];
    }
    return c;
}

std::vector<double> normal_moments(double mean, double sd, int upto) {
    // E[Z^i] = (i-1)!! for even i, 0 for odd.
    std::vector<double> z(upto + 1, 0.0);
    z[0] = 1.0;
    for (int i = 2; i <= upto; i += 2) z[i] = z[i - 2] * (i - 1);
    const auto c = binomials(upto);
    std::vector<double> m(upto + 1, 0.0);
    for (int k = 0; k <= upto; ++k) {
        double acc = 0.0, sd_pow = 1.0;
        for (int i = 0; i <= k; ++i) {
            if (z[i] != 0.0) acc += c[k][i] * std::pow(mean, k - i) * sd_pow * z[i];
            sd_pow *= sd;
        }
        m[k] = acc;
    }
    return m;
}

std::vector<double> truncated_normal_moments(double mean, double sd, double bound, int upto) {
    // Standardised integrals I_k = int_{-inf}^{beta} z^k phi(z) dz obey
    // I_k = -beta^{k-1} phi(beta) + (k-1) I_{k-2}.
    const double beta = (bound - mean) / sd;
    const double mass = norm_cdf(beta);
    if (mass < 1e-300)
        throw std::domain_error("truncated normal: truncation removes essentially all mass");
    const double pb = norm_pdf(beta);
    std::vector<double> I(upto + 1);
    I[0] = mass;
    if (upto >= 1) I[1] = -pb;
    for (int k = 2; k <= upto; ++k) I[k] = -std::pow(beta, k - 1) * pb + (k - 1) * I[k - 2];

    const auto c = binomials(upto);
    std::vector<double> m(upto + 1, 0.0);
    for (int k = 0; k <= upto; ++k) {
        double acc = 0.0, sd_pow = 1.0;
        for (int i = 0; i <= k; ++i) {
            acc += c[k][i] * std::pow(mean, k - i) * sd_pow * (I[i] / mass);
            sd_pow *= sd;
        }
        m[k] = acc;
    }
    return m;
}

std::vector<double> exponential_moments(double rate, int upto) {
    std::vector<double> m(upto + 1, 1.0);
    for (int k = 1; k <= upto; ++k) m[k] = m[k - 1] * k / rate;
    return m;
}

std::vector<double> truncated_exponential_moments(double rate, double bound, int upto) {
    // N_k = int_0^b x^k rate e^{-rate x} dx = (k/rate) N_{k-1} - b^k e^{-rate b}.
    const double tail = std::exp(-rate * bound);
    std::vector<double> N(upto + 1);
    N[0] = 1.0 - tail;
    if (N[0] <= 0.0) throw std::domain_error("truncated exponential: empty truncation interval");
    double bpow = 1.0;
    for (int k = 1; k <= upto; ++k) {
        bpow *= bound;
        N[k] = (k / rate) * N[k - 1] - bpow * tail;
    }
    std::vector<double> m(upto + 1);
    for (int k = 0; k <= upto; ++k) m[k] = N[k] / N[0];
    return m;
}

std::vector<double> uniform_moments(double lo, double hi, int upto) {
    std::vector<double> m(upto + 1);
    double lp = lo, hp = hi;
    m[0] = 1.0;
    for (int k = 1; k <= upto; ++k) {
        m[k] = (hp * hi - lp * lo) / ((k + 1) * (hi - lo));
        lp *= lo;
        hp *= hi;
    }
    return m;
}

// Symmetric tridiagonal QL with implicit shifts; d = diagonal, e =
// off-diagonal (e[0..n-2]); z accumulates rotations starting from the
// identity so that column j of z is the eigenvector of eigenvalue d[j].
void tql2(std::vector<double>& d, std::vector<double>& e, std::vector<std::vector<double>>& z) {
    const int n = static_cast<int>(d.size());
    if (n == 1) return;
    e.resize(n, 0.0);
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
            }
            if (m != l) {
                if (++iter > 50) throw std::runtime_error("tql2: no convergence in 50 iterations");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                bool underflow = false;
                for (int i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (int k = 0; k < n; ++k) {
                        f = z[k][i + 1];
                        z[k][i + 1] = s * z[k][i] + c * f;
                        z[k][i] = c * z[k][i] - s * f;
                    }
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

// Partial Cholesky H = R^T R of the (rows+1)-sized Hankel moment matrix:
// the recurrence needs rows 0..rows-1 of R (through column rows), never
// the final pivot, so an exactly-rows-point measure still passes. Returns
// false when a needed pivot loses positivity.
bool cholesky_upper(const std::vector<double>& moments, int rows,
                    std::vector<std::vector<double>>& r) {
    const int cols = rows + 1;
    r.assign(rows, std::vector<double>(cols, 0.0));
    for (int i = 0; i < rows; ++i) {
        for (int j = i; j < cols; ++j) {
            double sum = moments[i + j];
            for (int k = 0; k < i; ++k) sum -= r[k][i] * r[k][j];
            if (i == j) {
                if (sum <= moments[2 * i] * 1e-13) return false;
                r[i][i] = std::sqrt(sum);
            } else {
                r[i][j] = sum / r[i][i];
            }
        }
    }
    return true;
}

QuadratureRule point_rule(double value, int requested) {
    QuadratureRule rule;
    rule.nodes = {value};
    rule.weights = {1.0};
    rule.requested = requested;
    return rule;
}

// Golub-Welsch on an already centred/normalised moment sequence.
bool gw_normalised(const std::vector<double>& m, int order, QuadratureRule& out) {
    std::vector<std::vector<double>> r;
    if (!cholesky_upper(m, order, r)) return false;

    std::vector<double> alpha(order), beta(order > 1 ? order - 1 : 0);
    for (int j = 0; j < order; ++j) {
        alpha[j] = r[j][j + 1] / r[j][j] - (j > 0 ? r[j - 1][j] / r[j - 1][j - 1] : 0.0);
        if (j < order - 1) beta[j] = r[j + 1][j + 1] / r[j][j];
    }

    std::vector<double> d = alpha, e(order, 0.0);
    for (int j = 0; j + 1 < order; ++j) e[j] = beta[j];
    std::vector<std::vector<double>> z(order, std::vector<double>(order, 0.0));
    for (int j = 0; j < order; ++j) z[j][j] = 1.0;
    tql2(d, e, z);

    std::vector<int> idx(order);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int i, int j) { return d[i] < d[j]; });

    out.nodes.resize(order);
    out.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        out.nodes[i] = d[idx[i]];
        out.weights[i] = sqr(z[0][idx[i]]);
    }
    // Guard against rotation-accumulated drift in the weights.
    const double wsum = std::accumulate(out.weights.begin(), out.weights.end(), 0.0);
    for (auto& w : out.weights) w /= wsum;
    return true;
}

}  // namespace

RandomiserSpec RandomiserSpec::normal(double mean, double stddev) {
    require(stddev >= 0.0, "normal randomiser: stddev must be >= 0");
    return {Family::Normal, mean, stddev, std::nullopt};
}

RandomiserSpec RandomiserSpec::exponential(double rate) {
    require(rate > 0.0, "exponential randomiser: rate must be > 0");
    return {Family::Exponential, rate, 0.0, std::nullopt};
}

RandomiserSpec RandomiserSpec::uniform(double lo, double hi) {
    require(lo <= hi, "uniform randomiser: requires lo <= hi");
    return {Family::Uniform, lo, hi, std::nullopt};
}

RandomiserSpec RandomiserSpec::point_mass(double value) {
    return {Family::PointMass, value, 0.0, std::nullopt};
}

RandomiserSpec RandomiserSpec::truncated(double bound) const {
    if (bound <= lower())
        throw std::domain_error("truncation bound must exceed the lower end of the support");
    RandomiserSpec out = *this;
    out.right_bound = bound;
    return out;
}

bool RandomiserSpec::is_degenerate() const {
    switch (family) {
        case Family::PointMass: return true;
        case Family::Normal: return b <= kDegenerateTol;
        case Family::Uniform: return std::abs(b - a) <= kDegenerateTol;
        case Family::Exponential: return false;
    }
    return false;
}

double RandomiserSpec::degenerate_value() const {
    if (family == Family::Uniform) return 0.5 * (a + b);
    return a;
}

double RandomiserSpec::lower() const {
    switch (family) {
        case Family::Normal: return -std::numeric_limits<double>::infinity();
        case Family::Exponential: return 0.0;
        case Family::Uniform: return a;
        case Family::PointMass: return a;
    }
    return 0.0;
}

double RandomiserSpec::upper() const {
    double hi;
    switch (family) {
        case Family::Normal: hi = std::numeric_limits<double>::infinity(); break;
        case Family::Exponential: hi = std::numeric_limits<double>::infinity(); break;
        case Family::Uniform: hi = b; break;
        default: hi = a; break;
    }
    return right_bound ? std::min(hi, *right_bound) : hi;
}

std::string RandomiserSpec::describe() const {
    std::string s;
    switch (family) {
        case Family::Normal: s = "normal(" + std::to_string(a) + ", " + std::to_string(b) + ")"; break;
        case Family::Exponential: s = "exponential(" + std::to_string(a) + ")"; break;
        case Family::Uniform: s = "uniform(" + std::to_string(a) + ", " + std::to_string(b) + ")"; break;
        case Family::PointMass: s = "point-mass(" + std::to_string(a) + ")"; break;
    }
    if (right_bound) s += " | x < " + std::to_string(*right_bound);
    return s;
}

double pdf(const RandomiserSpec& spec, double x) {
    if (spec.right_bound && x >= *spec.right_bound) return 0.0;
    double f;
    switch (spec.family) {
        case RandomiserSpec::Family::Normal:
            f = norm_pdf(x, spec.a, sqr(spec.b));
            break;
        case RandomiserSpec::Family::Exponential:
            f = x < 0.0 ? 0.0 : spec.a * std::exp(-spec.a * x);
            break;
        case RandomiserSpec::Family::Uniform:
            f = (x < spec.a || x > spec.b) ? 0.0 : 1.0 / (spec.b - spec.a);
            break;
        case RandomiserSpec::Family::PointMass:
            throw std::logic_error("pdf: point mass has no density");
        default:
            f = 0.0;
    }
    if (spec.right_bound) {
        RandomiserSpec base = spec;
        base.right_bound.reset();
        f /= cdf(base, *spec.right_bound);
    }
    return f;
}

double cdf(const RandomiserSpec& spec, double x) {
    RandomiserSpec base = spec;
    base.right_bound.reset();
    double F;
    switch (spec.family) {
        case RandomiserSpec::Family::Normal:
            F = norm_cdf((x - spec.a) / spec.b);
            break;
        case RandomiserSpec::Family::Exponential:
            F = x <= 0.0 ? 0.0 : -std::expm1(-spec.a * x);
            break;
        case RandomiserSpec::Family::Uniform:
            F = std::clamp((x - spec.a) / (spec.b - spec.a), 0.0, 1.0);
            break;
        case RandomiserSpec::Family::PointMass:
            F = x >= spec.a ? 1.0 : 0.0;
            break;
        default:
            F = 0.0;
    }
    if (spec.right_bound) F = std::min(F / cdf(base, *spec.right_bound), 1.0);
    return F;
}

double sample(const RandomiserSpec& spec, double u01) {
    double u = u01;
    if (spec.right_bound) {
        RandomiserSpec base = spec;
        base.right_bound.reset();
        u *= cdf(base, *spec.right_bound);
    }
    switch (spec.family) {
        case RandomiserSpec::Family::Normal: return spec.a + spec.b * norm_inv(u);
        case RandomiserSpec::Family::Exponential: return -std::log1p(-u) / spec.a;
        case RandomiserSpec::Family::Uniform: return spec.a + (spec.b - spec.a) * u;
        case RandomiserSpec::Family::PointMass: return spec.a;
    }
    return 0.0;
}

std::vector<double> raw_moments(const RandomiserSpec& spec, int upto, int max_order) {
    require(upto >= 0, "raw_moments: negative order");
    require(upto <= 2 * max_order, "raw_moments: order beyond 2*max_order");
    if (spec.right_bound) {
        const double bound = *spec.right_bound;
        require(bound > 0.0, "raw_moments: truncation bound must be > 0");
        switch (spec.family) {
            case RandomiserSpec::Family::Normal:
                return truncated_normal_moments(spec.a, spec.b, bound, upto);
            case RandomiserSpec::Family::Exponential:
                return truncated_exponential_moments(spec.a, bound, upto);
            case RandomiserSpec::Family::Uniform:
                if (bound >= spec.b) return uniform_moments(spec.a, spec.b, upto);
                require(bound > spec.a, "raw_moments: truncation below uniform support");
                return uniform_moments(spec.a, bound, upto);
            case RandomiserSpec::Family::PointMass: {
                if (spec.a >= bound)
                    throw std::domain_error("raw_moments: truncation removes the point mass");
                break;  // falls through to the untruncated case
            }
        }
    }
    switch (spec.family) {
        case RandomiserSpec::Family::Normal: return normal_moments(spec.a, spec.b, upto);
        case RandomiserSpec::Family::Exponential: return exponential_moments(spec.a, upto);
        case RandomiserSpec::Family::Uniform: return uniform_moments(spec.a, spec.b, upto);
        case RandomiserSpec::Family::PointMass: {
            std::vector<double> m(upto + 1, 1.0);
            for (int k = 1; k <= upto; ++k) m[k] = m[k - 1] * spec.a;
            return m;
        }
    }
    throw std::invalid_argument("raw_moments: unsupported family");
}

double QuadratureRule::max_abs_node() const {
    double m = 0.0;
    for (double n : nodes) m = std::max(m, std::abs(n));
    return m;
}

double QuadratureRule::moment(int k) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * std::pow(nodes[i], k);
    return acc;
}

QuadratureRule golub_welsch(const std::vector<double>& moments, int order, int max_order) {
    require(order >= 1, "golub_welsch: order must be >= 1");
    require(order <= max_order, "golub_welsch: order beyond max_order");
    require(static_cast<int>(moments.size()) >= 2 * order + 1,
            "golub_welsch: need moments m_0..m_2N");
    require(std::abs(moments[0] - 1.0) < 1e-9, "golub_welsch: m_0 must be 1");

    const double mean = moments[1];
    const double var = moments[2] - sqr(mean);
    if (var < -1e-12 * std::max(1.0, sqr(mean)))
        throw std::invalid_argument("golub_welsch: indefinite moment sequence (m_2 < m_1^2)");
    if (var <= kDegenerateTol * std::max(1.0, sqr(mean))) return point_rule(mean, order);
    const double scale = std::sqrt(var);

    // Moments of (X - mean)/scale keep the Hankel matrix well conditioned.
    const int upto = 2 * order;
    const auto c = binomials(upto);
    std::vector<double> m(upto + 1, 0.0);
    double scale_pow = 1.0;
    for (int k = 0; k <= upto; ++k) {
        double acc = 0.0;
        for (int i = 0; i <= k; ++i) acc += c[k][i] * std::pow(-mean, k - i) * moments[i];
        m[k] = acc / scale_pow;
        scale_pow *= scale;
    }

    QuadratureRule rule;
    rule.requested = order;
    int n = order;
    while (n >= 1 && !gw_normalised(m, n, rule)) --n;
    if (n < 1)
        throw std::invalid_argument("golub_welsch: Hankel matrix indefinite already at order 1");
    for (auto& node : rule.nodes) node = mean + scale * node;
    return rule;
}

QuadratureRule quadrature_rule(const RandomiserSpec& spec, int order, int max_order) {
    require(order >= 1 && order <= max_order, "quadrature_rule: order out of range");
    if (spec.is_degenerate()) {
        const double v = spec.degenerate_value();
        if (spec.right_bound && v >= *spec.right_bound)
            throw std::domain_error("quadrature_rule: truncation removes the point mass");
        return point_rule(v, order);
    }
    return golub_welsch(raw_moments(spec, 2 * order, max_order), order, max_order);
}

}  // namespace rsjd
