#include "rsjd/markov.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rsjd/linalg.hpp"
#include "rsjd/math.hpp"

namespace rsjd {

namespace {
constexpr std::size_t kMaxStates = 21;  // M <= 20
constexpr double kRowSumTol = 1e-12;
}  // namespace

MarkovSpec::MarkovSpec(std::vector<Component> comps, std::vector<std::vector<double>> q,
                       std::vector<double> p)
    : components(std::move(comps)), generator(std::move(q)), initial(std::move(p)) {
    const std::size_t n = components.size();
    if (n == 0 || n > kMaxStates) throw std::invalid_argument("MarkovSpec: bad state count");
    if (generator.size() != n || initial.size() != n)
        throw std::invalid_argument("MarkovSpec: generator/initial size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (generator[i].size() != n)
            throw std::invalid_argument("MarkovSpec: generator must be square");
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && generator[i][j] < 0.0)
                throw std::invalid_argument("MarkovSpec: negative off-diagonal rate");
            row += generator[i][j];
        }
        if (std::abs(row) > kRowSumTol)
            throw std::invalid_argument("MarkovSpec: generator row sums must vanish");
    }
    double mass = 0.0;
    for (double pi : initial) {
        if (pi < 0.0) throw std::invalid_argument("MarkovSpec: negative initial probability");
        mass += pi;
    }
    if (std::abs(mass - 1.0) > kRowSumTol)
        throw std::invalid_argument("MarkovSpec: initial distribution must sum to one");
}

std::complex<double> integrated_exponent(const Component& comp, double u) {
    const auto& rule = comp.rule();
    std::complex<double> acc = 0.0;
    for (int n = 0; n < rule.order(); ++n)
        acc += rule.weights[n] * levy_exponent(comp, rule.nodes[n], u);
    return acc;
}

std::complex<double> chf_averaged_component(const Component& comp, double t, double u) {
    return randomised_chf(comp, t, u);
}

std::complex<double> chf_markov(const MarkovSpec& spec, double t, double u) {
    if (t < 0.0) throw std::domain_error("chf_markov: negative time");
    const std::size_t n = spec.states();
    CMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) m(i, j) = spec.generator[i][j] * t;
        m(i, i) -= integrated_exponent(spec.components[i], u) * t;
    }
    const CMatrix e = expm(std::move(m));
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) acc += spec.initial[i] * e(i, j);
    return acc;
}

}  // namespace rsjd
