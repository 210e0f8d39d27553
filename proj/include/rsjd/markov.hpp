#pragma once

#include <complex>
#include <vector>

#include "rsjd/processes.hpp"

namespace rsjd {

/// Markov-modulated randomised model: a finite chain with generator Q and
/// initial distribution p switches between randomised Levy components.
struct MarkovSpec {
    std::vector<Component> components;           // one per state
    std::vector<std::vector<double>> generator;  // Q, row sums zero
    std::vector<double> initial;                 // p, sums to one

    MarkovSpec(std::vector<Component> comps, std::vector<std::vector<double>> q,
               std::vector<double> p);

    std::size_t states() const { return components.size(); }
};

/// Integrated characteristic exponent Psi_j(u) = sum_n w_n psi(u; theta_n);
/// quadrature form of the randomiser integral of the Levy exponent.
std::complex<double> integrated_exponent(const Component& comp, double u);

/// Randomiser-averaged CF of the same component, sum_n w_n e^{-t psi};
/// differs from exp(-t Psi) for non-degenerate randomisers and is exposed
/// for diagnostics only.
std::complex<double> chf_averaged_component(const Component& comp, double t, double u);

/// phi(u; X(t)) = p . exp((Q - A(u)) t) . 1 with A = diag(Psi_j(u)).
std::complex<double> chf_markov(const MarkovSpec& spec, double t, double u);

}  // namespace rsjd
