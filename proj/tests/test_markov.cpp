#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "oracles.hpp"
#include "rsjd/linalg.hpp"
#include "rsjd/markov.hpp"
#include "rsjd/math.hpp"
#include "rsjd/montecarlo.hpp"

using namespace rsjd;

namespace {

Component bs_component(double rate, RandomiserSpec randomiser, int order = 7) {
    return Component(DriftRule::merton_risk_neutral(rate), VolRule::identity(), JumpSpec{},
                     std::move(randomiser), order);
}

Component calm() { return bs_component(0.05, RandomiserSpec::normal(0.15, 0.1)); }
Component excited() { return bs_component(0.05, RandomiserSpec::normal(0.3, 1.0)); }

// random valid generator + initial distribution, reproducible
std::pair<std::vector<std::vector<double>>, std::vector<double>> random_chain(std::size_t states,
                                                                              unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> rate(0.1, 3.0);
    std::vector<std::vector<double>> q(states, std::vector<double>(states, 0.0));
    for (std::size_t i = 0; i < states; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < states; ++j) {
            if (i == j) continue;
            q[i][j] = rate(gen);
            row += q[i][j];
        }
        q[i][i] = -row;
    }
    std::vector<double> p(states);
    double total = 0.0;
    for (auto& v : p) {
        v = rate(gen);
        total += v;
    }
    for (auto& v : p) v /= total;
    return {q, p};
}

}  // namespace

TEST_CASE("complex expm: identity, nilpotent, series") {
    CMatrix zero(3);
    const auto e0 = expm(zero);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(std::abs(e0(i, j) - (i == j ? 1.0 : 0.0)) < 1e-15);

    CMatrix nil(2);
    nil(0, 1) = 1.0;
    const auto en = expm(nil);
    CHECK(std::abs(en(0, 0) - 1.0) < 1e-14);
    CHECK(std::abs(en(0, 1) - 1.0) < 1e-14);
    CHECK(std::abs(en(1, 0)) < 1e-14);
    CHECK(std::abs(en(1, 1) - 1.0) < 1e-14);

    // random complex matrix vs plain Taylor series
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> d(-0.8, 0.8);
    CMatrix a(4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) a(i, j) = {d(gen), d(gen)};
    CMatrix series = CMatrix::identity(4);
    CMatrix term = CMatrix::identity(4);
    for (int k = 1; k <= 40; ++k) {
        term = term * a;
        term *= 1.0 / k;
        series += term;
    }
    const auto ea = expm(a);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(ea(i, j) - series(i, j)) < 1e-12);

    // scaling branch: multiply norms beyond theta_13
    CMatrix big = a;
    big *= 20.0;
    CMatrix series_big = CMatrix::identity(4);
    CMatrix term_big = CMatrix::identity(4);
    for (int k = 1; k <= 300; ++k) {
        term_big = term_big * big;
        term_big *= 1.0 / k;
        series_big += term_big;
    }
    const auto ebig = expm(big);
    double scale = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) scale = std::max(scale, std::abs(series_big(i, j)));
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(std::abs(ebig(i, j) - series_big(i, j)) / scale < 1e-11);
}

TEST_CASE("markov spec validation") {
    auto [q, p] = random_chain(3, 1);
    CHECK_NOTHROW(MarkovSpec({calm(), excited(), calm()}, q, p));
    auto bad_q = q;
    bad_q[0][1] = -0.2;
    CHECK_THROWS_AS(MarkovSpec({calm(), excited(), calm()}, bad_q, p), std::invalid_argument);
    auto broken_rows = q;
    broken_rows[1][1] += 0.4;
    CHECK_THROWS_AS(MarkovSpec({calm(), excited(), calm()}, broken_rows, p),
                    std::invalid_argument);
    auto bad_p = p;
    bad_p[0] += 0.3;
    CHECK_THROWS_AS(MarkovSpec({calm(), excited(), calm()}, q, bad_p), std::invalid_argument);
}

TEST_CASE("integrated exponent: quadrature equals the continuum integral (quadratic psi)") {
    const auto comp = excited();
    CHECK(std::abs(integrated_exponent(comp, 0.0)) < 1e-14);

    const auto pm = bs_component(0.05, RandomiserSpec::point_mass(0.2));
    CHECK(std::abs(integrated_exponent(pm, 1.3) - levy_exponent(pm, 0.2, 1.3)) < 1e-15);

    // psi(u; theta) is quadratic in theta, so any order >= 2 is exact and
    // matches adaptive integration of the continuum integral
    const auto n7 = bs_component(0.05, RandomiserSpec::normal(0.3, 1.0), 7);
    const auto n9 = bs_component(0.05, RandomiserSpec::normal(0.3, 1.0), 9);
    for (double u : {1.0, 2.0}) {
        CHECK(std::abs(integrated_exponent(n7, u) - integrated_exponent(n9, u)) < 1e-12);
        const double re = oracles::integrate(
            [&](double th) {
                return pdf(n7.randomiser(), th) * levy_exponent(n7, th, u).real();
            },
            0.3 - 14.0, 0.3 + 14.0, 1e-12);
        const double im = oracles::integrate(
            [&](double th) {
                return pdf(n7.randomiser(), th) * levy_exponent(n7, th, u).imag();
            },
            0.3 - 14.0, 0.3 + 14.0, 1e-12);
        CHECK(integrated_exponent(n7, u).real() == doctest::Approx(re).epsilon(1e-9));
        CHECK(integrated_exponent(n7, u).imag() == doctest::Approx(im).epsilon(1e-9));
    }
}

TEST_CASE("exponent averaging differs from chf averaging for wide randomisers") {
    // exp(-t Psi) vs sum_n w_n exp(-t psi_n): equal only for degenerate
    // randomisers; the diagnostic exposes both sides of that gap
    const auto wide = excited();
    const double t = 1.0, u = 1.0;
    const auto exponent_avg = std::exp(-t * integrated_exponent(wide, u));
    const auto chf_avg = chf_averaged_component(wide, t, u);
    CHECK(std::abs(chf_avg - randomised_chf(wide, t, u)) < 1e-15);
    CHECK(std::abs(exponent_avg - chf_avg) > 0.05);  // a real modelling gap

    const auto pm = bs_component(0.05, RandomiserSpec::point_mass(0.2));
    CHECK(std::abs(std::exp(-t * integrated_exponent(pm, u)) -
                   chf_averaged_component(pm, t, u)) < 1e-15);
}

TEST_CASE("chf_markov: u = 0 gives exactly one for random chains") {
    for (unsigned seed : {2u, 3u, 4u}) {
        for (std::size_t states : {2u, 4u, 6u}) {
            auto [q, p] = random_chain(states, seed);
            std::vector<Component> comps;
            for (std::size_t j = 0; j < states; ++j)
                comps.push_back(j % 2 == 0 ? calm() : excited());
            const MarkovSpec spec(comps, q, p);
            CHECK(std::abs(chf_markov(spec, 1.3, 0.0) - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("chf_markov: zero generator diagonalises") {
    const std::vector<std::vector<double>> q{{0.0, 0.0}, {0.0, 0.0}};
    for (int state : {0, 1}) {
        std::vector<double> p(2, 0.0);
        p[state] = 1.0;
        const MarkovSpec spec({calm(), excited()}, q, p);
        for (double u : {0.5, 1.0, 2.0}) {
            const auto expected =
                std::exp(-1.2 * integrated_exponent(state == 0 ? calm() : excited(), u));
            CHECK(std::abs(chf_markov(spec, 1.2, u) - expected) < 1e-12);
        }
    }
}

TEST_CASE("chf_markov: identical point-mass states commute with any generator") {
    const auto pm = bs_component(0.05, RandomiserSpec::point_mass(0.2));
    auto [q, p] = random_chain(3, 11);
    const MarkovSpec spec({pm, pm, pm}, q, p);
    for (double u : {0.5, 1.0, 3.0}) {
        const auto expected = conditional_chf(pm, 0.2, 0.8, u);
        CHECK(std::abs(chf_markov(spec, 0.8, u) - expected) < 1e-10);
    }
}

TEST_CASE("chf_markov invariants on a grid") {
    auto [q, p] = random_chain(2, 21);
    const MarkovSpec spec({calm(), excited()}, q, p);
    for (double u = 0.5; u <= 6.0; u += 0.5) {
        const auto phi = chf_markov(spec, 1.0, u);
        CHECK(std::abs(phi) <= 1.0 + 1e-12);
        CHECK(std::abs(chf_markov(spec, 1.0, -u) - std::conj(phi)) < 1e-12);
    }
}

TEST_CASE("fast symmetric switching approaches the exponent average") {
    for (double u : {1.0, 2.0}) {
        const auto mean_exponent =
            0.5 * (integrated_exponent(calm(), u) + integrated_exponent(excited(), u));
        const auto limit = std::exp(-1.0 * mean_exponent);
        double prev = 1e9;
        for (double rate : {1.0, 10.0, 100.0}) {
            const std::vector<std::vector<double>> q{{-rate, rate}, {rate, -rate}};
            const MarkovSpec spec({calm(), excited()}, q, {1.0, 0.0});
            const double err = std::abs(chf_markov(spec, 1.0, u) - limit);
            CHECK(err < prev);
            prev = err;
        }
        CHECK(prev < 5e-3);
    }
}

TEST_CASE("markov chf matches the chain simulation oracle") {
    const std::vector<std::vector<double>> q{{-2.0, 2.0}, {2.0, -2.0}};
    const MarkovSpec spec({calm(), excited()}, q, {1.0, 0.0});
    PathConfig cfg{200000, 13, false, false};
    const auto terminal = simulate_markov_terminal(spec, 1.0, cfg);
    const std::vector<double> grid{0.5, 1.0, 2.0, 5.0};
    const auto emp = empirical_chf(terminal, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(std::abs(emp[i] - chf_markov(spec, 1.0, grid[i])) < chf_error_radius(cfg.paths));
}
