#include <doctest.h>

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "rsjd/cos.hpp"
#include "rsjd/math.hpp"
#include "rsjd/processes.hpp"

using namespace rsjd;

namespace {

Component bs_component(double rate, RandomiserSpec randomiser, int order = 7) {
    return Component(DriftRule::merton_risk_neutral(rate), VolRule::identity(), JumpSpec{},
                     std::move(randomiser), order);
}

Component merton_component(double rate, double intensity, double jump_mean, double jump_sd,
                           RandomiserSpec randomiser, int order = 7) {
    return Component(DriftRule::merton_risk_neutral(rate), VolRule::identity(),
                     JumpSpec{intensity, jump_mean, jump_sd}, std::move(randomiser), order);
}

// Composite CF by explicit enumeration over all node combinations --
// algebraically equal to the per-regime product form, computed the other
// way around the distributive law.
std::complex<double> composite_chf_by_combinations(const Schedule& sched, double t, double u) {
    std::vector<int> idx(sched.regimes(), 0);
    std::complex<double> acc = 0.0;
    for (;;) {
        double w = 1.0;
        std::complex<double> ex = 0.0;
        for (std::size_t j = 0; j < sched.regimes(); ++j) {
            const auto& rule = sched.component(j).rule();
            w *= rule.weights[idx[j]];
            ex += -sched.time_shift(j, t) * levy_exponent(sched.component(j), rule.nodes[idx[j]], u);
        }
        acc += w * std::exp(ex);
        std::size_t j = 0;
        for (; j < sched.regimes(); ++j) {
            if (++idx[j] < sched.component(j).rule().order()) break;
            idx[j] = 0;
        }
        if (j == sched.regimes()) break;
    }
    return std::exp(kI * u * sched.x0()) * acc;
}

}  // namespace

TEST_CASE("levy exponent values") {
    const auto comp = bs_component(0.05, RandomiserSpec::point_mass(0.2));
    CHECK(std::abs(levy_exponent(comp, 0.2, 0.0)) == doctest::Approx(0.0).epsilon(1e-15));
    const auto psi = levy_exponent(comp, 0.2, 1.0);
    CHECK(psi.real() == doctest::Approx(0.02).epsilon(1e-14));
    CHECK(psi.imag() == doctest::Approx(-0.03).epsilon(1e-14));

    // the jump part shifts Re psi by -lambda (e^{-u^2 sJ^2/2} - 1) at muJ=0
    const auto jumpy = merton_component(0.05, 1.0, 0.0, 0.1, RandomiserSpec::point_mass(0.2));
    const auto delta = levy_exponent(jumpy, 0.2, 1.0) - levy_exponent(comp, 0.2, 1.0);
    CHECK(delta.real() == doctest::Approx(1.0 - std::exp(-0.005)).epsilon(1e-12));
    CHECK(delta.real() == doctest::Approx(0.0049875).epsilon(1e-4));
    // compensator shifts the drift, hence Im psi
    CHECK(jumpy.jumps().compensator() ==
          doctest::Approx(std::exp(0.005) - 1.0).epsilon(1e-14));
}

TEST_CASE("drift and vol rule variants") {
    const auto affine = Component(DriftRule::affine(0.01, -0.5), VolRule::constant(0.3),
                                  JumpSpec{}, RandomiserSpec::point_mass(0.2), 3);
    CHECK(affine.drift(0.2) == doctest::Approx(0.01 - 0.1).epsilon(1e-15));
    CHECK(affine.vol(0.2) == doctest::Approx(0.3).epsilon(1e-15));
    const auto psi = levy_exponent(affine, 0.2, 1.0);
    CHECK(psi.real() == doctest::Approx(0.5 * 0.09).epsilon(1e-14));
    CHECK(psi.imag() == doctest::Approx(0.09).epsilon(1e-14));

    const auto flat = Component(DriftRule::constant(0.07), VolRule::identity(), JumpSpec{},
                                RandomiserSpec::uniform(0.1, 0.4), 3);
    CHECK(flat.drift(0.33) == doctest::Approx(0.07).epsilon(1e-15));
    CHECK(flat.vol(0.33) == doctest::Approx(0.33).epsilon(1e-15));
}

TEST_CASE("conditional chf closed form") {
    const auto comp = bs_component(0.05, RandomiserSpec::point_mass(0.2));
    CHECK(std::abs(conditional_chf(comp, 0.2, 3.7, 0.0) - 1.0) < 1e-15);
    const auto phi = conditional_chf(comp, 0.2, 1.0, 1.0);
    const auto expected = std::exp(std::complex<double>(-0.02, 0.03));
    CHECK(phi.real() == doctest::Approx(expected.real()).epsilon(1e-14));
    CHECK(phi.imag() == doctest::Approx(expected.imag()).epsilon(1e-14));
    CHECK(phi.real() == doctest::Approx(0.97976).epsilon(1e-5));
    CHECK(phi.imag() == doctest::Approx(0.02940).epsilon(1e-3));
}

TEST_CASE("randomised chf reduces to conditional for point masses") {
    const auto comp = bs_component(0.05, RandomiserSpec::point_mass(0.2));
    for (double u : {0.0, 0.5, 2.0})
        CHECK(std::abs(randomised_chf(comp, 1.0, u) - conditional_chf(comp, 0.2, 1.0, u)) <
              1e-15);
}

TEST_CASE("randomised chf is unity at u = 0") {
    const auto n7 = bs_component(0.05, RandomiserSpec::normal(0.3, 1.0), 7);
    CHECK(std::abs(randomised_chf(n7, 1.0, 0.0) - 1.0) < 1e-14);
}

TEST_CASE("randomised chf converges to the continuum integral") {
    // For theta ~ N(m, s^2) and a randomised BS component, the continuum
    // CF has the closed form e^{iurt} E[e^{-c theta^2}] with
    // c = (u^2 + iu) t / 2 and E[e^{-c theta^2}] =
    // exp(-c m^2 / (1 + 2 c s^2)) / sqrt(1 + 2 c s^2).
    const double m = 0.3, s = 1.0, r = 0.05, t = 1.0;
    auto truth = [&](double u) {
        const std::complex<double> c(0.5 * u * u * t, 0.5 * u * t);
        const std::complex<double> denom = 1.0 + 2.0 * c * s * s;
        return std::exp(kI * u * r * t) * std::exp(-c * m * m / denom) / std::sqrt(denom);
    };
    auto error_at = [&](int order, double u) {
        const auto comp = bs_component(r, RandomiserSpec::normal(m, s), order);
        return std::abs(randomised_chf(comp, t, u) - truth(u));
    };
    // narrow (calm) randomisers are essentially exact at order 7
    {
        const auto calm = bs_component(r, RandomiserSpec::normal(0.15, 0.1), 7);
        const std::complex<double> c(0.5, 0.5);
        const std::complex<double> denom = 1.0 + 2.0 * c * 0.01;
        const auto calm_truth =
            std::exp(kI * 1.0 * r) * std::exp(-c * 0.15 * 0.15 / denom) / std::sqrt(denom);
        CHECK(std::abs(randomised_chf(calm, 1.0, 1.0) - calm_truth) < 1e-10);
    }
    // the wide (excited) randomiser N(0.3, 1) carries real discretisation
    // error that decays with the order
    CHECK(error_at(7, 0.5) < 1e-4);
    CHECK(error_at(7, 1.0) < 2.5e-3);
    CHECK(error_at(9, 0.5) < error_at(7, 0.5));
    CHECK(error_at(9, 1.0) < error_at(7, 1.0));
    CHECK(error_at(7, 1.0) < error_at(5, 1.0));
}

TEST_CASE("conditional density: diffusion case") {
    const auto comp = bs_component(0.05, RandomiserSpec::point_mass(0.2));
    // N(0.03, 0.04) at its mean
    CHECK(conditional_density(comp, 0.2, 1.0, 0.03) ==
          doctest::Approx(1.0 / (0.2 * kSqrtTwoPi)).epsilon(1e-12));
    CHECK(conditional_density(comp, 0.2, 1.0, 0.03) == doctest::Approx(1.99471).epsilon(1e-5));
    const double mass = oracles::integrate(
        [&](double x) { return conditional_density(comp, 0.2, 1.0, x); }, 0.03 - 3.0, 0.03 + 3.0);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    CHECK_THROWS_AS(conditional_density(comp, 0.2, 0.0, 0.0), std::domain_error);
}

TEST_CASE("conditional density: jump series vs cosine inversion of the chf") {
    const auto comp = merton_component(0.05, 1.0, 0.0, 0.1, RandomiserSpec::point_mass(0.2));
    const double t = 1.0;
    const ChfFn chf = [&](double u) { return conditional_chf(comp, 0.2, t, u); };
    const CosDensity inv(chf, cos_range_from_chf(chf, 10.0), 1 << 12);
    for (double x = -0.8; x <= 0.9; x += 0.1)
        CHECK(conditional_density(comp, 0.2, t, x) == doctest::Approx(inv.pdf(x)).epsilon(1e-6));
    const double mass = oracles::integrate(
        [&](double x) { return conditional_density(comp, 0.2, t, x); }, -4.0, 4.0, 1e-11);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("schedule time shifts") {
    const auto calm = bs_component(0.05, RandomiserSpec::normal(0.15, 0.1));
    const auto excited = bs_component(0.05, RandomiserSpec::normal(0.3, 1.0));
    const Schedule sched({calm, excited, calm, excited}, {0.5, 1.0, 1.5}, 0.0);

    for (double t : {0.0, 0.3, 0.5, 0.9, 1.2, 1.7, 2.5}) {
        double total = 0.0;
        for (std::size_t j = 0; j < sched.regimes(); ++j) total += sched.time_shift(j, t);
        CHECK(total == doctest::Approx(t).epsilon(1e-14));
    }
    CHECK(sched.active_regime(0.0) == 0);
    CHECK(sched.active_regime(0.5) == 1);   // half-open [tau_j, tau_{j+1})
    CHECK(sched.active_regime(0.499) == 0);
    CHECK(sched.active_regime(7.0) == 3);

    CHECK_THROWS_AS(Schedule({calm, excited}, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(Schedule({calm}, {0.5}), std::invalid_argument);
}

TEST_CASE("composite chf: identical point-mass regimes concatenate to one law") {
    const auto comp = bs_component(0.05, RandomiserSpec::point_mass(0.2));
    const Schedule sched({comp, comp}, {0.5}, 0.7);
    for (double u : {0.5, 1.0, 3.0}) {
        const auto lhs = composite_chf(sched, 1.0, u);
        const auto rhs = std::exp(kI * u * 0.7) * conditional_chf(comp, 0.2, 1.0, u);
        CHECK(std::abs(lhs - rhs) < 1e-14);
    }
    CHECK(std::abs(composite_chf(sched, 1.0, 0.0) - 1.0) < 1e-15);
}

TEST_CASE("composite chf: before the first switch only regime zero matters") {
    const auto calm = bs_component(0.05, RandomiserSpec::normal(0.15, 0.1));
    const auto excited = bs_component(0.05, RandomiserSpec::normal(0.3, 1.0));
    const Schedule sched({calm, excited}, {0.5}, 0.1);
    for (double u : {0.5, 2.0}) {
        const auto lhs = composite_chf(sched, 0.3, u);
        const auto rhs = std::exp(kI * u * 0.1) * randomised_chf(calm, 0.3, u);
        CHECK(std::abs(lhs - rhs) < 1e-14);
    }
}

TEST_CASE("composite chf: product form equals combination enumeration") {
    const auto calm = bs_component(0.05, RandomiserSpec::normal(0.15, 0.1), 4);
    const auto excited = bs_component(0.05, RandomiserSpec::normal(0.3, 1.0), 4);
    const Schedule sched({calm, excited, calm}, {0.5, 1.0}, 0.0);
    for (double u : {0.25, 1.0, 2.0, 5.0}) {
        for (double t : {0.4, 1.0, 1.5}) {
            const auto a = composite_chf(sched, t, u);
            const auto b = composite_chf_by_combinations(sched, t, u);
            CHECK(std::abs(a - b) < 1e-12);
        }
    }
}

TEST_CASE("composite chf invariants on a u grid") {
    const auto calm = bs_component(0.05, RandomiserSpec::normal(0.15, 0.1));
    const auto excited = merton_component(0.05, 0.7, -0.05, 0.15, RandomiserSpec::normal(0.3, 1.0));
    const Schedule sched({calm, excited}, {0.5}, 0.0);
    for (double u = 0.25; u <= 8.0; u += 0.25) {
        const auto phi = composite_chf(sched, 1.2, u);
        CHECK(std::abs(phi) <= 1.0 + 1e-12);
        CHECK(std::abs(composite_chf(sched, 1.2, -u) - std::conj(phi)) < 1e-13);
    }
}

TEST_CASE("conditional composite law matches direct convolution moments") {
    const auto calm = merton_component(0.05, 0.4, 0.02, 0.1, RandomiserSpec::point_mass(0.15));
    const auto excited = merton_component(0.05, 0.4, 0.02, 0.1, RandomiserSpec::point_mass(0.3));
    const Schedule sched({calm, excited}, {0.5}, 0.2);
    const double thetas[] = {0.15, 0.3};
    const auto law = conditional_composite_law(sched, thetas, 1.25);

    // mean and mass against brute-force integration of the mixture pdf
    const double mass =
        oracles::integrate([&](double x) { return law.pdf(x); }, -4.0, 4.5, 1e-11);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    const double mean =
        oracles::integrate([&](double x) { return x * law.pdf(x); }, -4.0, 4.5, 1e-11);
    const double expected_mean = 0.2 + calm.drift(0.15) * 0.5 + excited.drift(0.3) * 0.75 +
                                 0.4 * 1.25 * 0.02;  // + lambda t E[eta]
    CHECK(mean == doctest::Approx(expected_mean).epsilon(1e-8));
}

TEST_CASE("conditional composite law with regime-specific jump parts") {
    const auto jumpy = merton_component(0.05, 0.5, 0.04, 0.12, RandomiserSpec::point_mass(0.15));
    const auto quiet = bs_component(0.05, RandomiserSpec::point_mass(0.3));
    const Schedule sched({jumpy, quiet}, {0.5}, -0.1);
    const double thetas[] = {0.15, 0.3};
    const auto law = conditional_composite_law(sched, thetas, 1.25);
    const double mass =
        oracles::integrate([&](double x) { return law.pdf(x); }, -4.0, 4.0, 1e-11);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    const double mean =
        oracles::integrate([&](double x) { return x * law.pdf(x); }, -4.0, 4.0, 1e-11);
    // jumps only run in regime 0 for its 0.5 time units
    const double expected =
        -0.1 + jumpy.drift(0.15) * 0.5 + quiet.drift(0.3) * 0.75 + 0.5 * 0.5 * 0.04;
    CHECK(mean == doctest::Approx(expected).epsilon(1e-8));

    // and the chf route agrees: density is the inversion of the product CF
    const ChfFn chf = [&](double u) {
        return std::exp(kI * u * -0.1) * conditional_chf(jumpy, 0.15, 0.5, u) *
               conditional_chf(quiet, 0.3, 0.75, u);
    };
    const CosDensity inv(chf, cos_range_from_chf(chf, 10.0), 1 << 12);
    for (double x = -1.0; x <= 1.0; x += 0.2)
        CHECK(law.pdf(x) == doctest::Approx(inv.pdf(x)).epsilon(1e-6));
}

TEST_CASE("mixture density: single point-mass regime equals the shifted conditional") {
    const auto comp = bs_component(0.05, RandomiserSpec::point_mass(0.2));
    const Schedule sched({comp}, {}, 0.3);
    const MixtureDensity mix(sched, 1.0);
    for (double x = -0.4; x <= 1.0; x += 0.1)
        CHECK(mix(x) == doctest::Approx(conditional_density(comp, 0.2, 1.0, x - 0.3)).epsilon(1e-6));
}

TEST_CASE("mixture density normalises and matches the combination mixture") {
    const auto calm = bs_component(0.05, RandomiserSpec::normal(0.15, 0.1), 5);
    const auto excited = bs_component(0.05, RandomiserSpec::normal(0.3, 1.0), 5);
    const Schedule sched({calm, excited}, {0.5}, 0.0);
    const double t = 1.0;
    const MixtureDensity mix(sched, t);

    const double mass = oracles::integrate([&](double x) { return mix(x); }, mix.range().a,
                                           mix.range().b, 1e-10);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(mix.cdf(mix.range().b) == doctest::Approx(1.0).epsilon(1e-12));

    // direct mixture route: sum over node combinations of the conditional laws
    auto by_combinations = [&](double x) {
        const auto& r0 = sched.component(0).rule();
        const auto& r1 = sched.component(1).rule();
        double acc = 0.0;
        for (int i = 0; i < r0.order(); ++i)
            for (int k = 0; k < r1.order(); ++k) {
                const double thetas[] = {r0.nodes[i], r1.nodes[k]};
                acc += r0.weights[i] * r1.weights[k] *
                       conditional_composite_law(sched, thetas, t).pdf(x);
            }
        return acc;
    };
    for (double x = -1.5; x <= 1.5; x += 0.25)
        CHECK(mix(x) == doctest::Approx(by_combinations(x)).epsilon(1e-6));

    CHECK_THROWS_AS(MixtureDensity(sched, 0.0), std::domain_error);
}
