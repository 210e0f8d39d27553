#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "rsjd/math.hpp"
#include "rsjd/montecarlo.hpp"
#include "rsjd/rng.hpp"

using namespace rsjd;

namespace {

Component bs_component(double rate, RandomiserSpec randomiser, int order = 7) {
    return Component(DriftRule::merton_risk_neutral(rate), VolRule::identity(), JumpSpec{},
                     std::move(randomiser), order);
}

Schedule fig1_schedule() {
    const auto calm = bs_component(0.05, RandomiserSpec::normal(0.15, 0.1));
    const auto excited = bs_component(0.05, RandomiserSpec::normal(0.3, 1.0));
    return Schedule({calm, excited, calm, excited}, {0.5, 1.0, 1.5}, 0.0);
}

}  // namespace

TEST_CASE("counter rng basics") {
    CounterRng a(42, 0), b(42, 0), c(42, 1);
    CHECK(a.next_bits() == b.next_bits());
    CHECK(a.next_bits() != c.next_bits());
    CounterRng u(7, 3);
    double mean = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double x = u.uniform();
        CHECK(x > 0.0);
        CHECK(x < 1.0);
        mean += x;
    }
    CHECK(mean / 20000 == doctest::Approx(0.5).epsilon(0.02));
    CounterRng pois(9, 1);
    double pm = 0.0;
    for (int i = 0; i < 20000; ++i) pm += pois.poisson(2.5);
    CHECK(pm / 20000 == doctest::Approx(2.5).epsilon(0.03));
}

TEST_CASE("empirical chf basics") {
    const std::vector<double> point{0.7, 0.7, 0.7};
    const std::vector<double> grid{0.0, 1.3};
    const auto phi = empirical_chf(point, grid);
    CHECK(std::abs(phi[0] - 1.0) == 0.0);
    CHECK(std::abs(phi[1] - std::exp(kI * 1.3 * 0.7)) < 1e-15);
}

TEST_CASE("empirical chf of a large normal sample") {
    std::vector<double> z(1000000);
    CounterRng rng(2024, 0);
    for (auto& x : z) x = rng.normal();
    const auto phi = empirical_chf(z, std::vector<double>{1.0});
    CHECK(std::abs(phi[0] - std::exp(-0.5)) < 4e-3);
}

TEST_CASE("composite terminal sampler matches the composite chf") {
    const auto sched = fig1_schedule();
    PathConfig cfg{200000, 11, false, false};
    const auto terminal = simulate_composite_terminal(sched, 2.0, cfg);
    const std::vector<double> grid{0.5, 1.0, 2.0, 5.0};
    const auto emp = empirical_chf(terminal, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(std::abs(emp[i] - composite_chf(sched, 2.0, grid[i])) <
              chf_error_radius(cfg.paths));
}

TEST_CASE("continuum sampling exposes the quadrature error but stays in band at small u") {
    const auto comp = bs_component(0.05, RandomiserSpec::normal(0.3, 1.0));
    PathConfig cfg{400000, 5, false, true};
    const auto terminal = simulate_single_regime_terminal(comp, 0.0, 1.0, cfg);
    const std::vector<double> grid{0.5, 1.0};
    const auto emp = empirical_chf(terminal, grid);
    // quadrature error ~4e-5 at u=0.5 and ~1.8e-3 at u=1 plus CLT noise
    CHECK(std::abs(emp[0] - randomised_chf(comp, 1.0, 0.5)) < chf_error_radius(cfg.paths));
    CHECK(std::abs(emp[1] - randomised_chf(comp, 1.0, 1.0)) <
          chf_error_radius(cfg.paths) + 2e-3);
}

TEST_CASE("common noise with degenerate randomisers collapses all paths") {
    const auto comp = bs_component(0.05, RandomiserSpec::point_mass(0.2));
    const Schedule sched({comp, comp}, {0.5}, 0.0);
    PathConfig cfg{16, 3, true, false};
    const auto set = simulate_composite_paths(sched, 1.0, 0.01, cfg);
    for (std::size_t p = 1; p < cfg.paths; ++p)
        for (std::size_t k = 0; k < set.times.size(); ++k)
            CHECK(set.values[p][k] == set.values[0][k]);
}

TEST_CASE("per-regime quadratic variation tracks theta^2") {
    const auto sched = fig1_schedule();
    const double dt = 1e-3;
    PathConfig cfg{10, 17, true, false};
    const auto set = simulate_composite_paths(sched, 2.0, dt, cfg);
    for (std::size_t p = 0; p < cfg.paths; ++p) {
        for (std::size_t j = 0; j < sched.regimes(); ++j) {
            const double lo = sched.tau(j);
            const double hi = j + 1 < sched.regimes() ? sched.tau(j + 1) : 2.0;
            double qv = 0.0;
            for (std::size_t k = 0; k + 1 < set.times.size(); ++k) {
                if (set.times[k] >= lo && set.times[k + 1] <= hi + 1e-12)
                    qv += sqr(set.values[p][k + 1] - set.values[p][k]);
            }
            const double theta2 = sqr(set.thetas[p][j]);
            const double len = hi - lo;
            const double tol = 3.0 * theta2 * std::sqrt(2.0 * dt * len) + 1e-4;
            CHECK(std::abs(qv - theta2 * len) <= tol);
        }
    }
}

TEST_CASE("identical seed and config give identical output for any thread count") {
    const auto sched = fig1_schedule();
    PathConfig cfg{5000, 77, false, false};
    setenv("RSJD_THREADS", "1", 1);
    const auto a = simulate_composite_terminal(sched, 2.0, cfg);
    setenv("RSJD_THREADS", "4", 1);
    const auto b = simulate_composite_terminal(sched, 2.0, cfg);
    unsetenv("RSJD_THREADS");
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("ks statistic is small for a correctly specified cdf") {
    CounterRng rng(31, 2);
    std::vector<double> z(20000);
    for (auto& x : z) x = rng.normal();
    const double d = ks_statistic(z, [](double x) { return norm_cdf(x); });
    CHECK(d < 1.63 / std::sqrt(20000.0));
}

TEST_CASE("histogram integrates to one") {
    CounterRng rng(5, 0);
    std::vector<double> z(5000);
    for (auto& x : z) x = rng.normal();
    const auto h = empirical_density(z, 64);
    double mass = 0.0;
    const double w = (h.hi - h.lo) / h.density.size();
    for (double d : h.density) mass += d * w;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(h.pdf(0.0) == doctest::Approx(norm_pdf(0.0)).epsilon(0.2));
}

TEST_CASE("driver checks pass on a jump-bearing two-switch schedule") {
    const JumpSpec jumps{0.8, 0.0, 0.1};
    const auto calm = Component(DriftRule::merton_risk_neutral(0.05), VolRule::identity(), jumps,
                                RandomiserSpec::normal(0.15, 0.1), 7);
    const auto excited = Component(DriftRule::merton_risk_neutral(0.05), VolRule::identity(),
                                   jumps, RandomiserSpec::normal(0.3, 1.0), 7);
    const Schedule sched({calm, excited, calm}, {0.5, 1.0}, 0.0);
    const auto report = driver_checks(sched, 1.5, 30000, 12345);
    CHECK(report.bm_var_ok());
    CHECK(report.bm_cov_ok());
    CHECK(report.poisson_ok());
    CHECK(report.independence_ok());
    CHECK(report.var_time == doctest::Approx(1.5));
    CHECK(report.cov_time == doctest::Approx(0.75));
}

TEST_CASE("driver checks: no jumps means clean Poisson slot") {
    const auto sched = fig1_schedule();
    const auto report = driver_checks(sched, 2.0, 5000, 99);
    CHECK(report.poisson_p == 1.0);
    CHECK(report.cross_corr == 0.0);
    CHECK(report.bm_var_ok());
}
