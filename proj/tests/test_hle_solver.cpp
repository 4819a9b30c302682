#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qhe/hle_solver.hpp"
#include "support.hpp"

using namespace qhe;
using cplx = std::complex<double>;

namespace {

SimulationConfig quiet(std::size_t n_steps, double dt)
{
    auto cfg = test::short_reference(n_steps);
    cfg.grid.dt = dt;
    cfg.solver.noise = false;
    return cfg;
}

SimulationConfig uncoupled(std::size_t n_steps, double dt)
{
    auto cfg = quiet(n_steps, dt);
    cfg.hot.coupling = 0.0;
    cfg.cold.coupling = 0.0;
    return cfg;
}

}  // namespace

TEST_CASE("drift examples")
{
    auto const p = hle_reference_config().system;
    SolverState s{{0.3, -0.4}, {1.5, 0.2}, 0};

    auto free = p;
    free.g0 = 0.0;
    auto d = drift(s, 0.0, 0.0, 0.0, 0.0, free);
    CHECK(d.dalpha == cplx(0.0, -1.0) * s.alpha);

    SolverState dark{{0.0, 0.0}, {1.5, 0.2}, 0};
    auto damped = p;
    damped.gamma_b = 0.01;
    d = drift(dark, 0.0, 0.3, -0.1, 0.0, damped);
    CHECK(d.dbeta == -cplx(0.0, damped.omega_b) * dark.beta - damped.gamma_b * dark.beta);

    // alpha = 1, beta = 2, worked by hand:
    //   dalpha = -i + i 0.012 * 4 = -0.952 i,  dbeta = -i 0.096 + i 0.012 = -0.084 i.
    SolverState ref{{1.0, 0.0}, {2.0, 0.0}, 0};
    d = drift(ref, 0.0, 0.0, 0.0, 0.0, p);
    CHECK(std::abs(d.dalpha - cplx(0.0, -0.952)) <= 1e-14);
    CHECK(std::abs(d.dbeta - cplx(0.0, -0.084)) <= 1e-14);

    d = drift(ref, 0.0, 0.25, 0.5, cplx(0.0, 0.125), p);
    CHECK(std::abs(d.dalpha - cplx(-0.75, -0.827)) <= 1e-14);
}

TEST_CASE("free optical mode rotates exactly")
{
    auto cfg = uncoupled(10001, 0.01);
    cfg.system.g0 = 0.0;
    auto tr = simulate_trajectory(cfg, 1);
    auto const a0 = cfg.initial.alpha();
    double const t = cfg.grid.duration();
    CHECK(t == doctest::Approx(100.0));
    CHECK(std::abs(tr.alpha.back() - a0 * std::polar(1.0, -t)) <= 1e-10);
}

TEST_CASE("mechanics at frozen optical occupation")
{
    double const wb = hle_reference_config().system.omega_b;
    double const period = 2.0 * std::numbers::pi / wb;
    auto const steps = static_cast<std::size_t>(std::round(period / 0.01));
    auto cfg = uncoupled(steps + 1, 0.01);
    auto tr = simulate_trajectory(cfg, 1);
    double const na = cfg.initial.n_a;
    cplx const b0 = cfg.initial.beta();
    double const g0 = cfg.system.g0;
    double worst = 0.0;
    for (std::size_t k = 0; k < tr.beta.size(); k += 97)
    {
        double const t = tr.grid.time(k);
        cplx const rot = std::polar(1.0, -wb * t);
        cplx const exact = rot * b0 + (g0 * na / wb) * (1.0 - rot);
        worst = std::max(worst, std::abs(tr.beta[k] - exact));
        CHECK(std::abs(std::norm(tr.alpha[k]) - na) <= 1e-9);
    }
    CAPTURE(worst);
    CHECK(worst <= 1e-8);
}

TEST_CASE("second order convergence of the deterministic system")
{
    double const horizon = 40.0;
    auto run = [&](double dt) {
        auto const n = static_cast<std::size_t>(std::round(horizon / dt)) + 1;
        auto cfg = quiet(n, dt);
        cfg.initial.n_a = 2.0;
        auto tr = simulate_trajectory(cfg, 1);
        return std::pair{tr.alpha.back(), tr.beta.back()};
    };
    double const dt = 0.05;
    auto const ref = run(dt / 8);
    auto err = [&](double h) {
        auto const [a, b] = run(h);
        return std::abs(a - ref.first) + std::abs(b - ref.second);
    };
    double const e1 = err(dt);
    double const e2 = err(dt / 2);
    CAPTURE(e1);
    CAPTURE(e2);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("constants of motion without couplings")
{
    auto cfg = uncoupled(5001, 0.05);
    cfg.system.g0 = 0.0;
    cfg.solver.noise = true;
    auto tr = simulate_trajectory(cfg, 9);
    for (std::size_t k = 0; k < tr.alpha.size(); ++k)
    {
        CHECK(std::abs(std::norm(tr.alpha[k]) - 0.5) <= 1e-10);
        CHECK(std::abs(std::norm(tr.beta[k]) - 39.0) <= 1e-10);
    }
}

TEST_CASE("initial state is recorded")
{
    auto cfg = test::short_reference(201);
    auto tr = simulate_trajectory(cfg, 3);
    REQUIRE(tr.beta.size() == 201);
    CHECK(std::norm(tr.beta[0]) == doctest::Approx(39.0).epsilon(1e-15));
    CHECK(std::norm(tr.alpha[0]) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(tr.grid.n_steps == 201);
}

TEST_CASE("bath coupling damps the optical mode")
{
    auto cfg = quiet(52361, 0.05);
    cfg.system.g0 = 0.0;
    auto tr = simulate_trajectory(cfg, 1);
    std::size_t const w = 1257;  // ten optical periods
    double prev = INFINITY;
    for (std::size_t start = 0; start + w <= tr.alpha.size(); start += w)
    {
        double avg = 0.0;
        for (std::size_t k = start; k < start + w; ++k)
            avg += std::norm(tr.alpha[k]);
        avg /= static_cast<double>(w);
        CHECK(avg <= prev);
        prev = avg;
    }
    CHECK(std::norm(tr.alpha.back()) < 0.5 * std::norm(tr.alpha.front()));
}

TEST_CASE("trajectories are reproducible from the seed")
{
    auto cfg = test::short_reference(3001);
    auto a = simulate_trajectory(cfg, 11);
    auto b = simulate_trajectory(cfg, 11);
    auto c = simulate_trajectory(cfg, 12);
    CHECK(a.alpha == b.alpha);
    CHECK(a.beta == b.beta);
    CHECK(a.alpha != c.alpha);

    auto ctx = prepare_solver(cfg);
    auto d = simulate_trajectory(ctx, 11, 4);
    auto e = simulate_trajectory(ctx, 11, 4);
    CHECK(d.beta == e.beta);
    CHECK(d.seed == trajectory_seed(11, 4));
}

TEST_CASE("record stride thins the output")
{
    auto cfg = test::short_reference(1001);
    auto full = simulate_trajectory(cfg, 5);
    cfg.solver.record_stride = 10;
    auto thin = simulate_trajectory(cfg, 5);
    REQUIRE(thin.alpha.size() == 101);
    CHECK(thin.grid.dt == doctest::Approx(0.5));
    for (std::size_t k = 0; k < thin.alpha.size(); ++k)
        CHECK(thin.alpha[k] == full.alpha[10 * k]);
}

TEST_CASE("blow-up is reported with the step")
{
    auto cfg = quiet(2001, 0.05);
    cfg.cold.coupling = 1e9;
    try
    {
        simulate_trajectory(cfg, 1);
        FAIL("expected a numeric error");
    }
    catch (NumericError const& e)
    {
        CHECK(std::string(e.what()).find("step") != std::string::npos);
    }
}

TEST_CASE("invalid configurations are rejected")
{
    auto cfg = test::short_reference();
    cfg.hot.omega_center = 0.5;
    CHECK_THROWS_AS(prepare_solver(cfg), ConfigError);
}
