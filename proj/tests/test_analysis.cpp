#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qhe/analysis.hpp"
#include "qhe/spectra.hpp"
#include "support.hpp"

using namespace qhe;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

EnsembleStats synthetic(double dt, std::size_t n, auto&& n_b, auto&& n_a)
{
    EnsembleStats s;
    s.grid = {dt, n, 0.0};
    s.n_trajectories = 1;
    for (std::size_t k = 0; k < n; ++k)
    {
        double const t = s.grid.time(k);
        s.mean_n_b.push_back(n_b(t));
        s.mean_n_a.push_back(n_a(t));
    }
    s.var_n_b.assign(n, 0.0);
    s.m2_n_b.assign(n, 0.0);
    return s;
}

}  // namespace

TEST_CASE("linear growth fit")
{
    double const wb = 0.048;
    auto s = synthetic(0.5, 20001, [](double t) { return 3.0 + 0.01 * t; }, [](double) { return 1.0; });
    auto f = fit_linear_growth(s, 100.0, wb);
    CHECK(f.slope == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(f.power == doctest::Approx(0.01 * wb).epsilon(1e-12));

    auto flat = synthetic(0.5, 20001, [](double) { return 39.0; }, [](double) { return 1.0; });
    auto g = fit_linear_growth(flat, 100.0, wb);
    CHECK(std::abs(g.slope) < 1e-15);
    CHECK(std::abs(g.power) < 1e-15);

    // Horizon 10000 leaves fewer than five periods (5 * 131) past t = 9500.
    CHECK_THROWS_AS(fit_linear_growth(s, 9500.0, wb), DomainError);

    std::vector<double> t{1.0, 1.0, 1.0};
    std::vector<double> y{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(fit_line(t, y), DegenerateInputError);
}

TEST_CASE("exponential saturation fit")
{
    std::vector<double> t;
    std::vector<double> y;
    for (double x = 0.0; x <= 10000.0; x += 2.0)
    {
        t.push_back(x);
        y.push_back(50.0 - 11.0 * std::exp(-0.001 * x));
    }
    auto f = fit_exponential_saturation(t, y);
    CHECK(f.n_ss == doctest::Approx(50.0).epsilon(1e-6));
    CHECK(f.rate == doctest::Approx(0.001).epsilon(1e-6));
    CHECK(f.n0 == doctest::Approx(39.0).epsilon(1e-6));
    CHECK(f.residual_rms < 1e-8);

    std::mt19937_64 rng(8);
    std::normal_distribution<double> noise(0.0, 1.0);
    auto noisy = y;
    for (double& v : noisy)
        v *= 1.0 + 0.01 * noise(rng);
    auto g = fit_exponential_saturation(t, noisy);
    CHECK(std::abs(g.n_ss - 50.0) <= 0.02 * 50.0);

    std::vector<double> ramp;
    for (double x : t)
        ramp.push_back(39.0 + 0.001 * x);
    CHECK_THROWS_AS(fit_exponential_saturation(t, ramp), NumericError);
}

TEST_CASE("extracted power")
{
    auto cfg = hle_reference_config();
    cfg.system.gamma_b = gamma_from_quality(cfg.system.omega_b, 1125.0);
    double const nth = weighted_mech_thermal_occupation(cfg.system, cfg.hot, cfg.cold);

    auto zero = extracted_power(nth, cfg.system, cfg.hot, cfg.cold);
    CHECK(zero.n_b_coherent == 0.0);
    CHECK(zero.power == 0.0);

    auto a = extracted_power(60.0, cfg.system, cfg.hot, cfg.cold);
    CHECK(a.operating);
    CHECK(a.n_b_coherent == doctest::Approx(60.0 - nth).epsilon(1e-14));
    CHECK(a.power == doctest::Approx(cfg.system.gamma_b * (60.0 - nth) * cfg.system.omega_b)
                         .epsilon(1e-14));
    auto doubled = cfg.system;
    doubled.gamma_b *= 2.0;
    CHECK(extracted_power(60.0, doubled, cfg.hot, cfg.cold).power == 2.0 * a.power);

    auto below = extracted_power(0.5 * nth, cfg.system, cfg.hot, cfg.cold);
    CHECK_FALSE(below.operating);
    CHECK(below.n_b_coherent < 0.0);

    cfg.system.gamma_b = 0.0;
    CHECK_THROWS_AS(extracted_power(60.0, cfg.system, cfg.hot, cfg.cold), DomainError);
}

TEST_CASE("cycle extrema of a sinusoid")
{
    double const wb = 0.048;
    double const dt = 0.05;
    auto s = synthetic(dt, 60001, [](double) { return 39.0; },
                       [&](double t) { return 2.0 + std::sin(wb * t); });
    auto e = cycle_extrema(s, wb, 0.0);
    CHECK(e.maxima.size() >= 5);
    CHECK(e.maxima.size() == e.minima.size());
    CHECK(e.window_start.size() == e.maxima.size());
    double const tol = 2.0 * (1.0 - std::cos(std::numbers::pi * dt * wb / two_pi));
    CHECK(std::abs(e.delta_n_cycle - 2.0) <= tol + 1e-12);

    auto flat = synthetic(dt, 60001, [](double) { return 39.0; }, [](double) { return 0.3; });
    CHECK(cycle_extrema(flat, wb, 0.0).delta_n_cycle == 0.0);
    CHECK_THROWS_AS(cycle_extrema(s, wb, 2500.0), DomainError);
}

TEST_CASE("efficiency estimate")
{
    auto hot = hle_reference_config().hot;
    double const wb = 0.048;
    CHECK(efficiency_estimate(0.0, 0.1, hot, wb) == 0.0);
    double const dn = 0.07;
    double const p = hot.omega_center * dn * wb / two_pi;
    CHECK(efficiency_estimate(p, dn, hot, wb) == doctest::Approx(1.0).epsilon(1e-14));
    double const e1 = efficiency_estimate(3e-5, 0.02, hot, wb);
    for (double c : {0.1, 3.0, 17.0})
        CHECK(efficiency_estimate(c * 3e-5, c * 0.02, hot, wb) == doctest::Approx(e1).epsilon(1e-14));
    CHECK_THROWS_AS(efficiency_estimate(1e-5, 0.0, hot, wb), DegenerateInputError);
}

TEST_CASE("Fano factor")
{
    std::vector<double> constant(50, 4.2);
    CHECK(fano_factor(constant) == 0.0);

    std::mt19937_64 rng(99);
    std::poisson_distribution<int> poisson(12.0);
    std::vector<double> counts(100000);
    for (double& c : counts)
        c = poisson(rng);
    double const f = fano_factor(counts);
    CHECK(std::abs(f - 1.0) <= 0.02);

    for (double c : {0.5, 3.0, 40.0})
    {
        auto scaled = counts;
        for (double& v : scaled)
            v *= c;
        CHECK(fano_factor(scaled) == doctest::Approx(c * f).epsilon(1e-12));
    }

    CHECK_THROWS_AS(fano_factor(std::vector<double>{1.0}), DomainError);
    CHECK_THROWS_AS(fano_factor(std::vector<double>{-1.0, 1.0}), DomainError);
}

TEST_CASE("histogram")
{
    std::vector<double> x;
    for (int i = 0; i < 100; ++i)
        x.push_back(0.01 * i);
    auto h = histogram(x);
    CHECK(h.counts.size() == 10);
    CHECK(h.edges.size() == 11);
    std::size_t total = 0;
    for (auto c : h.counts)
        total += c;
    CHECK(total == 100);
    CHECK(h.edges.front() == 0.0);
    CHECK(h.edges.back() == doctest::Approx(0.99));
    CHECK(histogram(x, 4).counts.size() == 4);
    CHECK_THROWS_AS(histogram(std::vector<double>{}), DomainError);
}

TEST_CASE("dominant frequency and correlation lag")
{
    double const dt = 0.5;
    double const w = 0.048;
    std::vector<double> y;
    double const lag = 20.0;
    for (std::size_t k = 0; k < 40000; ++k)
        y.push_back(std::cos(w * (dt * static_cast<double>(k) - lag)));
    auto pk = dominant_frequency(y, dt);
    CHECK(std::abs(pk.omega - w) <= pk.bin);
    CHECK(pk.bin == doctest::Approx(two_pi / (40000 * dt)));

    std::vector<double> xs(y.size());
    for (std::size_t k = 0; k < y.size(); ++k)
        xs[k] = std::cos(w * dt * static_cast<double>(k));
    double const found = correlation_lag(xs, y, dt, two_pi / w);
    CHECK(std::abs(found - lag) <= dt);
}

TEST_CASE("report on a short reference ensemble")
{
    auto cfg = hle_reference_config();
    EnsembleOptions o;
    o.n_trajectories = 4;
    auto stats = run_ensemble(cfg, o);
    auto rep = analyze(stats, cfg);
    REQUIRE(rep.growth.has_value());
    CHECK_FALSE(rep.saturation.has_value());
    CHECK(rep.n_b_thermal == doctest::Approx(6.1).epsilon(0.02));
    CHECK(rep.delta_n_cycle > 0.0);
    REQUIRE(rep.fano.has_value());
    CHECK(*rep.fano >= 0.0);
    CHECK(rep.transient == doctest::Approx(2.0 * two_pi / 0.048));
}
