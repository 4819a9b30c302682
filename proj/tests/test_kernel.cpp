#include <doctest.h>

#include <gsl/gsl_sf_expint.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qhe/kernel.hpp"
#include "support.hpp"

using namespace qhe;

namespace {

double j_plain(double w, ReservoirSpec const& r)
{
    double const g2 = r.width * r.width;
    double const d = w * w - r.omega_center * r.omega_center;
    return r.coupling * g2 * w * w * w / (d * d + g2 * w * w);
}

// Composite Simpson on [0, cutoff] plus the asymptotic tail of J ~ g gamma^2 / w.
double kappa_simpson(ReservoirSpec const& r, double t, std::size_t n = 10'000'000,
                     double cutoff = 1000.0)
{
    double const h = cutoff / static_cast<double>(n);
    double sum = j_plain(cutoff, r) * std::sin(cutoff * t);
    for (std::size_t i = 1; i < n; ++i)
    {
        double const w = h * static_cast<double>(i);
        sum += (i % 2 ? 4.0 : 2.0) * j_plain(w, r) * std::sin(w * t);
    }
    double const body = sum * h / 3.0;
    double const tail = r.coupling * r.width * r.width
                        * (std::numbers::pi / 2 - gsl_sf_Si(cutoff * t));
    return body + tail;
}

std::vector<double> random_history(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i)
        h[i] = 2.0 * std::cos(0.97 * 0.05 * static_cast<double>(i)) + 0.3 * g(rng);
    return h;
}

}  // namespace

TEST_CASE("kernel vanishes at zero and is odd")
{
    auto cfg = test::short_reference();
    for (auto m : {KernelMethod::Residue, KernelMethod::Quadrature})
    {
        CHECK(kernel_value(cfg.hot, 0.0, m) == 0.0);
        for (double t : {0.3, 2.0, 17.0})
            CHECK(kernel_value(cfg.hot, -t, m) == -kernel_value(cfg.hot, t, m));
    }
    auto tab = tabulate_kernel(cfg.hot, cfg.grid, 1e-6);
    CHECK(tab.kappa[0] == 0.0);
}

TEST_CASE("kernel matches a high-resolution Simpson oracle")
{
    auto cfg = test::short_reference();
    for (double t : {1.0, 5.0, 20.0})
    {
        double const oracle = kappa_simpson(cfg.hot, t);
        double const v = kernel_value(cfg.hot, t);
        CAPTURE(t);
        CAPTURE(oracle);
        CHECK(test::close_rel(v, oracle, 1e-8));
    }
}

TEST_CASE("quadrature and residue routes agree")
{
    auto cfg = test::short_reference();
    for (auto const& r : {cfg.hot, cfg.cold})
        for (double t : {0.05, 1.0, 7.3, 30.0, 120.0})
        {
            double const a = kernel_value(r, t, KernelMethod::Residue);
            double const b = kernel_value(r, t, KernelMethod::Quadrature);
            CAPTURE(t);
            CHECK(std::abs(a - b) <= 1e-7 * kernel_right_limit(r) + 1e-7 * std::abs(a));
        }
}

TEST_CASE("right limit at the origin")
{
    auto cfg = test::short_reference();
    auto const& r = cfg.hot;
    double const lim = std::numbers::pi * r.coupling * r.width * r.width / 2.0;
    CHECK(kernel_right_limit(r) == doctest::Approx(lim).epsilon(1e-14));
    CHECK(std::abs(kernel_value(r, 1e-7) - lim) < 1e-5 * lim);
    auto tab = tabulate_kernel(r, cfg.grid, 1e-6);
    CHECK(tab.kappa0_plus == kernel_right_limit(r));
    auto both = combine(tab, tabulate_kernel(cfg.cold, cfg.grid, 1e-6));
    CHECK(both.kappa0_plus == doctest::Approx(lim + kernel_right_limit(cfg.cold)).epsilon(1e-15));
}

TEST_CASE("envelope bounds the kernel and sets the window")
{
    auto cfg = hle_reference_config();
    for (auto const& r : {cfg.hot, cfg.cold})
    {
        auto tab = tabulate_kernel(r, cfg.grid, 1e-6);
        double kmax = 0.0;
        for (double k : tab.kappa)
            kmax = std::max(kmax, std::abs(k));
        REQUIRE(tab.window < tab.kappa.size());
        CHECK(tab.kappa.size() >= tab.window + 1);
        double const tw = cfg.grid.dt * static_cast<double>(tab.window);
        for (double t = tw; t < 4.0 * tw; t += 0.37)
            CHECK(std::abs(kernel_value(r, t)) <= 1e-6 * kmax);
        for (double t = 0.05; t < 400.0; t += 0.731)
            CHECK(std::abs(kernel_value(r, t)) <= kernel_envelope(r, t) * (1 + 1e-12));
    }
    auto step = cfg.hot;
    step.kind = ReservoirKind::Step;
    CHECK_THROWS_AS(tabulate_kernel(step, cfg.grid, 1e-6), KindError);
}

TEST_CASE("memory force of trivial histories")
{
    auto cfg = test::short_reference();
    auto tab = combine(tabulate_kernel(cfg.hot, cfg.grid, 1e-6),
                       tabulate_kernel(cfg.cold, cfg.grid, 1e-6));
    std::vector<double> zero(200, 0.0);
    CHECK(memory_force(zero, tab, 199) == std::complex<double>(0.0, 0.0));

    double const c = 1.7;
    for (std::size_t k : {1u, 2u, 7u, 40u})
    {
        std::vector<double> h(k + 1, c);
        double loop = 0.0;
        for (std::size_t j = 0; j <= k; ++j)
        {
            double const w = (j == 0 || j == k) ? 0.5 : 1.0;
            double const kap = (j == k) ? tab.kappa0_plus : tab.kappa[k - j];
            loop += w * kap * c;
        }
        auto const f = memory_force(h, tab, k);
        CHECK(f.real() == 0.0);
        CHECK(std::abs(f.imag() - 2.0 * cfg.grid.dt * loop) <= 1e-12 * std::abs(f.imag()));
    }
}

TEST_CASE("memory force is linear and purely imaginary")
{
    auto cfg = test::short_reference();
    auto tab = combine(tabulate_kernel(cfg.hot, cfg.grid, 1e-6),
                       tabulate_kernel(cfg.cold, cfg.grid, 1e-6));
    std::size_t const k = 3000;
    auto h1 = random_history(k + 1, 1);
    auto h2 = random_history(k + 1, 2);
    double const a = 0.7;
    double const b = -2.3;
    std::vector<double> mix(k + 1);
    for (std::size_t i = 0; i <= k; ++i)
        mix[i] = a * h1[i] + b * h2[i];
    auto const f1 = memory_force(h1, tab, k);
    auto const f2 = memory_force(h2, tab, k);
    auto const fm = memory_force(mix, tab, k);
    CHECK(f1.real() == 0.0);
    CHECK(fm.real() == 0.0);
    CHECK(std::abs(fm - (a * f1 + b * f2)) <= 1e-12 * (std::abs(a * f1) + std::abs(b * f2)));
}

TEST_CASE("FFT block convolution matches the direct sum")
{
    auto cfg = test::short_reference();
    auto full = combine(tabulate_kernel(cfg.hot, cfg.grid, 1e-6),
                        tabulate_kernel(cfg.cold, cfg.grid, 1e-6));
    auto tab = with_window(cfg.hot, full, 700);
    std::size_t const n = 3000;
    auto h = random_history(n, 3);
    for (std::size_t block : {1u, 64u, 100u, 256u, 1024u})
    {
        MemoryConvolver fft(tab, MemoryPath::Fft, block, n);
        MemoryConvolver direct(tab, MemoryPath::Direct, block, n);
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            auto const a = fft.force() + fft.endpoint(h[i]);
            auto const b = direct.force() + direct.endpoint(h[i]);
            auto const ref = memory_force(std::span(h).first(i + 1), tab, i);
            worst = std::max(worst, std::abs(a - b) / std::max(std::abs(ref), 1e-300));
            CHECK(std::abs(b - ref) <= 1e-12 * std::abs(ref) + 1e-300);
            fft.push(h[i]);
            direct.push(h[i]);
        }
        CAPTURE(block);
        CHECK(worst < 1e-10);
    }
    CHECK(MemoryConvolver::default_block_size(22137) == 1024);
    CHECK(MemoryConvolver::default_block_size(10) == 64);
    CHECK(MemoryConvolver::default_block_size(1u << 22) == 4096);
}

TEST_CASE("doubling the window leaves the force unchanged")
{
    auto cfg = hle_reference_config();
    auto tab = combine(tabulate_kernel(cfg.hot, cfg.grid, 1e-6),
                       tabulate_kernel(cfg.cold, cfg.grid, 1e-6));
    auto wide = combine(with_window(cfg.hot, tabulate_kernel(cfg.hot, cfg.grid, 1e-6),
                                    2 * tab.window),
                        with_window(cfg.cold, tabulate_kernel(cfg.cold, cfg.grid, 1e-6),
                                    2 * tab.window));
    REQUIRE(wide.window == 2 * tab.window);
    auto h = random_history(cfg.grid.n_steps, 4);
    for (std::size_t k : {std::size_t{1000}, tab.window + 10, cfg.grid.n_steps - 1})
    {
        auto const a = memory_force(std::span(h).first(k + 1), tab, k);
        auto const b = memory_force(std::span(h).first(k + 1), wide, k);
        CAPTURE(k);
        CHECK(std::abs(a - b) <= 1e-6 * std::abs(b));
    }
}
