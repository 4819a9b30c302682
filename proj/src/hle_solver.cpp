#include "qhe/hle_solver.hpp"

#include <cmath>
#include <string>

#include "qhe/rng.hpp"
#include "qhe/spectra.hpp"

namespace qhe {

using cplx = std::complex<double>;

Derivative drift(SolverState const& s, double /*t*/, double xi_h, double xi_c, cplx mem,
                 ModelParams const& p)
{
    constexpr cplx i(0.0, 1.0);
    double const x = 2.0 * s.beta.real();  // beta + beta*
    Derivative d;
    d.dalpha = -i * p.omega_a0 * s.alpha + i * p.g0 * x * s.alpha - xi_h - xi_c + mem;
    d.dbeta = -i * p.omega_b * s.beta + i * p.g0 * std::norm(s.alpha) - p.gamma_b * s.beta;
    return d;
}

SolverContext prepare_solver(SimulationConfig const& cfg)
{
    auto report = validate(cfg);
    if (report.has_violations())
        throw ConfigError("invalid configuration:\n" + report.to_string());
    require_lorentzian(cfg.hot, "simulation");
    require_lorentzian(cfg.cold, "simulation");

    SolverContext ctx;
    ctx.config = cfg;
    auto const& s = cfg.solver;
    ctx.kernel_h = tabulate_kernel(cfg.hot, cfg.grid, s.kernel_eps_tail, s.kernel_method);
    ctx.kernel_c = tabulate_kernel(cfg.cold, cfg.grid, s.kernel_eps_tail, s.kernel_method);
    ctx.kernel = combine(ctx.kernel_h, ctx.kernel_c);
    ctx.noise_h = build_filter(cfg.hot, cfg.grid);
    ctx.noise_c = build_filter(cfg.cold, cfg.grid);
    return ctx;
}

NoiseSeries draw_noise(SolverContext const& ctx, std::uint64_t base_seed, std::uint64_t index)
{
    NoiseSeries n;
    std::size_t const len = ctx.config.grid.n_steps;
    if (!ctx.config.solver.noise)
    {
        n.hot.assign(len, 0.0);
        n.cold.assign(len, 0.0);
        return n;
    }
    auto rng_h = make_stream(base_seed, index, NoiseStream::Hot);
    auto rng_c = make_stream(base_seed, index, NoiseStream::Cold);
    n.hot = sample_noise(ctx.noise_h, rng_h);
    n.cold = sample_noise(ctx.noise_c, rng_c);
    return n;
}

void integrate(SolverContext const& ctx, NoiseSeries const& noise, StateObserver const& observe,
               std::uint64_t seed_tag)
{
    auto const& cfg = ctx.config;
    auto const& p = cfg.system;
    TimeGrid const& grid = cfg.grid;
    std::size_t const n = grid.n_steps;
    if (noise.hot.size() < n || noise.cold.size() < n)
        throw DomainError("integrate: noise series shorter than the grid");
    double const dt = grid.dt;
    std::size_t const stride = cfg.solver.record_stride;
    bool const use_memory = cfg.solver.memory;

    MemoryConvolver conv(ctx.kernel, cfg.solver.memory_path, cfg.solver.block_size, n);
    SolverState s{cfg.initial.alpha(), cfg.initial.beta(), 0};
    // Heun with integrating factors: within each step alpha is taken in the
    // frame rotating at its instantaneous frequency w_a0 - g0 (beta + beta*)
    // at t_k, beta in the frame of its linear part (w_b, Gamma_b).
    constexpr cplx i(0.0, 1.0);
    cplx const lin_b(p.gamma_b, p.omega_b);
    cplx const rot_b = std::exp(lin_b * dt);
    cplx mem = 0.0;
    observe(s);
    for (std::size_t k = 0; k + 1 < n; ++k)
    {
        double const t = grid.time(k);
        Derivative const f0 = drift(s, t, noise.hot[k], noise.cold[k], mem, p);
        double const w_a = p.omega_a0 - 2.0 * p.g0 * s.beta.real();
        cplx const rot_a = std::polar(1.0, w_a * dt);
        cplx const ga0 = f0.dalpha + i * w_a * s.alpha;
        cplx const gb0 = f0.dbeta + lin_b * s.beta;
        SolverState pred{(s.alpha + dt * ga0) / rot_a, (s.beta + dt * gb0) / rot_b, k + 1};

        cplx history = 0.0;
        if (use_memory)
        {
            conv.push(2.0 * s.alpha.real());
            history = conv.force();
        }
        cplx const mem_pred =
            use_memory ? history + conv.endpoint(2.0 * pred.alpha.real()) : cplx(0.0);
        Derivative const f1 =
            drift(pred, t + dt, noise.hot[k + 1], noise.cold[k + 1], mem_pred, p);
        cplx const ga1 = rot_a * (f1.dalpha + i * w_a * pred.alpha);
        cplx const gb1 = rot_b * (f1.dbeta + lin_b * pred.beta);
        s.alpha = (s.alpha + 0.5 * dt * (ga0 + ga1)) / rot_a;
        s.beta = (s.beta + 0.5 * dt * (gb0 + gb1)) / rot_b;
        s.k = k + 1;
        mem = use_memory ? history + conv.endpoint(2.0 * s.alpha.real()) : cplx(0.0);

        if (!std::isfinite(s.alpha.real()) || !std::isfinite(s.alpha.imag())
            || !std::isfinite(s.beta.real()) || !std::isfinite(s.beta.imag()))
            throw NumericError("non-finite state at step " + std::to_string(s.k) + " (t = "
                               + std::to_string(grid.time(s.k)) + ", trajectory seed "
                               + std::to_string(seed_tag) + ")");
        if (s.k % stride == 0)
            observe(s);
    }
}

std::uint64_t trajectory_seed(std::uint64_t base_seed, std::uint64_t index)
{
    // Label only; the streams themselves come from make_stream.
    return base_seed ^ (index * 0x9E3779B97F4A7C15ull);
}

TimeGrid recorded_grid(SimulationConfig const& cfg)
{
    std::size_t const stride = cfg.solver.record_stride;
    TimeGrid g = cfg.grid;
    g.dt = cfg.grid.dt * static_cast<double>(stride);
    g.n_steps = (cfg.grid.n_steps - 1) / stride + 1;
    return g;
}

Trajectory simulate_trajectory(SolverContext const& ctx, std::uint64_t base_seed,
                               std::uint64_t index)
{
    Trajectory traj;
    traj.grid = recorded_grid(ctx.config);
    traj.seed = trajectory_seed(base_seed, index);
    traj.alpha.reserve(traj.grid.n_steps);
    traj.beta.reserve(traj.grid.n_steps);
    auto noise = draw_noise(ctx, base_seed, index);
    integrate(
        ctx, noise,
        [&](SolverState const& s) {
            traj.alpha.push_back(s.alpha);
            traj.beta.push_back(s.beta);
        },
        traj.seed);
    return traj;
}

Trajectory simulate_trajectory(SimulationConfig const& cfg, std::uint64_t seed)
{
    return simulate_trajectory(prepare_solver(cfg), seed, 0);
}

}  // namespace qhe
