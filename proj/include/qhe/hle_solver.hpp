#pragma once

// Quasiclassical optomechanical dynamics with non-Markovian baths:
//
//   d alpha/dt = -i w_a0 alpha + i g0 alpha (beta + beta*) - xi_h - xi_c + mem
//   d beta/dt  = -i w_b beta + i g0 |alpha|^2 - Gamma_b beta
//
// integrated with a Heun predictor-corrector step (Stratonovich sense) after
// factoring out the linear part of each equation over the step.

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "qhe/config.hpp"
#include "qhe/core_model.hpp"
#include "qhe/kernel.hpp"
#include "qhe/noise_gen.hpp"

namespace qhe {

struct SolverState
{
    std::complex<double> alpha;
    std::complex<double> beta;
    std::size_t k = 0;
};

struct Derivative
{
    std::complex<double> dalpha;
    std::complex<double> dbeta;
};

Derivative drift(SolverState const& state, double t, double xi_h, double xi_c,
                 std::complex<double> mem, ModelParams const& params);

/// Everything that is shared by all trajectories of one configuration.
struct SolverContext
{
    SimulationConfig config;
    KernelTable kernel_h;
    KernelTable kernel_c;
    KernelTable kernel;  // hot + cold
    NoiseProcess noise_h;
    NoiseProcess noise_c;
};

SolverContext prepare_solver(SimulationConfig const& cfg);

struct NoiseSeries
{
    std::vector<double> hot;
    std::vector<double> cold;
};

/// Noise of trajectory `index` under `base_seed`; zero series when noise is off.
NoiseSeries draw_noise(SolverContext const& ctx, std::uint64_t base_seed, std::uint64_t index);

/// Called with every recorded state (every record_stride steps).
using StateObserver = std::function<void(SolverState const&)>;

/// Integrate one realization with the given noise. `seed_tag` only labels
/// error messages.
void integrate(SolverContext const& ctx, NoiseSeries const& noise, StateObserver const& observe,
               std::uint64_t seed_tag = 0);

/// Derived seed label of trajectory `index`, as reported in Trajectory::seed.
std::uint64_t trajectory_seed(std::uint64_t base_seed, std::uint64_t index);

/// Full recorded trajectory of realization `index`.
Trajectory simulate_trajectory(SolverContext const& ctx, std::uint64_t base_seed,
                               std::uint64_t index = 0);
Trajectory simulate_trajectory(SimulationConfig const& cfg, std::uint64_t seed);

/// Grid of the recorded samples.
TimeGrid recorded_grid(SimulationConfig const& cfg);

}  // namespace qhe
