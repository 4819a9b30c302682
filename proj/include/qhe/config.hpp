#pragma once

// Configuration document: an INI file with one section per concern.
//
//   [system]          omega_a0 omega_b g0 gamma_b | q_b  n_a0 n_b0 phase_a0 phase_b0
//   [hot_reservoir]   kind omega temperature width coupling
//   [cold_reservoir]  kind omega temperature width coupling
//   [drive]           delta_omega_a phase
//   [grid]            dt n_steps t0
//   [solver]          kernel_eps_tail kernel_method memory_path block_size
//                     noise memory record_stride
//   [ensemble]        trajectories seed workers transient_periods traces
//
// Any key can be overridden from the environment as QHE_<SECTION>_<KEY>,
// e.g. QHE_SYSTEM_OMEGA_B=0.05 or QHE_HOT_RESERVOIR_TEMPERATURE=0.7.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "qhe/core_model.hpp"

namespace qhe {

enum class KernelMethod
{
    Residue,     // closed-form contour evaluation of the sine transform
    Quadrature,  // adaptive oscillatory quadrature
};

enum class MemoryPath
{
    Direct,  // O(W) sum per step
    Fft,     // block FFT convolution
};

struct SolverSettings
{
    double kernel_eps_tail = 1e-6;
    KernelMethod kernel_method = KernelMethod::Residue;
    MemoryPath memory_path = MemoryPath::Fft;
    std::size_t block_size = 0;  // 0 picks a size from the kernel window
    bool noise = true;
    bool memory = true;
    std::size_t record_stride = 1;

    bool operator==(SolverSettings const&) const = default;
};

struct EnsembleSettings
{
    std::size_t trajectories = 100;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    double transient_periods = 2.0;
    std::size_t traces = 0;  // full n_b traces retained for inspection

    bool operator==(EnsembleSettings const&) const = default;
};

struct SimulationConfig
{
    ModelParams system;
    InitialState initial;
    ReservoirSpec hot;
    ReservoirSpec cold;
    DriveSpec drive;
    TimeGrid grid;
    SolverSettings solver;
    EnsembleSettings ensemble;

    bool operator==(SimulationConfig const&) const = default;
};

/// Flat key -> value view ("section.key"), the canonical textual form.
using ConfigEntries = std::map<std::string, std::string>;

/// Keys absent from the document keep their value in `base`.
SimulationConfig parse_config(std::string const& text, SimulationConfig const& base = {});
SimulationConfig load_config(std::filesystem::path const& path, SimulationConfig const& base = {});
std::string to_ini(SimulationConfig const& cfg);
ConfigEntries to_entries(SimulationConfig const& cfg);
SimulationConfig from_entries(ConfigEntries const& entries, SimulationConfig const& base = {});

/// Apply QHE_<SECTION>_<KEY> overrides from the process environment.
SimulationConfig apply_env_overrides(SimulationConfig const& cfg);

/// Set a single "section.key" value; throws ConfigError on unknown keys.
void set_config_value(SimulationConfig& cfg, std::string const& key, std::string const& value);

/// Lorentzian reservoirs and quasiclassical settings of the reference
/// dynamics (mechanical damping off).
SimulationConfig hle_reference_config();
/// Step reservoirs of the reference closed-form model.
SimulationConfig analytical_reference_config();

/// Validate everything in a configuration: model invariants, drive,
/// initial state, ensemble and solver settings.
ValidationReport validate(SimulationConfig const& cfg);

}  // namespace qhe
