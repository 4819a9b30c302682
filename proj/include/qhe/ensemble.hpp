#pragma once

// Parallel trajectory ensembles with streaming time-resolved statistics.
//
// Trajectory i of an ensemble uses the noise streams derived from
// (base_seed, i). Per-trajectory results are folded into the statistics in
// index order, so the output does not depend on the worker count.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "qhe/config.hpp"
#include "qhe/core_model.hpp"

namespace qhe {

struct EnsembleStats
{
    TimeGrid grid;                    // recorded grid
    std::vector<double> mean_n_a;
    std::vector<double> mean_n_b;
    std::vector<double> var_n_b;      // unbiased; 0 for a single trajectory
    std::vector<double> terminal_n_b; // one entry per trajectory, index order
    std::vector<std::vector<double>> traces;  // n_b(t) of the first few trajectories
    std::size_t n_trajectories = 0;
    std::uint64_t base_seed = 0;
    std::uint64_t first_index = 0;
    std::uint64_t steps_integrated = 0;

    // Sum of squared deviations of n_b, kept for merging.
    std::vector<double> m2_n_b;
};

struct EnsembleOptions
{
    std::size_t n_trajectories = 1;
    std::uint64_t base_seed = 1;
    std::size_t workers = 1;
    std::uint64_t first_index = 0;
    std::size_t traces = 0;
    /// Optional progress callback (completed, total); called from the
    /// merging thread.
    std::function<void(std::size_t, std::size_t)> progress;
};

EnsembleStats run_ensemble(SimulationConfig const& cfg, EnsembleOptions const& options);
/// Uses cfg.ensemble for trajectories, seed, workers and traces.
EnsembleStats run_ensemble(SimulationConfig const& cfg);

/// Combine statistics of two disjoint ensembles with the same base seed and
/// grid; `a` must hold the lower trajectory indices.
EnsembleStats merge(EnsembleStats const& a, EnsembleStats const& b);

/// Standard error of mean_n_b at the last recorded time.
double terminal_standard_error(EnsembleStats const& stats);

void write_ensemble_csv(std::ostream& os, EnsembleStats const& stats);
void write_terminal_csv(std::ostream& os, EnsembleStats const& stats);
void write_traces_csv(std::ostream& os, EnsembleStats const& stats);

/// Read back the time series and terminal samples written above.
EnsembleStats read_ensemble_csv(std::istream& series, std::istream& terminal);

}  // namespace qhe
