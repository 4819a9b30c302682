#pragma once

// Figures of merit from ensemble statistics: growth and saturation fits,
// extracted power, per-cycle occupation swing, efficiency and Fano factor.

#include <optional>
#include <span>
#include <vector>

#include "qhe/config.hpp"
#include "qhe/core_model.hpp"
#include "qhe/ensemble.hpp"

namespace qhe {

struct LineFit
{
    double slope = 0.0;
    double intercept = 0.0;
    double power = 0.0;  // omega_b * slope
    std::size_t points = 0;
};

/// Least-squares line through (t, y).
LineFit fit_line(std::span<double const> t, std::span<double const> y);

/// Linear fit of mean_n_b for t > transient; needs at least five mechanical
/// periods past the transient.
LineFit fit_linear_growth(EnsembleStats const& stats, double transient, double omega_b);

struct SaturationFit
{
    double n_ss = 0.0;
    double rate = 0.0;
    double n0 = 0.0;        // model value at t = 0
    double residual_rms = 0.0;
};

/// Fit n(t) = n_ss - (n_ss - n0) exp(-rate t). Throws NumericError when the
/// optimum runs to the edge of the rate search range (e.g. a linear ramp).
SaturationFit fit_exponential_saturation(std::span<double const> t, std::span<double const> y);
SaturationFit fit_exponential_saturation(EnsembleStats const& stats, double transient);

struct ExtractedPower
{
    double n_b_coherent = 0.0;
    double power = 0.0;
    bool operating = false;  // false when the coherent occupation is negative
};

ExtractedPower extracted_power(double n_ss, ModelParams const& params, ReservoirSpec const& hot,
                               ReservoirSpec const& cold);

struct CycleExtrema
{
    double delta_n_cycle = 0.0;
    std::vector<double> window_start;
    std::vector<double> maxima;
    std::vector<double> minima;
};

/// Extrema of `y` in consecutive windows of length 2pi/omega_b starting at
/// `transient`. Needs at least five complete windows.
CycleExtrema cycle_extrema(TimeGrid const& grid, std::span<double const> y, double omega_b,
                           double transient);
CycleExtrema cycle_extrema(EnsembleStats const& stats, double omega_b, double transient);

/// eta = power (2pi/omega_b) / (omega_h delta_n_cycle).
double efficiency_estimate(double power, double delta_n_cycle, ReservoirSpec const& hot,
                           double omega_b);

/// Unbiased sample variance over sample mean.
double fano_factor(std::span<double const> samples);

struct Histogram
{
    std::vector<double> edges;  // bins + 1
    std::vector<std::size_t> counts;
};

/// Equal-width histogram; bins = 0 picks round(sqrt(N)).
Histogram histogram(std::span<double const> samples, std::size_t bins = 0);

/// Angular frequency of the largest non-DC periodogram bin of the
/// mean-removed series, and the bin spacing.
struct PeakFrequency
{
    double omega = 0.0;
    double bin = 0.0;
};
PeakFrequency dominant_frequency(std::span<double const> y, double dt);

/// Lag (in time units, in [0, max_lag]) at which y(t + lag) best correlates
/// with x(t), after removing the means.
double correlation_lag(std::span<double const> x, std::span<double const> y, double dt,
                       double max_lag);

struct PerformanceReport
{
    std::optional<LineFit> growth;          // undamped mechanical mode
    std::optional<SaturationFit> saturation; // damped mechanical mode
    double n_b_thermal = 0.0;
    std::optional<double> n_b_coherent;
    std::optional<double> power_extracted;
    bool operating = false;
    double delta_n_cycle = 0.0;
    std::optional<double> eta;
    std::optional<double> fano;
    double transient = 0.0;
};

/// Evaluate every figure of merit that applies to the configuration.
PerformanceReport analyze(EnsembleStats const& stats, SimulationConfig const& cfg);

}  // namespace qhe
