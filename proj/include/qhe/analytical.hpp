#pragma once

// Closed-form Otto-cycle model with step-function reservoir spectra.
//
// The optical frequency follows omega_a(t) = omega_a0 + A sin(omega_b t + phase)
// with A = delta_omega_a / 2. A reservoir band [omega_r - l/2, omega_r + l/2]
// is visited once per mechanical period: the hot band on the positive lobe of
// the sinusoid, the cold band on the negative lobe. Cold-reservoir quantities
// are obtained from the hot-reservoir geometry by the reflection
// omega -> 2 omega_a0 - omega.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qhe/config.hpp"
#include "qhe/core_model.hpp"

namespace qhe {

struct InteractionWindow
{
    double t_in = 0.0;
    double t_out = 0.0;
    std::optional<double> t_out_prime;  // leaves the band past its far edge
    std::optional<double> t_in_prime;   // re-enters on the way back
    double tau = 0.0;                   // net time inside the band per period
};

struct AnalyticalReport
{
    InteractionWindow window_h;
    InteractionWindow window_c;
    double omega_bar_h = 0.0;  // NaN when the hot window is empty
    double omega_bar_c = 0.0;  // NaN when the cold window is empty
    double delta_omega_bar = 0.0;
    double n_h = 0.0;
    double n_c = 0.0;
    double delta_n = 0.0;
    double e_cyc = 0.0;
    double power = 0.0;
    std::optional<double> eta_eff;  // only for an operating engine (delta_n > 0)
    double eta_max = 0.0;
    double eta_carnot = 0.0;
    double kappa = 0.0;
    double gamma_b_required = 0.0;
    std::optional<double> q_b_required;

    bool operating() const { return delta_n > 0.0; }
};

InteractionWindow interaction_window(ModelParams const& params, DriveSpec const& drive,
                                     ReservoirSpec const& r);

/// Time average of omega_a(t) over the window, overshoot interval excluded.
double average_frequency(ModelParams const& params, DriveSpec const& drive,
                         ReservoirSpec const& r, InteractionWindow const& w);

struct CycleOccupations
{
    double n_h;
    double n_c;
};

/// Steady state of n_h = N_h - (N_h - n_c) e^{-x_h}, n_c = N_c - (N_c - n_h) e^{-x_c}
/// where x = Gamma * tau is the thermalization exponent of each stroke.
CycleOccupations cycle_occupations(double thermal_h, double thermal_c, double x_h, double x_c);

/// Steady-state cycle occupations for step reservoirs with a shared
/// interaction time.
CycleOccupations steady_state_occupations(double omega_bar_h, double omega_bar_c,
                                          ReservoirSpec const& hot, ReservoirSpec const& cold,
                                          double tau);
/// Same with separate hot and cold interaction times.
CycleOccupations steady_state_occupations(double omega_bar_h, double omega_bar_c,
                                          ReservoirSpec const& hot, ReservoirSpec const& cold,
                                          double tau_h, double tau_c);

struct CycleEnergy
{
    double e_cyc;
    double power;
};

CycleEnergy cycle_energy_power(double delta_omega_bar, double delta_n, double omega_b);

struct Efficiencies
{
    double eta_eff;
    double eta_max;
    double eta_carnot;
    double kappa;
};

Efficiencies efficiencies(double omega_bar_h, double omega_bar_c, ModelParams const& params,
                          DriveSpec const& drive, double t_h, double t_c);

struct MechDamping
{
    double gamma_b;
    std::optional<double> q_b;  // empty when no damping is required
};

/// Mechanical damping that dissipates the cycle power when the modulation
/// depth is set by the mechanical amplitude, delta_omega_a = 2 g0 sqrt(n_b).
MechDamping required_mech_damping(double delta_omega_bar, double delta_n, double g0,
                                  double delta_omega_a, double omega_b);

/// Full formula chain for one configuration (step reservoirs). Empty
/// interaction windows give a non-operating report with zero power.
AnalyticalReport analytical_report(SimulationConfig const& cfg);

enum class SweepAxis
{
    OmegaB,
    DeltaOmegaA,
    ReservoirSeparation,
    TemperatureHot,
    Gamma,
};

SweepAxis sweep_axis_from_string(std::string const& name);
std::string to_string(SweepAxis axis);

/// Return `base` with the swept parameter set to `value`.
SimulationConfig with_axis_value(SimulationConfig const& base, SweepAxis axis, double value);

struct SweepRow
{
    double value;
    AnalyticalReport report;
};

std::vector<SweepRow> analytical_sweep(SimulationConfig const& base, SweepAxis axis,
                                       std::vector<double> const& values);

/// Evenly spaced grid of n points on [lo, hi].
std::vector<double> linspace(double lo, double hi, std::size_t n);

/// Grid row with maximal power.
SweepRow const& power_optimum(std::vector<SweepRow> const& rows);

std::vector<std::string> sweep_csv_header(SweepAxis axis);
void write_sweep_csv(std::ostream& os, SweepAxis axis, std::vector<SweepRow> const& rows);

}  // namespace qhe
