#pragma once

// Shared parameter types, unit conventions and configuration validation.
//
// Units: hbar = k_B = 1 and the bare optical frequency omega_a0 is the
// frequency unit. Energies are in hbar*omega_a0, powers in hbar*omega_a0^2
// and times in 1/omega_a0. Configuration values are multiples of omega_a0.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qhe {

//---------------------------------------------------------------------------//
// Error types
//---------------------------------------------------------------------------//

/// Invalid or inconsistent configuration (bad key, wrong reservoir kind, ...).
class ConfigError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

/// A reservoir of the wrong kind was passed to an operation.
class KindError : public ConfigError
{
  public:
    using ConfigError::ConfigError;
};

/// Argument outside the mathematical domain of a formula.
class DomainError : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

/// Inputs for which a formula is indeterminate (0/0 and friends).
class DegenerateInputError : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

/// Numerical failure: blow-up, non-convergence.
class NumericError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//---------------------------------------------------------------------------//
// Domain types
//---------------------------------------------------------------------------//

struct ModelParams
{
    double omega_a0 = 1.0;   // bare optical frequency (unit)
    double omega_b = 0.048;  // mechanical frequency
    double g0 = 0.012;       // optomechanical coupling
    double gamma_b = 0.0;    // excess mechanical damping (amplitude rate)

    bool operator==(ModelParams const&) const = default;
};

/// Mechanical damping rate for a quality factor, Q_b = omega_b / (2 Gamma_b).
double gamma_from_quality(double omega_b, double q_b);
/// Quality factor of a damping rate; empty for an undamped mode.
std::optional<double> quality_from_gamma(double omega_b, double gamma_b);

enum class ReservoirKind
{
    Step,
    Lorentzian
};

std::string to_string(ReservoirKind kind);
ReservoirKind reservoir_kind_from_string(std::string const& name);

/// One heat bath.
///
/// For a Step reservoir `width` is the full band width l and `coupling` the
/// thermalization rate Gamma. For a Lorentzian reservoir `width` is the
/// line-width gamma and `coupling` the dimensionless scale g.
struct ReservoirSpec
{
    ReservoirKind kind = ReservoirKind::Lorentzian;
    double omega_center = 1.0;
    double temperature = 0.1;
    double width = 0.03;
    double coupling = 0.0;

    bool operator==(ReservoirSpec const&) const = default;
};

/// Prescribed sinusoidal modulation of the optical frequency used by the
/// closed-form model: omega_a(t) = omega_a0 + (delta_omega_a/2) sin(omega_b t).
struct DriveSpec
{
    double delta_omega_a = 0.0;  // peak-to-peak
    double phase = 0.0;

    bool operator==(DriveSpec const&) const = default;
};

struct TimeGrid
{
    double dt = 0.05;
    std::size_t n_steps = 2;
    double t0 = 0.0;

    double time(std::size_t k) const { return t0 + dt * static_cast<double>(k); }
    double duration() const { return dt * static_cast<double>(n_steps - 1); }

    bool operator==(TimeGrid const&) const = default;
};

/// Coherent initial state of both modes.
struct InitialState
{
    double n_a = 0.5;
    double n_b = 39.0;
    double phase_a = 0.0;
    double phase_b = 0.0;

    std::complex<double> alpha() const;
    std::complex<double> beta() const;

    bool operator==(InitialState const&) const = default;
};

/// Complex amplitudes of one noise realization on a time grid.
struct Trajectory
{
    TimeGrid grid;
    std::vector<std::complex<double>> alpha;
    std::vector<std::complex<double>> beta;
    std::uint64_t seed = 0;
};

//---------------------------------------------------------------------------//
// Validation
//---------------------------------------------------------------------------//

enum class Severity
{
    Warning,
    Violation
};

struct ValidationIssue
{
    Severity severity;
    std::string code;     // short stable identifier, e.g. "reservoir ordering"
    std::string message;  // human readable detail
};

struct ValidationReport
{
    std::vector<ValidationIssue> issues;

    bool empty() const { return issues.empty(); }
    bool has_violations() const;
    bool contains(std::string const& code) const;
    std::string to_string() const;
};

/// Check every type invariant plus the operating ordering
/// omega_c < omega_a0 < omega_h. `excursion` is the largest expected
/// deviation of the optical frequency from omega_a0 and only tightens the
/// time-step resolution warning.
ValidationReport validate_config(ModelParams const& params,
                                 ReservoirSpec const& hot,
                                 ReservoirSpec const& cold,
                                 TimeGrid const& grid,
                                 double excursion = 0.0);

void validate_drive(DriveSpec const& drive, ValidationReport& report);
void validate_initial(InitialState const& init, ValidationReport& report);

}  // namespace qhe
