#include "qhe/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace qhe {

double gamma_from_quality(double omega_b, double q_b)
{
    if (!(q_b > 0.0))
        throw ConfigError("quality factor must be positive, got " + std::to_string(q_b));
    return omega_b / (2.0 * q_b);
}

std::optional<double> quality_from_gamma(double omega_b, double gamma_b)
{
    if (!(gamma_b > 0.0))
        return std::nullopt;
    return omega_b / (2.0 * gamma_b);
}

std::string to_string(ReservoirKind kind)
{
    return kind == ReservoirKind::Step ? "step" : "lorentzian";
}

ReservoirKind reservoir_kind_from_string(std::string const& name)
{
    std::string lower = name;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "step")
        return ReservoirKind::Step;
    if (lower == "lorentzian")
        return ReservoirKind::Lorentzian;
    throw ConfigError("unknown reservoir kind '" + name + "' (expected step|lorentzian)");
}

std::complex<double> InitialState::alpha() const
{
    return std::polar(std::sqrt(n_a), phase_a);
}

std::complex<double> InitialState::beta() const
{
    return std::polar(std::sqrt(n_b), phase_b);
}

bool ValidationReport::has_violations() const
{
    return std::any_of(issues.begin(), issues.end(),
                       [](auto const& i) { return i.severity == Severity::Violation; });
}

bool ValidationReport::contains(std::string const& code) const
{
    return std::any_of(issues.begin(), issues.end(),
                       [&](auto const& i) { return i.code == code; });
}

std::string ValidationReport::to_string() const
{
    std::ostringstream os;
    for (auto const& i : issues)
    {
        os << (i.severity == Severity::Violation ? "violation" : "warning") << ": "
           << i.code << ": " << i.message << '\n';
    }
    return os.str();
}

namespace {

void violation(ValidationReport& r, std::string code, std::string msg)
{
    r.issues.push_back({Severity::Violation, std::move(code), std::move(msg)});
}

void check_reservoir(ReservoirSpec const& r, std::string const& label, ValidationReport& rep)
{
    if (!(r.omega_center > 0.0))
        violation(rep, "reservoir frequency", label + " center frequency must be > 0");
    if (!(r.temperature > 0.0))
        violation(rep, "reservoir temperature", label + " temperature must be > 0");
    if (!(r.width > 0.0))
        violation(rep, "reservoir width", label + " width must be > 0");
    if (!(r.coupling >= 0.0))
        violation(rep, "reservoir coupling", label + " coupling must be >= 0");
}

}  // namespace

ValidationReport validate_config(ModelParams const& params,
                                 ReservoirSpec const& hot,
                                 ReservoirSpec const& cold,
                                 TimeGrid const& grid,
                                 double excursion)
{
    ValidationReport rep;
    if (!(params.omega_a0 > 0.0))
        violation(rep, "omega_a0", "bare optical frequency must be > 0");
    if (!(params.omega_b > 0.0))
        violation(rep, "omega_b", "mechanical frequency must be > 0");
    if (!(params.g0 >= 0.0))
        violation(rep, "g0", "optomechanical coupling must be >= 0");
    if (!(params.gamma_b >= 0.0))
        violation(rep, "gamma_b", "mechanical damping must be >= 0");

    check_reservoir(hot, "hot reservoir", rep);
    check_reservoir(cold, "cold reservoir", rep);
    if (hot.kind != cold.kind)
        violation(rep, "reservoir kind", "hot and cold reservoirs must be of the same kind");

    if (!(cold.omega_center < params.omega_a0 && params.omega_a0 < hot.omega_center))
        violation(rep, "reservoir ordering", "require omega_c < omega_a0 < omega_h");

    if (!(grid.dt > 0.0))
        violation(rep, "dt", "time step must be > 0");
    if (grid.n_steps < 2)
        violation(rep, "n_steps", "grid needs at least two points");

    if (grid.dt > 0.0)
    {
        double const fastest = std::max({params.omega_a0 + std::abs(excursion),
                                         hot.omega_center, cold.omega_center});
        double const bound = 2.0 * std::numbers::pi / (20.0 * fastest);
        if (grid.dt > bound)
        {
            rep.issues.push_back({Severity::Warning, "time step under-resolves optical period",
                                  "dt = " + std::to_string(grid.dt) + " exceeds "
                                      + std::to_string(bound)});
        }
    }
    return rep;
}

void validate_drive(DriveSpec const& drive, ValidationReport& report)
{
    if (!(drive.delta_omega_a >= 0.0))
        violation(report, "delta_omega_a", "modulation amplitude must be >= 0");
}

void validate_initial(InitialState const& init, ValidationReport& report)
{
    if (!(init.n_a >= 0.0) || !(init.n_b >= 0.0))
        violation(report, "initial occupation", "initial occupations must be >= 0");
}

}  // namespace qhe
