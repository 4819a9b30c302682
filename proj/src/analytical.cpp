#include "qhe/analytical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "qhe/csv.hpp"
#include "qhe/spectra.hpp"

namespace qhe {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

// Crossing times of the positive lobe of A sin(theta) with the band
// [lower, upper], measured relative to omega_a0, as phases theta.
struct LobeCrossings
{
    double in;
    double out;
    std::optional<double> out_prime;
    std::optional<double> in_prime;
};

LobeCrossings positive_lobe_crossings(double amplitude, double lower, double upper)
{
    if (!(amplitude > 0.0) || amplitude < lower)
        return {pi / 2, pi / 2, std::nullopt, std::nullopt};
    double const a = std::asin(std::clamp(lower / amplitude, 0.0, 1.0));
    LobeCrossings c{a, pi - a, std::nullopt, std::nullopt};
    if (amplitude > upper)
    {
        double const b = std::asin(std::clamp(upper / amplitude, 0.0, 1.0));
        c.out_prime = b;
        c.in_prime = pi - b;
    }
    return c;
}

}  // namespace

InteractionWindow interaction_window(ModelParams const& params, DriveSpec const& drive,
                                     ReservoirSpec const& r)
{
    require_step(r, "interaction_window");
    double const amplitude = drive.delta_omega_a / 2.0;
    bool const hot_side = r.omega_center >= params.omega_a0;
    // Reflect a cold band onto the hot side; its lobe is half a period later.
    double const center = hot_side ? r.omega_center : 2.0 * params.omega_a0 - r.omega_center;
    double const lower = center - r.width / 2.0 - params.omega_a0;
    double const upper = center + r.width / 2.0 - params.omega_a0;
    LobeCrossings const c = positive_lobe_crossings(amplitude, lower, upper);

    double const shift = hot_side ? 0.0 : pi;
    auto to_time = [&](double theta) { return (theta + shift - drive.phase) / params.omega_b; };

    InteractionWindow w;
    w.t_in = to_time(c.in);
    w.t_out = to_time(c.out);
    double phase_span = c.out - c.in;
    if (c.out_prime)
    {
        w.t_out_prime = to_time(*c.out_prime);
        w.t_in_prime = to_time(*c.in_prime);
        phase_span -= *c.in_prime - *c.out_prime;
    }
    w.tau = std::max(0.0, phase_span) / params.omega_b;
    return w;
}

double average_frequency(ModelParams const& params, DriveSpec const& drive,
                         ReservoirSpec const& r, InteractionWindow const& w)
{
    require_step(r, "average_frequency");
    if (!(w.tau > 0.0))
        throw DegenerateInputError("average_frequency: empty interaction window, average undefined");
    double const amplitude = drive.delta_omega_a / 2.0;
    // Integral of omega_a0 + A sin(omega_b t + phase) over [t1, t2].
    auto integral = [&](double t1, double t2) {
        return params.omega_a0 * (t2 - t1)
               + amplitude / params.omega_b
                     * (std::cos(params.omega_b * t1 + drive.phase)
                        - std::cos(params.omega_b * t2 + drive.phase));
    };
    double total = integral(w.t_in, w.t_out);
    if (w.t_out_prime && w.t_in_prime)
        total -= integral(*w.t_out_prime, *w.t_in_prime);
    return total / w.tau;
}

CycleOccupations cycle_occupations(double thermal_h, double thermal_c, double x_h, double x_c)
{
    if (!(x_h >= 0.0) || !(x_c >= 0.0))
        throw DomainError("cycle_occupations: thermalization exponents must be >= 0");
    if (x_h == 0.0 && x_c == 0.0)
        throw DegenerateInputError("cycle_occupations: no reservoir exchange (Gamma tau = 0 for both)");
    double const gain_h = -std::expm1(-x_h);  // 1 - e^{-x_h}
    double const gain_c = -std::expm1(-x_c);
    double const keep_h = std::exp(-x_h);
    double const keep_c = std::exp(-x_c);
    double const denom = -std::expm1(-(x_h + x_c));
    return {(thermal_h * gain_h + thermal_c * gain_c * keep_h) / denom,
            (thermal_c * gain_c + thermal_h * gain_h * keep_c) / denom};
}

CycleOccupations steady_state_occupations(double omega_bar_h, double omega_bar_c,
                                          ReservoirSpec const& hot, ReservoirSpec const& cold,
                                          double tau)
{
    return steady_state_occupations(omega_bar_h, omega_bar_c, hot, cold, tau, tau);
}

CycleOccupations steady_state_occupations(double omega_bar_h, double omega_bar_c,
                                          ReservoirSpec const& hot, ReservoirSpec const& cold,
                                          double tau_h, double tau_c)
{
    require_step(hot, "steady_state_occupations");
    require_step(cold, "steady_state_occupations");
    if (!(tau_h >= 0.0) || !(tau_c >= 0.0))
        throw DomainError("steady_state_occupations: interaction time must be >= 0");
    double const x_h = hot.coupling * tau_h;
    double const x_c = cold.coupling * tau_c;
    // An absent stroke contributes nothing; its thermal occupation is irrelevant
    // and may be undefined (empty window).
    double const thermal_h = x_h > 0.0 ? bose_einstein(omega_bar_h, hot.temperature) : 0.0;
    double const thermal_c = x_c > 0.0 ? bose_einstein(omega_bar_c, cold.temperature) : 0.0;
    return cycle_occupations(thermal_h, thermal_c, x_h, x_c);
}

CycleEnergy cycle_energy_power(double delta_omega_bar, double delta_n, double omega_b)
{
    double const e = delta_omega_bar * delta_n;
    return {e, omega_b / (2.0 * pi) * e};
}

Efficiencies efficiencies(double omega_bar_h, double omega_bar_c, ModelParams const& params,
                          DriveSpec const& drive, double t_h, double t_c)
{
    if (!(omega_bar_h > 0.0))
        throw DomainError("efficiencies: omega_bar_h must be > 0");
    double const half = drive.delta_omega_a / 2.0;
    if (!(half < params.omega_a0))
        throw DomainError("efficiencies: delta_omega_a >= 2 omega_a0, compression ratio undefined");
    Efficiencies e{};
    e.eta_eff = 1.0 - omega_bar_c / omega_bar_h;
    e.kappa = (params.omega_a0 + half) / (params.omega_a0 - half);
    e.eta_max = 1.0 - 1.0 / e.kappa;
    e.eta_carnot = 1.0 - t_c / t_h;
    return e;
}

MechDamping required_mech_damping(double delta_omega_bar, double delta_n, double g0,
                                  double delta_omega_a, double omega_b)
{
    if (!(delta_omega_a > 0.0))
        throw DomainError("required_mech_damping: delta_omega_a must be > 0");
    double const gamma =
        2.0 * delta_omega_bar * delta_n * g0 * g0 / (pi * delta_omega_a * delta_omega_a);
    return {gamma, quality_from_gamma(omega_b, gamma)};
}

AnalyticalReport analytical_report(SimulationConfig const& cfg)
{
    ModelParams const& p = cfg.system;
    require_step(cfg.hot, "analytical_report");
    require_step(cfg.cold, "analytical_report");

    AnalyticalReport rep;
    rep.window_h = interaction_window(p, cfg.drive, cfg.hot);
    rep.window_c = interaction_window(p, cfg.drive, cfg.cold);
    bool const hot_open = rep.window_h.tau > 0.0;
    bool const cold_open = rep.window_c.tau > 0.0;
    rep.omega_bar_h = hot_open ? average_frequency(p, cfg.drive, cfg.hot, rep.window_h) : nan;
    rep.omega_bar_c = cold_open ? average_frequency(p, cfg.drive, cfg.cold, rep.window_c) : nan;
    rep.delta_omega_bar = rep.omega_bar_h - rep.omega_bar_c;

    double const x_h = cfg.hot.coupling * rep.window_h.tau;
    double const x_c = cfg.cold.coupling * rep.window_c.tau;
    if (x_h > 0.0 || x_c > 0.0)
    {
        auto const occ = steady_state_occupations(rep.omega_bar_h, rep.omega_bar_c, cfg.hot,
                                                  cfg.cold, rep.window_h.tau, rep.window_c.tau);
        rep.n_h = occ.n_h;
        rep.n_c = occ.n_c;
        rep.delta_n = occ.n_h - occ.n_c;
    }
    else
    {
        rep.n_h = rep.n_c = nan;
        rep.delta_n = 0.0;
    }

    if (hot_open && cold_open && x_h > 0.0 && x_c > 0.0)
    {
        auto const ce = cycle_energy_power(rep.delta_omega_bar, rep.delta_n, p.omega_b);
        rep.e_cyc = ce.e_cyc;
        rep.power = ce.power;
    }
    else
    {
        // No closed cycle: nothing is pumped between the reservoirs.
        rep.delta_n = 0.0;
        rep.e_cyc = 0.0;
        rep.power = 0.0;
    }

    double const half = cfg.drive.delta_omega_a / 2.0;
    if (!(half < p.omega_a0))
        throw DomainError("analytical_report: delta_omega_a >= 2 omega_a0");
    rep.kappa = (p.omega_a0 + half) / (p.omega_a0 - half);
    rep.eta_max = 1.0 - 1.0 / rep.kappa;
    rep.eta_carnot = 1.0 - cfg.cold.temperature / cfg.hot.temperature;
    if (rep.operating())
    {
        auto const eff = efficiencies(rep.omega_bar_h, rep.omega_bar_c, p, cfg.drive,
                                      cfg.hot.temperature, cfg.cold.temperature);
        rep.eta_eff = eff.eta_eff;
    }

    if (cfg.drive.delta_omega_a > 0.0)
    {
        double const dwbar = rep.e_cyc == 0.0 ? 0.0 : rep.delta_omega_bar;
        auto const md =
            required_mech_damping(dwbar, rep.delta_n, p.g0, cfg.drive.delta_omega_a, p.omega_b);
        rep.gamma_b_required = md.gamma_b;
        rep.q_b_required = md.q_b;
    }
    return rep;
}

SweepAxis sweep_axis_from_string(std::string const& name)
{
    if (name == "omega_b")
        return SweepAxis::OmegaB;
    if (name == "delta_omega_a")
        return SweepAxis::DeltaOmegaA;
    if (name == "reservoir_separation")
        return SweepAxis::ReservoirSeparation;
    if (name == "T_h")
        return SweepAxis::TemperatureHot;
    if (name == "Gamma")
        return SweepAxis::Gamma;
    throw ConfigError("unknown sweep axis '" + name
                      + "' (expected omega_b|delta_omega_a|reservoir_separation|T_h|Gamma)");
}

std::string to_string(SweepAxis axis)
{
    switch (axis)
    {
        case SweepAxis::OmegaB:
            return "omega_b";
        case SweepAxis::DeltaOmegaA:
            return "delta_omega_a";
        case SweepAxis::ReservoirSeparation:
            return "reservoir_separation";
        case SweepAxis::TemperatureHot:
            return "T_h";
        case SweepAxis::Gamma:
            return "Gamma";
    }
    return "?";
}

SimulationConfig with_axis_value(SimulationConfig const& base, SweepAxis axis, double value)
{
    SimulationConfig cfg = base;
    switch (axis)
    {
        case SweepAxis::OmegaB:
            cfg.system.omega_b = value;
            break;
        case SweepAxis::DeltaOmegaA:
            cfg.drive.delta_omega_a = value;
            break;
        case SweepAxis::ReservoirSeparation:
            cfg.hot.omega_center = cfg.system.omega_a0 + value / 2.0;
            cfg.cold.omega_center = cfg.system.omega_a0 - value / 2.0;
            break;
        case SweepAxis::TemperatureHot:
            cfg.hot.temperature = value;
            break;
        case SweepAxis::Gamma:
            cfg.hot.coupling = value;
            cfg.cold.coupling = value;
            break;
    }
    return cfg;
}

std::vector<SweepRow> analytical_sweep(SimulationConfig const& base, SweepAxis axis,
                                       std::vector<double> const& values)
{
    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (double v : values)
        rows.push_back({v, analytical_report(with_axis_value(base, axis, v))});
    return rows;
}

std::vector<double> linspace(double lo, double hi, std::size_t n)
{
    std::vector<double> out(n);
    if (n == 1)
    {
        out[0] = lo;
        return out;
    }
    for (std::size_t i = 0; i < n; ++i)
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

SweepRow const& power_optimum(std::vector<SweepRow> const& rows)
{
    if (rows.empty())
        throw DomainError("power_optimum: empty sweep");
    return *std::max_element(rows.begin(), rows.end(), [](auto const& a, auto const& b) {
        return a.report.power < b.report.power;
    });
}

std::vector<std::string> sweep_csv_header(SweepAxis axis)
{
    return {to_string(axis), "t_in_h", "t_out_h", "t_out_prime_h", "t_in_prime_h", "tau_h",
            "t_in_c", "t_out_c", "t_out_prime_c", "t_in_prime_c", "tau_c", "omega_bar_h",
            "omega_bar_c", "delta_omega_bar", "n_h", "n_c", "delta_n", "e_cyc", "power",
            "eta_eff", "eta_max", "eta_carnot", "kappa", "gamma_b_required", "q_b_required"};
}

void write_sweep_csv(std::ostream& os, SweepAxis axis, std::vector<SweepRow> const& rows)
{
    CsvWriter csv(os);
    csv.header(sweep_csv_header(axis));
    for (auto const& row : rows)
    {
        auto const& r = row.report;
        csv.row({csv_num(row.value), csv_num(r.window_h.t_in), csv_num(r.window_h.t_out),
                 csv_opt(r.window_h.t_out_prime), csv_opt(r.window_h.t_in_prime),
                 csv_num(r.window_h.tau), csv_num(r.window_c.t_in), csv_num(r.window_c.t_out),
                 csv_opt(r.window_c.t_out_prime), csv_opt(r.window_c.t_in_prime),
                 csv_num(r.window_c.tau), csv_num(r.omega_bar_h), csv_num(r.omega_bar_c),
                 csv_num(r.delta_omega_bar), csv_num(r.n_h), csv_num(r.n_c), csv_num(r.delta_n),
                 csv_num(r.e_cyc), csv_num(r.power), csv_opt(r.eta_eff), csv_num(r.eta_max),
                 csv_num(r.eta_carnot), csv_num(r.kappa), csv_num(r.gamma_b_required),
                 csv_opt(r.q_b_required)});
    }
}

}  // namespace qhe
