#include "qhe/spectra.hpp"

#include <cmath>
#include <string>

namespace qhe {

void require_lorentzian(ReservoirSpec const& r, char const* where)
{
    if (r.kind != ReservoirKind::Lorentzian)
        throw KindError(std::string(where) + ": requires a lorentzian reservoir");
}

void require_step(ReservoirSpec const& r, char const* where)
{
    if (r.kind != ReservoirKind::Step)
        throw KindError(std::string(where) + ": requires a step reservoir");
}

double spectral_density(double w, ReservoirSpec const& r)
{
    require_lorentzian(r, "spectral_density");
    if (!(w >= 0.0))
        throw DomainError("spectral_density: frequency must be >= 0");
    double const detune = (w * w - r.omega_center * r.omega_center) / r.width;
    return r.coupling * w * w * w / (w * w + detune * detune);
}

double noise_psd(double w, ReservoirSpec const& r)
{
    double const j = spectral_density(w, r);
    if (w == 0.0)
        return 0.0;
    return j / std::tanh(w / (2.0 * r.temperature));
}

double bose_einstein(double w, double temperature)
{
    if (!(w > 0.0) || !(temperature > 0.0))
        throw DomainError("bose_einstein: frequency and temperature must be > 0");
    return 1.0 / std::expm1(w / temperature);
}

double weighted_mech_thermal_occupation(ModelParams const& params,
                                        ReservoirSpec const& hot,
                                        ReservoirSpec const& cold)
{
    require_lorentzian(hot, "weighted_mech_thermal_occupation");
    require_lorentzian(cold, "weighted_mech_thermal_occupation");
    double const total = hot.coupling + cold.coupling;
    if (!(total > 0.0))
        throw DegenerateInputError("weighted_mech_thermal_occupation: g_h + g_c must be > 0");
    double const nh = bose_einstein(params.omega_b, hot.temperature);
    double const nc = bose_einstein(params.omega_b, cold.temperature);
    if (nh == nc || cold.coupling == 0.0)
        return nh;
    if (hot.coupling == 0.0)
        return nc;
    return (hot.coupling * nh + cold.coupling * nc) / total;
}

}  // namespace qhe
