#pragma once

// Reservoir spectral functions, thermal noise spectra and Bose-Einstein
// occupations. All functions are pure.

#include "qhe/core_model.hpp"

namespace qhe {

/// Peaked spectral function of a Lorentzian-kind reservoir,
///   J(w) = g w^3 / (w^2 + (w^2 - w_r^2)^2 / gamma^2).
/// J(0) = 0 and J(w_r) = g w_r.
double spectral_density(double w, ReservoirSpec const& r);

/// Quantum-thermal noise spectrum S(w) = J(w) coth(w / 2T) on w >= 0.
/// S(0) is defined as 0 by continuity.
double noise_psd(double w, ReservoirSpec const& r);

/// Mean occupation 1 / (exp(w/T) - 1). Underflows to 0 for w >> T.
double bose_einstein(double w, double temperature);

/// Coupling-weighted thermal occupation of the mechanical mode,
///   (g_h N(w_b, T_h) + g_c N(w_b, T_c)) / (g_h + g_c).
double weighted_mech_thermal_occupation(ModelParams const& params,
                                        ReservoirSpec const& hot,
                                        ReservoirSpec const& cold);

void require_lorentzian(ReservoirSpec const& r, char const* where);
void require_step(ReservoirSpec const& r, char const* where);

}  // namespace qhe
