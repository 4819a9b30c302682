#pragma once

// Stationary real Gaussian noise with a prescribed one-sided spectrum,
// synthesized by filtering white noise in the frequency domain.
//
// PSD convention: variance = (1/2pi) * integral_0^inf S(w) dw.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qhe/core_model.hpp"

namespace qhe {

struct NoiseProcess
{
    ReservoirSpec reservoir;
    TimeGrid grid;
    std::size_t fft_length = 0;          // synthesis length, >= 2 n_steps
    std::vector<double> frf_magnitude;   // sqrt(S(w_k)), k = 0..fft_length/2
    std::vector<std::string> warnings;

    double bin_spacing() const;  // 2pi / (fft_length dt)
};

NoiseProcess build_filter(ReservoirSpec const& r, TimeGrid const& grid);

/// One realization of length grid.n_steps drawn from `rng`.
std::vector<double> sample_noise(NoiseProcess const& process, std::mt19937_64& rng);
/// One realization from a dedicated generator seeded with `seed`.
std::vector<double> sample_noise(NoiseProcess const& process, std::uint64_t seed);

struct SpectrumEstimate
{
    std::vector<double> omega;
    std::vector<double> psd;  // one-sided, same convention as the target
};

/// Welch estimate with Hann-windowed segments of length `segment`, advanced by
/// segment/4, averaged over all realizations.
SpectrumEstimate welch_psd(std::vector<std::vector<double>> const& realizations, double dt,
                           std::size_t segment);

class WelchAccumulator
{
  public:
    WelchAccumulator(double dt, std::size_t segment);
    void add(std::vector<double> const& series);
    SpectrumEstimate result() const;

  private:
    double dt_;
    std::size_t segment_;
    std::vector<double> window_;
    double window_power_ = 0.0;
    std::vector<double> sum_;
    std::size_t count_ = 0;
};

}  // namespace qhe
