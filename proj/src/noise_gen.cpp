#include "qhe/noise_gen.hpp"

#include <cmath>
#include <numbers>

#include "qhe/fft.hpp"
#include "qhe/spectra.hpp"

namespace qhe {

double NoiseProcess::bin_spacing() const
{
    return 2.0 * std::numbers::pi / (static_cast<double>(fft_length) * grid.dt);
}

NoiseProcess build_filter(ReservoirSpec const& r, TimeGrid const& grid)
{
    require_lorentzian(r, "build_filter");
    if (!(grid.dt > 0.0) || grid.n_steps < 1)
        throw DomainError("build_filter: invalid time grid");

    NoiseProcess p;
    p.reservoir = r;
    p.grid = grid;
    p.fft_length = smooth_fft_size(2 * grid.n_steps);
    if (p.fft_length % 2)
        p.fft_length = smooth_fft_size(p.fft_length + 1);
    double const nyquist = std::numbers::pi / grid.dt;
    if (nyquist <= r.omega_center + 5.0 * r.width)
        p.warnings.push_back("noise spectrum truncated: Nyquist frequency "
                             + std::to_string(nyquist) + " below omega + 5 gamma");

    std::size_t const bins = p.fft_length / 2 + 1;
    double const dw = p.bin_spacing();
    p.frf_magnitude.resize(bins);
    for (std::size_t k = 0; k < bins; ++k)
        p.frf_magnitude[k] = std::sqrt(noise_psd(dw * static_cast<double>(k), r));
    return p;
}

std::vector<double> sample_noise(NoiseProcess const& process, std::mt19937_64& rng)
{
    std::size_t const n = process.grid.n_steps;
    std::size_t const len = process.fft_length;
    std::vector<double> out(n, 0.0);
    if (process.reservoir.coupling == 0.0)
        return out;

    RealFft fft(len);
    auto buf = fftw_real_buffer(len);
    auto spec = fftw_complex_buffer(fft.spectrum_size());
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = 0; i < len; ++i)
        buf[i] = normal(rng);

    fft.forward(buf.get(), spec.get());
    // |H|^2 = S / (2 dt) gives the one-sided convention; 1/len undoes the
    // unnormalized round trip.
    double const scale = std::sqrt(1.0 / (2.0 * process.grid.dt)) / static_cast<double>(len);
    for (std::size_t k = 0; k < fft.spectrum_size(); ++k)
        spec[k] *= process.frf_magnitude[k] * scale;
    fft.inverse(spec.get(), buf.get());

    // Keep the tail; the head carries the circular wrap-around correlation.
    std::size_t const offset = len - n;
    for (std::size_t i = 0; i < n; ++i)
        out[i] = buf[offset + i];
    return out;
}

std::vector<double> sample_noise(NoiseProcess const& process, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    return sample_noise(process, rng);
}

WelchAccumulator::WelchAccumulator(double dt, std::size_t segment)
    : dt_(dt), segment_(segment), window_(segment), sum_(segment / 2 + 1, 0.0)
{
    if (segment < 4)
        throw DomainError("welch: segment too short");
    for (std::size_t i = 0; i < segment; ++i)
    {
        double const s = std::sin(std::numbers::pi * static_cast<double>(i)
                                  / static_cast<double>(segment));
        window_[i] = s * s;
        window_power_ += window_[i] * window_[i];
    }
}

void WelchAccumulator::add(std::vector<double> const& series)
{
    RealFft fft(segment_);
    auto buf = fftw_real_buffer(segment_);
    auto spec = fftw_complex_buffer(fft.spectrum_size());
    std::size_t const hop = segment_ / 4;
    for (std::size_t start = 0; start + segment_ <= series.size(); start += hop)
    {
        for (std::size_t i = 0; i < segment_; ++i)
            buf[i] = series[start + i] * window_[i];
        fft.forward(buf.get(), spec.get());
        for (std::size_t k = 0; k < sum_.size(); ++k)
            sum_[k] += std::norm(spec[k]);
        ++count_;
    }
}

SpectrumEstimate WelchAccumulator::result() const
{
    if (count_ == 0)
        throw DegenerateInputError("welch: no complete segment");
    SpectrumEstimate est;
    est.omega.resize(sum_.size());
    est.psd.resize(sum_.size());
    double const dw = 2.0 * std::numbers::pi / (static_cast<double>(segment_) * dt_);
    for (std::size_t k = 0; k < sum_.size(); ++k)
    {
        est.omega[k] = dw * static_cast<double>(k);
        est.psd[k] = 2.0 * dt_ * sum_[k] / (window_power_ * static_cast<double>(count_));
    }
    return est;
}

SpectrumEstimate welch_psd(std::vector<std::vector<double>> const& realizations, double dt,
                           std::size_t segment)
{
    WelchAccumulator acc(dt, segment);
    for (auto const& r : realizations)
        acc.add(r);
    return acc.result();
}

}  // namespace qhe
