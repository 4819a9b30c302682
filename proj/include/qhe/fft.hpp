#pragma once

// Thin RAII layer over FFTW real transforms. Plans are created under a
// global lock (the FFTW planner is not thread safe) and executed with the
// new-array interface on buffers from fftw_malloc, so one plan object can be
// used by a single thread on any pair of buffers of the planned size.

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace qhe {

template <class T>
struct FftwDeleter
{
    void operator()(T* p) const;
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter<T>>;

FftwBuffer<double> fftw_real_buffer(std::size_t n);
FftwBuffer<std::complex<double>> fftw_complex_buffer(std::size_t n);

class RealFft
{
  public:
    explicit RealFft(std::size_t n);
    ~RealFft();
    RealFft(RealFft const&) = delete;
    RealFft& operator=(RealFft const&) = delete;

    std::size_t size() const { return n_; }
    std::size_t spectrum_size() const { return n_ / 2 + 1; }

    /// Unnormalized forward transform of n reals into n/2+1 bins.
    void forward(double* in, std::complex<double>* out) const;
    /// Unnormalized inverse; destroys `in`.
    void inverse(std::complex<double>* in, double* out) const;

  private:
    std::size_t n_;
    void* forward_plan_;
    void* inverse_plan_;
};

/// Smallest n' >= n whose only prime factors are 2, 3 and 5.
std::size_t smooth_fft_size(std::size_t n);
std::size_t next_pow2(std::size_t n);

}  // namespace qhe
