#include "qhe/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <new>

namespace qhe {

namespace {

std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

}  // namespace

template <class T>
void FftwDeleter<T>::operator()(T* p) const
{
    fftw_free(p);
}

template struct FftwDeleter<double>;
template struct FftwDeleter<std::complex<double>>;

FftwBuffer<double> fftw_real_buffer(std::size_t n)
{
    auto* p = fftw_alloc_real(n == 0 ? 1 : n);
    if (!p)
        throw std::bad_alloc();
    return FftwBuffer<double>(p);
}

FftwBuffer<std::complex<double>> fftw_complex_buffer(std::size_t n)
{
    auto* p = fftw_alloc_complex(n == 0 ? 1 : n);
    if (!p)
        throw std::bad_alloc();
    return FftwBuffer<std::complex<double>>(reinterpret_cast<std::complex<double>*>(p));
}

RealFft::RealFft(std::size_t n) : n_(n)
{
    auto in = fftw_real_buffer(n);
    auto out = fftw_complex_buffer(n / 2 + 1);
    auto* cout = reinterpret_cast<fftw_complex*>(out.get());
    std::lock_guard lock(planner_mutex());
    int const len = static_cast<int>(n);
    forward_plan_ = fftw_plan_dft_r2c_1d(len, in.get(), cout, FFTW_ESTIMATE);
    inverse_plan_ = fftw_plan_dft_c2r_1d(len, cout, in.get(), FFTW_ESTIMATE);
}

RealFft::~RealFft()
{
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void RealFft::forward(double* in, std::complex<double>* out) const
{
    fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), in,
                         reinterpret_cast<fftw_complex*>(out));
}

void RealFft::inverse(std::complex<double>* in, double* out) const
{
    fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_),
                         reinterpret_cast<fftw_complex*>(in), out);
}

std::size_t smooth_fft_size(std::size_t n)
{
    if (n <= 1)
        return 1;
    for (std::size_t m = n;; ++m)
    {
        std::size_t r = m;
        for (std::size_t p : {2u, 3u, 5u})
            while (r % p == 0)
                r /= p;
        if (r == 1)
            return m;
    }
}

std::size_t next_pow2(std::size_t n)
{
    std::size_t m = 1;
    while (m < n)
        m <<= 1;
    return m;
}

}  // namespace qhe
