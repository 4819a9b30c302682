#pragma once

// Memory kernels of the eliminated baths and the retarded history force.
//
// The kernel is K(t) = 2i kappa(t) with kappa(t) = int_0^inf J(w) sin(w t) dw.
// The force at step n >= 1 is the trapezoid sum (mem_0 = 0)
//   mem_n = 2i dt [ kappa(0+) h_n / 2 + sum_{d=1}^{min(n,W)} kappa[d] h~[n-d] ],
// with h_j = alpha_j + conj(alpha_j) and h~ equal to h except for the
// trapezoid half weight on the initial sample, h~_0 = h_0 / 2. Because
// J ~ g gamma^2 / w at large w, kappa jumps from kappa(0) = 0 to
// kappa(0+) = pi g gamma^2 / 2, and the endpoint uses the right limit.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "qhe/config.hpp"
#include "qhe/core_model.hpp"
#include "qhe/fft.hpp"

namespace qhe {

struct KernelTable
{
    std::vector<double> kappa;  // kappa[k] = kappa(k dt), kappa[0] = 0
    TimeGrid grid;
    std::size_t window = 0;     // kappa treated as 0 beyond window steps
    double eps_tail = 0.0;
    double kappa0_plus = 0.0;   // right limit of kappa at t = 0
};

/// kappa(t) for a Lorentzian reservoir; odd in t, kappa(0) = 0.
double kernel_value(ReservoirSpec const& r, double t, KernelMethod method = KernelMethod::Residue);

/// lim_{t -> 0+} kappa(t).
double kernel_right_limit(ReservoirSpec const& r);

/// Upper bound on |kappa(t)| for t > 0 from the pole decomposition.
double kernel_envelope(ReservoirSpec const& r, double t);

KernelTable tabulate_kernel(ReservoirSpec const& r, TimeGrid const& grid, double eps_tail,
                            KernelMethod method = KernelMethod::Residue);

/// Pointwise sum of two tables on the same grid; window is the larger one.
KernelTable combine(KernelTable const& a, KernelTable const& b);

/// Same table with a different truncation window (extended with `r` if needed).
KernelTable with_window(ReservoirSpec const& r, KernelTable const& table, std::size_t window,
                        KernelMethod method = KernelMethod::Residue);

/// Reference evaluation of mem_k from the raw history h_0..h_k (length k+1).
std::complex<double> memory_force(std::span<double const> history, KernelTable const& table,
                                  std::size_t k);

/// Incremental evaluation of the history force along a trajectory.
class MemoryConvolver
{
  public:
    MemoryConvolver(KernelTable const& table, MemoryPath path, std::size_t block_size,
                    std::size_t max_steps);

    /// Append h_j for the next j.
    void push(double h);
    /// History part of the force at step n = number of samples pushed so
    /// far, i.e. everything except the endpoint term.
    std::complex<double> force() const;
    /// Endpoint term of the force for the sample h_n; zero for n = 0.
    std::complex<double> endpoint(double h) const;
    std::size_t size() const { return history_.size(); }

    static std::size_t default_block_size(std::size_t window);

  private:
    void flush_block();

    KernelTable const& table_;
    MemoryPath path_;
    std::size_t block_;
    std::size_t window_;
    double dt_;
    std::vector<double> history_;  // h~
    std::vector<double> acc_;      // contributions of completed blocks
    std::unique_ptr<RealFft> fft_;
    FftwBuffer<std::complex<double>> kernel_spectrum_;
    FftwBuffer<double> work_;
    FftwBuffer<std::complex<double>> work_spectrum_;
};

}  // namespace qhe
