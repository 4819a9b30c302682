#include "qhe/kernel.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "qhe/spectra.hpp"

namespace qhe {

namespace {

using cplx = std::complex<double>;

struct PolePair
{
    std::array<cplx, 2> pole;
    std::array<cplx, 2> residue;
};

// Upper-half-plane poles of J(w) = g gamma^2 w^3 / ((w^2 - wc^2)^2 + gamma^2 w^2)
// and the residues of J there. Empty when the poles (nearly) coincide.
std::optional<PolePair> upper_poles(ReservoirSpec const& r)
{
    double const wc = r.omega_center;
    double const gam = r.width;
    cplx const s = std::sqrt(cplx(4.0 * wc * wc - gam * gam, 0.0));
    if (std::abs(s) < 1e-6 * std::max(wc, gam))
        return std::nullopt;
    PolePair pp;
    double const num_scale = r.coupling * gam * gam;
    for (int i = 0; i < 2; ++i)
    {
        cplx const p = ((i == 0 ? s : -s) + cplx(0.0, gam)) / 2.0;
        cplx const dden = 4.0 * p * (p * p - wc * wc) + 2.0 * gam * gam * p;
        pp.pole[i] = p;
        pp.residue[i] = num_scale * p * p * p / dden;
    }
    return pp;
}

double residue_value(PolePair const& pp, double t)
{
    cplx sum = 0.0;
    for (int i = 0; i < 2; ++i)
        sum += pp.residue[i] * std::exp(cplx(0.0, 1.0) * pp.pole[i] * t);
    return std::numbers::pi * sum.real();
}

double quadrature_value(ReservoirSpec const& r, double t)
{
    struct Ctx
    {
        ReservoirSpec const* r;
    } ctx{&r};
    gsl_function f;
    f.function = [](double w, void* p) {
        return spectral_density(w, *static_cast<Ctx*>(p)->r);
    };
    f.params = &ctx;

    std::size_t const limit = 2000;
    gsl_integration_workspace* ws = gsl_integration_workspace_alloc(limit);
    gsl_integration_workspace* cyc = gsl_integration_workspace_alloc(limit);
    gsl_integration_qawo_table* tab =
        gsl_integration_qawo_table_alloc(t, 1.0, GSL_INTEG_SINE, 50);
    double result = 0.0;
    double abserr = 0.0;
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    double const epsabs = 1e-13 * std::max(r.coupling, 1e-300);
    int const status =
        gsl_integration_qawf(&f, 0.0, epsabs, limit, ws, cyc, tab, &result, &abserr);
    gsl_set_error_handler(old);
    gsl_integration_qawo_table_free(tab);
    gsl_integration_workspace_free(cyc);
    gsl_integration_workspace_free(ws);
    if (status != GSL_SUCCESS && abserr > 1e-9 * std::max(std::abs(result), r.coupling))
        throw NumericError("kernel quadrature did not converge at t = " + std::to_string(t)
                           + ": " + gsl_strerror(status) + ", estimate " + std::to_string(result)
                           + " +- " + std::to_string(abserr));
    return result;
}

std::vector<double> tabulate_values(ReservoirSpec const& r, double dt, std::size_t from,
                                    std::size_t to, KernelMethod method)
{
    std::vector<double> out;
    out.reserve(to - from);
    for (std::size_t k = from; k < to; ++k)
        out.push_back(kernel_value(r, dt * static_cast<double>(k), method));
    return out;
}

}  // namespace

double kernel_value(ReservoirSpec const& r, double t, KernelMethod method)
{
    require_lorentzian(r, "kernel_value");
    if (t == 0.0 || r.coupling == 0.0)
        return 0.0;
    if (t < 0.0)
        return -kernel_value(r, -t, method);
    if (method == KernelMethod::Residue)
    {
        if (auto pp = upper_poles(r))
            return residue_value(*pp, t);
    }
    return quadrature_value(r, t);
}

double kernel_right_limit(ReservoirSpec const& r)
{
    require_lorentzian(r, "kernel_right_limit");
    return std::numbers::pi * r.coupling * r.width * r.width / 2.0;
}

double kernel_envelope(ReservoirSpec const& r, double t)
{
    require_lorentzian(r, "kernel_envelope");
    auto pp = upper_poles(r);
    if (!pp)
    {
        // Coincident poles: t e^{-gamma t / 2} growth factor bounded generously.
        double const a = r.width / 2.0;
        return std::numbers::pi * r.coupling * r.width * (1.0 + a * t) * std::exp(-a * t);
    }
    double e = 0.0;
    for (int i = 0; i < 2; ++i)
        e += std::abs(pp->residue[i]) * std::exp(-pp->pole[i].imag() * t);
    return std::numbers::pi * e;
}

KernelTable tabulate_kernel(ReservoirSpec const& r, TimeGrid const& grid, double eps_tail,
                            KernelMethod method)
{
    require_lorentzian(r, "tabulate_kernel");
    if (!(eps_tail > 0.0 && eps_tail < 1.0))
        throw DomainError("tabulate_kernel: eps_tail must lie in (0, 1)");
    if (!(grid.dt > 0.0) || grid.n_steps < 2)
        throw DomainError("tabulate_kernel: invalid grid");

    KernelTable table;
    table.grid = grid;
    table.eps_tail = eps_tail;
    table.kappa0_plus = kernel_right_limit(r);
    std::size_t const max_lag = grid.n_steps - 1;
    if (r.coupling == 0.0)
    {
        table.window = 1;
        table.kappa.assign(2, 0.0);
        return table;
    }

    // Peak magnitude from the first few oscillations and decay times.
    double const decay = r.width / 2.0;
    double const t_scan = 8.0 * std::numbers::pi / r.omega_center + 2.0 / decay;
    std::size_t const k_scan =
        std::min(max_lag, static_cast<std::size_t>(std::ceil(t_scan / grid.dt)));
    auto head = tabulate_values(r, grid.dt, 0, k_scan + 1, KernelMethod::Residue);
    double peak = 0.0;
    for (double v : head)
        peak = std::max(peak, std::abs(v));

    // Smallest lag past which the envelope stays below eps_tail * peak.
    double const target = eps_tail * peak;
    double lo = 0.0;
    double hi = grid.dt;
    while (kernel_envelope(r, hi) > target && hi < 1e12)
        hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-9 * hi; ++it)
    {
        double const mid = 0.5 * (lo + hi);
        (kernel_envelope(r, mid) > target ? lo : hi) = mid;
    }
    std::size_t const w = static_cast<std::size_t>(std::ceil(hi / grid.dt));
    table.window = std::clamp<std::size_t>(w, 1, max_lag);
    table.kappa = tabulate_values(r, grid.dt, 0, table.window + 1, method);
    return table;
}

KernelTable combine(KernelTable const& a, KernelTable const& b)
{
    if (!(a.grid.dt == b.grid.dt))
        throw DomainError("combine: kernel tables on different grids");
    KernelTable out = a.window >= b.window ? a : b;
    KernelTable const& other = a.window >= b.window ? b : a;
    for (std::size_t k = 0; k < other.kappa.size(); ++k)
        out.kappa[k] += other.kappa[k];
    out.eps_tail = std::max(a.eps_tail, b.eps_tail);
    out.kappa0_plus = a.kappa0_plus + b.kappa0_plus;
    return out;
}

KernelTable with_window(ReservoirSpec const& r, KernelTable const& table, std::size_t window,
                        KernelMethod method)
{
    KernelTable out = table;
    out.window = window;
    if (window + 1 <= table.kappa.size())
    {
        out.kappa.resize(window + 1);
    }
    else
    {
        auto extra = tabulate_values(r, table.grid.dt, table.kappa.size(), window + 1, method);
        out.kappa.insert(out.kappa.end(), extra.begin(), extra.end());
    }
    return out;
}

std::complex<double> memory_force(std::span<double const> history, KernelTable const& table,
                                  std::size_t k)
{
    if (history.size() != k + 1)
        throw DomainError("memory_force: history must hold k + 1 samples");
    if (k == 0)
        return 0.0;
    std::size_t const dmax = std::min(k, table.window);
    double sum = 0.5 * table.kappa0_plus * history[k];
    for (std::size_t d = 1; d <= dmax; ++d)
    {
        double const h = (d == k) ? 0.5 * history[0] : history[k - d];
        sum += table.kappa[d] * h;
    }
    return {0.0, 2.0 * table.grid.dt * sum};
}

std::size_t MemoryConvolver::default_block_size(std::size_t window)
{
    return std::clamp<std::size_t>(next_pow2(window) / 32, 64, 4096);
}

MemoryConvolver::MemoryConvolver(KernelTable const& table, MemoryPath path,
                                 std::size_t block_size, std::size_t max_steps)
    : table_(table),
      path_(path),
      block_(block_size ? block_size : default_block_size(table.window)),
      window_(table.window),
      dt_(table.grid.dt)
{
    history_.reserve(max_steps + 1);
    if (path_ != MemoryPath::Fft)
        return;
    acc_.assign(max_steps + 2, 0.0);
    std::size_t const n = next_pow2(window_ + block_);
    fft_ = std::make_unique<RealFft>(n);
    kernel_spectrum_ = fftw_complex_buffer(fft_->spectrum_size());
    work_ = fftw_real_buffer(n);
    work_spectrum_ = fftw_complex_buffer(fft_->spectrum_size());
    std::fill(work_.get(), work_.get() + n, 0.0);
    for (std::size_t d = 1; d <= window_; ++d)
        work_[d - 1] = table_.kappa[d];
    fft_->forward(work_.get(), kernel_spectrum_.get());
    double const inv = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < fft_->spectrum_size(); ++k)
        kernel_spectrum_[k] *= inv;
}

void MemoryConvolver::push(double h)
{
    history_.push_back(history_.empty() ? 0.5 * h : h);
    if (path_ == MemoryPath::Fft && history_.size() % block_ == 0)
        flush_block();
}

void MemoryConvolver::flush_block()
{
    std::size_t const n = fft_->size();
    std::size_t const start = history_.size() - block_;
    if (start + 1 >= acc_.size())
        return;
    std::fill(work_.get(), work_.get() + n, 0.0);
    for (std::size_t i = 0; i < block_; ++i)
        work_[i] = history_[start + i];
    fft_->forward(work_.get(), work_spectrum_.get());
    for (std::size_t k = 0; k < fft_->spectrum_size(); ++k)
        work_spectrum_[k] *= kernel_spectrum_[k];
    fft_->inverse(work_spectrum_.get(), work_.get());
    // work[m] = sum_i h~[start+i] kappa[1+m-i], feeding step start + 1 + m.
    std::size_t const len = std::min(block_ + window_ - 1, acc_.size() - (start + 1));
    for (std::size_t m = 0; m < len; ++m)
        acc_[start + 1 + m] += work_[m];
}

std::complex<double> MemoryConvolver::force() const
{
    std::size_t const n = history_.size();
    double sum = 0.0;
    std::size_t first = n > window_ ? n - window_ : 0;  // oldest j in the window
    if (path_ == MemoryPath::Fft)
    {
        sum = n < acc_.size() ? acc_[n] : 0.0;
        first = std::max(first, (n / block_) * block_);
    }
    for (std::size_t j = first; j < n; ++j)
        sum += table_.kappa[n - j] * history_[j];
    return {0.0, 2.0 * dt_ * sum};
}

std::complex<double> MemoryConvolver::endpoint(double h) const
{
    if (history_.empty())
        return 0.0;  // empty integration interval
    return {0.0, dt_ * table_.kappa0_plus * h};
}

}  // namespace qhe
