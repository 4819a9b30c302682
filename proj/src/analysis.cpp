#include "qhe/analysis.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "qhe/fft.hpp"
#include "qhe/spectra.hpp"

namespace qhe {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double mean_of(std::span<double const> v)
{
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::size_t first_index_after(TimeGrid const& grid, double t)
{
    if (t <= grid.t0)
        return 0;
    return static_cast<std::size_t>(std::ceil((t - grid.t0) / grid.dt - 1e-9));
}

std::vector<double> grid_times(TimeGrid const& grid, std::size_t from, std::size_t to)
{
    std::vector<double> t;
    t.reserve(to - from);
    for (std::size_t k = from; k < to; ++k)
        t.push_back(grid.time(k));
    return t;
}

// Linear part of the saturation model for a fixed rate: y ~ n_ss + c e^{-r (t - t1)}.
struct ProjectedFit
{
    double n_ss;
    double c;
    double ssr;
};

ProjectedFit project(std::span<double const> t, std::span<double const> y, double rate)
{
    std::size_t const n = t.size();
    double const t1 = t.front();
    std::vector<double> e(n);
    for (std::size_t i = 0; i < n; ++i)
        e[i] = std::exp(-rate * (t[i] - t1));
    double const em = mean_of(e);
    double const ym = mean_of(y);
    double see = 0.0;
    double sey = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        see += (e[i] - em) * (e[i] - em);
        sey += (e[i] - em) * (y[i] - ym);
    }
    ProjectedFit f{};
    f.c = see > 0.0 ? sey / see : 0.0;
    f.n_ss = ym - f.c * em;
    for (std::size_t i = 0; i < n; ++i)
    {
        double const r = y[i] - f.n_ss - f.c * e[i];
        f.ssr += r * r;
    }
    return f;
}

}  // namespace

LineFit fit_line(std::span<double const> t, std::span<double const> y)
{
    if (t.size() != y.size() || t.size() < 2)
        throw DomainError("fit_line: need at least two paired points");
    double const tm = mean_of(t);
    double const ym = mean_of(y);
    double stt = 0.0;
    double sty = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
    {
        stt += (t[i] - tm) * (t[i] - tm);
        sty += (t[i] - tm) * (y[i] - ym);
    }
    if (!(stt > 0.0))
        throw DegenerateInputError("fit_line: all abscissae coincide");
    LineFit f;
    f.slope = sty / stt;
    f.intercept = ym - f.slope * tm;
    f.points = t.size();
    return f;
}

LineFit fit_linear_growth(EnsembleStats const& stats, double transient, double omega_b)
{
    double const horizon = stats.grid.time(stats.grid.n_steps - 1);
    if (!(horizon > transient + 5.0 * two_pi / omega_b))
        throw DomainError("fit_linear_growth: window too short; the horizon must exceed the "
                          "transient by five mechanical periods");
    std::size_t const from = first_index_after(stats.grid, transient);
    auto t = grid_times(stats.grid, from, stats.grid.n_steps);
    LineFit f = fit_line(t, std::span(stats.mean_n_b).subspan(from));
    f.power = omega_b * f.slope;
    return f;
}

SaturationFit fit_exponential_saturation(std::span<double const> t, std::span<double const> y)
{
    if (t.size() != y.size() || t.size() < 4)
        throw DomainError("fit_exponential_saturation: need at least four paired points");
    double const span = t.back() - t.front();
    if (!(span > 0.0))
        throw DomainError("fit_exponential_saturation: empty time span");

    // Coarse log-spaced scan over the rate, then Brent refinement in log r.
    double const log_lo = std::log(1e-2 / span);
    double const log_hi = std::log(1e3 / span);
    std::size_t const n_scan = 400;
    std::size_t best = 0;
    double best_ssr = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_scan; ++i)
    {
        double const lr = log_lo + (log_hi - log_lo) * static_cast<double>(i) / (n_scan - 1);
        double const ssr = project(t, y, std::exp(lr)).ssr;
        if (ssr < best_ssr)
        {
            best_ssr = ssr;
            best = i;
        }
    }
    auto describe = [&] {
        std::ostringstream os;
        os << "initial guesses: rate scanned over [" << std::exp(log_lo) << ", "
           << std::exp(log_hi) << "] (" << n_scan << " log-spaced points), n_ss and n0 by "
           << "linear least squares at each rate";
        return os.str();
    };
    if (best == 0)
        throw NumericError("fit_exponential_saturation: rate ran to the lower bound (r -> 0); "
                           "the data look linear, no saturation resolved; "
                           + describe());
    if (best == n_scan - 1)
        throw NumericError("fit_exponential_saturation: rate ran to the upper bound; no "
                           "resolvable relaxation; "
                           + describe());

    auto lr_at = [&](std::size_t i) {
        return log_lo + (log_hi - log_lo) * static_cast<double>(i) / (n_scan - 1);
    };
    auto objective = [&](double lr) { return project(t, y, std::exp(lr)).ssr; };
    std::uintmax_t iters = 200;
    auto const res = boost::math::tools::brent_find_minima(objective, lr_at(best - 1),
                                                           lr_at(best + 1), 40, iters);
    double const rate = std::exp(res.first);
    ProjectedFit const pf = project(t, y, rate);
    SaturationFit fit;
    fit.rate = rate;
    fit.n_ss = pf.n_ss;
    fit.n0 = pf.n_ss + pf.c * std::exp(rate * t.front());
    fit.residual_rms = std::sqrt(pf.ssr / static_cast<double>(t.size()));
    return fit;
}

SaturationFit fit_exponential_saturation(EnsembleStats const& stats, double transient)
{
    std::size_t const from = first_index_after(stats.grid, transient);
    if (from + 4 > stats.grid.n_steps)
        throw DomainError("fit_exponential_saturation: transient leaves too few points");
    auto t = grid_times(stats.grid, from, stats.grid.n_steps);
    return fit_exponential_saturation(t, std::span(stats.mean_n_b).subspan(from));
}

ExtractedPower extracted_power(double n_ss, ModelParams const& params, ReservoirSpec const& hot,
                               ReservoirSpec const& cold)
{
    if (!(params.gamma_b > 0.0))
        throw DomainError("extracted_power: requires mechanical damping gamma_b > 0");
    ExtractedPower p;
    p.n_b_coherent = n_ss - weighted_mech_thermal_occupation(params, hot, cold);
    p.power = params.gamma_b * p.n_b_coherent * params.omega_b;
    p.operating = p.n_b_coherent >= 0.0;
    return p;
}

CycleExtrema cycle_extrema(TimeGrid const& grid, std::span<double const> y, double omega_b,
                           double transient)
{
    if (!(omega_b > 0.0))
        throw DomainError("cycle_extrema: omega_b must be > 0");
    double const period = two_pi / omega_b;
    double const start = std::max(transient, grid.t0);
    double const end = grid.time(y.size() - 1);
    auto const windows = static_cast<std::size_t>(std::floor((end - start) / period + 1e-9));
    if (windows < 5)
        throw DomainError("cycle_extrema: too few complete mechanical periods after the transient");

    CycleExtrema out;
    double total = 0.0;
    for (std::size_t w = 0; w < windows; ++w)
    {
        double const a = start + period * static_cast<double>(w);
        std::size_t const from = first_index_after(grid, a);
        std::size_t const to = std::min(y.size(), first_index_after(grid, a + period));
        if (to <= from)
            continue;
        auto const [lo, hi] = std::minmax_element(y.begin() + from, y.begin() + to);
        out.window_start.push_back(a);
        out.maxima.push_back(*hi);
        out.minima.push_back(*lo);
        total += *hi - *lo;
    }
    out.delta_n_cycle = total / static_cast<double>(out.maxima.size());
    return out;
}

CycleExtrema cycle_extrema(EnsembleStats const& stats, double omega_b, double transient)
{
    return cycle_extrema(stats.grid, stats.mean_n_a, omega_b, transient);
}

double efficiency_estimate(double power, double delta_n_cycle, ReservoirSpec const& hot,
                           double omega_b)
{
    if (!(delta_n_cycle > 0.0))
        throw DegenerateInputError("efficiency_estimate: no occupation swing, efficiency undefined");
    double const work = power * two_pi / omega_b;
    double const heat = hot.omega_center * delta_n_cycle;
    return work / heat;
}

double fano_factor(std::span<double const> samples)
{
    if (samples.size() < 2)
        throw DomainError("fano_factor: need at least two samples");
    // Sums of deviations from the first sample, in extended precision.
    long double const x0 = samples.front();
    long double s1 = 0.0L;
    long double s2 = 0.0L;
    for (double x : samples)
    {
        long double const d = x - x0;
        s1 += d;
        s2 += d * d;
    }
    auto const n = static_cast<long double>(samples.size());
    long double const m = x0 + s1 / n;
    if (!(m > 0.0L))
        throw DomainError("fano_factor: sample mean must be > 0");
    long double const var = (s2 - s1 * s1 / n) / (n - 1.0L);
    return static_cast<double>(var / m);
}

Histogram histogram(std::span<double const> samples, std::size_t bins)
{
    if (samples.empty())
        throw DomainError("histogram: no samples");
    if (bins == 0)
        bins = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(samples.size())))));
    auto const [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    double lo = *lo_it;
    double hi = *hi_it;
    if (hi == lo)
    {
        lo -= 0.5;
        hi += 0.5;
    }
    Histogram h;
    h.edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i)
        h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
    h.counts.assign(bins, 0);
    for (double x : samples)
    {
        auto idx = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(bins));
        ++h.counts[std::min(idx, bins - 1)];
    }
    return h;
}

PeakFrequency dominant_frequency(std::span<double const> y, double dt)
{
    std::size_t const n = y.size();
    if (n < 4)
        throw DomainError("dominant_frequency: series too short");
    double const m = mean_of(y);
    RealFft fft(n);
    auto buf = fftw_real_buffer(n);
    auto spec = fftw_complex_buffer(fft.spectrum_size());
    for (std::size_t i = 0; i < n; ++i)
        buf[i] = y[i] - m;
    fft.forward(buf.get(), spec.get());
    std::size_t best = 1;
    for (std::size_t k = 2; k < fft.spectrum_size(); ++k)
        if (std::norm(spec[k]) > std::norm(spec[best]))
            best = k;
    double const bin = two_pi / (static_cast<double>(n) * dt);
    return {bin * static_cast<double>(best), bin};
}

double correlation_lag(std::span<double const> x, std::span<double const> y, double dt,
                       double max_lag)
{
    if (x.size() != y.size() || x.size() < 4)
        throw DomainError("correlation_lag: need two series of equal length");
    std::size_t const n = x.size();
    auto const max_k = std::min(n - 2, static_cast<std::size_t>(std::floor(max_lag / dt)));
    double const xm = mean_of(x);
    double const ym = mean_of(y);
    std::size_t best = 0;
    double best_c = -std::numeric_limits<double>::infinity();
    for (std::size_t lag = 0; lag <= max_k; ++lag)
    {
        double c = 0.0;
        for (std::size_t k = 0; k + lag < n; ++k)
            c += (x[k] - xm) * (y[k + lag] - ym);
        c /= static_cast<double>(n - lag);
        if (c > best_c)
        {
            best_c = c;
            best = lag;
        }
    }
    return dt * static_cast<double>(best);
}

PerformanceReport analyze(EnsembleStats const& stats, SimulationConfig const& cfg)
{
    auto const& p = cfg.system;
    PerformanceReport rep;
    rep.transient = cfg.ensemble.transient_periods * two_pi / p.omega_b;
    rep.n_b_thermal = weighted_mech_thermal_occupation(p, cfg.hot, cfg.cold);

    double power = 0.0;
    if (p.gamma_b > 0.0)
    {
        rep.saturation = fit_exponential_saturation(stats, rep.transient);
        auto const ex = extracted_power(rep.saturation->n_ss, p, cfg.hot, cfg.cold);
        rep.n_b_coherent = ex.n_b_coherent;
        rep.power_extracted = ex.power;
        rep.operating = ex.operating;
        power = ex.power;
    }
    else
    {
        rep.growth = fit_linear_growth(stats, rep.transient, p.omega_b);
        power = rep.growth->power;
        rep.operating = power > 0.0;
    }

    auto const ext = cycle_extrema(stats, p.omega_b, rep.transient);
    rep.delta_n_cycle = ext.delta_n_cycle;
    if (rep.delta_n_cycle > 0.0)
        rep.eta = efficiency_estimate(power, rep.delta_n_cycle, cfg.hot, p.omega_b);
    if (stats.terminal_n_b.size() >= 2 && mean_of(stats.terminal_n_b) > 0.0)
        rep.fano = fano_factor(stats.terminal_n_b);
    return rep;
}

}  // namespace qhe
