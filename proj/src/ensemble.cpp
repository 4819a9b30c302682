#include "qhe/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <istream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>

#include "qhe/csv.hpp"
#include "qhe/hle_solver.hpp"

namespace qhe {

namespace {

struct Sample
{
    std::vector<double> n_a;
    std::vector<double> n_b;
};

class Accumulator
{
  public:
    Accumulator(EnsembleStats& stats, std::size_t len) : s_(stats)
    {
        s_.mean_n_a.assign(len, 0.0);
        s_.mean_n_b.assign(len, 0.0);
        s_.m2_n_b.assign(len, 0.0);
    }

    void add(Sample const& x, std::size_t traces)
    {
        double const count = static_cast<double>(++s_.n_trajectories);
        for (std::size_t k = 0; k < x.n_a.size(); ++k)
        {
            s_.mean_n_a[k] += (x.n_a[k] - s_.mean_n_a[k]) / count;
            double const delta = x.n_b[k] - s_.mean_n_b[k];
            s_.mean_n_b[k] += delta / count;
            s_.m2_n_b[k] += delta * (x.n_b[k] - s_.mean_n_b[k]);
        }
        s_.terminal_n_b.push_back(x.n_b.back());
        if (s_.traces.size() < traces)
            s_.traces.push_back(x.n_b);
    }

  private:
    EnsembleStats& s_;
};

void finish_variance(EnsembleStats& s)
{
    s.var_n_b.assign(s.m2_n_b.size(), 0.0);
    if (s.n_trajectories < 2)
        return;
    double const denom = static_cast<double>(s.n_trajectories - 1);
    for (std::size_t k = 0; k < s.m2_n_b.size(); ++k)
        s.var_n_b[k] = s.m2_n_b[k] / denom;
}

}  // namespace

EnsembleStats run_ensemble(SimulationConfig const& cfg, EnsembleOptions const& opt)
{
    if (opt.n_trajectories < 1)
        throw ConfigError("ensemble: at least one trajectory is required");
    if (opt.workers < 1)
        throw ConfigError("ensemble: at least one worker is required");

    SolverContext const ctx = prepare_solver(cfg);
    EnsembleStats stats;
    stats.grid = recorded_grid(cfg);
    stats.base_seed = opt.base_seed;
    stats.first_index = opt.first_index;
    Accumulator acc(stats, stats.grid.n_steps);

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex merge_mutex;
    std::map<std::size_t, Sample> pending;
    std::size_t merged = 0;
    std::exception_ptr error;
    std::string failed_seeds;

    auto worker = [&] {
        while (!failed.load())
        {
            std::size_t const i = next.fetch_add(1);
            if (i >= opt.n_trajectories)
                return;
            std::uint64_t const index = opt.first_index + i;
            Sample x;
            x.n_a.reserve(stats.grid.n_steps);
            x.n_b.reserve(stats.grid.n_steps);
            try
            {
                auto noise = draw_noise(ctx, opt.base_seed, index);
                integrate(
                    ctx, noise,
                    [&](SolverState const& s) {
                        x.n_a.push_back(std::norm(s.alpha));
                        x.n_b.push_back(std::norm(s.beta));
                    },
                    trajectory_seed(opt.base_seed, index));
            }
            catch (...)
            {
                std::lock_guard lock(merge_mutex);
                if (!error)
                    error = std::current_exception();
                failed_seeds += " " + std::to_string(opt.base_seed) + ":" + std::to_string(index);
                failed.store(true);
                return;
            }
            std::lock_guard lock(merge_mutex);
            pending.emplace(i, std::move(x));
            while (!pending.empty() && pending.begin()->first == merged)
            {
                acc.add(pending.begin()->second, opt.traces);
                pending.erase(pending.begin());
                ++merged;
                if (opt.progress)
                    opt.progress(merged, opt.n_trajectories);
            }
        }
    };

    std::size_t const n_threads = std::min(opt.workers, opt.n_trajectories);
    if (n_threads == 1)
    {
        worker();
    }
    else
    {
        std::vector<std::jthread> threads;
        for (std::size_t t = 0; t < n_threads; ++t)
            threads.emplace_back(worker);
    }

    if (error)
    {
        try
        {
            std::rethrow_exception(error);
        }
        catch (NumericError const& e)
        {
            throw NumericError(std::string(e.what())
                               + "; ensemble aborted, failing (base seed:index):" + failed_seeds);
        }
    }

    stats.steps_integrated = static_cast<std::uint64_t>(stats.n_trajectories) * (cfg.grid.n_steps - 1);
    finish_variance(stats);
    return stats;
}

EnsembleStats run_ensemble(SimulationConfig const& cfg)
{
    EnsembleOptions opt;
    opt.n_trajectories = cfg.ensemble.trajectories;
    opt.base_seed = cfg.ensemble.seed;
    opt.workers = cfg.ensemble.workers;
    opt.traces = cfg.ensemble.traces;
    return run_ensemble(cfg, opt);
}

EnsembleStats merge(EnsembleStats const& a, EnsembleStats const& b)
{
    if (!(a.grid == b.grid))
        throw DomainError("merge: ensembles on different grids");
    if (a.base_seed != b.base_seed)
        throw DomainError("merge: ensembles with different base seeds");
    if (a.first_index + a.n_trajectories != b.first_index)
        throw DomainError("merge: ensembles are not adjacent in trajectory index");

    EnsembleStats out;
    out.grid = a.grid;
    out.base_seed = a.base_seed;
    out.first_index = a.first_index;
    out.n_trajectories = a.n_trajectories + b.n_trajectories;
    out.steps_integrated = a.steps_integrated + b.steps_integrated;
    double const na = static_cast<double>(a.n_trajectories);
    double const nb = static_cast<double>(b.n_trajectories);
    double const n = na + nb;
    std::size_t const len = a.mean_n_a.size();
    out.mean_n_a.resize(len);
    out.mean_n_b.resize(len);
    out.m2_n_b.resize(len);
    for (std::size_t k = 0; k < len; ++k)
    {
        out.mean_n_a[k] = a.mean_n_a[k] + (b.mean_n_a[k] - a.mean_n_a[k]) * nb / n;
        double const delta = b.mean_n_b[k] - a.mean_n_b[k];
        out.mean_n_b[k] = a.mean_n_b[k] + delta * nb / n;
        out.m2_n_b[k] = a.m2_n_b[k] + b.m2_n_b[k] + delta * delta * na * nb / n;
    }
    out.terminal_n_b = a.terminal_n_b;
    out.terminal_n_b.insert(out.terminal_n_b.end(), b.terminal_n_b.begin(), b.terminal_n_b.end());
    out.traces = a.traces;
    for (auto const& tr : b.traces)
        out.traces.push_back(tr);
    finish_variance(out);
    return out;
}

double terminal_standard_error(EnsembleStats const& stats)
{
    if (stats.n_trajectories < 2)
        throw DegenerateInputError("standard error needs at least two trajectories");
    return std::sqrt(stats.var_n_b.back() / static_cast<double>(stats.n_trajectories));
}

void write_ensemble_csv(std::ostream& os, EnsembleStats const& s)
{
    CsvWriter csv(os);
    csv.header({"t", "mean_n_a", "mean_n_b", "var_n_b"});
    for (std::size_t k = 0; k < s.mean_n_a.size(); ++k)
        csv.row({csv_num(s.grid.time(k)), csv_num(s.mean_n_a[k]), csv_num(s.mean_n_b[k]),
                 csv_num(s.var_n_b[k])});
}

void write_terminal_csv(std::ostream& os, EnsembleStats const& s)
{
    CsvWriter csv(os);
    csv.header({"trajectory", "n_b"});
    for (std::size_t i = 0; i < s.terminal_n_b.size(); ++i)
        csv.row({std::to_string(s.first_index + i), csv_num(s.terminal_n_b[i])});
}

void write_traces_csv(std::ostream& os, EnsembleStats const& s)
{
    CsvWriter csv(os);
    std::vector<std::string> head{"t"};
    for (std::size_t i = 0; i < s.traces.size(); ++i)
        head.push_back("n_b_" + std::to_string(s.first_index + i));
    csv.header(head);
    for (std::size_t k = 0; k < s.grid.n_steps; ++k)
    {
        std::vector<std::string> row{csv_num(s.grid.time(k))};
        for (auto const& tr : s.traces)
            row.push_back(csv_num(tr[k]));
        csv.row(row);
    }
}

namespace {

std::vector<std::vector<double>> read_numeric_csv(std::istream& is, std::size_t columns,
                                                  char const* what)
{
    std::string line;
    if (!std::getline(is, line))
        throw ConfigError(std::string(what) + ": empty file");
    std::vector<std::vector<double>> cols(columns);
    while (std::getline(is, line))
    {
        if (line.empty())
            continue;
        std::stringstream ss(line);
        std::string cell;
        for (std::size_t c = 0; c < columns; ++c)
        {
            if (!std::getline(ss, cell, ','))
                throw ConfigError(std::string(what) + ": short row '" + line + "'");
            cols[c].push_back(std::stod(cell));
        }
    }
    return cols;
}

}  // namespace

EnsembleStats read_ensemble_csv(std::istream& series, std::istream& terminal)
{
    auto cols = read_numeric_csv(series, 4, "ensemble series");
    auto term = read_numeric_csv(terminal, 2, "terminal samples");
    EnsembleStats s;
    std::size_t const n = cols[0].size();
    if (n < 2)
        throw ConfigError("ensemble series: need at least two rows");
    s.grid.t0 = cols[0][0];
    s.grid.dt = (cols[0][n - 1] - cols[0][0]) / static_cast<double>(n - 1);
    s.grid.n_steps = n;
    s.mean_n_a = std::move(cols[1]);
    s.mean_n_b = std::move(cols[2]);
    s.var_n_b = std::move(cols[3]);
    s.terminal_n_b = std::move(term[1]);
    s.n_trajectories = s.terminal_n_b.size();
    if (!term[0].empty())
        s.first_index = static_cast<std::uint64_t>(term[0][0]);
    s.m2_n_b.resize(n);
    for (std::size_t k = 0; k < n; ++k)
        s.m2_n_b[k] = s.var_n_b[k] * static_cast<double>(s.n_trajectories > 0 ? s.n_trajectories - 1 : 0);
    return s;
}

}  // namespace qhe
