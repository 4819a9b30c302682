// qhe: command-line driver for the analytical model, trajectory ensembles
// and post-processing. Every verb writes its outputs plus a manifest.json
// into --out; `qhe replay --manifest <file>` re-runs a recorded invocation.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qhe/analysis.hpp"
#include "qhe/analytical.hpp"
#include "qhe/config.hpp"
#include "qhe/csv.hpp"
#include "qhe/ensemble.hpp"
#include "qhe/hle_solver.hpp"
#include "qhe/kernel.hpp"
#include "qhe/noise_gen.hpp"
#include "qhe/spectra.hpp"

#ifndef QHE_VERSION
#define QHE_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace qhe;

namespace {

constexpr int exit_usage = 2;
constexpr int exit_numeric = 3;

struct Globals
{
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trajectories;
    std::optional<std::size_t> workers;
    std::string out = "qhe_out";
    std::vector<std::string> sets;
    bool no_env = false;
};

class UsageError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Reference config of the verb, then file, environment, --set and flags.
SimulationConfig resolve_config(Globals const& g, SimulationConfig const& base)
{
    SimulationConfig cfg = base;
    if (!g.config_path.empty())
    {
        if (!fs::exists(g.config_path))
            throw ConfigError("configuration file not found: " + g.config_path);
        cfg = load_config(g.config_path, base);
    }
    if (!g.no_env)
        cfg = apply_env_overrides(cfg);
    for (auto const& kv : g.sets)
    {
        auto const eq = kv.find('=');
        if (eq == std::string::npos)
            throw UsageError("--set expects key=value, got '" + kv + "'");
        set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (g.seed)
        cfg.ensemble.seed = *g.seed;
    if (g.trajectories)
        cfg.ensemble.trajectories = *g.trajectories;
    if (g.workers)
        cfg.ensemble.workers = *g.workers;
    return cfg;
}

void require_valid(SimulationConfig const& cfg)
{
    auto rep = validate(cfg);
    for (auto const& issue : rep.issues)
        if (issue.severity == Severity::Warning)
            std::cerr << "warning: " << issue.code << ": " << issue.message << '\n';
    if (rep.has_violations())
        throw ConfigError("invalid configuration:\n" + rep.to_string());
}

class Run
{
  public:
    Run(Globals const& g, std::string verb, std::vector<std::string> argv)
        : g_(g), verb_(std::move(verb)), argv_(std::move(argv)),
          start_(std::chrono::steady_clock::now())
    {
        fs::create_directories(g_.out);
    }

    fs::path path(std::string const& name)
    {
        outputs_.push_back(name);
        return fs::path(g_.out) / name;
    }

    std::ofstream open(std::string const& name)
    {
        std::ofstream os(path(name));
        if (!os)
            throw ConfigError("cannot write " + (fs::path(g_.out) / name).string());
        return os;
    }

    void write_json(std::string const& name, json const& j)
    {
        auto os = open(name);
        os << j.dump(2) << '\n';
    }

    void finish(SimulationConfig const& cfg, json metrics = json::object())
    {
        double const wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        json m;
        m["verb"] = verb_;
        m["argv"] = argv_;
        m["config"] = to_entries(cfg);
        m["config_ini"] = to_ini(cfg);
        m["base_seed"] = cfg.ensemble.seed;
        m["trajectories"] = cfg.ensemble.trajectories;
        m["workers"] = cfg.ensemble.workers;
        m["code_version"] = std::string("qhe ") + QHE_VERSION;
        metrics["wall_seconds"] = wall;
        m["metrics"] = metrics;
        m["outputs"] = outputs_;
        std::ofstream os(fs::path(g_.out) / "manifest.json");
        os << m.dump(2) << '\n';
        std::cout << "wrote " << outputs_.size() << " output(s) and manifest.json to " << g_.out
                  << '\n';
    }

  private:
    Globals const& g_;
    std::string verb_;
    std::vector<std::string> argv_;
    std::vector<std::string> outputs_;
    std::chrono::steady_clock::time_point start_;
};

std::vector<double> grid_values(double from, double to, std::size_t points)
{
    if (points == 0)
        throw UsageError("empty range: --points must be >= 1");
    if (points > 1 && !(to > from))
        throw UsageError("empty range: --to must exceed --from");
    return linspace(from, to, points);
}

double mechanical_period(SimulationConfig const& cfg)
{
    return 2.0 * std::numbers::pi / cfg.system.omega_b;
}

EnsembleOptions ensemble_options(SimulationConfig const& cfg)
{
    EnsembleOptions o;
    o.n_trajectories = cfg.ensemble.trajectories;
    o.base_seed = cfg.ensemble.seed;
    o.workers = cfg.ensemble.workers;
    o.traces = cfg.ensemble.traces;
    return o;
}

// Power of a simulated ensemble: extracted power when the mechanical mode is
// damped, linear-growth power otherwise.
struct SimPower
{
    double power;
    std::optional<SaturationFit> fit;
    std::optional<ExtractedPower> extracted;
};

SimPower simulated_power(EnsembleStats const& stats, SimulationConfig const& cfg)
{
    double const transient = cfg.ensemble.transient_periods * mechanical_period(cfg);
    SimPower p{};
    if (cfg.system.gamma_b > 0.0)
    {
        p.fit = fit_exponential_saturation(stats, transient);
        p.extracted = extracted_power(p.fit->n_ss, cfg.system, cfg.hot, cfg.cold);
        p.power = p.extracted->power;
    }
    else
    {
        p.power = fit_linear_growth(stats, transient, cfg.system.omega_b).power;
    }
    return p;
}

void write_histogram(std::ostream& os, Histogram const& h)
{
    CsvWriter csv(os);
    csv.header({"bin_lo", "bin_hi", "count"});
    for (std::size_t i = 0; i < h.counts.size(); ++i)
        csv.row({csv_num(h.edges[i]), csv_num(h.edges[i + 1]), std::to_string(h.counts[i])});
}

json report_json(PerformanceReport const& r)
{
    json j;
    auto opt = [](std::optional<double> const& v) { return v ? json(*v) : json(nullptr); };
    if (r.growth)
        j["power_growth"] = {{"slope", r.growth->slope}, {"power", r.growth->power}};
    else
        j["power_growth"] = nullptr;
    if (r.saturation)
        j["n_ss"] = {{"n_ss", r.saturation->n_ss},
                     {"rate", r.saturation->rate},
                     {"n0", r.saturation->n0},
                     {"residual_rms", r.saturation->residual_rms}};
    else
        j["n_ss"] = nullptr;
    j["n_b_thermal"] = r.n_b_thermal;
    j["n_b_coherent"] = opt(r.n_b_coherent);
    j["power_extracted"] = opt(r.power_extracted);
    j["operating"] = r.operating;
    j["delta_n_cycle"] = r.delta_n_cycle;
    j["eta"] = opt(r.eta);
    j["fano"] = opt(r.fano);
    j["transient"] = r.transient;
    return j;
}

//---------------------------------------------------------------------------//
// Verbs
//---------------------------------------------------------------------------//

struct AnalyticalArgs
{
    std::string axis;
    double from = 0.0;
    double to = 0.3;
    std::size_t points = 200;
};

void verb_analytical(Run& run, Globals const& g, AnalyticalArgs const& a)
{
    auto cfg = resolve_config(g, analytical_reference_config());
    SweepAxis const axis = sweep_axis_from_string(a.axis);
    auto rows = analytical_sweep(cfg, axis, grid_values(a.from, a.to, a.points));
    auto os = run.open("analytical.csv");
    write_sweep_csv(os, axis, rows);
    auto const& best = power_optimum(rows);
    std::cout << "max power " << best.report.power << " at " << a.axis << " = " << best.value
              << '\n';
    run.finish(cfg, {{"rows", rows.size()}});
}

struct SimulateArgs
{
    std::size_t dump = 0;
};

void verb_simulate(Run& run, Globals const& g, SimulateArgs const& a)
{
    auto cfg = resolve_config(g, hle_reference_config());
    require_valid(cfg);
    auto stats = run_ensemble(cfg, ensemble_options(cfg));
    {
        auto os = run.open("ensemble.csv");
        write_ensemble_csv(os, stats);
    }
    {
        auto os = run.open("terminal.csv");
        write_terminal_csv(os, stats);
    }
    if (!stats.traces.empty())
    {
        auto os = run.open("traces.csv");
        write_traces_csv(os, stats);
    }
    if (a.dump > 0)
    {
        auto const ctx = prepare_solver(cfg);
        for (std::size_t i = 0; i < std::min(a.dump, cfg.ensemble.trajectories); ++i)
        {
            auto traj = simulate_trajectory(ctx, cfg.ensemble.seed, i);
            auto os = run.open("trajectory_" + std::to_string(i) + ".csv");
            CsvWriter csv(os);
            csv.header({"t", "alpha_re", "alpha_im", "beta_re", "beta_im"});
            for (std::size_t k = 0; k < traj.alpha.size(); ++k)
                csv.row({csv_num(traj.grid.time(k)), csv_num(traj.alpha[k].real()),
                         csv_num(traj.alpha[k].imag()), csv_num(traj.beta[k].real()),
                         csv_num(traj.beta[k].imag())});
        }
    }
    std::cout << "final mean n_a " << stats.mean_n_a.back() << ", mean n_b "
              << stats.mean_n_b.back() << " over " << stats.n_trajectories << " trajectories\n";
    run.finish(cfg, {{"steps_integrated", stats.steps_integrated}});
}

struct DecayArgs
{
    std::vector<double> q_b;
};

void verb_decay_sweep(Run& run, Globals const& g, DecayArgs const& a)
{
    auto cfg = resolve_config(g, hle_reference_config());
    if (a.q_b.empty())
        throw UsageError("decay-sweep: give at least one --q-b value");
    for (double q : a.q_b)
        (void)gamma_from_quality(cfg.system.omega_b, q);  // rejects Q <= 0 up front
    require_valid(cfg);

    auto os = run.open("decay_sweep.csv");
    CsvWriter csv(os);
    csv.header({"Q_b", "n_ss", "n_coh", "power", "eta"});
    std::uint64_t steps = 0;
    for (double q : a.q_b)
    {
        SimulationConfig c = cfg;
        c.system.gamma_b = gamma_from_quality(c.system.omega_b, q);
        auto stats = run_ensemble(c, ensemble_options(c));
        steps += stats.steps_integrated;
        auto rep = analyze(stats, c);
        csv.row({csv_num(q), csv_num(rep.saturation->n_ss), csv_opt(rep.n_b_coherent),
                 csv_opt(rep.power_extracted), csv_opt(rep.eta)});
        std::cout << "Q_b " << q << ": n_ss " << rep.saturation->n_ss << ", power "
                  << *rep.power_extracted << '\n';
    }
    run.finish(cfg, {{"steps_integrated", steps}});
}

struct ParamArgs
{
    std::string axis;
    double from = 0.0;
    double to = 0.0;
    std::size_t points = 0;
    std::string analytical_config;
};

void verb_param_sweep(Run& run, Globals const& g, ParamArgs const& a)
{
    auto cfg = resolve_config(g, hle_reference_config());
    require_valid(cfg);
    auto values = grid_values(a.from, a.to, a.points);
    SimulationConfig ana_base = analytical_reference_config();
    if (!a.analytical_config.empty())
        ana_base = load_config(a.analytical_config, ana_base);

    std::optional<SweepAxis> ana_axis;
    if (a.axis != "g0")
        ana_axis = sweep_axis_from_string(a.axis);
    if (ana_axis && *ana_axis != SweepAxis::OmegaB && *ana_axis != SweepAxis::ReservoirSeparation
        && *ana_axis != SweepAxis::TemperatureHot)
        throw UsageError("param-sweep axis must be one of omega_b|g0|reservoir_separation|T_h");

    auto os = run.open("param_sweep.csv");
    CsvWriter csv(os);
    csv.header({a.axis, "power_quasiclassical", "power_analytical"});
    std::uint64_t steps = 0;
    for (double v : values)
    {
        SimulationConfig c = cfg;
        SimulationConfig ana = ana_base;
        if (a.axis == "g0")
        {
            c.system.g0 = v;
            ana.system.g0 = v;
        }
        else
        {
            if (*ana_axis == SweepAxis::OmegaB && c.system.gamma_b > 0.0)
            {
                // Keep the quality factor fixed while the frequency moves.
                double const q = *quality_from_gamma(c.system.omega_b, c.system.gamma_b);
                c.system.gamma_b = gamma_from_quality(v, q);
            }
            c = with_axis_value(c, *ana_axis, v);
            ana = with_axis_value(ana, *ana_axis, v);
        }
        require_valid(c);
        auto stats = run_ensemble(c, ensemble_options(c));
        steps += stats.steps_integrated;
        double const p_sim = simulated_power(stats, c).power;
        double const p_ana = analytical_report(ana).power;
        csv.row({csv_num(v), csv_num(p_sim), csv_num(p_ana)});
        std::cout << a.axis << " = " << v << ": quasiclassical " << p_sim << ", analytical "
                  << p_ana << '\n';
    }
    run.finish(cfg, {{"steps_integrated", steps}});
}

struct FluctuationArgs
{
    std::size_t traces = 100;
    std::size_t bins = 0;
};

void verb_fluctuations(Run& run, Globals const& g, FluctuationArgs const& a)
{
    auto cfg = resolve_config(g, hle_reference_config());
    require_valid(cfg);
    auto opt = ensemble_options(cfg);
    opt.traces = a.traces;
    auto stats = run_ensemble(cfg, opt);
    {
        auto os = run.open("traces.csv");
        write_traces_csv(os, stats);
    }
    {
        auto os = run.open("terminal.csv");
        write_terminal_csv(os, stats);
    }
    auto const hist = histogram(stats.terminal_n_b, a.bins);
    {
        auto os = run.open("histogram.csv");
        write_histogram(os, hist);
    }
    double const f = fano_factor(stats.terminal_n_b);
    double mean = 0.0;
    for (double x : stats.terminal_n_b)
        mean += x;
    mean /= static_cast<double>(stats.terminal_n_b.size());
    run.write_json("fluctuations.json", {{"fano", f},
                                         {"samples", stats.terminal_n_b.size()},
                                         {"mean", mean},
                                         {"variance", f * mean},
                                         {"bins", hist.counts.size()}});
    std::cout << "Fano factor " << f << " from " << stats.terminal_n_b.size() << " samples\n";
    run.finish(cfg, {{"steps_integrated", stats.steps_integrated}});
}

struct SpectraArgs
{
    double from = 0.8;
    double to = 1.2;
    std::size_t points = 401;
};

void verb_spectra_dump(Run& run, Globals const& g, SpectraArgs const& a)
{
    auto cfg = resolve_config(g, hle_reference_config());
    auto os = run.open("spectra.csv");
    CsvWriter csv(os);
    csv.header({"omega", "J_h", "J_c", "S_h", "S_c"});
    for (double w : grid_values(a.from, a.to, a.points))
        csv.row({csv_num(w), csv_num(spectral_density(w, cfg.hot)),
                 csv_num(spectral_density(w, cfg.cold)), csv_num(noise_psd(w, cfg.hot)),
                 csv_num(noise_psd(w, cfg.cold))});
    run.finish(cfg);
}

void verb_kernel_dump(Run& run, Globals const& g)
{
    auto cfg = resolve_config(g, hle_reference_config());
    require_valid(cfg);
    auto const& s = cfg.solver;
    auto kh = tabulate_kernel(cfg.hot, cfg.grid, s.kernel_eps_tail, s.kernel_method);
    auto kc = tabulate_kernel(cfg.cold, cfg.grid, s.kernel_eps_tail, s.kernel_method);
    std::size_t const w = std::max(kh.window, kc.window);
    kh = with_window(cfg.hot, kh, w, s.kernel_method);
    kc = with_window(cfg.cold, kc, w, s.kernel_method);
    auto os = run.open("kernel.csv");
    CsvWriter csv(os);
    csv.header({"t", "kappa_h", "kappa_c"});
    for (std::size_t k = 0; k <= w; ++k)
        csv.row({csv_num(cfg.grid.dt * static_cast<double>(k)), csv_num(kh.kappa[k]),
                 csv_num(kc.kappa[k])});
    run.finish(cfg, {{"window_h", kh.window}, {"window_c", kc.window}});
}

struct NoiseArgs
{
    std::size_t realizations = 100;
    std::size_t segment = 32768;
};

double band_relative_l2(SpectrumEstimate const& est, ReservoirSpec const& r)
{
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < est.omega.size(); ++k)
    {
        double const w = est.omega[k];
        if (w < r.omega_center - 2.0 * r.width || w > r.omega_center + 2.0 * r.width)
            continue;
        double const target = noise_psd(w, r);
        num += (est.psd[k] - target) * (est.psd[k] - target);
        den += target * target;
    }
    return std::sqrt(num / den);
}

void verb_noise_selftest(Run& run, Globals const& g, NoiseArgs const& a)
{
    auto cfg = resolve_config(g, hle_reference_config());
    require_valid(cfg);
    auto const ph = build_filter(cfg.hot, cfg.grid);
    auto const pc = build_filter(cfg.cold, cfg.grid);
    WelchAccumulator wh(cfg.grid.dt, a.segment);
    WelchAccumulator wc(cfg.grid.dt, a.segment);
    auto const ctx = prepare_solver(cfg);
    for (std::size_t i = 0; i < a.realizations; ++i)
    {
        auto noise = draw_noise(ctx, cfg.ensemble.seed, i);
        wh.add(noise.hot);
        wc.add(noise.cold);
    }
    auto const eh = wh.result();
    auto const ec = wc.result();
    auto os = run.open("noise_selftest.csv");
    CsvWriter csv(os);
    csv.header({"omega", "S_target_h", "S_estimated_h", "S_target_c", "S_estimated_c"});
    for (std::size_t k = 0; k < eh.omega.size(); ++k)
        csv.row({csv_num(eh.omega[k]), csv_num(noise_psd(eh.omega[k], cfg.hot)),
                 csv_num(eh.psd[k]), csv_num(noise_psd(ec.omega[k], cfg.cold)),
                 csv_num(ec.psd[k])});
    double const lh = band_relative_l2(eh, cfg.hot);
    double const lc = band_relative_l2(ec, cfg.cold);
    run.write_json("noise_selftest.json", {{"relative_l2_hot", lh},
                                           {"relative_l2_cold", lc},
                                           {"realizations", a.realizations},
                                           {"segment", a.segment}});
    std::cout << "relative L2 error over omega +- 2 gamma: hot " << lh << ", cold " << lc << '\n';
    run.finish(cfg);
}

struct AnalyzeArgs
{
    std::string in;
};

void verb_analyze(Run& run, Globals const& g, AnalyzeArgs const& a)
{
    fs::path const dir(a.in);
    std::ifstream mf(dir / "manifest.json");
    if (!mf)
        throw ConfigError("cannot open " + (dir / "manifest.json").string());
    json const m = json::parse(mf);
    SimulationConfig cfg = from_entries(m.at("config").get<ConfigEntries>());
    // Analysis knobs (e.g. ensemble.transient_periods) may be overridden.
    Globals local = g;
    local.config_path.clear();
    cfg = resolve_config(local, cfg);

    std::ifstream series(dir / "ensemble.csv");
    std::ifstream terminal(dir / "terminal.csv");
    if (!series || !terminal)
        throw ConfigError("analyze: " + dir.string() + " lacks ensemble.csv or terminal.csv");
    auto stats = read_ensemble_csv(series, terminal);
    auto rep = analyze(stats, cfg);
    run.write_json("report.json", report_json(rep));

    auto ext = cycle_extrema(stats, cfg.system.omega_b, rep.transient);
    {
        auto os = run.open("extrema.csv");
        CsvWriter csv(os);
        csv.header({"window_start", "max_n_a", "min_n_a"});
        for (std::size_t i = 0; i < ext.maxima.size(); ++i)
            csv.row({csv_num(ext.window_start[i]), csv_num(ext.maxima[i]),
                     csv_num(ext.minima[i])});
    }
    {
        auto os = run.open("histogram.csv");
        write_histogram(os, histogram(stats.terminal_n_b));
    }
    std::cout << report_json(rep).dump() << '\n';
    run.finish(cfg);
}

//---------------------------------------------------------------------------//

int run_cli(std::vector<std::string> args);

std::vector<std::string> const value_globals{"--config", "--out", "--seed", "--trajectories",
                                             "--workers", "--set", "--manifest"};

int verb_replay(std::string const& manifest_path, Globals const& g)
{
    std::ifstream in(manifest_path);
    if (!in)
        throw ConfigError("cannot open manifest " + manifest_path);
    json const m = json::parse(in);
    auto const argv = m.at("argv").get<std::vector<std::string>>();
    std::vector<std::string> args;
    for (std::size_t i = 0; i < argv.size(); ++i)
    {
        std::string const& t = argv[i];
        bool skip_value = false;
        bool drop = t == "--no-env";
        for (auto const& name : value_globals)
        {
            if (t == name)
            {
                drop = true;
                skip_value = true;
            }
            else if (t.rfind(name + "=", 0) == 0)
            {
                drop = true;
            }
        }
        if (skip_value)
            ++i;
        if (!drop)
            args.push_back(t);
    }
    fs::path const tmp =
        fs::temp_directory_path() / ("qhe_replay_" + std::to_string(std::hash<std::string>{}(
                                                         m.at("config_ini").get<std::string>()
                                                         + g.out))
                                     + ".ini");
    {
        std::ofstream os(tmp);
        os << m.at("config_ini").get<std::string>();
    }
    args.insert(args.end(), {"--config", tmp.string(), "--out", g.out, "--no-env"});
    int const rc = run_cli(args);
    fs::remove(tmp);
    return rc;
}

int run_cli(std::vector<std::string> args)
{
    std::vector<std::string> const recorded = args;
    CLI::App app{"Quantum heat engine models: closed-form Otto cycle and quasiclassical "
                 "Heisenberg-Langevin ensembles"};
    app.set_version_flag("--version", std::string("qhe ") + QHE_VERSION);
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--config", g.config_path, "INI configuration file");
    app.add_option("--seed", g.seed, "base seed of the trajectory streams");
    app.add_option("--trajectories", g.trajectories, "ensemble size")->check(CLI::PositiveNumber);
    app.add_option("--workers", g.workers, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "output directory")->capture_default_str();
    app.add_option("--set", g.sets, "override a configuration key, key=value (repeatable)");
    app.add_flag("--no-env", g.no_env, "ignore QHE_* environment overrides");

    AnalyticalArgs aa;
    auto* c_ana = app.add_subcommand("analytical", "closed-form model sweep");
    c_ana->add_option("--axis", aa.axis,
                      "omega_b|delta_omega_a|reservoir_separation|T_h|Gamma")->required();
    c_ana->add_option("--from", aa.from)->capture_default_str();
    c_ana->add_option("--to", aa.to)->capture_default_str();
    c_ana->add_option("--points", aa.points)->capture_default_str();

    SimulateArgs sa;
    auto* c_sim = app.add_subcommand("simulate", "trajectory ensemble");
    c_sim->add_option("--dump-trajectories", sa.dump,
                      "write the full amplitudes of the first N trajectories");

    DecayArgs da;
    auto* c_decay = app.add_subcommand("decay-sweep", "ensembles over mechanical quality factors");
    c_decay->add_option("--q-b", da.q_b, "quality factors")->delimiter(',')->required();

    ParamArgs pa;
    auto* c_param = app.add_subcommand("param-sweep", "quasiclassical vs closed-form power");
    c_param->add_option("--axis", pa.axis, "omega_b|g0|reservoir_separation|T_h")->required();
    c_param->add_option("--from", pa.from)->required();
    c_param->add_option("--to", pa.to)->required();
    c_param->add_option("--points", pa.points)->required();
    c_param->add_option("--analytical-config", pa.analytical_config,
                        "step-reservoir configuration of the closed-form column");

    FluctuationArgs fa;
    auto* c_fluct = app.add_subcommand("fluctuations", "terminal occupation statistics");
    c_fluct->add_option("--traces", fa.traces, "n_b traces to keep")->capture_default_str();
    c_fluct->add_option("--bins", fa.bins, "histogram bins (0: sqrt N)")->capture_default_str();

    SpectraArgs spa;
    auto* c_spec = app.add_subcommand("spectra", "reservoir spectra");
    c_spec->require_subcommand(1);
    auto* c_spec_dump = c_spec->add_subcommand("dump", "J and S on a frequency grid");
    c_spec_dump->add_option("--from", spa.from)->capture_default_str();
    c_spec_dump->add_option("--to", spa.to)->capture_default_str();
    c_spec_dump->add_option("--points", spa.points)->capture_default_str();

    auto* c_kernel = app.add_subcommand("kernel", "memory kernels");
    c_kernel->require_subcommand(1);
    auto* c_kernel_dump = c_kernel->add_subcommand("dump", "tabulated kernels");

    NoiseArgs na;
    auto* c_noise = app.add_subcommand("noise", "noise synthesis");
    c_noise->require_subcommand(1);
    auto* c_noise_self = c_noise->add_subcommand("selftest", "Welch estimate against target");
    c_noise_self->add_option("--realizations", na.realizations)->capture_default_str();
    c_noise_self->add_option("--segment", na.segment)->capture_default_str();

    AnalyzeArgs ana;
    auto* c_analyze = app.add_subcommand("analyze", "figures of merit of a simulate output");
    c_analyze->add_option("--in", ana.in, "directory written by simulate")->required();

    std::string manifest;
    auto* c_replay = app.add_subcommand("replay", "re-run the invocation recorded in a manifest");
    c_replay->add_option("--manifest", manifest)->required();

    for (auto* sub : {c_ana, c_sim, c_decay, c_param, c_fluct, c_spec, c_spec_dump, c_kernel,
                      c_kernel_dump, c_noise, c_noise_self, c_analyze, c_replay})
        sub->fallthrough();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try
    {
        app.parse(reversed);
    }
    catch (CLI::CallForHelp const& e)
    {
        return app.exit(e);
    }
    catch (CLI::CallForAllHelp const& e)
    {
        return app.exit(e);
    }
    catch (CLI::CallForVersion const& e)
    {
        return app.exit(e);
    }
    catch (CLI::ParseError const& e)
    {
        app.exit(e);
        return exit_usage;
    }

    if (c_replay->parsed())
        return verb_replay(manifest, g);

    std::string verb;
    if (c_spec_dump->parsed())
        verb = "spectra dump";
    else if (c_kernel_dump->parsed())
        verb = "kernel dump";
    else if (c_noise_self->parsed())
        verb = "noise selftest";
    else
        verb = app.get_subcommands().front()->get_name();

    Run run(g, verb, recorded);
    if (c_ana->parsed())
        verb_analytical(run, g, aa);
    else if (c_sim->parsed())
        verb_simulate(run, g, sa);
    else if (c_decay->parsed())
        verb_decay_sweep(run, g, da);
    else if (c_param->parsed())
        verb_param_sweep(run, g, pa);
    else if (c_fluct->parsed())
        verb_fluctuations(run, g, fa);
    else if (c_spec_dump->parsed())
        verb_spectra_dump(run, g, spa);
    else if (c_kernel_dump->parsed())
        verb_kernel_dump(run, g);
    else if (c_noise_self->parsed())
        verb_noise_selftest(run, g, na);
    else if (c_analyze->parsed())
        verb_analyze(run, g, ana);
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    try
    {
        return run_cli(args);
    }
    catch (UsageError const& e)
    {
        std::cerr << "usage error: " << e.what() << '\n';
        return exit_usage;
    }
    catch (ConfigError const& e)
    {
        std::cerr << "configuration error: " << e.what() << '\n';
        return exit_usage;
    }
    catch (DomainError const& e)
    {
        std::cerr << "invalid input: " << e.what() << '\n';
        return exit_usage;
    }
    catch (NumericError const& e)
    {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return exit_numeric;
    }
    catch (DegenerateInputError const& e)
    {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return exit_numeric;
    }
    catch (std::exception const& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
