#include "qhe/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <vector>

namespace qhe {

namespace {

std::string format_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(std::string const& key, std::string const& text)
{
    std::string s = text;
    s.erase(0, s.find_first_not_of(" \t"));
    s.erase(s.find_last_not_of(" \t") + 1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ConfigError("key '" + key + "': cannot parse '" + text + "' as a number");
    return v;
}

std::uint64_t parse_u64(std::string const& key, std::string const& text)
{
    std::string s = text;
    s.erase(0, s.find_first_not_of(" \t"));
    s.erase(s.find_last_not_of(" \t") + 1);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ConfigError("key '" + key + "': cannot parse '" + text
                          + "' as a non-negative integer");
    return v;
}

bool parse_bool(std::string const& key, std::string const& text)
{
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c)))
            s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s == "true" || s == "on" || s == "1" || s == "yes")
        return true;
    if (s == "false" || s == "off" || s == "0" || s == "no")
        return false;
    throw ConfigError("key '" + key + "': expected a boolean, got '" + text + "'");
}

struct Field
{
    std::string key;  // section.name
    std::function<std::string(SimulationConfig const&)> get;
    std::function<void(SimulationConfig&, std::string const&)> set;
};

template<class Member>
Field real_field(std::string key, Member member)
{
    return {key,
            [member](SimulationConfig const& c) { return format_double(member(c)); },
            [member, key](SimulationConfig& c, std::string const& v) { member(c) = parse_double(key, v); }};
}

template<class Member>
Field size_field(std::string key, Member member)
{
    return {key,
            [member](SimulationConfig const& c) {
                return std::to_string(member(c));
            },
            [member, key](SimulationConfig& c, std::string const& v) {
                member(c) = static_cast<std::remove_cvref_t<decltype(member(c))>>(parse_u64(key, v));
            }};
}

template<class Member>
Field bool_field(std::string key, Member member)
{
    return {key,
            [member](SimulationConfig const& c) {
                return std::string(member(c) ? "true" : "false");
            },
            [member, key](SimulationConfig& c, std::string const& v) { member(c) = parse_bool(key, v); }};
}

void add_reservoir_fields(std::vector<Field>& f, std::string const& section,
                          ReservoirSpec SimulationConfig::*res)
{
    f.push_back({section + ".kind",
                 [res](SimulationConfig const& c) { return to_string((c.*res).kind); },
                 [res](SimulationConfig& c, std::string const& v) {
                     (c.*res).kind = reservoir_kind_from_string(v);
                 }});
    f.push_back(real_field(section + ".omega", [res](auto& c) -> auto& { return (c.*res).omega_center; }));
    f.push_back(real_field(section + ".temperature", [res](auto& c) -> auto& { return (c.*res).temperature; }));
    f.push_back(real_field(section + ".width", [res](auto& c) -> auto& { return (c.*res).width; }));
    f.push_back(real_field(section + ".coupling", [res](auto& c) -> auto& { return (c.*res).coupling; }));
}

std::vector<Field> const& schema()
{
    static std::vector<Field> const fields = [] {
        std::vector<Field> f;
        f.push_back(real_field("system.omega_a0", [](auto& c) -> auto& { return c.system.omega_a0; }));
        f.push_back(real_field("system.omega_b", [](auto& c) -> auto& { return c.system.omega_b; }));
        f.push_back(real_field("system.g0", [](auto& c) -> auto& { return c.system.g0; }));
        f.push_back(real_field("system.gamma_b", [](auto& c) -> auto& { return c.system.gamma_b; }));
        f.push_back(real_field("system.n_a0", [](auto& c) -> auto& { return c.initial.n_a; }));
        f.push_back(real_field("system.n_b0", [](auto& c) -> auto& { return c.initial.n_b; }));
        f.push_back(real_field("system.phase_a0", [](auto& c) -> auto& { return c.initial.phase_a; }));
        f.push_back(real_field("system.phase_b0", [](auto& c) -> auto& { return c.initial.phase_b; }));
        add_reservoir_fields(f, "hot_reservoir", &SimulationConfig::hot);
        add_reservoir_fields(f, "cold_reservoir", &SimulationConfig::cold);
        f.push_back(real_field("drive.delta_omega_a", [](auto& c) -> auto& { return c.drive.delta_omega_a; }));
        f.push_back(real_field("drive.phase", [](auto& c) -> auto& { return c.drive.phase; }));
        f.push_back(real_field("grid.dt", [](auto& c) -> auto& { return c.grid.dt; }));
        f.push_back(size_field("grid.n_steps", [](auto& c) -> auto& { return c.grid.n_steps; }));
        f.push_back(real_field("grid.t0", [](auto& c) -> auto& { return c.grid.t0; }));
        f.push_back(real_field("solver.kernel_eps_tail", [](auto& c) -> auto& { return c.solver.kernel_eps_tail; }));
        f.push_back({"solver.kernel_method",
                     [](SimulationConfig const& c) {
                         return std::string(c.solver.kernel_method == KernelMethod::Residue ? "residue" : "quadrature");
                     },
                     [](SimulationConfig& c, std::string const& v) {
                         if (v == "residue")
                             c.solver.kernel_method = KernelMethod::Residue;
                         else if (v == "quadrature")
                             c.solver.kernel_method = KernelMethod::Quadrature;
                         else
                             throw ConfigError("solver.kernel_method: expected residue|quadrature, got '" + v + "'");
                     }});
        f.push_back({"solver.memory_path",
                     [](SimulationConfig const& c) {
                         return std::string(c.solver.memory_path == MemoryPath::Fft ? "fft" : "direct");
                     },
                     [](SimulationConfig& c, std::string const& v) {
                         if (v == "fft")
                             c.solver.memory_path = MemoryPath::Fft;
                         else if (v == "direct")
                             c.solver.memory_path = MemoryPath::Direct;
                         else
                             throw ConfigError("solver.memory_path: expected fft|direct, got '" + v + "'");
                     }});
        f.push_back(size_field("solver.block_size", [](auto& c) -> auto& { return c.solver.block_size; }));
        f.push_back(bool_field("solver.noise", [](auto& c) -> auto& { return c.solver.noise; }));
        f.push_back(bool_field("solver.memory", [](auto& c) -> auto& { return c.solver.memory; }));
        f.push_back(size_field("solver.record_stride", [](auto& c) -> auto& { return c.solver.record_stride; }));
        f.push_back(size_field("ensemble.trajectories", [](auto& c) -> auto& { return c.ensemble.trajectories; }));
        f.push_back(size_field("ensemble.seed", [](auto& c) -> auto& { return c.ensemble.seed; }));
        f.push_back(size_field("ensemble.workers", [](auto& c) -> auto& { return c.ensemble.workers; }));
        f.push_back(real_field("ensemble.transient_periods", [](auto& c) -> auto& { return c.ensemble.transient_periods; }));
        f.push_back(size_field("ensemble.traces", [](auto& c) -> auto& { return c.ensemble.traces; }));
        return f;
    }();
    return fields;
}

Field const* find_field(std::string const& key)
{
    for (auto const& f : schema())
        if (f.key == key)
            return &f;
    return nullptr;
}

std::string env_name(std::string const& key)
{
    std::string name = "QHE_";
    for (char c : key)
        name += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return name;
}

}  // namespace

void set_config_value(SimulationConfig& cfg, std::string const& key, std::string const& value)
{
    if (key == "system.q_b")
    {
        double const q = parse_double(key, value);
        cfg.system.gamma_b = gamma_from_quality(cfg.system.omega_b, q);
        return;
    }
    Field const* f = find_field(key);
    if (!f)
        throw ConfigError("unknown configuration key '" + key + "'");
    f->set(cfg, value);
}

ConfigEntries to_entries(SimulationConfig const& cfg)
{
    ConfigEntries out;
    for (auto const& f : schema())
        out[f.key] = f.get(cfg);
    return out;
}

SimulationConfig from_entries(ConfigEntries const& entries, SimulationConfig const& base)
{
    SimulationConfig cfg = base;
    std::optional<std::string> q_b;
    bool has_gamma = false;
    for (auto const& [key, value] : entries)
    {
        if (key == "system.q_b")
        {
            q_b = value;
            continue;
        }
        has_gamma = has_gamma || key == "system.gamma_b";
        set_config_value(cfg, key, value);
    }
    if (q_b)
    {
        if (has_gamma)
            throw ConfigError("give either system.gamma_b or system.q_b, not both");
        // Applied last so that the conversion sees the final omega_b.
        set_config_value(cfg, "system.q_b", *q_b);
    }
    return cfg;
}

SimulationConfig parse_config(std::string const& text, SimulationConfig const& base)
{
    boost::property_tree::ptree tree;
    std::istringstream is(text);
    try
    {
        boost::property_tree::read_ini(is, tree);
    }
    catch (boost::property_tree::ini_parser_error const& e)
    {
        throw ConfigError(std::string("malformed configuration: ") + e.message() + " (line "
                          + std::to_string(e.line()) + ")");
    }
    ConfigEntries entries;
    for (auto const& [section, body] : tree)
    {
        if (body.empty())
            throw ConfigError("key '" + section + "' appears outside of a section");
        for (auto const& [key, value] : body)
            entries[section + "." + key] = value.get_value<std::string>();
    }
    return from_entries(entries, base);
}

SimulationConfig load_config(std::filesystem::path const& path, SimulationConfig const& base)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open configuration file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), base);
}

std::string to_ini(SimulationConfig const& cfg)
{
    std::ostringstream os;
    std::string current;
    for (auto const& f : schema())
    {
        auto const dot = f.key.find('.');
        std::string const section = f.key.substr(0, dot);
        if (section != current)
        {
            if (!current.empty())
                os << '\n';
            os << '[' << section << "]\n";
            current = section;
        }
        os << f.key.substr(dot + 1) << " = " << f.get(cfg) << '\n';
    }
    return os.str();
}

SimulationConfig apply_env_overrides(SimulationConfig const& cfg)
{
    SimulationConfig out = cfg;
    for (auto const& f : schema())
    {
        if (char const* v = std::getenv(env_name(f.key).c_str()))
            f.set(out, v);
    }
    if (char const* v = std::getenv("QHE_SYSTEM_Q_B"))
        set_config_value(out, "system.q_b", v);
    return out;
}

SimulationConfig hle_reference_config()
{
    SimulationConfig c;
    c.system = {1.0, 0.048, 0.012, 0.0};
    c.initial = {0.5, 39.0, 0.0, 0.0};
    c.hot = {ReservoirKind::Lorentzian, 1.04, 0.56, 0.031, 0.007};
    c.cold = {ReservoirKind::Lorentzian, 0.964, 0.11, 0.025, 0.0082};
    c.drive = {0.0, 0.0};
    double const period = 2.0 * std::numbers::pi / c.system.omega_b;
    c.grid.dt = 0.05;
    c.grid.n_steps = static_cast<std::size_t>(std::ceil(20.0 * period / c.grid.dt)) + 1;
    return c;
}

SimulationConfig analytical_reference_config()
{
    SimulationConfig c;
    c.system = {1.0, 0.05, 0.01, 0.0};
    c.hot = {ReservoirKind::Step, 1.03, 0.56, 0.04, 0.022};
    c.cold = {ReservoirKind::Step, 0.97, 0.11, 0.04, 0.022};
    c.drive = {0.139, 0.0};
    return c;
}

ValidationReport validate(SimulationConfig const& cfg)
{
    ValidationReport rep = validate_config(cfg.system, cfg.hot, cfg.cold, cfg.grid);
    validate_drive(cfg.drive, rep);
    validate_initial(cfg.initial, rep);
    if (!(cfg.solver.kernel_eps_tail > 0.0 && cfg.solver.kernel_eps_tail < 1.0))
        rep.issues.push_back({Severity::Violation, "kernel_eps_tail", "must lie in (0, 1)"});
    if (cfg.solver.record_stride == 0)
        rep.issues.push_back({Severity::Violation, "record_stride", "must be >= 1"});
    if (cfg.ensemble.trajectories == 0)
        rep.issues.push_back({Severity::Violation, "trajectories", "need at least one trajectory"});
    if (cfg.ensemble.workers == 0)
        rep.issues.push_back({Severity::Violation, "workers", "need at least one worker"});
    if (!(cfg.ensemble.transient_periods >= 0.0))
        rep.issues.push_back({Severity::Violation, "transient_periods", "must be >= 0"});
    return rep;
}

}  // namespace qhe
