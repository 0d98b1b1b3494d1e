#ifndef DWELL_CONFIG_HPP
#define DWELL_CONFIG_HPP

// Scenario configuration: a flat sectioned key/value text format.
//
//   # comment
//   [scenario]
//   preset = fig3
//   [potential]
//   gamma = 0.05
//
// Keys outside any section belong to [scenario]. A preset is expanded first
// and every other key overrides it, regardless of order in the file.

#include "dwell/grid.hpp"
#include "dwell/model.hpp"
#include "dwell/spectrum.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace dwell {

class ConfigError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

struct GridRequest
{
    std::size_t n1 = 128;
    std::size_t n2 = 256;
    double L1 = 8.0;
    double L2 = 12.0;

    bool operator==(const GridRequest&) const = default;
};

struct ClassicalConfig
{
    std::size_t n = 2000;
    double dt = 1e-3;
    std::uint64_t seed = 1;
    bool ring = false;

    bool operator==(const ClassicalConfig&) const = default;
};

struct SweepConfig
{
    std::string parameter;
    std::vector<double> values;

    bool operator==(const SweepConfig&) const = default;
};

struct ScenarioConfig
{
    std::string preset;
    bool paper_mass = false;
    unsigned workers = 1;

    PotentialParams params;
    Side side1 = Side::right;
    Side side2 = Side::left;
    double alpha1 = 3.0;
    double alpha2 = 3.0;

    GridRequest grid;

    double dt = 0.002;
    double t_final = 400.0;
    double sample_every = 0.5;
    double autocorr_every = 0.05;
    double mean_begin = 0.0;
    /// Unset means t_final.
    std::optional<double> mean_end;

    Window spectrum_window = Window::hann;
    std::size_t zero_padding = 4;

    ClassicalConfig classical;

    std::string out_dir = ".";
    std::string basename = "run";

    std::optional<SweepConfig> sweep;

    double window_end() const { return mean_end.value_or(t_final); }

    bool operator==(const ScenarioConfig& o) const
    {
        auto pp = [](const PotentialParams& p) {
            return std::tie(p.m1, p.m2, p.k1, p.k2, p.lambda1, p.lambda2, p.a1, p.a2, p.gamma, p.l0, p.hbar);
        };
        return preset == o.preset && paper_mass == o.paper_mass && workers == o.workers && pp(params) == pp(o.params)
               && side1 == o.side1 && side2 == o.side2 && alpha1 == o.alpha1 && alpha2 == o.alpha2 && grid == o.grid
               && dt == o.dt && t_final == o.t_final && sample_every == o.sample_every
               && autocorr_every == o.autocorr_every && mean_begin == o.mean_begin && window_end() == o.window_end()
               && spectrum_window == o.spectrum_window && zero_padding == o.zero_padding && classical == o.classical
               && out_dir == o.out_dir && basename == o.basename && sweep == o.sweep;
    }
};

// ---------------------------------------------------------------------------
// Presets

struct PresetInfo
{
    std::string name;
    std::string description;
};

inline std::vector<PresetInfo> preset_list()
{
    return {
        {"fig1", "light particle 2 (m2=1e-2 desk scale, 1e-4 with paper_mass), time series for several gamma"},
        {"fig2", "as fig1, gamma sweep for mean and cycle extrema of T_r"},
        {"fig3", "equal masses, lambda2=15, gamma=0.1 time series"},
        {"fig4", "as fig3, sweep over the barrier height lambda2 of particle 2"},
    };
}

namespace detail {
inline ScenarioConfig common_base()
{
    ScenarioConfig c;
    c.params.m1 = 1.0;
    c.params.k1 = c.params.k2 = 0.5;
    c.params.lambda1 = 3.0;
    c.params.a1 = c.params.a2 = 1.0;
    c.params.l0 = 0.5;
    c.params.hbar = 1.0;
    c.alpha1 = c.alpha2 = 3.0;
    c.side1 = Side::right;
    c.side2 = Side::left;
    c.classical.n = 20000;
    return c;
}

inline void apply_light_mass(ScenarioConfig& c, bool paper_mass)
{
    c.paper_mass = paper_mass;
    c.params.lambda2 = 3.0;
    if (paper_mass) {
        c.params.m2 = 1e-4;
        c.grid = {128, 2048, 8.0, 240.0};
        c.dt = 2e-4;
    } else {
        c.params.m2 = 1e-2;
        c.grid = {128, 512, 8.0, 24.0};
        c.dt = 0.002;
    }
}
} // namespace detail

inline ScenarioConfig make_preset(const std::string& name, bool paper_mass = false)
{
    auto c = detail::common_base();
    c.preset = name;
    c.basename = name;
    if (name == "fig1" || name == "fig2") {
        detail::apply_light_mass(c, paper_mass);
        c.params.gamma = 0.2;
        if (name == "fig1") {
            c.sweep = SweepConfig{"gamma", {0.01, 0.02, 0.05, 0.1, 0.2}};
        } else {
            c.sweep = SweepConfig{"gamma", {0.01, 0.02, 0.05, 0.1, 0.2, 0.4, 0.8, 1.6}};
        }
    } else if (name == "fig3" || name == "fig4") {
        if (paper_mass) {
            throw ConfigError("preset " + name + " has equal masses; paper_mass does not apply");
        }
        c.params.m2 = 1.0;
        c.params.lambda2 = 15.0;
        c.params.gamma = 0.1;
        c.grid = {128, 256, 8.0, 12.0};
        if (name == "fig4") {
            c.sweep = SweepConfig{"lambda2", {3.0, 6.0, 15.0, 30.0, 60.0}};
        }
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    return c;
}

// ---------------------------------------------------------------------------
// Key/value application

namespace detail {
inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& v, const std::string& key)
{
    double out = 0.0;
    const auto* end = v.data() + v.size();
    const auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || p != end || !std::isfinite(out)) {
        throw ConfigError("key '" + key + "': '" + v + "' is not a finite number");
    }
    return out;
}

inline std::uint64_t parse_uint(const std::string& v, const std::string& key)
{
    std::uint64_t out = 0;
    const auto* end = v.data() + v.size();
    const auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || p != end) {
        throw ConfigError("key '" + key + "': '" + v + "' is not a non-negative integer");
    }
    return out;
}

inline bool parse_bool(const std::string& v, const std::string& key)
{
    if (v == "true" || v == "1" || v == "yes") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no") {
        return false;
    }
    throw ConfigError("key '" + key + "': '" + v + "' is not a boolean");
}

inline Side parse_side(const std::string& v, const std::string& key)
{
    if (v == "left") {
        return Side::left;
    }
    if (v == "right") {
        return Side::right;
    }
    throw ConfigError("key '" + key + "': side must be 'left' or 'right'");
}

inline std::vector<double> parse_list(const std::string& v, const std::string& key)
{
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_double(trim(item), key));
    }
    return out;
}
} // namespace detail

/// Sets one key. `section` may be empty for scenario-level keys.
inline void apply_setting(ScenarioConfig& c, const std::string& section, const std::string& key, const std::string& value)
{
    using namespace detail;
    const std::string full = section.empty() ? key : section + "." + key;
    auto num = [&] { return parse_double(value, full); };
    const std::string s = section.empty() ? "scenario" : section;

    if (s == "scenario") {
        if (key == "preset") {
            c.preset = value;
        } else if (key == "paper_mass") {
            c.paper_mass = parse_bool(value, full);
        } else if (key == "workers") {
            c.workers = static_cast<unsigned>(parse_uint(value, full));
        } else {
            throw ConfigError("unknown key '" + full + "'");
        }
        return;
    }
    if (s == "potential") {
        auto& p = c.params;
        static const std::map<std::string, double PotentialParams::*> fields{
            {"m1", &PotentialParams::m1},           {"m2", &PotentialParams::m2},
            {"k1", &PotentialParams::k1},           {"k2", &PotentialParams::k2},
            {"lambda1", &PotentialParams::lambda1}, {"lambda2", &PotentialParams::lambda2},
            {"a1", &PotentialParams::a1},           {"a2", &PotentialParams::a2},
            {"gamma", &PotentialParams::gamma},     {"l0", &PotentialParams::l0},
            {"hbar", &PotentialParams::hbar},
        };
        const auto it = fields.find(key);
        if (it == fields.end()) {
            throw ConfigError("unknown key '" + full + "'");
        }
        p.*(it->second) = num();
        return;
    }
    if (s == "packets") {
        if (key == "side1") {
            c.side1 = parse_side(value, full);
        } else if (key == "side2") {
            c.side2 = parse_side(value, full);
        } else if (key == "alpha1") {
            c.alpha1 = num();
        } else if (key == "alpha2") {
            c.alpha2 = num();
        } else if (key == "alpha") {
            c.alpha1 = c.alpha2 = num();
        } else {
            throw ConfigError("unknown key '" + full + "'");
        }
        return;
    }
    if (s == "grid") {
        if (key == "n1") {
            c.grid.n1 = parse_uint(value, full);
        } else if (key == "n2") {
            c.grid.n2 = parse_uint(value, full);
        } else if (key == "L1") {
            c.grid.L1 = num();
        } else if (key == "L2") {
            c.grid.L2 = num();
        } else {
            throw ConfigError("unknown key '" + full + "'");
        }
        return;
    }
    if (s == "time") {
        if (key == "dt") {
            c.dt = num();
        } else if (key == "t_final") {
            c.t_final = num();
        } else if (key == "sample_every") {
            c.sample_every = num();
        } else if (key == "autocorr_every") {
            c.autocorr_every = num();
        } else if (key == "mean_begin") {
            c.mean_begin = num();
        } else if (key == "mean_end") {
            c.mean_end = num();
        } else {
            throw ConfigError("unknown key '" + full + "'");
        }
        return;
    }
    if (s == "spectrum") {
        if (key == "window") {
            if (value == "hann") {
                c.spectrum_window = Window::hann;
            } else if (value == "rectangular") {
                c.spectrum_window = Window::rectangular;
            } else {
                throw ConfigError("key '" + full + "': window must be 'hann' or 'rectangular'");
            }
        } else if (key == "zero_padding") {
            c.zero_padding = parse_uint(value, full);
        } else {
            throw ConfigError("unknown key '" + full + "'");
        }
        return;
    }
    if (s == "classical") {
        if (key == "N") {
            c.classical.n = parse_uint(value, full);
        } else if (key == "dt") {
            c.classical.dt = num();
        } else if (key == "seed") {
            c.classical.seed = parse_uint(value, full);
        } else if (key == "ring") {
            c.classical.ring = parse_bool(value, full);
        } else {
            throw ConfigError("unknown key '" + full + "'");
        }
        return;
    }
    if (s == "output") {
        if (key == "dir") {
            c.out_dir = value;
        } else if (key == "basename") {
            c.basename = value;
        } else {
            throw ConfigError("unknown key '" + full + "'");
        }
        return;
    }
    if (s == "sweep") {
        if (!c.sweep) {
            c.sweep = SweepConfig{};
        }
        if (key == "parameter") {
            c.sweep->parameter = value;
        } else if (key == "values") {
            c.sweep->values = parse_list(value, full);
        } else {
            throw ConfigError("unknown key '" + full + "'");
        }
        return;
    }
    throw ConfigError("unknown section '[" + section + "]'");
}

/// Checks cross-field constraints; throws ConfigError naming the key.
inline void validate_config(const ScenarioConfig& c)
{
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) {
            throw ConfigError(msg);
        }
    };
    try {
        c.params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    require(c.dt > 0.0, "time.dt must be positive");
    require(c.t_final > 0.0, "time.t_final must be positive");
    require(c.t_final / c.dt < 1e9, "time.t_final / time.dt must stay below 1e9");
    require(c.sample_every >= c.dt, "time.sample_every must be at least time.dt");
    require(c.autocorr_every >= c.dt, "time.autocorr_every must be at least time.dt");
    require(c.mean_begin >= 0.0 && c.window_end() > c.mean_begin && c.window_end() <= c.t_final + 1e-9,
            "time.mean_begin/mean_end must satisfy 0 <= begin < end <= t_final");
    require(c.alpha1 > 0.0 && c.alpha2 > 0.0, "packets.alpha must be positive");
    require(c.zero_padding >= 1, "spectrum.zero_padding must be at least 1");
    require(c.classical.n >= 1, "classical.N must be at least 1");
    require(c.classical.dt > 0.0, "classical.dt must be positive");
    require(c.t_final / c.classical.dt < 1e9, "time.t_final / classical.dt must stay below 1e9");
    require(c.workers >= 1, "scenario.workers must be at least 1");
    require(!c.basename.empty() && c.basename.find('/') == std::string::npos, "output.basename must be a plain name");
    try {
        make_grid(c.grid.n1, c.grid.n2, c.grid.L1, c.grid.L2, c.params.hbar);
        packet_for_well(c.params, 1, c.side1, c.alpha1);
        packet_for_well(c.params, 2, c.side2, c.alpha2);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (c.sweep) {
        require(c.sweep->parameter == "gamma" || c.sweep->parameter == "lambda2",
                "sweep.parameter must be 'gamma' or 'lambda2'");
        require(!c.sweep->values.empty(), "sweep.values must not be empty");
    }
}

struct ConfigEntry
{
    std::string section;
    std::string key;
    std::string value;
    int line = 0;
};

inline std::vector<ConfigEntry> tokenize_config(const std::string& text)
{
    std::vector<ConfigEntry> out;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string s = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) {
            continue;
        }
        if (s.front() == '[') {
            if (s.back() != ']') {
                throw ConfigError("line " + std::to_string(line) + ": malformed section header");
            }
            section = detail::trim(s.substr(1, s.size() - 2));
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line) + ": expected key = value");
        }
        out.push_back({section, detail::trim(s.substr(0, eq)), detail::trim(s.substr(eq + 1)), line});
    }
    return out;
}

/// Parses a config text, applying preset defaults first. Errors name the
/// offending key and line.
inline ScenarioConfig parse_config(const std::string& text,
                                   const std::vector<std::pair<std::string, std::string>>& overrides = {})
{
    const auto entries = tokenize_config(text);
    auto is_scenario = [](const ConfigEntry& e) { return e.section.empty() || e.section == "scenario"; };

    std::string preset;
    bool paper_mass = false;
    for (const auto& e : entries) {
        if (!is_scenario(e)) {
            continue;
        }
        if (e.key == "preset") {
            preset = e.value;
        } else if (e.key == "paper_mass") {
            try {
                paper_mass = detail::parse_bool(e.value, "paper_mass");
            } catch (const ConfigError& err) {
                throw ConfigError("line " + std::to_string(e.line) + ": " + err.what());
            }
        }
    }
    ScenarioConfig c;
    try {
        c = preset.empty() ? ScenarioConfig{} : make_preset(preset, paper_mass);
    } catch (const ConfigError& err) {
        throw ConfigError(std::string("preset: ") + err.what());
    }
    for (const auto& e : entries) {
        if (is_scenario(e) && e.key == "preset") {
            continue;
        }
        try {
            apply_setting(c, e.section, e.key, e.value);
        } catch (const ConfigError& err) {
            throw ConfigError("line " + std::to_string(e.line) + ": " + err.what());
        }
    }
    for (const auto& [k, v] : overrides) {
        const auto dot = k.find('.');
        apply_setting(c, dot == std::string::npos ? "" : k.substr(0, dot), dot == std::string::npos ? k : k.substr(dot + 1), v);
    }
    validate_config(c);
    return c;
}

/// Fully explicit config text; parse_config(to_config_text(c)) == c.
inline std::string to_config_text(const ScenarioConfig& c)
{
    auto f = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    std::ostringstream o;
    o << "# resolved configuration\n";
    o << "[scenario]\n";
    if (!c.preset.empty()) {
        o << "preset = " << c.preset << "\n";
    }
    o << "paper_mass = " << (c.paper_mass ? "true" : "false") << "\n";
    o << "workers = " << c.workers << "\n";
    const auto& p = c.params;
    o << "[potential]\n";
    o << "m1 = " << f(p.m1) << "\nm2 = " << f(p.m2) << "\nk1 = " << f(p.k1) << "\nk2 = " << f(p.k2)
      << "\nlambda1 = " << f(p.lambda1) << "\nlambda2 = " << f(p.lambda2) << "\na1 = " << f(p.a1)
      << "\na2 = " << f(p.a2) << "\ngamma = " << f(p.gamma) << "\nl0 = " << f(p.l0) << "\nhbar = " << f(p.hbar)
      << "\n";
    o << "[packets]\n";
    o << "side1 = " << to_string(c.side1) << "\nside2 = " << to_string(c.side2) << "\nalpha1 = " << f(c.alpha1)
      << "\nalpha2 = " << f(c.alpha2) << "\n";
    o << "[grid]\n";
    o << "n1 = " << c.grid.n1 << "\nn2 = " << c.grid.n2 << "\nL1 = " << f(c.grid.L1) << "\nL2 = " << f(c.grid.L2)
      << "\n";
    o << "[time]\n";
    o << "dt = " << f(c.dt) << "\nt_final = " << f(c.t_final) << "\nsample_every = " << f(c.sample_every)
      << "\nautocorr_every = " << f(c.autocorr_every) << "\nmean_begin = " << f(c.mean_begin)
      << "\nmean_end = " << f(c.window_end()) << "\n";
    o << "[spectrum]\n";
    o << "window = " << to_string(c.spectrum_window) << "\nzero_padding = " << c.zero_padding << "\n";
    o << "[classical]\n";
    o << "N = " << c.classical.n << "\ndt = " << f(c.classical.dt) << "\nseed = " << c.classical.seed
      << "\nring = " << (c.classical.ring ? "true" : "false") << "\n";
    o << "[output]\n";
    o << "dir = " << c.out_dir << "\nbasename = " << c.basename << "\n";
    if (c.sweep) {
        o << "[sweep]\n";
        o << "parameter = " << c.sweep->parameter << "\nvalues = ";
        for (std::size_t k = 0; k < c.sweep->values.size(); ++k) {
            o << (k ? ", " : "") << f(c.sweep->values[k]);
        }
        o << "\n";
    }
    return o.str();
}

} // namespace dwell

#endif // DWELL_CONFIG_HPP
