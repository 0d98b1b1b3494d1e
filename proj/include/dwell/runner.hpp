#ifndef DWELL_RUNNER_HPP
#define DWELL_RUNNER_HPP

// Scenario execution: one quantum run and one classical ensemble per
// configuration, CSV emission and run manifests; sweeps over gamma or
// lambda2 with a summary table.

#include "dwell/classical.hpp"
#include "dwell/config.hpp"
#include "dwell/model.hpp"
#include "dwell/spectrum.hpp"
#include "dwell/split_operator.hpp"
#include "dwell/wavefunction.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace dwell {

inline constexpr const char* code_version = "dwell 0.1.0";

struct ScenarioResult
{
    ScenarioConfig config;
    TimeSeries quantum;
    ClassicalSeries classical;
    SpectralDensity spectrum;
    CycleStats quantum_stats;
    CycleStats classical_stats;
};

struct ManifestEntry
{
    std::string path;
    std::string sha256;
};

struct RunManifest
{
    std::string name;
    std::string config_echo;
    std::string code_version;
    double wall_time = 0.0;
    std::string status = "ok";
    std::vector<ManifestEntry> files;
    std::vector<std::string> notes;
};

inline std::size_t steps_for(double interval, double dt, const char* what)
{
    const double r = std::round(interval / dt);
    if (r < 1.0 || std::abs(r * dt - interval) > 1e-9 * std::max(1.0, interval)) {
        throw ConfigError(std::string(what) + " must be a positive multiple of the time step");
    }
    return static_cast<std::size_t>(r);
}

/// Runs the quantum and classical halves of one scenario without touching
/// the filesystem. With workers > 1 the classical ensemble runs beside the
/// quantum propagation on workers - 1 threads.
inline ScenarioResult simulate(const ScenarioConfig& cfg)
{
    validate_config(cfg);
    const auto& p = cfg.params;
    const auto grid = make_grid(cfg.grid.n1, cfg.grid.n2, cfg.grid.L1, cfg.grid.L2, p.hbar);
    const auto spec1 = packet_for_well(p, 1, cfg.side1, cfg.alpha1);
    const auto spec2 = packet_for_well(p, 2, cfg.side2, cfg.alpha2);

    const std::size_t q_stride = steps_for(cfg.sample_every, cfg.dt, "time.sample_every");
    const std::size_t c_stride = steps_for(cfg.sample_every, cfg.classical.dt, "time.sample_every (classical)");
    const std::size_t ac_stride = steps_for(cfg.autocorr_every, cfg.dt, "time.autocorr_every");

    ScenarioResult out;
    out.config = cfg;

    auto run_classical = [&](unsigned workers) {
        auto ens = sample_ensemble(cfg.classical.n, wigner_of(spec1), wigner_of(spec2), cfg.classical.seed);
        EnsembleRunOptions opt;
        opt.t_final = cfg.t_final;
        opt.dt = cfg.classical.dt;
        opt.stride = c_stride;
        opt.classical.ring = cfg.classical.ring;
        opt.classical.ring_half_length = cfg.grid.L2;
        opt.classical.workers = workers;
        return propagate_ensemble(ens, p, opt);
    };

    std::future<ClassicalSeries> classical;
    if (cfg.workers > 1) {
        classical = std::async(std::launch::async, run_classical, cfg.workers - 1);
    }

    auto psi = init_product_gaussian(grid, spec1, spec2);
    SplitOperator2D prop(grid, p, cfg.dt);
    PropagationOptions opt;
    opt.t_final = cfg.t_final;
    opt.sample_stride = q_stride;
    opt.autocorr_stride = ac_stride;
    try {
        out.quantum = propagate(psi, prop, opt);
    } catch (...) {
        if (classical.valid()) {
            classical.wait();
        }
        throw;
    }

    out.classical = classical.valid() ? classical.get() : run_classical(1);

    SpectrumOptions sopt;
    sopt.window = cfg.spectrum_window;
    sopt.zero_padding = cfg.zero_padding;
    sopt.hbar = p.hbar;
    out.spectrum = spectral_density(out.quantum.autocorr, out.quantum.autocorr_dt, sopt);

    const TimeWindow window{cfg.mean_begin, cfg.window_end()};
    out.quantum_stats = cycle_stats(out.quantum.times(), out.quantum.tunneling(), window);
    out.classical_stats = classical_cycle_stats(out.classical, window);
    return out;
}

// ---------------------------------------------------------------------------
// Output

inline std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string sha256_hex(const std::string& bytes)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 digest failed");
    }
    std::ostringstream o;
    for (unsigned int k = 0; k < len; ++k) {
        o << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[k]);
    }
    return o.str();
}

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

inline std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

inline std::string quantum_csv(const TimeSeries& s)
{
    std::ostringstream o;
    o << "t,norm,energy,T_r,S,Re_C,Im_C\n";
    for (const auto& r : s.samples) {
        o << format_number(r.t) << ',' << format_number(r.norm) << ',' << format_number(r.energy) << ','
          << format_number(r.tunneling) << ',' << format_number(r.entropy) << ',' << format_number(r.autocorr.real())
          << ',' << format_number(r.autocorr.imag()) << '\n';
    }
    return o.str();
}

inline std::string classical_csv(const ClassicalSeries& s)
{
    std::ostringstream o;
    o << "t,T_r_classical,N_effective\n";
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        o << format_number(s.times[k]) << ',' << format_number(s.tunneling[k]) << ',' << s.n_effective << '\n';
    }
    return o.str();
}

inline std::string spectrum_csv(const SpectralDensity& s)
{
    std::ostringstream o;
    o << "E,rho_E\n";
    for (std::size_t k = 0; k < s.energy.size(); ++k) {
        o << format_number(s.energy[k]) << ',' << format_number(s.rho[k]) << '\n';
    }
    return o.str();
}

inline std::string manifest_text(const RunManifest& m)
{
    std::ostringstream o;
    o << "name: " << m.name << '\n';
    o << "code_version: " << m.code_version << '\n';
    o << "status: " << m.status << '\n';
    o << "wall_time_s: " << format_number(m.wall_time) << '\n';
    for (const auto& n : m.notes) {
        o << "note: " << n << '\n';
    }
    for (const auto& f : m.files) {
        o << "file: " << f.path << " sha256=" << f.sha256 << '\n';
    }
    return o.str();
}

/// Re-hashes every listed file (paths relative to `dir`); false on any
/// missing file or checksum mismatch.
inline bool verify_manifest(const RunManifest& m, const std::filesystem::path& dir)
{
    for (const auto& f : m.files) {
        const auto path = dir / f.path;
        if (!std::filesystem::exists(path) || sha256_file(path) != f.sha256) {
            return false;
        }
    }
    return true;
}

/// Parses a manifest written by manifest_text.
inline RunManifest parse_manifest(const std::string& text)
{
    RunManifest m;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto colon = line.find(": ");
        if (colon == std::string::npos) {
            continue;
        }
        const std::string key = line.substr(0, colon);
        const std::string val = line.substr(colon + 2);
        if (key == "name") {
            m.name = val;
        } else if (key == "code_version") {
            m.code_version = val;
        } else if (key == "status") {
            m.status = val;
        } else if (key == "wall_time_s") {
            m.wall_time = std::stod(val);
        } else if (key == "note") {
            m.notes.push_back(val);
        } else if (key == "file") {
            const auto sp = val.rfind(" sha256=");
            if (sp != std::string::npos) {
                m.files.push_back({val.substr(0, sp), val.substr(sp + 8)});
            }
        }
    }
    return m;
}

namespace detail {
/// Writes files into one directory and removes them all unless committed.
class OutputSet
{
public:
    explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

    OutputSet(const OutputSet&) = delete;
    OutputSet& operator=(const OutputSet&) = delete;

    ~OutputSet()
    {
        if (!committed_) {
            std::error_code ec;
            for (const auto& f : written_) {
                std::filesystem::remove(dir_ / f.path, ec);
            }
        }
    }

    void write(const std::string& name, const std::string& content)
    {
        const auto path = dir_ / name;
        {
            std::ofstream os(path, std::ios::binary);
            os << content;
            if (!os) {
                throw std::runtime_error("cannot write " + path.string());
            }
        }
        written_.push_back({name, sha256_hex(content)});
    }

    const std::vector<ManifestEntry>& files() const { return written_; }
    const std::filesystem::path& dir() const { return dir_; }
    void commit() { committed_ = true; }

private:
    std::filesystem::path dir_;
    std::vector<ManifestEntry> written_;
    bool committed_ = false;
};
} // namespace detail

struct ScenarioRun
{
    ScenarioResult result;
    RunManifest manifest;
};

/// Simulates one scenario and writes <basename>_{quantum,classical,spectrum}.csv,
/// the resolved config and the manifest. A numerical abort leaves no files.
inline ScenarioRun run_scenario(const ScenarioConfig& cfg)
{
    const auto start = std::chrono::steady_clock::now();
    ScenarioRun run;
    run.result = simulate(cfg);

    detail::OutputSet out(cfg.out_dir);
    const std::string base = cfg.basename;
    out.write(base + "_quantum.csv", quantum_csv(run.result.quantum));
    out.write(base + "_classical.csv", classical_csv(run.result.classical));
    out.write(base + "_spectrum.csv", spectrum_csv(run.result.spectrum));
    const std::string echo = to_config_text(cfg);
    out.write(base + "_resolved.cfg", echo);

    auto& m = run.manifest;
    m.name = base;
    m.config_echo = echo;
    m.code_version = code_version;
    m.files = out.files();
    m.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto& q = run.result.quantum_stats;
    const auto& c = run.result.classical_stats;
    m.notes.push_back("quantum mean T_r " + format_number(q.mean) + (q.degenerate ? " (no complete cycle)" : ""));
    m.notes.push_back("classical mean T_r " + format_number(c.mean) + (c.degenerate ? " (no complete cycle)" : ""));
    m.notes.push_back("max particle-1 edge cell probability " + format_number(run.result.quantum.max_edge));
    m.notes.push_back("classical max relative energy error "
                      + format_number(run.result.classical.max_relative_energy_error));
    const std::string manifest_name = base + "_manifest.txt";
    {
        std::ofstream os(out.dir() / manifest_name, std::ios::binary);
        os << manifest_text(m);
        if (!os) {
            throw std::runtime_error("cannot write manifest " + manifest_name);
        }
    }
    out.commit();
    return run;
}

struct SweepPoint
{
    double value = 0.0;
    bool ok = false;
    std::string error;
    CycleStats quantum;
    CycleStats classical;
};

struct SweepRun
{
    std::vector<SweepPoint> points;
    std::vector<ScenarioResult> results;
    RunManifest manifest;

    bool all_ok() const
    {
        return std::all_of(points.begin(), points.end(), [](const SweepPoint& p) { return p.ok; });
    }
};

inline ScenarioConfig sweep_point_config(const ScenarioConfig& cfg, double value)
{
    ScenarioConfig c = cfg;
    c.sweep.reset();
    c.workers = 1;
    if (cfg.sweep->parameter == "gamma") {
        c.params.gamma = value;
    } else {
        c.params.lambda2 = value;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%s_%g", cfg.basename.c_str(), cfg.sweep->parameter.c_str(), value);
    c.basename = buf;
    return c;
}

inline std::string summary_csv(const std::vector<SweepPoint>& pts)
{
    std::ostringstream o;
    o << "value,q_mean,q_cycle_max,q_cycle_min,c_mean,c_cycle_max,c_cycle_min\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& p : pts) {
        const CycleStats q = p.ok ? p.quantum : CycleStats{nan, nan, nan, true};
        const CycleStats c = p.ok ? p.classical : CycleStats{nan, nan, nan, true};
        o << format_number(p.value) << ',' << format_number(q.mean) << ',' << format_number(q.cycle_max) << ','
          << format_number(q.cycle_min) << ',' << format_number(c.mean) << ',' << format_number(c.cycle_max) << ','
          << format_number(c.cycle_min) << '\n';
    }
    return o.str();
}

/// Runs every sweep value as its own scenario (up to cfg.workers at once)
/// and writes <basename>_summary.csv in input order. Failed points are
/// recorded and do not stop the sweep.
inline SweepRun run_sweep(const ScenarioConfig& cfg)
{
    validate_config(cfg);
    if (!cfg.sweep) {
        throw ConfigError("run_sweep: configuration has no [sweep] section");
    }
    const auto start = std::chrono::steady_clock::now();
    const auto& values = cfg.sweep->values;
    SweepRun run;
    run.points.resize(values.size());
    run.results.resize(values.size());
    std::vector<RunManifest> manifests(values.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < values.size(); k = next++) {
            auto& pt = run.points[k];
            pt.value = values[k];
            try {
                auto point_cfg = sweep_point_config(cfg, values[k]);
                validate_config(point_cfg);
                auto r = run_scenario(point_cfg);
                pt.quantum = r.result.quantum_stats;
                pt.classical = r.result.classical_stats;
                pt.ok = true;
                run.results[k] = std::move(r.result);
                manifests[k] = std::move(r.manifest);
            } catch (const std::exception& e) {
                pt.ok = false;
                pt.error = e.what();
            }
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(cfg.workers, static_cast<unsigned>(values.size())));
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 1; w < workers; ++w) {
            pool.emplace_back(worker);
        }
        worker();
    }

    detail::OutputSet out(cfg.out_dir);
    out.write(cfg.basename + "_summary.csv", summary_csv(run.points));
    const std::string echo = to_config_text(cfg);
    out.write(cfg.basename + "_resolved.cfg", echo);

    auto& m = run.manifest;
    m.name = cfg.basename;
    m.config_echo = echo;
    m.code_version = code_version;
    m.files = out.files();
    for (std::size_t k = 0; k < values.size(); ++k) {
        for (const auto& f : manifests[k].files) {
            m.files.push_back(f);
        }
        if (!run.points[k].ok) {
            m.notes.push_back("failed " + cfg.sweep->parameter + "=" + format_number(values[k]) + ": "
                              + run.points[k].error);
        }
    }
    m.status = run.all_ok() ? "ok" : "partial";
    m.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    {
        std::ofstream os(out.dir() / (cfg.basename + "_manifest.txt"), std::ios::binary);
        os << manifest_text(m);
    }
    out.commit();
    return run;
}

} // namespace dwell

#endif // DWELL_RUNNER_HPP
