#ifndef DWELL_SPLIT_OPERATOR_HPP
#define DWELL_SPLIT_OPERATOR_HPP

// Strang split-operator propagation on periodic grids:
//   psi(t+dt) = exp(-i V dt/2hbar) F^-1 exp(-i T(p) dt/hbar) F exp(-i V dt/2hbar) psi(t)
// The kinetic factor is diagonal in the DFT basis, so each step costs one
// forward/backward transform pair.

#include "dwell/fft.hpp"
#include "dwell/grid.hpp"
#include "dwell/model.hpp"
#include "dwell/observe.hpp"
#include "dwell/wavefunction.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dwell {

/// Raised when a propagation run leaves its validity envelope (norm drift or
/// probability reaching the edge of particle 1's box).
class PropagationError : public std::runtime_error
{
public:
    PropagationError(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

/// V(x1, x2) on the lattice, x2 taken unwrapped in [-L2, L2).
inline std::vector<double> potential_on_grid(const Grid2D& g, const PotentialParams& p)
{
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.n1(); ++i) {
        const double x1 = g.g1.x(i);
        for (std::size_t j = 0; j < g.n2(); ++j) {
            v[g.index(i, j)] = total_potential(x1, g.g2.x(j), p);
        }
    }
    return v;
}

inline std::vector<double> kinetic_on_grid(const Grid2D& g, const PotentialParams& p)
{
    std::vector<double> t(g.size());
    for (std::size_t i = 0; i < g.n1(); ++i) {
        const double p1 = g.g1.p(i);
        const double t1 = p1 * p1 / (2.0 * p.m1);
        for (std::size_t j = 0; j < g.n2(); ++j) {
            const double p2 = g.g2.p(j);
            t[g.index(i, j)] = t1 + p2 * p2 / (2.0 * p.m2);
        }
    }
    return t;
}

class SplitOperator2D
{
public:
    SplitOperator2D(const Grid2D& grid, const PotentialParams& params, double dt)
        : grid_(grid), params_(params), dt_(dt), plan_(grid.n1(), grid.n2()), scratch_(grid.size())
    {
        params.validate();
        if (!(dt > 0.0) || !std::isfinite(dt)) {
            throw std::invalid_argument("time step must be positive");
        }
        potential_ = potential_on_grid(grid, params);
        kinetic_ = kinetic_on_grid(grid, params);
        const double hbar = params.hbar;
        const double inv_n = 1.0 / static_cast<double>(grid.size());
        half_potential_phase_.resize(grid.size());
        kinetic_phase_.resize(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k) {
            half_potential_phase_[k] = std::polar(1.0, -potential_[k] * dt / (2.0 * hbar));
            kinetic_phase_[k] = std::polar(inv_n, -kinetic_[k] * dt / hbar);
        }
    }

    const Grid2D& grid() const { return grid_; }
    const PotentialParams& params() const { return params_; }
    double dt() const { return dt_; }
    std::span<const double> potential() const { return potential_; }

    void step(WaveFunction2D& psi) const
    {
        check_grid(psi);
        auto& a = psi.amp;
        const std::size_t n = a.size();
        for (std::size_t k = 0; k < n; ++k) {
            a[k] *= half_potential_phase_[k];
        }
        plan_.forward(a);
        for (std::size_t k = 0; k < n; ++k) {
            a[k] *= kinetic_phase_[k];
        }
        plan_.backward(a);
        for (std::size_t k = 0; k < n; ++k) {
            a[k] *= half_potential_phase_[k];
        }
        psi.time += dt_;
    }

    /// <psi|H|psi> / <psi|psi>; kinetic part evaluated in momentum space.
    double energy(const WaveFunction2D& psi) const
    {
        check_grid(psi);
        double pot = 0.0;
        double nrm = 0.0;
        for (std::size_t k = 0; k < psi.amp.size(); ++k) {
            const double w = std::norm(psi.amp[k]);
            pot += w * potential_[k];
            nrm += w;
        }
        std::copy(psi.amp.begin(), psi.amp.end(), scratch_.begin());
        plan_.forward(scratch_);
        double kin = 0.0;
        for (std::size_t k = 0; k < scratch_.size(); ++k) {
            kin += std::norm(scratch_[k]) * kinetic_[k];
        }
        kin /= static_cast<double>(grid_.size());
        return (kin + pot) / nrm;
    }

private:
    void check_grid(const WaveFunction2D& psi) const
    {
        if (!(psi.grid == grid_) || psi.amp.size() != grid_.size()) {
            throw std::invalid_argument("wavefunction grid does not match propagator grid");
        }
    }

    Grid2D grid_;
    PotentialParams params_;
    double dt_;
    FftPlan plan_;
    std::vector<double> potential_;
    std::vector<double> kinetic_;
    ComplexBuffer half_potential_phase_;
    ComplexBuffer kinetic_phase_;
    mutable ComplexBuffer scratch_;
};

/// Single-particle version with an arbitrary lattice potential.
class SplitOperator1D
{
public:
    SplitOperator1D(const Grid1D& grid, std::span<const double> potential, double mass, double dt)
        : grid_(grid), dt_(dt), plan_(grid.n), potential_(potential.begin(), potential.end()), scratch_(grid.n)
    {
        if (potential.size() != grid.n) {
            throw std::invalid_argument("potential length does not match grid");
        }
        if (!(mass > 0.0) || !(dt > 0.0)) {
            throw std::invalid_argument("mass and time step must be positive");
        }
        const double hbar = grid.hbar;
        const double inv_n = 1.0 / static_cast<double>(grid.n);
        kinetic_.resize(grid.n);
        half_potential_phase_.resize(grid.n);
        kinetic_phase_.resize(grid.n);
        for (std::size_t k = 0; k < grid.n; ++k) {
            const double p = grid.p(k);
            kinetic_[k] = p * p / (2.0 * mass);
            half_potential_phase_[k] = std::polar(1.0, -potential_[k] * dt / (2.0 * hbar));
            kinetic_phase_[k] = std::polar(inv_n, -kinetic_[k] * dt / hbar);
        }
    }

    /// Particle `particle` of the model in isolation (interaction dropped).
    static SplitOperator1D for_particle(const Grid1D& grid, const PotentialParams& params, int particle, double dt)
    {
        std::vector<double> v(grid.n);
        for (std::size_t k = 0; k < grid.n; ++k) {
            v[k] = onsite_potential(grid.x(k), particle, params);
        }
        return SplitOperator1D(grid, v, params.mass(particle), dt);
    }

    double dt() const { return dt_; }

    void step(WaveFunction1D& psi) const
    {
        if (!(psi.grid == grid_)) {
            throw std::invalid_argument("wavefunction grid does not match propagator grid");
        }
        auto& a = psi.amp;
        for (std::size_t k = 0; k < a.size(); ++k) {
            a[k] *= half_potential_phase_[k];
        }
        plan_.forward(a);
        for (std::size_t k = 0; k < a.size(); ++k) {
            a[k] *= kinetic_phase_[k];
        }
        plan_.backward(a);
        for (std::size_t k = 0; k < a.size(); ++k) {
            a[k] *= half_potential_phase_[k];
        }
        psi.time += dt_;
    }

    double energy(const WaveFunction1D& psi) const
    {
        double pot = 0.0;
        double nrm = 0.0;
        for (std::size_t k = 0; k < psi.amp.size(); ++k) {
            const double w = std::norm(psi.amp[k]);
            pot += w * potential_[k];
            nrm += w;
        }
        std::copy(psi.amp.begin(), psi.amp.end(), scratch_.begin());
        plan_.forward(scratch_);
        double kin = 0.0;
        for (std::size_t k = 0; k < scratch_.size(); ++k) {
            kin += std::norm(scratch_[k]) * kinetic_[k];
        }
        kin /= static_cast<double>(grid_.n);
        return (kin + pot) / nrm;
    }

private:
    Grid1D grid_;
    double dt_;
    FftPlan plan_;
    std::vector<double> potential_;
    std::vector<double> kinetic_;
    ComplexBuffer half_potential_phase_;
    ComplexBuffer kinetic_phase_;
    mutable ComplexBuffer scratch_;
};

/// One Strang step. Builds the phase tables on every call; use
/// SplitOperator2D directly when stepping repeatedly.
inline void strang_step(WaveFunction2D& psi, double dt, const PotentialParams& params)
{
    SplitOperator2D(psi.grid, params, dt).step(psi);
}

inline double energy_expectation(const WaveFunction2D& psi, const PotentialParams& params)
{
    return SplitOperator2D(psi.grid, params, 1.0).energy(psi);
}

// ---------------------------------------------------------------------------
// Time series driver

enum class Observable : unsigned {
    none = 0,
    norm = 1u << 0,
    energy = 1u << 1,
    tunneling = 1u << 2,
    entropy = 1u << 3,
    autocorrelation = 1u << 4,
    all = 0x1fu,
};

constexpr Observable operator|(Observable a, Observable b)
{
    return static_cast<Observable>(static_cast<unsigned>(a) | static_cast<unsigned>(b));
}

constexpr bool has(Observable set, Observable o) { return (static_cast<unsigned>(set) & static_cast<unsigned>(o)) != 0; }

struct QuantumSample
{
    double t = 0.0;
    double norm = std::numeric_limits<double>::quiet_NaN();
    double energy = std::numeric_limits<double>::quiet_NaN();
    double tunneling = std::numeric_limits<double>::quiet_NaN();
    double entropy = std::numeric_limits<double>::quiet_NaN();
    complex autocorr{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
};

struct TimeSeries
{
    std::vector<QuantumSample> samples;
    /// C(t) on its own lattice t_k = k * autocorr_dt (finer than `samples`
    /// so the spectrum is not aliased).
    double autocorr_dt = 0.0;
    std::vector<complex> autocorr;
    /// Largest particle-1 probability seen in an outermost x1 cell.
    double max_edge = 0.0;

    std::vector<double> times() const
    {
        std::vector<double> t;
        t.reserve(samples.size());
        for (const auto& s : samples) {
            t.push_back(s.t);
        }
        return t;
    }

    std::vector<double> tunneling() const
    {
        std::vector<double> v;
        v.reserve(samples.size());
        for (const auto& s : samples) {
            v.push_back(s.tunneling);
        }
        return v;
    }

    std::vector<double> entropy() const
    {
        std::vector<double> v;
        v.reserve(samples.size());
        for (const auto& s : samples) {
            v.push_back(s.entropy);
        }
        return v;
    }
};

struct PropagationOptions
{
    double t_final = 0.0;
    /// Steps between observable samples.
    std::size_t sample_stride = 1;
    /// Steps between autocorrelation samples; 0 disables the fine series.
    std::size_t autocorr_stride = 0;
    Observable observe = Observable::all;
    double norm_tolerance = 1e-6;
    /// Abort when the particle-1 marginal in either outermost cell exceeds this.
    double edge_tolerance = 1e-6;
    /// Called on every observable sample after the built-ins.
    std::function<void(const WaveFunction2D&, const QuantumSample&)> on_sample;
};

inline std::int64_t step_count(double t_final, double dt)
{
    if (!(t_final > 0.0) || !(dt > 0.0)) {
        throw std::invalid_argument("t_final and dt must be positive");
    }
    const double n = std::round(t_final / dt);
    if (n >= 1e9) {
        throw std::invalid_argument("t_final / dt exceeds the step budget");
    }
    return static_cast<std::int64_t>(n);
}

/// Advance `psi` to t_final, sampling observables every `sample_stride`
/// steps (including t = 0). Throws PropagationError on norm drift or edge
/// leakage in x1; `psi` holds the state at the time of failure.
inline TimeSeries propagate(WaveFunction2D& psi, const SplitOperator2D& prop, const PropagationOptions& opt)
{
    if (opt.sample_stride < 1) {
        throw std::invalid_argument("sample stride must be at least 1");
    }
    const auto n_steps = step_count(opt.t_final, prop.dt());
    const WaveFunction2D psi0 = psi;
    const double t0 = psi.time;
    const double norm0 = psi.norm_squared();
    const auto& g = psi.grid;

    TimeSeries out;
    out.autocorr_dt = prop.dt() * static_cast<double>(opt.autocorr_stride);
    out.samples.reserve(static_cast<std::size_t>(n_steps) / opt.sample_stride + 1);

    auto sample = [&](std::int64_t step) {
        QuantumSample s;
        s.t = t0 + static_cast<double>(step) * prop.dt();
        const double nrm = psi.norm_squared();
        if (has(opt.observe, Observable::norm)) {
            s.norm = nrm;
        }
        if (std::abs(nrm - norm0) > opt.norm_tolerance) {
            std::ostringstream msg;
            msg << "norm drifted to " << nrm << " at t=" << s.t << " (tolerance " << opt.norm_tolerance << ")";
            throw PropagationError(msg.str(), s.t);
        }
        const auto rho = reduced_density_diag(psi);
        const double edge = std::max(rho.rho1.front(), rho.rho1.back()) * g.dx1();
        out.max_edge = std::max(out.max_edge, edge);
        if (edge > opt.edge_tolerance) {
            std::ostringstream msg;
            msg << "particle-1 probability " << edge << " reached the box edge |x1|=" << g.g1.half_length
                << " at t=" << s.t << "; the x1 box is too small";
            throw PropagationError(msg.str(), s.t);
        }
        if (has(opt.observe, Observable::energy)) {
            s.energy = prop.energy(psi);
        }
        if (has(opt.observe, Observable::tunneling)) {
            s.tunneling = tunneling_rate(rho);
        }
        if (has(opt.observe, Observable::entropy)) {
            s.entropy = von_neumann_entropy(psi);
        }
        if (has(opt.observe, Observable::autocorrelation)) {
            s.autocorr = autocorrelation(psi0, psi);
        }
        out.samples.push_back(s);
        if (opt.on_sample) {
            opt.on_sample(psi, s);
        }
    };

    for (std::int64_t step = 0;; ++step) {
        if (opt.autocorr_stride > 0 && step % static_cast<std::int64_t>(opt.autocorr_stride) == 0) {
            out.autocorr.push_back(autocorrelation(psi0, psi));
        }
        if (step % static_cast<std::int64_t>(opt.sample_stride) == 0) {
            sample(step);
        }
        if (step == n_steps) {
            break;
        }
        prop.step(psi);
    }
    psi.time = t0 + static_cast<double>(n_steps) * prop.dt();
    return out;
}

/// Samples of a single-particle run: times, T_r and C(t).
struct Series1D
{
    std::vector<double> t;
    std::vector<double> tunneling;
    std::vector<complex> autocorr;
};

inline Series1D propagate_1d(WaveFunction1D& psi, const SplitOperator1D& prop, double t_final, std::size_t stride)
{
    if (stride < 1) {
        throw std::invalid_argument("sample stride must be at least 1");
    }
    const auto n_steps = step_count(t_final, prop.dt());
    const WaveFunction1D psi0 = psi;
    const double t0 = psi.time;
    Series1D out;
    for (std::int64_t step = 0;; ++step) {
        if (step % static_cast<std::int64_t>(stride) == 0) {
            out.t.push_back(t0 + static_cast<double>(step) * prop.dt());
            out.tunneling.push_back(tunneling_rate(psi));
            out.autocorr.push_back(autocorrelation(psi0, psi));
        }
        if (step == n_steps) {
            break;
        }
        prop.step(psi);
    }
    psi.time = t0 + static_cast<double>(n_steps) * prop.dt();
    return out;
}

} // namespace dwell

#endif // DWELL_SPLIT_OPERATOR_HPP
