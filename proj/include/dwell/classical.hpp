#ifndef DWELL_CLASSICAL_HPP
#define DWELL_CLASSICAL_HPP

// Classical counterpart: the Liouville equation is solved along its
// characteristics. Phase-space points are drawn from the (positive) Wigner
// function of the initial Gaussian packets and moved with velocity Verlet.

#include "dwell/model.hpp"
#include "dwell/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace dwell {

struct WignerGaussian
{
    double x0 = 0.0;
    double p0 = 0.0;
    double sigma_x = 0.0;
    double sigma_p = 0.0;
};

/// Widths of the Wigner function of A exp(-alpha (x-x0)^2 / 2hbar):
/// sigma_x = sqrt(hbar / 2alpha), sigma_p = sqrt(alpha hbar / 2).
inline WignerGaussian wigner_widths(double alpha, double hbar)
{
    if (!(alpha > 0.0) || !(hbar > 0.0)) {
        throw std::invalid_argument("wigner_widths: alpha and hbar must be positive");
    }
    return {0.0, 0.0, std::sqrt(hbar / (2.0 * alpha)), std::sqrt(alpha * hbar / 2.0)};
}

inline WignerGaussian wigner_of(const PacketSpec& spec)
{
    auto w = wigner_widths(spec.alpha, spec.hbar);
    w.x0 = spec.x0;
    w.p0 = spec.p0;
    return w;
}

struct Ensemble
{
    std::vector<double> x1, p1, x2, p2;
    std::uint64_t seed = 0;

    std::size_t size() const { return x1.size(); }
    double weight() const { return 1.0 / static_cast<double>(size()); }
};

/// Independent stream for trajectory `index`, so a trajectory's initial
/// condition does not depend on how the ensemble is split across workers.
inline std::mt19937_64 trajectory_engine(std::uint64_t seed, std::uint64_t index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

inline Ensemble sample_ensemble(std::size_t n, const WignerGaussian& w1, const WignerGaussian& w2, std::uint64_t seed)
{
    if (n < 1) {
        throw std::invalid_argument("sample_ensemble: need at least one trajectory");
    }
    Ensemble e;
    e.seed = seed;
    e.x1.resize(n);
    e.p1.resize(n);
    e.x2.resize(n);
    e.p2.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto eng = trajectory_engine(seed, i);
        std::normal_distribution<double> gauss(0.0, 1.0);
        e.x1[i] = w1.x0 + w1.sigma_x * gauss(eng);
        e.p1[i] = w1.p0 + w1.sigma_p * gauss(eng);
        e.x2[i] = w2.x0 + w2.sigma_x * gauss(eng);
        e.p2[i] = w2.p0 + w2.sigma_p * gauss(eng);
    }
    return e;
}

inline double classical_energy(double x1, double p1, double x2, double p2, const PotentialParams& p)
{
    return p1 * p1 / (2.0 * p.m1) + p2 * p2 / (2.0 * p.m2) + total_potential(x1, x2, p);
}

struct ClassicalOptions
{
    /// Confine particle 2 to the ring [-ring_half_length, ring_half_length).
    bool ring = false;
    double ring_half_length = 0.0;
    unsigned workers = 1;
};

namespace detail {
inline double wrap(double x, double half)
{
    const double period = 2.0 * half;
    x = std::fmod(x + half, period);
    if (x < 0.0) {
        x += period;
    }
    return x - half;
}

struct PhasePoint
{
    double x1, p1, x2, p2;
    ForcePair f;
};

/// Kick-drift-kick with the force at the start of the step already in `s.f`.
inline void verlet(PhasePoint& s, double dt, const PotentialParams& p, const ClassicalOptions& opt)
{
    s.p1 += 0.5 * dt * s.f.f1;
    s.p2 += 0.5 * dt * s.f.f2;
    s.x1 += dt * s.p1 / p.m1;
    s.x2 += dt * s.p2 / p.m2;
    if (opt.ring) {
        s.x2 = wrap(s.x2, opt.ring_half_length);
    }
    s.f = total_force(s.x1, s.x2, p);
    s.p1 += 0.5 * dt * s.f.f1;
    s.p2 += 0.5 * dt * s.f.f2;
}

/// Runs body(begin, end) over [0, n) split into contiguous blocks.
template <class Body>
void parallel_blocks(std::size_t n, unsigned workers, Body&& body)
{
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (workers == 1) {
        body(0, n, 0u);
        return;
    }
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t b = std::min(n, w * chunk);
        const std::size_t e = std::min(n, b + chunk);
        pool.emplace_back([&body, b, e, w] { body(b, e, w); });
    }
}
} // namespace detail

/// One velocity-Verlet step for every trajectory.
inline void verlet_step(Ensemble& e, double dt, const PotentialParams& p, const ClassicalOptions& opt = {})
{
    if (!(dt != 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("verlet_step: dt must be finite and nonzero");
    }
    detail::parallel_blocks(e.size(), opt.workers, [&](std::size_t b, std::size_t end, unsigned) {
        for (std::size_t i = b; i < end; ++i) {
            detail::PhasePoint s{e.x1[i], e.p1[i], e.x2[i], e.p2[i], total_force(e.x1[i], e.x2[i], p)};
            detail::verlet(s, dt, p, opt);
            e.x1[i] = s.x1;
            e.p1[i] = s.p1;
            e.x2[i] = s.x2;
            e.p2[i] = s.p2;
        }
    });
}

struct ClassicalSeries
{
    std::vector<double> times;
    std::vector<double> tunneling;
    std::size_t n_effective = 0;
    /// max over trajectories and samples of |E(t) - E(0)| / |E(0)|.
    double max_relative_energy_error = 0.0;
};

struct EnsembleRunOptions
{
    double t_final = 0.0;
    double dt = 1e-3;
    /// Steps between samples.
    std::size_t stride = 1;
    ClassicalOptions classical;
};

/// Moves every trajectory to t_final, sampling the fraction with x1 < 0.
/// On return `e` holds the final phase-space points.
inline ClassicalSeries propagate_ensemble(Ensemble& e, const PotentialParams& p, const EnsembleRunOptions& opt)
{
    p.validate();
    if (!(opt.t_final > 0.0) || !(opt.dt > 0.0) || opt.stride < 1) {
        throw std::invalid_argument("propagate_ensemble: t_final, dt and stride must be positive");
    }
    const double steps_d = std::round(opt.t_final / opt.dt);
    if (steps_d >= 1e9) {
        throw std::invalid_argument("propagate_ensemble: t_final / dt exceeds the step budget");
    }
    const auto n_steps = static_cast<std::uint64_t>(steps_d);
    const std::size_t n_samples = static_cast<std::size_t>(n_steps / opt.stride) + 1;
    const std::size_t n = e.size();
    const unsigned workers = std::max(1u, opt.classical.workers);

    std::vector<std::vector<std::uint64_t>> counts(workers, std::vector<std::uint64_t>(n_samples, 0));
    std::vector<double> worst(workers, 0.0);
    std::vector<std::size_t> bad(workers, n);

    detail::parallel_blocks(n, workers, [&](std::size_t b, std::size_t end, unsigned w) {
        auto& cnt = counts[w];
        for (std::size_t i = b; i < end; ++i) {
            detail::PhasePoint s{e.x1[i], e.p1[i], e.x2[i], e.p2[i], total_force(e.x1[i], e.x2[i], p)};
            const double e0 = classical_energy(s.x1, s.p1, s.x2, s.p2, p);
            const double scale = std::max(std::abs(e0), 1e-300);
            std::size_t sample = 0;
            for (std::uint64_t step = 0;; ++step) {
                if (step % opt.stride == 0) {
                    if (s.x1 < 0.0) {
                        ++cnt[sample];
                    }
                    const double err = std::abs(classical_energy(s.x1, s.p1, s.x2, s.p2, p) - e0) / scale;
                    worst[w] = std::max(worst[w], err);
                    ++sample;
                }
                if (step == n_steps) {
                    break;
                }
                detail::verlet(s, opt.dt, p, opt.classical);
            }
            if (!(std::isfinite(s.x1) && std::isfinite(s.p1) && std::isfinite(s.x2) && std::isfinite(s.p2))) {
                bad[w] = std::min(bad[w], i);
            }
            e.x1[i] = s.x1;
            e.p1[i] = s.p1;
            e.x2[i] = s.x2;
            e.p2[i] = s.p2;
        }
    });

    const std::size_t first_bad = *std::min_element(bad.begin(), bad.end());
    if (first_bad < n) {
        std::ostringstream msg;
        msg << "classical trajectory " << first_bad << " became non-finite";
        throw std::runtime_error(msg.str());
    }

    ClassicalSeries out;
    out.n_effective = n;
    out.max_relative_energy_error = *std::max_element(worst.begin(), worst.end());
    out.times.resize(n_samples);
    out.tunneling.resize(n_samples);
    for (std::size_t k = 0; k < n_samples; ++k) {
        std::uint64_t c = 0;
        for (const auto& cw : counts) {
            c += cw[k];
        }
        out.times[k] = static_cast<double>(k * opt.stride) * opt.dt;
        out.tunneling[k] = static_cast<double>(c) / static_cast<double>(n);
    }
    return out;
}

inline CycleStats classical_cycle_stats(const ClassicalSeries& s, TimeWindow window)
{
    return cycle_stats(s.times, s.tunneling, window);
}

} // namespace dwell

#endif // DWELL_CLASSICAL_HPP
