#ifndef DWELL_SPECTRUM_HPP
#define DWELL_SPECTRUM_HPP

#include "dwell/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dwell {

enum class Window { rectangular, hann };

inline const char* to_string(Window w) { return w == Window::hann ? "hann" : "rectangular"; }

struct SpectralDensity
{
    /// Ascending, uniform energy lattice.
    std::vector<double> energy;
    /// Normalized so that sum(rho) * bin_width == 1 (all zero for a zero signal).
    std::vector<double> rho;
    double bin_width = 0.0;
    /// Line resolution 2 pi hbar / T_total of the unpadded record.
    double resolution = 0.0;
    /// sum |X| * bin_width before normalization; rho * raw_scale recovers |X|.
    double raw_scale = 0.0;
};

struct SpectrumOptions
{
    Window window = Window::hann;
    std::size_t zero_padding = 4;
    double hbar = 1.0;
};

/// Density spectrum of an autocorrelation record C(t_k), t_k = k dt, k >= 0:
///   rho(E) ~ | sum_k w_k C(t_k) exp(+i E t_k / hbar) |,  k = -(n-1) .. n-1,
/// with C(-t) = conj(C(t)) filling in negative times. The two-sided record
/// makes the transform real, so a component exp(-i E0 t / hbar) of C gives a
/// line at E0 whose integrated weight is proportional to its amplitude. The
/// window is symmetric (hann: 1 at t = 0, 0 at |t| = n dt).
inline SpectralDensity spectral_density(std::span<const complex> c, double dt, const SpectrumOptions& opt = {})
{
    if (c.size() < 16) {
        throw std::invalid_argument("spectral_density: need at least 16 samples, got " + std::to_string(c.size()));
    }
    if (!(dt > 0.0) || opt.zero_padding < 1) {
        throw std::invalid_argument("spectral_density: dt must be positive and padding at least 1");
    }
    const std::size_t n = c.size();
    const std::size_t m = 2 * n * opt.zero_padding;
    ComplexBuffer buf(m, complex{0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) {
        double w = 1.0;
        if (opt.window == Window::hann) {
            w = 0.5 * (1.0 + std::cos(M_PI * static_cast<double>(k) / static_cast<double>(n)));
        }
        buf[k] = w * c[k];
        if (k > 0) {
            buf[m - k] = w * std::conj(c[k]);
        }
    }
    FftPlan(m).backward(buf);

    SpectralDensity out;
    out.bin_width = 2.0 * M_PI * opt.hbar / (static_cast<double>(m) * dt);
    out.resolution = 2.0 * M_PI * opt.hbar / (static_cast<double>(n) * dt);
    out.energy.resize(m);
    out.rho.resize(m);
    const auto half = static_cast<long>(m / 2);
    for (std::size_t r = 0; r < m; ++r) {
        // Row r of the output holds signed bin j = r - m/2.
        const long j = static_cast<long>(r) - half;
        const std::size_t bin = static_cast<std::size_t>(j < 0 ? j + static_cast<long>(m) : j);
        out.energy[r] = static_cast<double>(j) * out.bin_width;
        out.rho[r] = std::abs(buf[bin]);
    }
    const double total = std::accumulate(out.rho.begin(), out.rho.end(), 0.0) * out.bin_width;
    out.raw_scale = total;
    if (total > 0.0) {
        for (auto& r : out.rho) {
            r /= total;
        }
    }
    return out;
}

struct SpectralLine
{
    double energy = 0.0;
    double peak = 0.0;
    /// Integrated normalized weight between the neighbouring minima.
    double weight = 0.0;
};

/// Local maxima of rho with the weight of their basin, heaviest first.
inline std::vector<SpectralLine> spectral_lines(const SpectralDensity& s)
{
    std::vector<SpectralLine> lines;
    const std::size_t m = s.rho.size();
    if (m < 3) {
        return lines;
    }
    std::size_t k = 0;
    while (k < m) {
        // Walk down to the next valley, then up to the next peak.
        std::size_t lo = k;
        while (lo + 1 < m && s.rho[lo + 1] <= s.rho[lo]) {
            ++lo;
        }
        std::size_t top = lo;
        while (top + 1 < m && s.rho[top + 1] >= s.rho[top]) {
            ++top;
        }
        if (top == lo) {
            break;
        }
        std::size_t hi = top;
        while (hi + 1 < m && s.rho[hi + 1] <= s.rho[hi]) {
            ++hi;
        }
        SpectralLine line;
        line.energy = s.energy[top];
        line.peak = s.rho[top];
        // Shared valley bins are split between neighbours.
        double w = 0.0;
        for (std::size_t q = lo; q <= hi; ++q) {
            const bool edge = (q == lo && lo != 0) || (q == hi && hi + 1 != m);
            w += edge ? 0.5 * s.rho[q] : s.rho[q];
        }
        line.weight = w * s.bin_width;
        lines.push_back(line);
        k = hi;
        if (hi + 1 >= m) {
            break;
        }
    }
    std::sort(lines.begin(), lines.end(), [](const SpectralLine& a, const SpectralLine& b) { return a.weight > b.weight; });
    return lines;
}

struct CycleStats
{
    double mean = 0.0;
    double cycle_max = 0.0;
    double cycle_min = 0.0;
    /// No complete cycle inside the window; max == min == mean.
    bool degenerate = false;
};

struct TimeWindow
{
    double begin = 0.0;
    double end = 0.0;
};

/// Mean over the window plus the extrema of the last complete oscillation,
/// a cycle being delimited by successive upward crossings of the mean.
inline CycleStats cycle_stats(std::span<const double> times, std::span<const double> values, TimeWindow window)
{
    if (times.size() != values.size() || times.empty()) {
        throw std::invalid_argument("cycle_stats: times and values must be non-empty and of equal length");
    }
    if (!(window.end > window.begin)) {
        throw std::invalid_argument("cycle_stats: empty time window");
    }
    const double slack = 1e-9 * std::max(1.0, std::abs(window.end));
    if (times.front() > window.begin + slack || times.back() < window.end - slack) {
        throw std::invalid_argument("cycle_stats: series does not cover the requested window");
    }
    std::vector<double> v;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] >= window.begin - slack && times[k] <= window.end + slack) {
            v.push_back(values[k]);
        }
    }
    CycleStats out;
    out.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());

    std::vector<std::size_t> up;
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (v[k - 1] < out.mean && v[k] >= out.mean) {
            up.push_back(k);
        }
    }
    if (up.size() < 2) {
        out.cycle_max = out.cycle_min = out.mean;
        out.degenerate = true;
        return out;
    }
    const auto first = v.begin() + static_cast<std::ptrdiff_t>(up[up.size() - 2]);
    const auto last = v.begin() + static_cast<std::ptrdiff_t>(up.back()) + 1;
    const auto [mn, mx] = std::minmax_element(first, last);
    out.cycle_min = *mn;
    out.cycle_max = *mx;
    return out;
}

} // namespace dwell

#endif // DWELL_SPECTRUM_HPP
