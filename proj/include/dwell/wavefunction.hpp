#ifndef DWELL_WAVEFUNCTION_HPP
#define DWELL_WAVEFUNCTION_HPP

#include "dwell/fft.hpp"
#include "dwell/grid.hpp"
#include "dwell/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace dwell {

/// Relative edge density above which a freshly built packet is refused.
inline constexpr double initial_edge_tolerance = 1e-12;

struct WaveFunction1D
{
    Grid1D grid;
    ComplexBuffer amp;
    double time = 0.0;

    double norm_squared() const
    {
        double s = 0.0;
        for (const auto& c : amp) {
            s += std::norm(c);
        }
        return s * grid.dx();
    }
};

struct WaveFunction2D
{
    Grid2D grid;
    ComplexBuffer amp;
    double time = 0.0;

    complex& operator()(std::size_t i, std::size_t j) { return amp[grid.index(i, j)]; }
    const complex& operator()(std::size_t i, std::size_t j) const { return amp[grid.index(i, j)]; }

    double norm_squared() const
    {
        double s = 0.0;
        for (const auto& c : amp) {
            s += std::norm(c);
        }
        return s * grid.cell();
    }

    void normalize()
    {
        const double scale = 1.0 / std::sqrt(norm_squared());
        for (auto& c : amp) {
            c *= scale;
        }
    }
};

/// Samples A exp(-alpha (x-x0)^2 / 2hbar + i p0 x / hbar) on the lattice and
/// renormalizes it to unit grid norm.
inline ComplexBuffer sample_packet(const Grid1D& g, const PacketSpec& spec)
{
    if (!(spec.alpha > 0.0)) {
        throw std::invalid_argument("packet width parameter alpha must be positive");
    }
    ComplexBuffer out(g.n);
    const double a = spec.norm_const();
    double s = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        const double d = g.x(j) - spec.x0;
        const double env = a * std::exp(-spec.alpha * d * d / (2.0 * spec.hbar));
        out[j] = std::polar(env, spec.p0 * g.x(j) / spec.hbar);
        s += env * env;
    }
    const double scale = 1.0 / std::sqrt(s * g.dx());
    for (auto& c : out) {
        c *= scale;
    }
    return out;
}

namespace detail {
inline void check_packet_edges(const ComplexBuffer& phi, const char* which)
{
    double peak = 0.0;
    for (const auto& c : phi) {
        peak = std::max(peak, std::norm(c));
    }
    const double edge = std::max(std::norm(phi.front()), std::norm(phi.back()));
    if (edge > initial_edge_tolerance * peak) {
        throw std::invalid_argument(std::string("initial packet for ") + which
                                    + " reaches the grid edge (relative edge density "
                                    + std::to_string(edge / peak) + "); enlarge the box");
    }
}
} // namespace detail

inline WaveFunction1D init_gaussian_1d(const Grid1D& grid, const PacketSpec& spec)
{
    WaveFunction1D wf{grid, sample_packet(grid, spec), 0.0};
    detail::check_packet_edges(wf.amp, "x");
    return wf;
}

inline WaveFunction2D init_product_gaussian(const Grid2D& grid, const PacketSpec& spec1, const PacketSpec& spec2)
{
    const auto phi1 = sample_packet(grid.g1, spec1);
    const auto phi2 = sample_packet(grid.g2, spec2);
    detail::check_packet_edges(phi1, "particle 1");
    detail::check_packet_edges(phi2, "particle 2");

    WaveFunction2D wf{grid, ComplexBuffer(grid.size()), 0.0};
    for (std::size_t i = 0; i < grid.n1(); ++i) {
        for (std::size_t j = 0; j < grid.n2(); ++j) {
            wf(i, j) = phi1[i] * phi2[j];
        }
    }
    wf.normalize();
    return wf;
}

// Checkpoint record, all fields little-endian:
//   uint64 n1, uint64 n2, double L1, double L2, double time,
//   then n1*n2 pairs (re, im) of doubles, row-major with x2 fastest.

namespace detail {
inline void put_u64(std::ostream& os, std::uint64_t v)
{
    char bytes[8];
    for (int b = 0; b < 8; ++b) {
        bytes[b] = static_cast<char>((v >> (8 * b)) & 0xffu);
    }
    os.write(bytes, 8);
}

inline void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

inline std::uint64_t get_u64(std::istream& is)
{
    unsigned char bytes[8];
    if (!is.read(reinterpret_cast<char*>(bytes), 8)) {
        throw std::runtime_error("checkpoint: unexpected end of data");
    }
    std::uint64_t v = 0;
    for (int b = 7; b >= 0; --b) {
        v = (v << 8) | bytes[b];
    }
    return v;
}

inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }
} // namespace detail

inline void write_checkpoint(std::ostream& os, const WaveFunction2D& wf)
{
    detail::put_u64(os, wf.grid.n1());
    detail::put_u64(os, wf.grid.n2());
    detail::put_f64(os, wf.grid.g1.half_length);
    detail::put_f64(os, wf.grid.g2.half_length);
    detail::put_f64(os, wf.time);
    for (const auto& c : wf.amp) {
        detail::put_f64(os, c.real());
        detail::put_f64(os, c.imag());
    }
    if (!os) {
        throw std::runtime_error("checkpoint: write failed");
    }
}

inline WaveFunction2D read_checkpoint(std::istream& is, double hbar = 1.0)
{
    const auto n1 = detail::get_u64(is);
    const auto n2 = detail::get_u64(is);
    const double L1 = detail::get_f64(is);
    const double L2 = detail::get_f64(is);
    const double t = detail::get_f64(is);
    WaveFunction2D wf{make_grid(n1, n2, L1, L2, hbar), {}, t};
    wf.amp.resize(wf.grid.size());
    for (auto& c : wf.amp) {
        const double re = detail::get_f64(is);
        const double im = detail::get_f64(is);
        c = {re, im};
    }
    return wf;
}

inline void save_checkpoint(const std::string& path, const WaveFunction2D& wf)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw std::runtime_error("checkpoint: cannot open " + path);
    }
    write_checkpoint(os, wf);
}

inline WaveFunction2D load_checkpoint(const std::string& path, double hbar = 1.0)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw std::runtime_error("checkpoint: cannot open " + path);
    }
    return read_checkpoint(is, hbar);
}

} // namespace dwell

#endif // DWELL_WAVEFUNCTION_HPP
