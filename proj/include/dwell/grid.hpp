#ifndef DWELL_GRID_HPP
#define DWELL_GRID_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dwell {

/// Periodic lattice x_j = -L + j dx, j = 0..n-1, dx = 2L/n.
///
/// Momentum index j uses the standard DFT bin order: bins 0..n/2-1 carry
/// j = 0..n/2-1 and bins n/2..n-1 carry j = -n/2..-1, with
/// p_j = 2 pi hbar j / (2L).
struct Grid1D
{
    std::size_t n = 0;
    double half_length = 0.0;
    double hbar = 1.0;

    double dx() const { return 2.0 * half_length / static_cast<double>(n); }
    double x(std::size_t j) const { return -half_length + static_cast<double>(j) * dx(); }

    long signed_index(std::size_t bin) const
    {
        const auto b = static_cast<long>(bin);
        const auto nn = static_cast<long>(n);
        return b < nn / 2 ? b : b - nn;
    }

    double dp() const { return 2.0 * M_PI * hbar / (2.0 * half_length); }
    double p(std::size_t bin) const { return dp() * static_cast<double>(signed_index(bin)); }
    double p_max() const { return M_PI * hbar / dx(); }

    std::vector<double> positions() const
    {
        std::vector<double> xs(n);
        for (std::size_t j = 0; j < n; ++j) {
            xs[j] = x(j);
        }
        return xs;
    }

    bool operator==(const Grid1D&) const = default;
};

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline Grid1D make_grid_1d(std::size_t n, double half_length, double hbar = 1.0)
{
    if (n < 16 || !is_power_of_two(n)) {
        throw std::invalid_argument("grid size " + std::to_string(n) + " must be a power of two >= 16");
    }
    if (!(half_length > 0.0) || !std::isfinite(half_length)) {
        throw std::invalid_argument("grid half-length must be positive and finite");
    }
    if (!(hbar > 0.0)) {
        throw std::invalid_argument("hbar must be positive");
    }
    return Grid1D{n, half_length, hbar};
}

/// Product lattice for (x1, x2). Storage is row-major with x2 fastest.
struct Grid2D
{
    Grid1D g1;
    Grid1D g2;

    std::size_t n1() const { return g1.n; }
    std::size_t n2() const { return g2.n; }
    std::size_t size() const { return g1.n * g2.n; }
    double dx1() const { return g1.dx(); }
    double dx2() const { return g2.dx(); }
    double cell() const { return g1.dx() * g2.dx(); }
    std::size_t index(std::size_t i, std::size_t j) const { return i * g2.n + j; }

    bool operator==(const Grid2D&) const = default;
};

inline Grid2D make_grid(std::size_t n1, std::size_t n2, double L1, double L2, double hbar = 1.0)
{
    return Grid2D{make_grid_1d(n1, L1, hbar), make_grid_1d(n2, L2, hbar)};
}

} // namespace dwell

#endif // DWELL_GRID_HPP
