#ifndef DWELL_OBSERVE_HPP
#define DWELL_OBSERVE_HPP

// Observables of a two-particle state on the grid: particle-1 marginal,
// tunneling rate, Schmidt spectrum / entanglement entropy, autocorrelation.

#include "dwell/grid.hpp"
#include "dwell/wavefunction.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace dwell {

struct ReducedDensityDiag
{
    Grid1D grid;
    std::vector<double> rho1;

    double integral() const
    {
        double s = 0.0;
        for (double r : rho1) {
            s += r;
        }
        return s * grid.dx();
    }
};

/// rho1(x1_i) = sum_j |psi_ij|^2 dx2.
inline ReducedDensityDiag reduced_density_diag(const WaveFunction2D& psi)
{
    const auto& g = psi.grid;
    ReducedDensityDiag out{g.g1, std::vector<double>(g.n1(), 0.0)};
    for (std::size_t i = 0; i < g.n1(); ++i) {
        double s = 0.0;
        const complex* row = psi.amp.data() + g.index(i, 0);
        for (std::size_t j = 0; j < g.n2(); ++j) {
            s += std::norm(row[j]);
        }
        out.rho1[i] = s * g.dx2();
    }
    return out;
}

/// Probability on the far (x < 0) side of the barrier. A lattice point exactly
/// on x = 0 contributes half its weight.
inline double tunneling_rate(const Grid1D& grid, std::span<const double> density)
{
    if (density.size() != grid.n) {
        throw std::invalid_argument("tunneling_rate: density length does not match grid");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double x = grid.x(i);
        if (x < 0.0) {
            s += density[i];
        } else if (x == 0.0) {
            s += 0.5 * density[i];
        }
    }
    return std::clamp(s * grid.dx(), 0.0, 1.0);
}

inline double tunneling_rate(const ReducedDensityDiag& rho) { return tunneling_rate(rho.grid, rho.rho1); }

inline double tunneling_rate(const WaveFunction1D& wf)
{
    std::vector<double> d(wf.amp.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] = std::norm(wf.amp[i]);
    }
    return tunneling_rate(wf.grid, d);
}

/// Schmidt weights (squared singular values of psi_ij sqrt(dx1 dx2)),
/// descending.
inline std::vector<double> schmidt_spectrum(const WaveFunction2D& psi)
{
    const auto& g = psi.grid;
    using RowMajor = Eigen::Matrix<complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMajor> m(psi.amp.data(), static_cast<Eigen::Index>(g.n1()), static_cast<Eigen::Index>(g.n2()));
    const Eigen::MatrixXcd scaled = m * std::sqrt(g.cell());
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(scaled);
    const auto& s = svd.singularValues();
    std::vector<double> w(static_cast<std::size_t>(s.size()));
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        w[static_cast<std::size_t>(k)] = s[k] * s[k];
    }
    return w;
}

/// S = -sum w ln w over the given weights, with 0 ln 0 = 0.
inline double entropy_of_weights(std::span<const double> weights)
{
    double s = 0.0;
    for (double w : weights) {
        if (w > 0.0) {
            s -= w * std::log(w);
        }
    }
    // a pure state can come out as -1e-16
    return std::max(s, 0.0);
}

inline double von_neumann_entropy(const WaveFunction2D& psi)
{
    const auto w = schmidt_spectrum(psi);
    return entropy_of_weights(w);
}

/// C = <psi0|psit> = sum conj(psi0) psit dx1 dx2.
inline complex autocorrelation(const WaveFunction2D& psi0, const WaveFunction2D& psit)
{
    if (!(psi0.grid == psit.grid)) {
        throw std::invalid_argument("autocorrelation: states live on different grids");
    }
    complex s{0.0, 0.0};
    for (std::size_t k = 0; k < psi0.amp.size(); ++k) {
        s += std::conj(psi0.amp[k]) * psit.amp[k];
    }
    return s * psi0.grid.cell();
}

inline complex autocorrelation(const WaveFunction1D& psi0, const WaveFunction1D& psit)
{
    if (!(psi0.grid == psit.grid)) {
        throw std::invalid_argument("autocorrelation: states live on different grids");
    }
    complex s{0.0, 0.0};
    for (std::size_t k = 0; k < psi0.amp.size(); ++k) {
        s += std::conj(psi0.amp[k]) * psit.amp[k];
    }
    return s * psi0.grid.dx();
}

} // namespace dwell

#endif // DWELL_OBSERVE_HPP
