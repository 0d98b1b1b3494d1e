#ifndef DWELL_EIGEN_ORACLE_HPP
#define DWELL_EIGEN_ORACLE_HPP

// Dense diagonalization of the 1-D finite-difference Hamiltonian
//   H = -hbar^2/2m d^2/dx^2 + k x^2/2 + lambda exp(-x^2/a^2)
// with the three-point stencil. Used as an independent check of the
// spectral propagator in the uncoupled limit.

#include "dwell/grid.hpp"
#include "dwell/model.hpp"
#include "dwell/observe.hpp"
#include "dwell/wavefunction.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dwell {

enum class Boundary { hard_wall, periodic };

inline constexpr std::size_t max_oracle_points = 4096;

struct EigenPair1D
{
    double energy = 0.0;
    /// Unit grid norm: sum v^2 dx = 1.
    std::vector<double> vector;
    double residual = 0.0;
};

struct EigenBasis1D
{
    Grid1D grid;
    Boundary boundary = Boundary::hard_wall;
    std::vector<EigenPair1D> pairs;
};

struct OracleRequest
{
    double k = 0.5;
    double lambda = 3.0;
    double a = 1.0;
    double mass = 1.0;
    std::size_t n = 1024;
    double half_length = 8.0;
    std::size_t count = 2;
    Boundary boundary = Boundary::hard_wall;
    double hbar = 1.0;
};

/// Lowest `count` eigenpairs on the lattice x_j = -L + j dx, dx = 2L/n.
/// Hard walls drop the stencil couplings that would wrap around; the periodic
/// variant keeps them.
inline EigenBasis1D eigen_oracle_1d(const OracleRequest& req)
{
    if (req.n > max_oracle_points) {
        throw std::invalid_argument("eigen_oracle_1d: n=" + std::to_string(req.n) + " exceeds the dense budget of "
                                    + std::to_string(max_oracle_points));
    }
    if (req.n < 3 || !(req.half_length > 0.0) || !(req.mass > 0.0) || !(req.a > 0.0)) {
        throw std::invalid_argument("eigen_oracle_1d: invalid lattice or mass");
    }
    if (req.count < 1 || req.count > req.n) {
        throw std::invalid_argument("eigen_oracle_1d: count must be in [1, n]");
    }
    EigenBasis1D out;
    out.grid = Grid1D{req.n, req.half_length, req.hbar};
    out.boundary = req.boundary;
    const auto n = static_cast<Eigen::Index>(req.n);
    const double dx = out.grid.dx();
    const double hop = -req.hbar * req.hbar / (2.0 * req.mass * dx * dx);

    Eigen::VectorXd diag(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        diag[j] = -2.0 * hop + well_potential(out.grid.x(static_cast<std::size_t>(j)), req.k, req.lambda, req.a);
    }

    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    Eigen::MatrixXd dense;
    if (req.boundary == Boundary::hard_wall) {
        Eigen::VectorXd sub = Eigen::VectorXd::Constant(n - 1, hop);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
        if (es.info() != Eigen::Success) {
            throw std::runtime_error("eigen_oracle_1d: tridiagonal eigensolver failed");
        }
        values = es.eigenvalues();
        vectors = es.eigenvectors();
    } else {
        dense = Eigen::MatrixXd::Zero(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            dense(j, j) = diag[j];
            dense(j, (j + 1) % n) += hop;
            dense((j + 1) % n, j) += hop;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
        if (es.info() != Eigen::Success) {
            throw std::runtime_error("eigen_oracle_1d: dense eigensolver failed");
        }
        values = es.eigenvalues();
        vectors = es.eigenvectors();
    }

    auto apply_h = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd r(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            double s = diag[j] * v[j];
            if (j > 0) {
                s += hop * v[j - 1];
            } else if (req.boundary == Boundary::periodic) {
                s += hop * v[n - 1];
            }
            if (j + 1 < n) {
                s += hop * v[j + 1];
            } else if (req.boundary == Boundary::periodic) {
                s += hop * v[0];
            }
            r[j] = s;
        }
        return r;
    };

    const double scale = 1.0 / std::sqrt(dx);
    for (std::size_t c = 0; c < req.count; ++c) {
        const auto col = static_cast<Eigen::Index>(c);
        Eigen::VectorXd v = vectors.col(col) * scale;
        // Fix the arbitrary sign: largest-magnitude component positive.
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        if (v[imax] < 0.0) {
            v = -v;
        }
        EigenPair1D pair;
        pair.energy = values[col];
        pair.residual = std::sqrt((apply_h(v) - values[col] * v).squaredNorm() * dx);
        pair.vector.assign(v.data(), v.data() + n);
        out.pairs.push_back(std::move(pair));
    }
    return out;
}

/// Overlaps c_n = <phi_n|packet> of a packet sampled on the basis lattice.
inline std::vector<complex> expansion_coefficients(const EigenBasis1D& basis, const PacketSpec& packet)
{
    const auto psi = sample_packet(basis.grid, packet);
    const double dx = basis.grid.dx();
    std::vector<complex> c;
    c.reserve(basis.pairs.size());
    for (const auto& pair : basis.pairs) {
        complex s{0.0, 0.0};
        for (std::size_t j = 0; j < psi.size(); ++j) {
            s += pair.vector[j] * psi[j];
        }
        c.push_back(s * dx);
    }
    return c;
}

/// T_r(t) of the uncoupled particle, by evolving the eigen-expansion of
/// `packet` with phases exp(-i E_n t / hbar). Throws when the basis captures
/// less than 1 - min_coverage_loss of the packet norm.
inline std::vector<double> predict_uncoupled_Tr(const EigenBasis1D& basis, const PacketSpec& packet,
                                                std::span<const double> times, double min_coverage_loss = 1e-6)
{
    const auto c = expansion_coefficients(basis, packet);
    double coverage = 0.0;
    for (const auto& z : c) {
        coverage += std::norm(z);
    }
    if (coverage < 1.0 - min_coverage_loss) {
        throw std::invalid_argument("predict_uncoupled_Tr: eigenbasis captures only " + std::to_string(coverage)
                                    + " of the packet norm; request more eigenpairs");
    }
    const auto& g = basis.grid;
    std::vector<double> out;
    out.reserve(times.size());
    std::vector<complex> phi(g.n);
    std::vector<double> density(g.n);
    for (double t : times) {
        std::fill(phi.begin(), phi.end(), complex{0.0, 0.0});
        for (std::size_t m = 0; m < basis.pairs.size(); ++m) {
            const complex amp = c[m] * std::polar(1.0, -basis.pairs[m].energy * t / g.hbar);
            const auto& v = basis.pairs[m].vector;
            for (std::size_t j = 0; j < g.n; ++j) {
                phi[j] += amp * v[j];
            }
        }
        for (std::size_t j = 0; j < g.n; ++j) {
            density[j] = std::norm(phi[j]);
        }
        out.push_back(tunneling_rate(g, density));
    }
    return out;
}

} // namespace dwell

#endif // DWELL_EIGEN_ORACLE_HPP
