#ifndef DWELL_MODEL_HPP
#define DWELL_MODEL_HPP

// Two-particle double-well Hamiltonian:
//   H = sum_i [ p_i^2 / 2m_i + v_i(x_i) ] + v(x1 - x2)
//   v_i(x) = k_i x^2 / 2 + lambda_i exp(-x^2 / a_i^2)
//   v(d)   = gamma (d - l0)^2 / 2

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace dwell {

struct PotentialParams
{
    double m1 = 1.0;
    double m2 = 1.0;
    double k1 = 0.5;
    double k2 = 0.5;
    double lambda1 = 3.0;
    double lambda2 = 3.0;
    double a1 = 1.0;
    double a2 = 1.0;
    double gamma = 0.0;
    double l0 = 0.5;
    double hbar = 1.0;

    double mass(int particle) const { return particle == 1 ? m1 : m2; }
    double stiffness(int particle) const { return particle == 1 ? k1 : k2; }
    double barrier(int particle) const { return particle == 1 ? lambda1 : lambda2; }
    double width(int particle) const { return particle == 1 ? a1 : a2; }

    /// Throws std::invalid_argument naming the first violated constraint.
    void validate() const
    {
        auto require = [](bool ok, const char* what) {
            if (!ok) {
                throw std::invalid_argument(std::string("invalid potential parameters: ") + what);
            }
        };
        require(m1 > 0.0 && m2 > 0.0, "masses must be positive");
        require(a1 > 0.0 && a2 > 0.0, "barrier widths must be positive");
        require(k1 >= 0.0 && k2 >= 0.0, "stiffness must be non-negative");
        require(lambda1 >= 0.0 && lambda2 >= 0.0, "barrier heights must be non-negative");
        require(gamma >= 0.0, "interaction strength must be non-negative");
        require(hbar > 0.0, "hbar must be positive");
        require(std::isfinite(l0), "interaction offset must be finite");
    }
};

enum class Side { left, right };

inline Side opposite(Side s) { return s == Side::left ? Side::right : Side::left; }

inline const char* to_string(Side s) { return s == Side::left ? "left" : "right"; }

struct PacketSpec
{
    double x0 = 0.0;
    double p0 = 0.0;
    double alpha = 1.0;
    double hbar = 1.0;

    /// Normalization A of phi(x) = A exp(-alpha (x - x0)^2 / 2hbar).
    double norm_const() const { return std::pow(alpha / (M_PI * hbar), 0.25); }

    double sigma_x() const { return std::sqrt(hbar / (2.0 * alpha)); }
};

struct WellGeometry
{
    double left_min = 0.0;
    double right_min = 0.0;
    double barrier_top = 0.0;
    double min_value = 0.0;

    bool double_well() const { return right_min > left_min; }
};

inline double well_potential(double x, double k, double lambda, double a)
{
    return 0.5 * k * x * x + lambda * std::exp(-x * x / (a * a));
}

/// dv/dx of well_potential.
inline double well_slope(double x, double k, double lambda, double a)
{
    const double inv_a2 = 1.0 / (a * a);
    return k * x - 2.0 * lambda * x * inv_a2 * std::exp(-x * x * inv_a2);
}

inline double well_curvature(double x, double k, double lambda, double a)
{
    const double inv_a2 = 1.0 / (a * a);
    return k + 2.0 * lambda * inv_a2 * std::exp(-x * x * inv_a2) * (2.0 * x * x * inv_a2 - 1.0);
}

/// Minima of v(x) = kx^2/2 + lambda exp(-x^2/a^2). Two symmetric minima at
/// +-a sqrt(ln(2 lambda / k a^2)) when 2 lambda > k a^2, otherwise one at 0.
inline WellGeometry well_minima(double k, double lambda, double a)
{
    if (!(k > 0.0)) {
        throw std::invalid_argument("well_minima: stiffness k must be positive");
    }
    if (!(a > 0.0)) {
        throw std::invalid_argument("well_minima: width a must be positive");
    }
    WellGeometry g;
    g.barrier_top = lambda;
    const double ratio = 2.0 * lambda / (k * a * a);
    if (ratio > 1.0) {
        const double xs = a * std::sqrt(std::log(ratio));
        g.left_min = -xs;
        g.right_min = xs;
        g.min_value = well_potential(xs, k, lambda, a);
    } else {
        g.min_value = well_potential(0.0, k, lambda, a);
    }
    return g;
}

inline double interaction_potential(double x1, double x2, double gamma, double l0)
{
    const double d = x1 - x2 - l0;
    return 0.5 * gamma * d * d;
}

inline double onsite_potential(double x, int particle, const PotentialParams& p)
{
    return well_potential(x, p.stiffness(particle), p.barrier(particle), p.width(particle));
}

inline double total_potential(double x1, double x2, const PotentialParams& p)
{
    return well_potential(x1, p.k1, p.lambda1, p.a1) + well_potential(x2, p.k2, p.lambda2, p.a2)
           + interaction_potential(x1, x2, p.gamma, p.l0);
}

struct ForcePair
{
    double f1 = 0.0;
    double f2 = 0.0;
};

inline ForcePair total_force(double x1, double x2, const PotentialParams& p)
{
    const double fint = -p.gamma * (x1 - x2 - p.l0);
    return {-well_slope(x1, p.k1, p.lambda1, p.a1) + fint,
            -well_slope(x2, p.k2, p.lambda2, p.a2) - fint};
}

/// Gaussian packet at rest at the bottom of one well of `particle`'s potential.
inline PacketSpec packet_for_well(const PotentialParams& p, int particle, Side side, double alpha)
{
    if (particle != 1 && particle != 2) {
        throw std::invalid_argument("packet_for_well: particle index must be 1 or 2");
    }
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("packet_for_well: alpha must be positive");
    }
    const auto g = well_minima(p.stiffness(particle), p.barrier(particle), p.width(particle));
    if (!g.double_well()) {
        throw std::invalid_argument("packet_for_well: potential of particle " + std::to_string(particle)
                                    + " has a single minimum");
    }
    PacketSpec spec;
    spec.x0 = side == Side::right ? g.right_min : g.left_min;
    spec.p0 = 0.0;
    spec.alpha = alpha;
    spec.hbar = p.hbar;
    return spec;
}

} // namespace dwell

#endif // DWELL_MODEL_HPP
