#include "dwell/eigen_oracle.hpp"
#include "dwell/split_operator.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

using namespace dwell;
using Catch::Approx;

namespace {

PotentialParams uncoupled()
{
    PotentialParams p;
    p.lambda2 = 15.0;
    p.gamma = 0.0;
    return p;
}

PotentialParams harmonic()
{
    PotentialParams p;
    p.lambda1 = p.lambda2 = 0.0;
    p.gamma = 0.0;
    return p;
}

double max_diff(const ComplexBuffer& a, const ComplexBuffer& b)
{
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        m = std::max(m, std::abs(a[k] - b[k]));
    }
    return m;
}

WaveFunction2D standard_state(const Grid2D& g, const PotentialParams& p)
{
    return init_product_gaussian(g, packet_for_well(p, 1, Side::right, 3.0), packet_for_well(p, 2, Side::left, 3.0));
}

} // namespace

TEST_CASE("grid spacing and momentum range")
{
    const auto g = make_grid(256, 256, 8.0, 8.0);
    CHECK(g.dx1() == 0.0625);
    CHECK(g.dx2() == 0.0625);
    CHECK(g.g1.p_max() == Approx(50.2654824574).epsilon(1e-10));
    CHECK(g.g1.x(0) == -8.0);
    CHECK(g.g1.x(255) == Approx(8.0 - 0.0625));
    CHECK(g.g1.p(1) == Approx(2.0 * M_PI / 16.0));
    CHECK(g.g1.p(255) == Approx(-2.0 * M_PI / 16.0));
    CHECK(g.g1.p(128) == Approx(-g.g1.p_max()));
    CHECK(g.index(3, 5) == 3 * 256 + 5);
    CHECK_THROWS_AS(make_grid(100, 256, 8.0, 8.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(8, 256, 8.0, 8.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(256, 256, -1.0, 8.0), std::invalid_argument);
}

TEST_CASE("sampled Gaussian has the analytic moments")
{
    const auto grid = make_grid_1d(512, 8.0);
    const PacketSpec spec{1.5763586678760644, 0.0, 3.0, 1.0};
    const auto wf = init_gaussian_1d(grid, spec);
    double n = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t j = 0; j < grid.n; ++j) {
        const double w = std::norm(wf.amp[j]) * grid.dx();
        n += w;
        m1 += w * grid.x(j);
        m2 += w * grid.x(j) * grid.x(j);
    }
    CHECK(n == Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(m1 - spec.x0) < 1e-8);
    CHECK(std::abs((m2 - m1 * m1) - 1.0 / 6.0) < 1e-6);
}

TEST_CASE("product state is normalized and factorizes")
{
    const auto p = uncoupled();
    const auto g = make_grid(64, 64, 6.0, 6.0);
    const auto psi = standard_state(g, p);
    CHECK(psi.norm_squared() == Approx(1.0).epsilon(1e-13));
    // rank one: psi(i,j) psi(k,l) == psi(i,l) psi(k,j)
    CHECK(std::abs(psi(20, 10) * psi(40, 30) - psi(20, 30) * psi(40, 10)) < 1e-14);
}

TEST_CASE("packet too close to the box edge is rejected")
{
    const auto p = uncoupled();
    const auto spec = packet_for_well(p, 1, Side::right, 3.0);
    CHECK_THROWS_WITH(init_product_gaussian(make_grid(64, 64, 2.0, 8.0), spec, packet_for_well(p, 2, Side::left, 3.0)),
                      Catch::Matchers::ContainsSubstring("reaches the grid edge"));
    CHECK_THROWS_AS(init_gaussian_1d(make_grid_1d(64, 2.0), spec), std::invalid_argument);
}

TEST_CASE("norm is conserved over long runs")
{
    auto p = uncoupled();
    p.gamma = 0.2;
    const auto g = make_grid(64, 64, 6.0, 6.0);
    auto psi = standard_state(g, p);
    const SplitOperator2D prop(g, p, 0.01);
    for (int s = 0; s < 10000; ++s) {
        prop.step(psi);
    }
    CHECK(std::abs(psi.norm_squared() - 1.0) < 1e-10);
    CHECK(psi.time == Approx(100.0).epsilon(1e-12));
}

TEST_CASE("uncoupled evolution factorizes into one-dimensional runs")
{
    const auto p = uncoupled();
    const auto g = make_grid(64, 128, 6.0, 7.0);
    const auto s1 = packet_for_well(p, 1, Side::right, 3.0);
    const auto s2 = packet_for_well(p, 2, Side::left, 3.0);
    auto psi = init_product_gaussian(g, s1, s2);
    auto a = init_gaussian_1d(g.g1, s1);
    auto b = init_gaussian_1d(g.g2, s2);

    const double dt = 0.005;
    const SplitOperator2D prop(g, p, dt);
    const auto prop1 = SplitOperator1D::for_particle(g.g1, p, 1, dt);
    const auto prop2 = SplitOperator1D::for_particle(g.g2, p, 2, dt);
    for (int s = 0; s < 2000; ++s) {
        prop.step(psi);
        prop1.step(a);
        prop2.step(b);
    }
    ComplexBuffer outer(g.size());
    for (std::size_t i = 0; i < g.n1(); ++i) {
        for (std::size_t j = 0; j < g.n2(); ++j) {
            outer[g.index(i, j)] = a.amp[i] * b.amp[j];
        }
    }
    CHECK(max_diff(psi.amp, outer) < 1e-10);
}

TEST_CASE("Strang splitting is second order in dt")
{
    auto p = uncoupled();
    p.gamma = 0.3;
    const auto g = make_grid(64, 64, 6.0, 6.0);
    const auto psi0 = standard_state(g, p);
    const double t = 2.0;
    auto run = [&](double dt) {
        auto psi = psi0;
        const SplitOperator2D prop(g, p, dt);
        const auto n = step_count(t, dt);
        for (std::int64_t s = 0; s < n; ++s) {
            prop.step(psi);
        }
        return psi;
    };
    const auto ref = run(0.000625);
    const double e1 = max_diff(run(0.02).amp, ref.amp);
    const double e2 = max_diff(run(0.01).amp, ref.amp);
    const double e3 = max_diff(run(0.005).amp, ref.amp);
    CHECK(e1 / e2 == Approx(4.0).epsilon(0.15));
    CHECK(e2 / e3 == Approx(4.0).epsilon(0.15));
}

TEST_CASE("energy expectation of harmonic Gaussians")
{
    // <H> per particle = hbar alpha / 4m + k hbar / 4 alpha
    const auto p = harmonic();
    const auto g = make_grid(128, 128, 8.0, 8.0);
    const PacketSpec s1{0.0, 0.0, 3.0, 1.0};
    const auto psi = init_product_gaussian(g, s1, s1);
    CHECK(energy_expectation(psi, p) == Approx(2.0 * (0.75 + 0.5 / 12.0)).epsilon(1e-10));
    CHECK(2.0 * (0.75 + 0.5 / 12.0) == Approx(1.583333).epsilon(1e-6));

    const auto g1 = make_grid_1d(128, 8.0);
    const auto a = init_gaussian_1d(g1, s1);
    CHECK(SplitOperator1D::for_particle(g1, p, 1, 0.01).energy(a) == Approx(0.7916666666666666).epsilon(1e-10));

    // a boosted packet adds p0^2 / 2m
    const PacketSpec moving{0.0, 1.5, 3.0, 1.0};
    const auto b = init_gaussian_1d(g1, moving);
    CHECK(SplitOperator1D::for_particle(g1, p, 1, 0.01).energy(b) == Approx(0.7916666666666666 + 1.125).epsilon(1e-9));
}

TEST_CASE("energy is invariant under a global phase")
{
    auto p = uncoupled();
    p.gamma = 0.1;
    const auto g = make_grid(64, 64, 6.0, 6.0);
    auto psi = standard_state(g, p);
    const SplitOperator2D prop(g, p, 0.01);
    for (int s = 0; s < 100; ++s) {
        prop.step(psi);
    }
    const double e = prop.energy(psi);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    for (int trial = 0; trial < 5; ++trial) {
        auto rotated = psi;
        const auto z = std::polar(1.0, phase(rng));
        for (auto& c : rotated.amp) {
            c *= z;
        }
        CHECK(prop.energy(rotated) == Approx(e).epsilon(1e-13));
    }
}

TEST_CASE("energy is conserved by the coupled propagation")
{
    auto p = uncoupled();
    p.gamma = 0.1;
    const auto g = make_grid(64, 128, 8.0, 7.0);
    auto psi = standard_state(g, p);
    const SplitOperator2D prop(g, p, 0.002);
    const double e0 = prop.energy(psi);
    PropagationOptions opt;
    opt.t_final = 20.0;
    opt.sample_stride = 500;
    opt.observe = Observable::energy | Observable::norm;
    const auto series = propagate(psi, prop, opt);
    REQUIRE(series.samples.size() == 21);
    for (const auto& s : series.samples) {
        CHECK(std::abs(s.energy - e0) < 1e-5 * std::abs(e0));
        CHECK(std::abs(s.norm - 1.0) < 1e-10);
        CHECK(std::isnan(s.entropy));
    }
}

TEST_CASE("propagation aborts when particle 1 reaches the box edge")
{
    const auto p = harmonic();
    const auto g = make_grid(64, 64, 4.0, 6.0);
    auto psi = init_product_gaussian(g, PacketSpec{0.0, 8.0, 3.0, 1.0}, PacketSpec{0.0, 0.0, 3.0, 1.0});
    const SplitOperator2D prop(g, p, 0.002);
    PropagationOptions opt;
    opt.t_final = 5.0;
    opt.sample_stride = 10;
    opt.observe = Observable::tunneling;
    try {
        propagate(psi, prop, opt);
        FAIL("expected an edge abort");
    } catch (const PropagationError& e) {
        CHECK(std::string(e.what()).find("box") != std::string::npos);
        CHECK(e.time() > 0.0);
        CHECK(e.time() < 1.0);
    }
}

TEST_CASE("samples land on the requested lattice")
{
    const auto p = uncoupled();
    const auto g = make_grid(32, 32, 8.0, 6.0);
    auto psi = standard_state(g, p);
    const SplitOperator2D prop(g, p, 0.01);
    PropagationOptions opt;
    opt.t_final = 1.0;
    opt.sample_stride = 25;
    opt.autocorr_stride = 5;
    const auto s = propagate(psi, prop, opt);
    REQUIRE(s.samples.size() == 5);
    CHECK(s.samples[2].t == Approx(0.5));
    CHECK(s.autocorr.size() == 21);
    CHECK(s.autocorr_dt == Approx(0.05));
    CHECK(std::abs(s.autocorr[0] - complex{1.0, 0.0}) < 1e-13);
    CHECK(std::abs(s.samples[4].autocorr - s.autocorr[20]) < 1e-14);
    CHECK(psi.time == Approx(1.0));
    CHECK_THROWS_AS(step_count(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(step_count(1e10, 1.0), std::invalid_argument);
}

TEST_CASE("oracle reproduces harmonic levels")
{
    // The three-point stencil is second order, so a Richardson step on two
    // lattices recovers (n + 1/2) omega far below the raw discretization error.
    OracleRequest req;
    req.k = 0.5;
    req.lambda = 0.0;
    req.half_length = 10.0;
    req.count = 6;
    req.n = 512;
    const auto coarse = eigen_oracle_1d(req);
    req.n = 1024;
    const auto b = eigen_oracle_1d(req);
    const double w = std::sqrt(0.5);
    for (std::size_t n = 0; n < 6; ++n) {
        const double exact = (static_cast<double>(n) + 0.5) * w;
        CHECK(b.pairs[n].energy == Approx(exact).epsilon(2e-4));
        const double extrapolated = (4.0 * b.pairs[n].energy - coarse.pairs[n].energy) / 3.0;
        CHECK(extrapolated == Approx(exact).epsilon(1e-7));
        CHECK(b.pairs[n].residual < 1e-8);
        double s = 0.0;
        for (double v : b.pairs[n].vector) {
            s += v * v;
        }
        CHECK(s * b.grid.dx() == Approx(1.0).epsilon(1e-12));
    }
    // periodic boundary gives the same low levels when the box is large
    req.boundary = Boundary::periodic;
    req.n = 512;
    const auto bp = eigen_oracle_1d(req);
    CHECK(bp.pairs[0].energy == Approx(coarse.pairs[0].energy).epsilon(1e-10));
}

TEST_CASE("oracle double-well doublet converges")
{
    OracleRequest req;
    req.count = 4;
    req.n = 512;
    const auto coarse = eigen_oracle_1d(req);
    req.n = 1024;
    const auto fine = eigen_oracle_1d(req);
    const double split_c = coarse.pairs[1].energy - coarse.pairs[0].energy;
    const double split_f = fine.pairs[1].energy - fine.pairs[0].energy;
    CHECK(std::abs(split_c - split_f) < 1e-6);
    CHECK(split_f == Approx(0.0610777).epsilon(1e-4));
    CHECK(fine.pairs[0].energy == Approx(1.5500).epsilon(1e-4));
    for (const auto& pr : fine.pairs) {
        CHECK(pr.residual < 1e-8);
    }
    // the doublet is well separated from the next level
    CHECK(fine.pairs[2].energy - fine.pairs[1].energy > 10.0 * split_f);
    CHECK_THROWS_AS(eigen_oracle_1d(OracleRequest{.n = 8192}), std::invalid_argument);
}

TEST_CASE("oracle expansion in the full basis reproduces the packet")
{
    OracleRequest req;
    req.n = 256;
    req.count = 256;
    const auto b = eigen_oracle_1d(req);
    const auto spec = PacketSpec{1.5763586678760644, 0.0, 3.0, 1.0};
    const auto c = expansion_coefficients(b, spec);
    double total = 0.0;
    for (const auto& z : c) {
        total += std::norm(z);
    }
    CHECK(total == Approx(1.0).epsilon(1e-12));

    const double t0[] = {0.0};
    const auto predicted = predict_uncoupled_Tr(b, spec, t0);
    const auto direct = tunneling_rate(init_gaussian_1d(b.grid, spec));
    CHECK(predicted[0] == Approx(direct).margin(1e-12));

    req.count = 2;
    CHECK_THROWS_AS(predict_uncoupled_Tr(eigen_oracle_1d(req), spec, t0), std::invalid_argument);
}

TEST_CASE("uncoupled tunneling matches the eigen-expansion")
{
    // Two independent routes for T_r(t) of a lone particle: spectral split
    // operator vs. phases on the finite-difference eigenbasis.
    const auto p = uncoupled();
    const auto grid = make_grid_1d(1024, 8.0);
    const auto spec = packet_for_well(p, 1, Side::right, 3.0);
    auto wf = init_gaussian_1d(grid, spec);
    const auto prop = SplitOperator1D::for_particle(grid, p, 1, 0.002);
    const auto series = propagate_1d(wf, prop, 60.0, 250);

    OracleRequest req;
    req.n = 1024;
    req.count = 60;
    const auto basis = eigen_oracle_1d(req);
    const auto predicted = predict_uncoupled_Tr(basis, spec, series.t);
    double worst = 0.0;
    for (std::size_t k = 0; k < predicted.size(); ++k) {
        worst = std::max(worst, std::abs(predicted[k] - series.tunneling[k]));
    }
    CHECK(worst < 2e-3);

    // the transfer peaks near pi hbar / dE, a half Rabi period
    const double dE = basis.pairs[1].energy - basis.pairs[0].energy;
    const auto peak = std::max_element(series.tunneling.begin(), series.tunneling.end());
    const double t_peak = series.t[static_cast<std::size_t>(peak - series.tunneling.begin())];
    CHECK(t_peak == Approx(M_PI / dE).epsilon(0.05));
    CHECK(*peak > 0.85);
}

TEST_CASE("checkpoint round trip and byte layout")
{
    const auto p = uncoupled();
    const auto g = make_grid(16, 32, 6.0, 7.0);
    auto psi = standard_state(g, p);
    SplitOperator2D(g, p, 0.01).step(psi);

    std::stringstream buf;
    write_checkpoint(buf, psi);
    const std::string bytes = buf.str();
    REQUIRE(bytes.size() == 40 + 16 * g.size());
    CHECK(static_cast<unsigned char>(bytes[0]) == 16);
    CHECK(static_cast<unsigned char>(bytes[8]) == 32);
    double L1 = 0.0;
    std::memcpy(&L1, bytes.data() + 16, 8);
    CHECK(L1 == 6.0);
    double re = 0.0, im = 0.0;
    const std::size_t k = g.index(3, 7);
    std::memcpy(&re, bytes.data() + 40 + 16 * k, 8);
    std::memcpy(&im, bytes.data() + 48 + 16 * k, 8);
    CHECK(re == psi(3, 7).real());
    CHECK(im == psi(3, 7).imag());

    const auto back = read_checkpoint(buf);
    CHECK(back.grid == psi.grid);
    CHECK(back.time == psi.time);
    CHECK(max_diff(back.amp, psi.amp) == 0.0);

    std::stringstream truncated(bytes.substr(0, 100));
    CHECK_THROWS_AS(read_checkpoint(truncated), std::runtime_error);
}
