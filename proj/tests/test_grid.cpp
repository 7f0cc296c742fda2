#include "afmhd/grid.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace afmhd;

namespace {

constexpr double pi = 3.141592653589793;

auto unit_box(bool periodic) -> domain_box
{
    return {0.0, 1.0, 0.0, 1.0, periodic, periodic};
}

auto alfven_map() -> mapping
{
    return mappings::perturbed_sine(0.01, 2.0 * pi * 2.0, 0.02, 2.0 * pi * 4.0);
}

} // namespace

TEST(Grid, IdentityHasUnitMetrics)
{
    for (bool periodic : {true, false}) {
        auto g = build_grid(mappings::identity(), 16, 12, unit_box(periodic));
        for (int j = -3; j < g.ny + 3; ++j) {
            for (int i = -3; i < g.nx + 3; ++i) {
                EXPECT_NEAR(g.jac(i, j), 1.0, 1e-12);
                EXPECT_NEAR(g.grad_xi(i, j)[0], 1.0, 1e-12);
                EXPECT_NEAR(g.grad_xi(i, j)[1], 0.0, 1e-12);
                EXPECT_NEAR(g.grad_eta(i, j)[0], 0.0, 1e-12);
                EXPECT_NEAR(g.grad_eta(i, j)[1], 1.0, 1e-12);
            }
        }
        for (int j = 0; j < g.ny; ++j)
            for (int i = -1; i < g.nx; ++i) {
                EXPECT_NEAR(g.half_xi(i, j)[0], 1.0, 1e-12);
                EXPECT_NEAR(g.half_xi(i, j)[1], 0.0, 1e-12);
            }
    }
}

TEST(Grid, NodePlacement)
{
    auto p = build_grid(mappings::identity(), 16, 16, unit_box(true));
    EXPECT_DOUBLE_EQ(p.dxi, 1.0 / 16.0);
    EXPECT_DOUBLE_EQ(p.x(15, 0), 15.0 / 16.0);
    auto q = build_grid(mappings::identity(), 16, 16, unit_box(false));
    EXPECT_DOUBLE_EQ(q.dxi, 1.0 / 15.0);
    EXPECT_DOUBLE_EQ(q.x(15, 0), 1.0);
}

TEST(Grid, RejectsSmallGrids)
{
    EXPECT_THROW(build_grid(mappings::identity(), 8, 16, unit_box(true)), std::invalid_argument);
    EXPECT_THROW(build_grid(mappings::identity(), 16, 4, unit_box(true)), std::invalid_argument);
    EXPECT_NO_THROW(build_grid(mappings::identity(), 16, 1, unit_box(true)));
}

TEST(Grid, SingularJacobianIsAnError)
{
    mapping collapse{"collapse", [](double xi, double) { return std::array<double, 2>{xi, 0.0}; }, {}, {}};
    EXPECT_THROW(build_grid(collapse, 16, 16, unit_box(false)), std::runtime_error);
}

TEST(Grid, MetricDualityAndJacobianIdentity)
{
    auto g = build_grid(mappings::sector(), 24, 20, unit_box(false), metric_mode::analytic);
    EXPECT_EQ(g.mode, metric_mode::analytic);
    auto m = mappings::sector();
    for (int j = -3; j < g.ny + 3; ++j) {
        for (int i = -3; i < g.nx + 3; ++i) {
            auto d = m.jacobian(g.xi_at(i), g.eta_at(j));
            double jinv = d[0] * d[3] - d[1] * d[2];
            EXPECT_NEAR(1.0 / g.jac(i, j), jinv, 1e-12 * std::abs(jinv));
            double jac = g.jac(i, j);
            EXPECT_NEAR(g.grad_xi(i, j)[0] / jac, d[3], 1e-12);
            EXPECT_NEAR(g.grad_xi(i, j)[1] / jac, -d[1], 1e-12);
            EXPECT_NEAR(g.grad_eta(i, j)[0] / jac, -d[2], 1e-12);
            EXPECT_NEAR(g.grad_eta(i, j)[1] / jac, d[0], 1e-12);
        }
    }
}

TEST(Grid, DiscreteMetricsSixthOrder)
{
    auto m = alfven_map();
    std::vector<double> hs, errs;
    for (int n : {32, 64, 128}) {
        auto g = build_grid(m, n, n, unit_box(true));
        double err = 0.0;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                auto d = m.jacobian(g.xi_at(i), g.eta_at(j));
                err = std::max({err, std::abs(g.m_xi(i, j)[1] + d[1]), std::abs(g.m_eta(i, j)[0] + d[2])});
            }
        hs.push_back(1.0 / n);
        errs.push_back(err);
    }
    EXPECT_GE(oracle::convergence_slope(hs, errs), 5.5);
}

TEST(Grid, HalfMetricExactForQuintics)
{
    // x = ξ + c·η·p(ξ) gives ∂ηx = c·p(ξ), a quintic in the sweep coordinate
    auto p = [](double s) { return 1.0 + s - 2.0 * s * s + 0.5 * std::pow(s, 3) + 0.3 * std::pow(s, 4) - 0.2 * std::pow(s, 5); };
    mapping m{"quintic", [&](double xi, double eta) { return std::array<double, 2>{xi + 0.05 * eta * p(xi), eta}; },
              {}, {}};
    auto g = build_grid(m, 16, 16, unit_box(false));
    for (int j = 0; j < g.ny; ++j)
        for (int i = -1; i < g.nx; ++i) {
            double xh = 0.5 * (g.xi_at(i) + g.xi_at(i + 1));
            EXPECT_NEAR(g.half_xi(i, j)[1], -0.05 * p(xh), 1e-13);
        }
}

TEST(Grid, DeterministicAndSeeded)
{
    auto build = [](std::uint64_t seed) {
        double h = 1.0 / 32.0;
        return build_grid(mappings::randomized(32, 32, h, h, 0.1, seed), 32, 32, unit_box(true));
    };
    auto a = build(7), b = build(7), c = build(8);
    EXPECT_EQ(a.checksum(), b.checksum());
    EXPECT_NE(a.checksum(), c.checksum());
    EXPECT_EQ(a.x.data(), b.x.data());
    EXPECT_EQ(a.mode, metric_mode::discrete);
}

TEST(Grid, RandomizedOffsetsWrapPeriodically)
{
    double h = 1.0 / 16.0;
    auto g = build_grid(mappings::randomized(16, 16, h, h, 0.1, 3), 16, 16, unit_box(true));
    for (int j = 0; j < 16; ++j) {
        EXPECT_NEAR(g.x(-1, j), g.x(15, j) - 1.0, 1e-15);
        EXPECT_NEAR(g.y(-1, j), g.y(15, j), 1e-15);
        EXPECT_LE(std::abs(g.x(3, j) - 3 * h), 0.1 * h + 1e-15);
    }
}

TEST(Grid, ClusteredSpacingRatio)
{
    auto g = build_grid(mappings::clustered_1d(), 201, 1, {-1.0, 1.0, 0.0, 1.0, false, true});
    double inner = g.x(101, 0) - g.x(100, 0);
    double outer = g.x(3, 0) - g.x(2, 0);
    EXPECT_NEAR(inner / g.dxi, 5.0 / 9.0, 1e-12);
    EXPECT_NEAR(outer / g.dxi, 10.0 / 9.0, 1e-12);
    EXPECT_TRUE(g.one_dimensional());
}

TEST(Grid, InterfaceNormal)
{
    auto id = interface_normal({1.0, 0.0});
    EXPECT_DOUBLE_EQ(id.normal.n[0], 1.0);
    EXPECT_DOUBLE_EQ(id.scale, 1.0);
    auto r = build_grid(mappings::rotation(pi / 4.0), 12, 12, unit_box(false));
    auto g45 = interface_normal(r.half_xi(3, 3));
    EXPECT_NEAR(g45.normal.n[0], 1.0 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(g45.normal.n[1], 1.0 / std::sqrt(2.0), 1e-12);
    EXPECT_THROW(interface_normal({0.0, 0.0}), std::invalid_argument);
    auto s = build_grid(mappings::sector(), 16, 16, unit_box(false));
    auto h = s.half_xi(5, 7);
    auto in = interface_normal(h);
    EXPECT_NEAR(in.scale * in.normal.n[0], h[0], 1e-14);
    EXPECT_NEAR(in.scale * in.normal.n[1], h[1], 1e-14);
}

TEST(Grid, TransformFlux)
{
    state8 f{1, 2, 3, 4, 5, 6, 7, 8}, g{-1, 0.5, 2, 0, 1, -3, 4, 2};
    EXPECT_EQ(transform_flux(f, g, {1.0, 0.0}), f);
    EXPECT_EQ(transform_flux(f, g, {0.5, 0.0}), 0.5 * f);
    auto s = build_grid(mappings::sector(), 16, 16, unit_box(false));
    auto m = s.half_xi(4, 9);
    // ξ-row (∂xξ, ∂yξ)/J equals (∂ηy, −∂ηx) at nodes; the half value interpolates it
    auto direct = transform_flux(f, g, m);
    for (int k = 0; k < 8; ++k) EXPECT_NEAR(direct[k], m[0] * f[k] + m[1] * g[k], 1e-14);
    auto node = s.m_xi(4, 9);
    auto mapd = mappings::sector().jacobian(s.xi_at(4), s.eta_at(9));
    EXPECT_NEAR(node[0], mapd[3], 1e-6);
    EXPECT_NEAR(node[1], -mapd[1], 1e-6);
}
