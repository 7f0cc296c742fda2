#include "afmhd/physics.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <complex>
#include <random>

using namespace afmhd;

namespace {

auto brio_wu_left() -> primitive { return {1.0, 0.0, 0.0, 0.0, 1.0, 0.75, 1.0, 0.0}; }

} // namespace

TEST(Physics, StaticGasEnergy)
{
    auto q = primitive_to_conserved({1.0, 0, 0, 0, 1.0, 0, 0, 0}, 5.0 / 3.0);
    EXPECT_DOUBLE_EQ(q[cons::energy], 1.5);
}

TEST(Physics, BrioWuLeftEnergy)
{
    // p/(γ−1) + |B|²/2 = 1.5 + (0.5625 + 1)/2
    auto q = primitive_to_conserved(brio_wu_left(), 5.0 / 3.0);
    EXPECT_NEAR(q[cons::energy], 2.28125, 1e-15);
}

TEST(Physics, ConversionRoundTrip)
{
    std::mt19937_64 rng(7);
    for (int k = 0; k < 200; ++k) {
        auto w = oracle::random_primitive(rng);
        auto back = conserved_to_primitive(primitive_to_conserved(w));
        for (int i = 0; i < 8; ++i) EXPECT_NEAR(back[i], w[i], 1e-12 * (1.0 + std::abs(w[i])));
    }
}

TEST(Physics, OrszagTangRoundTrip)
{
    double g = 5.0 / 3.0;
    primitive w{g * g, -0.3, 0.7, 0.0, g, -0.3, 0.4, 0.0};
    auto q = primitive_to_conserved(w, g);
    EXPECT_NEAR(pressure(q, g), g, 1e-14);
    auto back = conserved_to_primitive(q, g);
    for (int i = 0; i < 8; ++i) EXPECT_NEAR(back[i], w[i], 1e-14);
}

TEST(Physics, ConversionErrors)
{
    EXPECT_THROW(primitive_to_conserved({0.0, 0, 0, 0, 1, 0, 0, 0}), admissibility_error);
    EXPECT_THROW(primitive_to_conserved({1.0, 0, 0, 0, -1, 0, 0, 0}), admissibility_error);
    EXPECT_THROW(conserved_to_primitive({-1.0, 0, 0, 0, 1, 0, 0, 0}), admissibility_error);
    // energy below kinetic + magnetic: pressure negative, flagged but not fatal
    conserved q{1.0, 1.0, 0, 0, 0.4, 0, 0, 0};
    auto w = conserved_to_primitive(q);
    EXPECT_LT(w[prim::pre], 0.0);
    EXPECT_FALSE(is_admissible(w));
}

TEST(Physics, StaticGasFlux)
{
    auto n = unit_normal::from(0.6, 0.8);
    auto f = physical_flux(primitive_to_conserved({1.3, 0, 0, 0, 0.7, 0, 0, 0}), n);
    EXPECT_DOUBLE_EQ(f[0], 0.0);
    EXPECT_NEAR(f[1], 0.7 * 0.6, 1e-15);
    EXPECT_NEAR(f[2], 0.7 * 0.8, 1e-15);
    for (int k : {3, 4, 5, 6, 7}) EXPECT_DOUBLE_EQ(f[k], 0.0);
}

TEST(Physics, InductionFluxVanishesForParallelFields)
{
    auto n = unit_normal::from(0.3, -0.9);
    primitive w{1.0, 0.2, -0.4, 0.6, 1.0, 0.5, -1.0, 1.5};
    auto f = physical_flux(primitive_to_conserved(w), n);
    for (int k = 5; k < 8; ++k) EXPECT_NEAR(f[k], 0.0, 1e-15);
}

TEST(Physics, BrioWuLeftFlux)
{
    auto f = physical_flux(primitive_to_conserved(brio_wu_left()), unit_normal{});
    EXPECT_DOUBLE_EQ(f[0], 0.0);
    EXPECT_NEAR(f[1], 1.21875, 1e-15);
}

TEST(Physics, HydrodynamicSpeeds)
{
    auto c = wave_speeds({1.0, 0, 0, 0, 1.0, 0, 0, 0}, unit_normal{}, 5.0 / 3.0);
    EXPECT_NEAR(c.a, std::sqrt(5.0 / 3.0), 1e-15);
    EXPECT_NEAR(c.c_f, std::sqrt(5.0 / 3.0), 1e-15);
    EXPECT_DOUBLE_EQ(c.c_s, 0.0);
    EXPECT_DOUBLE_EQ(c.c_a, 0.0);
}

TEST(Physics, AlfvenBackgroundSpeed)
{
    primitive w{1.0, 0, 0.1, 0.1, 0.1, 1.0, 0.0, 0.1};
    auto c = wave_speeds(w, unit_normal{});
    EXPECT_NEAR(c.c_a, 1.0, 1e-15);
    EXPECT_GE(max_signal_speed(w, {1.0, 0.0, 0.0}), 1.0);
    // c_f from the defining quadratic
    double a2 = 5.0 / 3.0 * 0.1, b2 = 1.0 + 0.01;
    double cf = std::sqrt(0.5 * (a2 + b2 + std::sqrt((a2 + b2) * (a2 + b2) - 4 * a2 * 1.0)));
    EXPECT_NEAR(c.c_f, cf, 1e-14);
}

TEST(Physics, MaxSignalSpeed)
{
    primitive w{1.0, 0, 0, 0, 1.0, 0, 0, 0};
    EXPECT_NEAR(max_signal_speed(w, {0.0, 2.0, 0.0}), 2.0 * std::sqrt(5.0 / 3.0), 1e-15);
    primitive v{1.1, 0.3, -0.2, 0.1, 0.8, 0.4, 0.9, -0.3};
    vec3 m{0.3, 0.7, 0.0};
    EXPECT_NEAR(max_signal_speed(v, 2.0 * m), 2.0 * max_signal_speed(v, m), 1e-14);
}

TEST(Physics, SpeedRootIdentitiesAndOrdering)
{
    std::mt19937_64 rng(11);
    for (int k = 0; k < 500; ++k) {
        auto w = oracle::random_primitive(rng);
        auto n = oracle::random_normal(rng);
        auto c = wave_speeds(w, n);
        double b2 = dot(magnetic(w), magnetic(w));
        EXPECT_NEAR(c.c_f * c.c_f + c.c_s * c.c_s, c.a * c.a + b2 / w[0], 1e-12 * (c.a * c.a + b2 / w[0]));
        EXPECT_NEAR(c.c_f * c.c_s, c.a * c.c_a, 1e-12 * c.c_f * c.c_f);
        EXPECT_LE(c.c_s, c.c_a * (1 + 1e-14));
        EXPECT_LE(c.c_a, c.c_f * (1 + 1e-14));
        EXPECT_GE(c.c_f, c.a * (1 - 1e-14));
        auto lam = eigenvalues(w, n);
        for (int i = 0; i < 7; ++i) EXPECT_LE(lam[i], lam[i + 1]);
        EXPECT_GE(max_signal_speed(w, n.n), std::max(std::abs(lam[0]), std::abs(lam[7])) - 1e-14);
    }
}

TEST(Physics, RotationInvariance)
{
    std::mt19937_64 rng(5);
    for (int k = 0; k < 100; ++k) {
        auto w = oracle::random_primitive(rng);
        double th = std::uniform_real_distribution<>(0, 6.283185307179586)(rng);
        auto n = unit_normal::from(0.8, -0.6);
        auto rot = [&](double x, double y) { return std::pair{std::cos(th) * x - std::sin(th) * y, std::sin(th) * x + std::cos(th) * y}; };
        auto wr = w;
        std::tie(wr[1], wr[2]) = rot(w[1], w[2]);
        std::tie(wr[5], wr[6]) = rot(w[5], w[6]);
        auto [nx, ny] = rot(n.n[0], n.n[1]);
        auto c0 = wave_speeds(w, n);
        auto c1 = wave_speeds(wr, unit_normal::from(nx, ny));
        EXPECT_NEAR(c0.c_f, c1.c_f, 1e-13);
        EXPECT_NEAR(c0.c_s, c1.c_s, 1e-13);
        EXPECT_NEAR(c0.c_a, c1.c_a, 1e-13);
    }
}

// ----------------------------------------------------------------------------
// Eigen-system: complex-step Jacobian of the flux is the oracle
// ----------------------------------------------------------------------------

namespace {

void check_diagonalization(primitive const& w, unit_normal const& n, double tol)
{
    double g = default_gamma;
    auto em = eigen_system(w, n, g);
    auto q = to_conserved(w, g);
    auto jac = oracle::flux_jacobian(q, n.n, g);

    // Eight-wave Jacobian: conservative Jacobian plus the source column on B·n.
    vec3 u = velocity(w), b = magnetic(w);
    double s[8] = {0.0, b[0], b[1], b[2], dot(u, b), u[0], u[1], u[2]};
    auto powell = jac;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 3; ++j) powell[i][5 + j] += s[i] * n.n[j];

    auto lam = eigenvalues(w, n, g);
    double scale = std::max(std::abs(lam[0]), std::abs(lam[7]));
    auto id = matmul(em.l, em.r);
    auto d8 = matmul(em.l, matmul(powell, em.r));
    auto dc = matmul(em.l, matmul(jac, em.r));
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
            EXPECT_NEAR(id[i][j], i == j ? 1.0 : 0.0, 1e-12) << i << "," << j;
            EXPECT_NEAR(d8[i][j], i == j ? lam[i] : 0.0, tol * scale) << i << "," << j;
            if (j != 4) {
                EXPECT_NEAR(dc[i][j], i == j ? lam[i] : 0.0, tol * scale) << i << "," << j;
            }
        }
    }
}

} // namespace

TEST(Physics, EigenHydrodynamicState)
{
    check_diagonalization({1.2, 0.3, -0.1, 0.0, 0.9, 0, 0, 0}, unit_normal::from(0.6, 0.8), 1e-10);
}

TEST(Physics, EigenRandomStates)
{
    std::mt19937_64 rng(3);
    for (int k = 0; k < 100; ++k) check_diagonalization(oracle::random_primitive(rng), oracle::random_normal(rng), 1e-10);
}

TEST(Physics, EigenDegenerateConfigurations)
{
    auto n = unit_normal::from(1.0, 2.0);
    // B parallel to n with c_a close to a (near the triple umbilic point)
    double a2 = 5.0 / 3.0;
    for (double eps : {0.0, 1e-10, 1e-6, 1e-3}) {
        double bn = std::sqrt(a2) * (1.0 + eps);
        primitive w{1.0, 0.1, 0.2, 0.0, 1.0, bn * n.n[0], bn * n.n[1], 0.0};
        auto em = eigen_system(w, n);
        double cond = oracle::max_abs(em.r) * oracle::max_abs(em.l);
        EXPECT_TRUE(std::isfinite(cond));
        EXPECT_LT(cond, 1e3);
        check_diagonalization(w, n, 1e-9);
    }
    // B·n = 0
    check_diagonalization({1.0, 0.1, 0.2, 0.3, 1.0, -0.8 * n.n[1], 0.8 * n.n[0], 0.4}, n, 1e-10);
    // B = 0 along a slanted normal
    check_diagonalization({0.5, -0.3, 0.2, 0.3, 2.0, 0, 0, 0}, n, 1e-10);
}

// ----------------------------------------------------------------------------
// Discontinuities
// ----------------------------------------------------------------------------

TEST(Physics, ContactDiscontinuity)
{
    auto n = unit_normal::from(0.6, 0.8);
    primitive base{1.0, 0.2, -0.1, 0.3, 1.0, 0.7, 0.4, -0.2};
    auto d = make_discontinuity(discontinuity_kind::contact, base, n, {.density_ratio = 10.0});
    EXPECT_DOUBLE_EQ(d.right[0] / d.left[0], 10.0);
    EXPECT_LT(rh_residual(d.left, d.right, n, d.speed), 1e-12);
    EXPECT_DOUBLE_EQ(d.speed, dot(velocity(base), n.n));
}

TEST(Physics, RotationalDiscontinuity)
{
    auto n = unit_normal::from(0.6, 0.8);
    primitive base{1.3, 0.2, -0.1, 0.3, 1.0, 0.7, 0.4, -0.2};
    for (int fam : {-1, 1}) {
        auto d = make_discontinuity(discontinuity_kind::rotational, base, n, {.family = fam});
        EXPECT_LT(rh_residual(d.left, d.right, n, d.speed), 1e-12);
        EXPECT_DOUBLE_EQ(d.left[0], d.right[0]);
        EXPECT_NEAR(dot(velocity(d.left), n.n), dot(velocity(d.right), n.n), 1e-15);
        double ca = wave_speeds(base, n).c_a;
        EXPECT_NEAR(d.speed, dot(velocity(base), n.n) + fam * ca, 1e-15);
        // B_t turned by 90 degrees
        vec3 bl = magnetic(d.left), br = magnetic(d.right);
        EXPECT_NEAR(dot(bl, n.t1) * dot(br, n.t1) + dot(bl, n.t2) * dot(br, n.t2), 0.0, 1e-14);
    }
    // the documented sign convention: t·(u_R − u_L) = t·(B_R − B_L)/sqrt(rho) for family +1, B·n < 0
    primitive neg{1.3, 0.2, -0.1, 0.3, 1.0, -0.7, 0.4, -0.2};
    auto d = make_discontinuity(discontinuity_kind::rotational, neg, unit_normal{}, {.family = 1});
    for (int k = 2; k < 4; ++k)
        EXPECT_NEAR(d.right[k] - d.left[k], (d.right[k + 4] - d.left[k + 4]) / std::sqrt(1.3), 1e-14);
}

TEST(Physics, TangentialDiscontinuity)
{
    auto n = unit_normal::from(0.6, 0.8);
    primitive base{1.0, 0.6 * 0.1, 0.8 * 0.1, 0.2, 2.0, -0.8 * 0.5, 0.6 * 0.5, 0.3};
    discontinuity_params prm;
    prm.velocity_jump = {0.4, -0.7, 0.2};
    prm.field_jump = {0.3, 0.5, -0.4};
    prm.density_ratio = 0.25;
    auto d = make_discontinuity(discontinuity_kind::tangential, base, n, prm);
    EXPECT_NEAR(total_pressure(d.left), total_pressure(d.right), 1e-14);
    EXPECT_LT(rh_residual(d.left, d.right, n, d.speed), 1e-12);
}

TEST(Physics, DiscontinuityPreconditions)
{
    primitive bt{1.0, 0, 0, 0, 1.0, 0.0, 1.0, 0.0};
    primitive bn{1.0, 0, 0, 0, 1.0, 1.0, 0.0, 0.0};
    EXPECT_THROW(make_discontinuity(discontinuity_kind::contact, bt, unit_normal{}), std::invalid_argument);
    EXPECT_THROW(make_discontinuity(discontinuity_kind::rotational, bt, unit_normal{}), std::invalid_argument);
    EXPECT_THROW(make_discontinuity(discontinuity_kind::tangential, bn, unit_normal{}), std::invalid_argument);
}
