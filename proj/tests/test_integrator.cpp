#include "afmhd/integrator.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace afmhd;
using namespace afmhd::integrator;

namespace {

constexpr double two_pi = 6.283185307179586;

auto periodic_spec(double a_period_eta = 0.0) -> boundary::spec
{
    boundary::spec s;
    for (auto& e : s.edges) e = boundary::edge_spec::periodic();
    s.a_period_eta = a_period_eta;
    return s;
}

/** A of smooth_periodic gains 0.2·2π per period in y. */
auto smooth_spec() -> boundary::spec { return periodic_spec(0.2 * two_pi); }

/** Smooth periodic MHD state on [0, 2π]² with B = curl A, A = 0.3 sin x cos y + 0.2 y. */
auto smooth_periodic(curvilinear_grid const& g) -> field_state
{
    field_state s(g.nx, g.ny);
    for_each_interior(g.nx, g.ny, [&](int i, int j) {
        double x = g.x(i, j), y = g.y(i, j);
        double bx = -0.3 * std::sin(x) * std::sin(y) + 0.2, by = -0.3 * std::cos(x) * std::cos(y);
        s.q(i, j) = primitive_to_conserved(
            {1.0 + 0.2 * std::sin(x + y), 0.5 * std::cos(y), 0.3 * std::sin(x), 0.1, 1.0 + 0.1 * std::cos(x), bx, by, 0.2});
        s.a(i, j) = 0.3 * std::sin(x) * std::cos(y) + 0.2 * y;
    });
    return s;
}

auto periodic_grid(int n, mapping const& m = mappings::identity()) -> curvilinear_grid
{
    return build_grid(m, n, n, {0, two_pi, 0, two_pi, true, true});
}

/** Independent fast speed from the textbook closed form. */
auto fast_speed_oracle(primitive const& w, double nx, double ny, double gamma) -> double
{
    double len = std::hypot(nx, ny);
    double a2 = gamma * w[4] / w[0];
    double b2 = (w[5] * w[5] + w[6] * w[6] + w[7] * w[7]) / w[0];
    double bn2 = std::pow((w[5] * nx + w[6] * ny) / len, 2) / w[0];
    double cf2 = 0.5 * (a2 + b2 + std::sqrt((a2 + b2) * (a2 + b2) - 4.0 * a2 * bn2));
    return std::abs(w[1] * nx + w[2] * ny) + len * std::sqrt(cf2);
}

} // namespace

TEST(Integrator, StaticGasTimeStep)
{
    auto g = build_grid(mappings::identity(), 32, 32, {0, 1, 0, 1, true, true});
    auto s = make_uniform_field(g, {1.4, 0, 0, 0, 2.0, 0, 0, 0});
    double a = std::sqrt(default_gamma * 2.0 / 1.4);
    EXPECT_NEAR(compute_dt(s, g, 0.5), 0.5 * (1.0 / 32) / (2.0 * a), 1e-15);
}

TEST(Integrator, DoublingResolutionHalvesTimeStep)
{
    auto g1 = build_grid(mappings::identity(), 32, 32, {0, 1, 0, 1, true, true});
    auto g2 = build_grid(mappings::identity(), 64, 64, {0, 1, 0, 1, true, true});
    primitive w{1.0, 0.3, -0.2, 0, 1.0, 0.5, 0.1, 0.2};
    double d1 = compute_dt(make_uniform_field(g1, w), g1, 0.4);
    double d2 = compute_dt(make_uniform_field(g2, w), g2, 0.4);
    EXPECT_NEAR(d2, 0.5 * d1, 1e-15);
}

TEST(Integrator, TimeStepMatchesIndependentFormulaOnCurvedMesh)
{
    auto g = periodic_grid(64, mappings::perturbed_sine(0.03, 2.0, 0.05, 4.0));
    auto s = smooth_periodic(g);
    double m = 0.0;
    for_each_interior(64, 64, [&](int i, int j) {
        auto w = to_primitive(s.q(i, j), default_gamma);
        m = std::max(m, fast_speed_oracle(w, g.grad_xi(i, j)[0], g.grad_xi(i, j)[1], default_gamma) / g.dxi +
                            fast_speed_oracle(w, g.grad_eta(i, j)[0], g.grad_eta(i, j)[1], default_gamma) / g.deta);
    });
    double dt = compute_dt(s, g, 0.6);
    EXPECT_NEAR(dt, 0.6 / m, 1e-14 * dt);
}

TEST(Integrator, NonFiniteStateRejectedByTimeStep)
{
    auto g = build_grid(mappings::identity(), 16, 16, {0, 1, 0, 1, true, true});
    auto s = make_uniform_field(g, {1, 0, 0, 0, 1, 0, 0, 0});
    s.q(3, 5)[4] = std::nan("");
    try {
        compute_dt(s, g, 0.5);
        FAIL();
    } catch (nan_error const& e) {
        EXPECT_EQ(e.i, 3);
        EXPECT_EQ(e.j, 5);
    }
}

TEST(Integrator, ScalarRk3IsThirdOrder)
{
    // one step of q' = λq against exp(λ dt); local error λ⁴dt⁴/24
    double lam = -1.3;
    auto step = [&](double dt) {
        double y = 1.0;
        ssp_rk3(y, [&](double& v) { return v + dt * lam * v; },
                [](double b, double& w, double c) { w = b + c * (w - b); }, [](double&, int) {});
        return y;
    };
    double e1 = std::abs(step(1e-2) - std::exp(lam * 1e-2));
    double e2 = std::abs(step(5e-3) - std::exp(lam * 5e-3));
    double z = lam * 1e-2;
    EXPECT_NEAR(e1, std::pow(z, 4) / 24.0, 0.05 * std::pow(z, 4) / 24.0);
    EXPECT_NEAR(std::log2(e1 / e2), 4.0, 0.1);
}

TEST(Integrator, FreeStreamUnchangedBitExactly)
{
    auto g = build_grid(mappings::identity(), 16, 16, {0, 1, 0, 1, true, true});
    auto s = make_uniform_field(g, {1.0, 0.4, -0.3, 0.1, 0.8, 0, 0, 0.3});
    auto before = s;
    step_config cfg;
    for (int k = 0; k < 5; ++k) rk3_step(s, g, periodic_spec(), cfg, compute_dt(s, g, cfg.cfl));
    for_each_interior(16, 16, [&](int i, int j) {
        EXPECT_EQ(s.q(i, j), before.q(i, j));
        EXPECT_EQ(s.a(i, j), before.a(i, j));
    });
}

TEST(Integrator, ConservesMassOnPeriodicCurvedMesh)
{
    auto g = periodic_grid(32, mappings::perturbed_sine(0.03, 2.0, 0.05, 4.0));
    auto s = smooth_periodic(g);
    auto m0 = total_conserved(s, g);
    step_config cfg;
    cfg.t_final = 0.2;
    auto sum = integrate(s, g, smooth_spec(), cfg);
    auto m1 = total_conserved(s, g);
    EXPECT_GT(sum.steps, 5);
    EXPECT_LT(std::abs(m1[0] - m0[0]) / m0[0], 1e-11);
    EXPECT_LT(std::abs(m1[4] - m0[4]) / m0[4], 1e-11);
}

TEST(Integrator, LastStepLandsOnFinalTime)
{
    auto g = periodic_grid(16);
    auto s = smooth_periodic(g);
    step_config cfg;
    cfg.t_final = 0.123;
    std::vector<double> dts;
    observer obs;
    obs.on_step = [&](field_state const&, step_report const& r) { dts.push_back(r.dt); };
    integrate(s, g, smooth_spec(), cfg, obs);
    EXPECT_EQ(s.time, 0.123);
    ASSERT_GE(dts.size(), 2u);
    EXPECT_LE(dts.back(), dts[dts.size() - 2]);
}

TEST(Integrator, RunsAreDeterministic)
{
    auto g = periodic_grid(16, mappings::perturbed_sine(0.03, 2.0, 0.05, 4.0));
    step_config cfg;
    cfg.t_final = 0.1;
    auto a = smooth_periodic(g), b = smooth_periodic(g);
    integrate(a, g, smooth_spec(), cfg);
    integrate(b, g, smooth_spec(), cfg);
    EXPECT_EQ(a.q.data(), b.q.data());
    EXPECT_EQ(a.a.data(), b.a.data());
}

TEST(Integrator, ConstrainedTransportKeepsCartesianDivergenceAtRoundoff)
{
    auto g = periodic_grid(32);
    auto s = smooth_periodic(g);
    step_config cfg;
    cfg.t_final = 0.3;
    double worst = 0.0;
    observer obs;
    obs.log_every = 1;
    obs.on_log = [&](step_log const& l) { worst = std::max(worst, l.max_div_b); };
    integrate(s, g, smooth_spec(), cfg, obs);
    EXPECT_LT(worst, 1e-12);
}

TEST(Integrator, PotentialAdvectionBoundedOverOnePeriod)
{
    // a weak field loop carried once across a periodic box: A must not grow
    int nx = 64, ny = 32;
    auto g = build_grid(mappings::identity(), nx, ny, {-1, 1, -0.5, 0.5, true, true});
    field_state s(nx, ny);
    double u = 2.0, v = 1.0;
    for_each_interior(nx, ny, [&](int i, int j) {
        double x = g.x(i, j), y = g.y(i, j), r = std::hypot(x, y);
        s.a(i, j) = r < 0.3 ? 1e-3 * (0.3 - r) : 0.0;
        s.q(i, j) = primitive_to_conserved({1.0, u, v, 0, 1.0, 0, 0, 0});
    });
    auto fill = periodic_spec();
    boundary::fill(s, g, fill);
    ct::correct(s, g);
    double a0 = 0.0;
    for (double a : s.a.data()) a0 = std::max(a0, a);
    step_config cfg;
    cfg.t_final = 1.0; // (2, 1) crosses the 2 × 1 box once
    double amax = 0.0;
    observer obs;
    obs.on_step = [&](field_state const& f, step_report const&) {
        for_each_interior(nx, ny, [&](int i, int j) { amax = std::max(amax, std::abs(f.a(i, j))); });
    };
    integrate(s, g, fill, cfg, obs);
    EXPECT_LE(amax, a0 * (1.0 + 1e-3));
}

TEST(Integrator, InvalidConfigRejected)
{
    step_config cfg;
    cfg.cfl = 1.2;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg.cfl = 0.5;
    cfg.t_final = -1.0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Integrator, PositivityLimiterKeepsStagesAdmissible)
{
    auto g = build_grid(mappings::identity(), 64, 1, {0, 1, 0, 1, true, true});
    field_state s(64, 1);
    for_each_interior(64, 1, [&](int i, int j) {
        double x = g.x(i, j);
        bool hole = std::abs(x - 0.5) < 0.1;
        s.q(i, j) = primitive_to_conserved({hole ? 1e-7 : 1.0, x < 0.5 ? -3.0 : 3.0, 0, 0, hole ? 1e-9 : 1.0, 0, 0, 0});
    });
    step_config cfg;
    cfg.t_final = 0.02;
    auto sum = integrate(s, g, periodic_spec(), cfg);
    EXPECT_FALSE(sum.inadmissible);
    EXPECT_GT(sum.min_p, 0.0);
    EXPECT_GT(sum.limited, 0);
}
