#pragma once

#include "afmhd/boundary.hpp"
#include "afmhd/ct.hpp"
#include "afmhd/field.hpp"
#include "afmhd/grid.hpp"
#include "afmhd/physics.hpp"
#include "afmhd/riemann.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace afmhd::problems {

// ============================================================================
// Problem definitions
// ============================================================================

struct run_defaults
{
    int nx = 64, ny = 64;
    double t_final = 1.0;
    double cfl = 0.5;
    riemann::solver solver = riemann::solver::hlld;
    bool ct_on = true;
    bool pp_on = true;
    bool sigma_on = true;
};

/** Closed-form solution for problems that have one. */
struct exact_solution
{
    std::function<primitive(double t, double x, double y)> w;
    std::function<double(double t, double x, double y)> a;
};

struct problem_def
{
    std::string name;
    std::string family; // variants of one benchmark share a family
    std::string summary;
    domain_box box;
    /** Mapping for an nx × ny grid; only the randomized meshes use the sizes and seed. */
    std::function<mapping(int nx, int ny, std::uint64_t seed)> make_mapping;
    std::function<primitive(double x, double y)> initial;
    std::function<double(double x, double y)> potential;
    /** B1, B2 of `initial` are ignored and replaced by the discrete curl of A. */
    bool b_from_potential = false;
    /** Edge conditions; periodic A offsets are filled in at setup. */
    std::array<boundary::edge_spec, 4> edges{};
    run_defaults defaults;
    std::optional<exact_solution> exact;
};

namespace detail {

constexpr double pi = M_PI;

inline auto fixed(mapping m) -> std::function<mapping(int, int, std::uint64_t)>
{
    return [m](int, int, std::uint64_t) { return m; };
}

inline auto all_periodic() -> std::array<boundary::edge_spec, 4>
{
    auto p = boundary::edge_spec::periodic();
    return {p, p, p, p};
}

inline auto all_outflow() -> std::array<boundary::edge_spec, 4>
{
    auto o = boundary::edge_spec::outflow(boundary::potential_fill::linear);
    return {o, o, o, o};
}

// ---------------------------------------------------------------------------
// Smooth Alfvén wave: circularly polarized, moving in −x at unit speed.
// ---------------------------------------------------------------------------

inline auto alfven_w(double t, double x, double) -> primitive
{
    double s = std::sin(2.0 * pi * (x + t)), c = std::cos(2.0 * pi * (x + t));
    return {1.0, 0.0, 0.1 * s, 0.1 * c, 0.1, 1.0, 0.1 * s, 0.1 * c};
}

inline auto alfven_a(double t, double x, double y) -> double
{
    return y + 0.1 * std::cos(2.0 * pi * (x + t)) / (2.0 * pi);
}

inline auto alfven() -> problem_def
{
    problem_def p;
    p.name = "alfven";
    p.family = "alfven";
    p.summary = "smooth Alfven wave on a sine-perturbed periodic mesh; exact solution known";
    p.box = {0.0, 1.0, 0.0, 1.0, true, true};
    p.make_mapping = fixed(mappings::perturbed_sine(0.01, 2.0 * pi * 2.0, 0.02, 2.0 * pi * 4.0));
    p.initial = [](double x, double y) { return alfven_w(0.0, x, y); };
    p.potential = [](double x, double y) { return alfven_a(0.0, x, y); };
    p.edges = all_periodic();
    p.defaults = {64, 64, 1.0, 0.6, riemann::solver::lf, true, true, true};
    p.exact = exact_solution{alfven_w, alfven_a};
    return p;
}

// ---------------------------------------------------------------------------
// Brio-Wu shock tube
// ---------------------------------------------------------------------------

inline constexpr primitive brio_wu_left{1.0, 0.0, 0.0, 0.0, 1.0, 0.75, 1.0, 0.0};
inline constexpr primitive brio_wu_right{0.125, 0.0, 0.0, 0.0, 0.1, 0.75, -1.0, 0.0};

inline auto brio_wu_1d(std::string name, mapping m, std::string summary) -> problem_def
{
    problem_def p;
    p.name = std::move(name);
    p.family = "brio-wu";
    p.summary = std::move(summary);
    p.box = {-1.0, 1.0, 0.0, 1.0, false, false};
    p.make_mapping = fixed(std::move(m));
    p.initial = [](double x, double) { return x < 0.0 ? brio_wu_left : brio_wu_right; };
    p.potential = [](double x, double) { return std::abs(x); }; // B2 = −∂xA = ∓1
    p.edges = all_outflow();
    p.defaults = {200, 1, 0.2, 0.5, riemann::solver::hlld, false, true, true};
    return p;
}

/** Normal of the rotated tube: tan α = 1/2. */
inline auto rotated_normal() -> std::array<double, 2>
{
    double a = std::atan(0.5);
    return {std::cos(a), std::sin(a)};
}

inline auto rotate_state(primitive w) -> primitive
{
    auto [c, s] = rotated_normal();
    auto turn = [&](int k) {
        double a = w[k], b = w[k + 1];
        w[k] = c * a - s * b;
        w[k + 1] = s * a + c * b;
    };
    turn(1);
    turn(5);
    return w;
}

inline auto brio_wu_rotated() -> problem_def
{
    problem_def p;
    p.name = "brio-wu-rotated";
    p.family = "brio-wu";
    p.summary = "Brio-Wu tube rotated by atan(1/2) on a 200 x 100 Cartesian grid";
    p.box = {-1.0, 1.0, -0.5, 0.5, false, false};
    p.make_mapping = fixed(mappings::identity());
    p.initial = [](double x, double y) {
        auto [c, s] = rotated_normal();
        return rotate_state(c * x + s * y < 0.0 ? brio_wu_left : brio_wu_right);
    };
    // |σ| + 0.75 τ with σ along the normal and τ along the tube's tangent
    p.potential = [](double x, double y) {
        auto [c, s] = rotated_normal();
        return std::abs(c * x + s * y) + 0.75 * (-s * x + c * y);
    };
    p.edges[boundary::xi_lo] = boundary::edge_spec::inflow(rotate_state(brio_wu_left));
    p.edges[boundary::xi_hi] = boundary::edge_spec::outflow(boundary::potential_fill::linear);
    // index direction (∓1, 2) is the tangent (−sin α, cos α) up to Δξ/Δη
    p.edges[boundary::eta_lo] = boundary::edge_spec::tangential(-1, 2);
    p.edges[boundary::eta_hi] = boundary::edge_spec::tangential(1, 2);
    p.defaults = {200, 100, 0.2, 0.5, riemann::solver::hlld, true, true, true};
    return p;
}

// ---------------------------------------------------------------------------
// Field loop
// ---------------------------------------------------------------------------

inline auto field_loop(bool randomized) -> problem_def
{
    problem_def p;
    p.name = randomized ? "field-loop-random" : "field-loop";
    p.family = "field-loop";
    p.summary = randomized ? "weak field loop advected on a seeded randomized mesh"
                           : "weak field loop advected on a sine-perturbed periodic mesh";
    p.box = {-1.0, 1.0, -0.5, 0.5, true, true};
    if (randomized) {
        p.make_mapping = [](int nx, int ny, std::uint64_t seed) {
            return mappings::randomized(nx, ny, 2.0 / nx, 1.0 / ny, 0.1, seed);
        };
    } else {
        p.make_mapping = fixed(mappings::perturbed_sine(-0.03, 2.0 * pi, -0.05, 2.0 * pi));
    }
    p.initial = [](double, double) {
        double th = std::atan(0.5);
        return primitive{1.0, std::sqrt(5.0) * std::cos(th), std::sqrt(5.0) * std::sin(th), 0.0, 1.0, 0.0, 0.0, 0.0};
    };
    p.potential = [](double x, double y) {
        double r = std::hypot(x, y);
        return r <= 0.3 ? 1e-3 * (0.3 - r) : 0.0;
    };
    p.b_from_potential = true;
    p.edges = all_periodic();
    p.defaults = {200, 100, 2.0, 0.5, riemann::solver::hlld, true, true, true};
    return p;
}

// ---------------------------------------------------------------------------
// Orszag-Tang vortex
// ---------------------------------------------------------------------------

inline auto orszag_tang() -> problem_def
{
    problem_def p;
    p.name = "orszag-tang";
    p.family = "orszag-tang";
    p.summary = "Orszag-Tang vortex on a sine-perturbed periodic mesh";
    p.box = {0.0, 2.0 * pi, 0.0, 2.0 * pi, true, true};
    p.make_mapping = fixed(mappings::perturbed_sine(0.03, 2.0, 0.05, 4.0));
    p.initial = [](double x, double y) {
        double g = default_gamma;
        return primitive{g * g, -std::sin(y), std::sin(x), 0.0, g, -std::sin(y), std::sin(2.0 * x), 0.0};
    };
    p.potential = [](double x, double y) { return 0.5 * std::cos(2.0 * x) + std::cos(y); };
    p.edges = all_periodic();
    p.defaults = {192, 192, 3.0, 0.5, riemann::solver::hlld, true, true, true};
    return p;
}

// ---------------------------------------------------------------------------
// Cloud-shock interaction
// ---------------------------------------------------------------------------

inline constexpr primitive cloud_shock_post{3.86859, 11.2536, 0.0, 0.0, 167.345, 0.0, 2.1826182, -2.1826182};

inline auto cloud_shock(bool sector) -> problem_def
{
    problem_def p;
    p.name = sector ? "cloud-shock-sector" : "cloud-shock";
    p.family = "cloud-shock";
    p.summary = sector ? "shock hitting a dense cloud in a circular sector" : "shock hitting a dense cloud on the unit square";
    p.box = {0.0, 1.0, 0.0, 1.0, false, false};
    p.make_mapping = fixed(sector ? mappings::sector() : mappings::identity());
    p.initial = [](double x, double y) {
        if (x < 0.05) return cloud_shock_post;
        double r = std::hypot(x - 0.25, y - 0.5);
        return primitive{r < 0.15 ? 10.0 : 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.56418958, 0.56418958};
    };
    p.potential = [](double x, double) { return x <= 0.05 ? -2.1826182 * x + 0.080921431 : -0.56418958 * x; };
    p.edges = all_outflow();
    p.edges[boundary::xi_lo] = boundary::edge_spec::inflow(cloud_shock_post);
    p.defaults = {256, 256, 0.06, 0.5, riemann::solver::hlld, true, true, true};
    return p;
}

// ---------------------------------------------------------------------------
// Rotor and blast on the rotor mesh, centred at the origin
// ---------------------------------------------------------------------------

inline auto rotor() -> problem_def
{
    problem_def p;
    p.name = "rotor";
    p.family = "rotor";
    p.summary = "spinning dense disc in a uniform field on a curved mesh";
    p.box = {0.0, 1.0, 0.0, 1.0, false, false};
    p.make_mapping = fixed(mappings::rotor());
    // the mesh covers [−0.5, 0.5]², so the rotor sits at the origin
    p.initial = [](double x, double y) {
        double const r0 = 0.1, r1 = 0.115, b1 = 2.5 / std::sqrt(4.0 * pi);
        double r = std::hypot(x, y);
        primitive w{1.0, 0.0, 0.0, 0.0, 0.5, b1, 0.0, 0.0};
        if (r <= r0) {
            w[0] = 10.0;
            w[1] = -y / r0;
            w[2] = x / r0;
        } else if (r <= r1) {
            double f = (r1 - r) / (r1 - r0);
            w[0] = 1.0 + 9.0 * f;
            w[1] = -f * y / r;
            w[2] = f * x / r;
        }
        return w;
    };
    p.potential = [](double, double y) { return 2.5 / std::sqrt(4.0 * pi) * y; };
    p.edges = all_outflow();
    p.defaults = {256, 256, 0.295, 0.5, riemann::solver::hlld, true, true, true};
    return p;
}

inline auto blast() -> problem_def
{
    problem_def p;
    p.name = "blast";
    p.family = "blast";
    p.summary = "strong blast in a low-beta background field on the rotor mesh";
    p.box = {0.0, 1.0, 0.0, 1.0, false, false};
    p.make_mapping = fixed(mappings::rotor());
    p.initial = [](double x, double y) {
        double b = 50.0 / std::sqrt(2.0 * pi);
        return primitive{1.0, 0.0, 0.0, 0.0, std::hypot(x, y) <= 0.1 ? 1000.0 : 0.1, b, b, 0.0};
    };
    p.potential = [](double x, double y) { return 50.0 / std::sqrt(2.0 * pi) * (y - x); };
    p.edges = all_outflow();
    p.defaults = {256, 256, 0.01, 0.5, riemann::solver::hlld, true, true, true};
    return p;
}

// ---------------------------------------------------------------------------
// Bow shock around a conducting cylinder of radius r0
// ---------------------------------------------------------------------------

inline constexpr double bow_r0 = 0.125, bow_dr = 0.125;

inline auto bow_shock_field(double x, double y) -> std::array<double, 2>
{
    double r = std::hypot(x, y);
    if (r > bow_r0 + bow_dr) return {0.1, 0.0};
    double ph = pi * (r - bow_r0) / (2.0 * bow_dr);
    double k = 0.1 * pi / (2.0 * bow_dr * r) * std::cos(ph);
    return {k * y * y + 0.1 * std::sin(ph), -k * x * y};
}

inline auto bow_shock(bool reflective) -> problem_def
{
    problem_def p;
    p.name = reflective ? "bow-shock-reflective" : "bow-shock";
    p.family = "bow-shock";
    p.summary = reflective ? "bow shock with a mirror wall instead of the compatibility closure"
                           : "supersonic flow onto a conducting cylinder with the compatibility wall closure";
    p.box = {0.0, 1.0, 0.0, 1.0, false, false};
    p.make_mapping = fixed(mappings::annulus(bow_r0, 0.3, 0.65, 5.0 * pi / 12.0));
    p.initial = [](double x, double y) {
        auto b = bow_shock_field(x, y);
        return primitive{1.0, 2.0, 0.0, 0.0, 0.2, b[0], b[1], 0.0};
    };
    p.potential = [](double x, double y) {
        double r = std::hypot(x, y);
        return r <= bow_r0 + bow_dr ? 0.1 * y * std::sin(pi * (r - bow_r0) / (2.0 * bow_dr)) : 0.1 * y;
    };
    p.edges = all_outflow();
    p.edges[boundary::xi_lo] = boundary::edge_spec::inflow({1.0, 2.0, 0.0, 0.0, 0.2, 0.1, 0.0, 0.0});
    p.edges[boundary::xi_hi] = reflective ? boundary::edge_spec::reflective() : boundary::edge_spec::pec(0.0);
    if (reflective)
        p.defaults = {120, 160, 0.5, 0.2, riemann::solver::llf, false, false, true};
    else
        p.defaults = {120, 160, 5.0, 0.2, riemann::solver::llf, true, false, true};
    return p;
}

} // namespace detail

// ============================================================================
// Registry
// ============================================================================

using registry = std::map<std::string, problem_def>;

/** Every benchmark, keyed by name. Eight families, some with mesh or wall variants. */
inline auto register_problems() -> registry
{
    registry r;
    auto add = [&](problem_def p) { r.emplace(p.name, std::move(p)); };
    add(detail::alfven());
    add(detail::brio_wu_1d("brio-wu", mappings::identity(), "Brio-Wu shock tube on a uniform 1D mesh"));
    add(detail::brio_wu_1d("brio-wu-clustered", mappings::clustered_1d(),
                           "Brio-Wu shock tube on a 1D mesh clustered around the origin"));
    add(detail::brio_wu_rotated());
    add(detail::field_loop(false));
    add(detail::field_loop(true));
    add(detail::orszag_tang());
    add(detail::cloud_shock(false));
    add(detail::cloud_shock(true));
    add(detail::rotor());
    add(detail::blast());
    add(detail::bow_shock(false));
    add(detail::bow_shock(true));
    return r;
}

inline auto find_problem(registry const& r, std::string const& name) -> problem_def const&
{
    auto it = r.find(name);
    if (it == r.end()) throw std::invalid_argument("unknown problem '" + name + "'");
    return it->second;
}

// ============================================================================
// Setup
// ============================================================================

struct setup_options
{
    int nx = 0, ny = 0; // 0: problem default
    std::uint64_t seed = 1;
    metric_mode metric = metric_mode::discrete;
    double gamma = default_gamma;
};

struct problem_setup
{
    curvilinear_grid grid;
    field_state field;
    boundary::spec bc;
};

/** Boundary spec with the periodic jumps of A measured from the potential along the mapped edges. */
inline auto make_boundary(problem_def const& p, mapping const& m, double gamma) -> boundary::spec
{
    boundary::spec s;
    s.edges = p.edges;
    s.gamma = gamma;
    auto a_at = [&](double xi, double eta) {
        auto c = m.map(xi, eta);
        return p.potential(c[0], c[1]);
    };
    if (p.box.periodic_xi) s.a_period_xi = a_at(p.box.xi1, p.box.eta0) - a_at(p.box.xi0, p.box.eta0);
    if (p.box.periodic_eta) s.a_period_eta = a_at(p.box.xi0, p.box.eta1) - a_at(p.box.xi0, p.box.eta0);
    return s;
}

/** Grid, initial field (A included) and boundary spec for one problem. */
inline auto setup(problem_def const& p, setup_options const& o = {}) -> problem_setup
{
    int nx = o.nx > 0 ? o.nx : p.defaults.nx;
    int ny = o.ny > 0 ? o.ny : p.defaults.ny;
    if (p.defaults.ny == 1 && ny != 1) throw std::invalid_argument(p.name + " is one-dimensional; ny must be 1");
    auto m = p.make_mapping(nx, ny, o.seed);
    problem_setup s{build_grid(m, nx, ny, p.box, o.metric), field_state(nx, ny), make_boundary(p, m, o.gamma)};
    boundary::validate(s.bc, s.grid);
    auto const& g = s.grid;
    array2d<primitive> w(nx, ny, 0);
    for_each_interior(nx, ny, [&](int i, int j) {
        w(i, j) = p.initial(g.x(i, j), g.y(i, j));
        s.field.a(i, j) = p.potential(g.x(i, j), g.y(i, j));
    });
    if (p.b_from_potential) {
        boundary::fill(s.field, g, s.bc);
        auto b = ct::curl_to_b(s.field.a, g);
        for_each_interior(nx, ny, [&](int i, int j) {
            w(i, j)[prim::bx] = b(i, j)[0];
            w(i, j)[prim::by] = b(i, j)[1];
        });
    }
    for_each_interior(nx, ny, [&](int i, int j) { s.field.q(i, j) = primitive_to_conserved(w(i, j), o.gamma); });
    boundary::fill(s.field, g, s.bc);
    return s;
}

// ============================================================================
// B = curl A consistency
// ============================================================================

struct curl_check
{
    double mean_error = 0.0; // mean over nodes of |B − curl A| (in-plane)
    double max_error = 0.0;
    double b_scale = 0.0;    // max |B| in-plane
    long nodes_above = 0;    // nodes where the mismatch exceeds 1e-6 · b_scale
};

/**
 * Compare the in-plane B of a freshly set-up field with the fourth-order
 * discrete curl of its A. Ghosts of A must be filled.
 */
inline auto check_curl(field_state const& s, curvilinear_grid const& g) -> curl_check
{
    curl_check c;
    long n = 0;
    std::vector<double> err;
    for_each_interior(g.nx, g.ny, [&](int i, int j) {
        double b1, b2;
        double axi = ct::d4(&s.a(i, j), 1, g.dxi);
        if (g.one_dimensional()) {
            b1 = s.q(i, j)[cons::bx]; // A carries only the transverse field in 1D
            b2 = -g.grad_xi(i, j)[0] * axi;
        } else {
            std::ptrdiff_t sj = &s.a(0, 1) - &s.a(0, 0);
            double aeta = ct::d4(&s.a(i, j), sj, g.deta);
            auto const &gx = g.grad_xi(i, j), &ge = g.grad_eta(i, j);
            b1 = gx[1] * axi + ge[1] * aeta;
            b2 = -(gx[0] * axi + ge[0] * aeta);
        }
        double e = std::hypot(s.q(i, j)[cons::bx] - b1, s.q(i, j)[cons::by] - b2);
        err.push_back(e);
        c.mean_error += e;
        c.max_error = std::max(c.max_error, e);
        c.b_scale = std::max(c.b_scale, std::hypot(s.q(i, j)[cons::bx], s.q(i, j)[cons::by]));
        ++n;
    });
    c.mean_error /= double(n);
    for (double e : err)
        if (e > 1e-6 * c.b_scale) ++c.nodes_above;
    return c;
}

} // namespace afmhd::problems
