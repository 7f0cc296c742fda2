#pragma once

#include "afmhd/field.hpp"
#include "afmhd/grid.hpp"
#include "afmhd/weno.hpp"

#include <algorithm>
#include <stdexcept>

namespace afmhd::ct {

// ============================================================================
// Potential advection
// ============================================================================

namespace detail {

struct one_sided
{
    double minus, plus;
};

/** HJ-WENO left and right derivatives of A at node i along a line with stride s. */
inline auto derivatives(double const* a, std::ptrdiff_t s, double h) -> one_sided
{
    auto dp = [&](int k) { return (a[(k + 1) * s] - a[k * s]) / h; };
    return {weno::hj_weno_derivative(dp(-3), dp(-2), dp(-1), dp(0), dp(1)),
            weno::hj_weno_derivative(dp(2), dp(1), dp(0), dp(-1), dp(-2))};
}

inline auto velocity_xy(conserved const& q) -> std::array<double, 2> { return {q[1] / q[0], q[2] / q[0]}; }

} // namespace detail

/**
 * dA/dt at interior nodes for ∂t A + ū₁ ∂ξA + ū₂ ∂ηA = 0 with contravariant
 * velocities ū₁ = ∇ξ·u, ū₂ = ∇η·u and global Lax–Friedrichs speeds.
 * Ghosts of q and A must be filled (three layers).
 */
inline auto potential_rhs(field_state const& s, curvilinear_grid const& g) -> array2d<double>
{
    int const nx = g.nx, ny = g.ny;
    bool const one_d = g.one_dimensional();
    array2d<double> u1(nx, ny, 0), u2(nx, ny, 0);
    double alpha1 = 0.0, alpha2 = 0.0;
    for_each_interior(nx, ny, [&](int i, int j) {
        auto v = detail::velocity_xy(s.q(i, j));
        auto const &gx = g.grad_xi(i, j), &ge = g.grad_eta(i, j);
        u1(i, j) = gx[0] * v[0] + gx[1] * v[1];
        u2(i, j) = one_d ? 0.0 : ge[0] * v[0] + ge[1] * v[1];
        alpha1 = std::max(alpha1, std::abs(u1(i, j)));
        alpha2 = std::max(alpha2, std::abs(u2(i, j)));
    });

    array2d<double> rhs(nx, ny, 0, 0.0);
    std::ptrdiff_t const sj = one_d ? 0 : &s.a(0, 1) - &s.a(0, 0);
    for_each_interior(nx, ny, [&](int i, int j) {
        double const* a = &s.a(i, j);
        auto dx = detail::derivatives(a, 1, g.dxi);
        double r = -u1(i, j) * 0.5 * (dx.minus + dx.plus) + alpha1 * 0.5 * (dx.plus - dx.minus);
        if (!one_d) {
            auto dy = detail::derivatives(a, sj, g.deta);
            r += -u2(i, j) * 0.5 * (dy.minus + dy.plus) + alpha2 * 0.5 * (dy.plus - dy.minus);
        }
        rhs(i, j) = r;
    });
    return rhs;
}

// ============================================================================
// Field from potential
// ============================================================================

/** Fourth-order central difference (v₋₂ − 8v₋₁ + 8v₁ − v₂)/12h along stride s. */
inline auto d4(double const* v, std::ptrdiff_t s, double h) -> double
{
    return (v[-2 * s] - 8.0 * v[-s] + 8.0 * v[s] - v[2 * s]) / (12.0 * h);
}

/** (B1, B2) = (∂yA, −∂xA) through the node metrics, at interior nodes. */
inline auto curl_to_b(array2d<double> const& a, curvilinear_grid const& g) -> array2d<std::array<double, 2>>
{
    if (g.one_dimensional()) throw std::invalid_argument("curl_to_b: requires a two-dimensional grid");
    array2d<std::array<double, 2>> b(g.nx, g.ny, 0);
    std::ptrdiff_t const sj = &a(0, 1) - &a(0, 0);
    for_each_interior(g.nx, g.ny, [&](int i, int j) {
        double const* p = &a(i, j);
        double axi = d4(p, 1, g.dxi), aeta = d4(p, sj, g.deta);
        auto const &gx = g.grad_xi(i, j), &ge = g.grad_eta(i, j);
        b(i, j) = {gx[1] * axi + ge[1] * aeta, -(gx[0] * axi + ge[0] * aeta)};
    });
    return b;
}

/**
 * Overwrite interior B1, B2 with the curl of A. ρ, momentum, E and B3 are
 * left untouched, so the thermal pressure absorbs the change in magnetic
 * energy.
 */
inline void correct(field_state& s, curvilinear_grid const& g)
{
    auto b = curl_to_b(s.a, g);
    for_each_interior(g.nx, g.ny, [&](int i, int j) {
        s.q(i, j)[cons::bx] = b(i, j)[0];
        s.q(i, j)[cons::by] = b(i, j)[1];
    });
}

// ============================================================================
// Diagnostics
// ============================================================================

/**
 * Fourth-order discrete divergence ∇ξ·D4ξB + ∇η·D4ηB at interior nodes.
 * Requires two filled ghost layers of B.
 */
inline auto divergence(field_state const& s, curvilinear_grid const& g) -> array2d<double>
{
    array2d<double> d(g.nx, g.ny, 0, 0.0);
    bool const one_d = g.one_dimensional();
    for_each_interior(g.nx, g.ny, [&](int i, int j) {
        auto comp = [&](int c, int ii, int jj) { return s.q(ii, jj)[c]; };
        double b1xi = (comp(5, i - 2, j) - 8 * comp(5, i - 1, j) + 8 * comp(5, i + 1, j) - comp(5, i + 2, j)) / (12 * g.dxi);
        double b2xi = (comp(6, i - 2, j) - 8 * comp(6, i - 1, j) + 8 * comp(6, i + 1, j) - comp(6, i + 2, j)) / (12 * g.dxi);
        auto const &gx = g.grad_xi(i, j), &ge = g.grad_eta(i, j);
        double r = gx[0] * b1xi + gx[1] * b2xi;
        if (!one_d) {
            double b1eta = (comp(5, i, j - 2) - 8 * comp(5, i, j - 1) + 8 * comp(5, i, j + 1) - comp(5, i, j + 2)) / (12 * g.deta);
            double b2eta = (comp(6, i, j - 2) - 8 * comp(6, i, j - 1) + 8 * comp(6, i, j + 1) - comp(6, i, j + 2)) / (12 * g.deta);
            r += ge[0] * b1eta + ge[1] * b2eta;
        }
        d(i, j) = r;
    });
    return d;
}

inline auto max_divergence(field_state const& s, curvilinear_grid const& g) -> double
{
    auto d = divergence(s, g);
    double m = 0.0;
    for (double v : d.data()) m = std::max(m, std::abs(v));
    return m;
}

} // namespace afmhd::ct
