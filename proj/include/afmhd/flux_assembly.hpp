#pragma once

#include "afmhd/field.hpp"
#include "afmhd/grid.hpp"
#include "afmhd/physics.hpp"
#include "afmhd/riemann.hpp"
#include "afmhd/weno.hpp"

#include <algorithm>
#include <array>

namespace afmhd::flux {

// ============================================================================
// Central-difference corrections and the σ limiter
// ============================================================================

inline constexpr double a2 = -1.0 / 24.0;
inline constexpr double a4 = 7.0 / 5760.0;

struct corrections
{
    state8 d2; // Δ²∂²f at i+1/2
    state8 d4; // Δ⁴∂⁴f at i+1/2
};

/** Six-point central differences of f_{i-2..i+3}, sixth-order accurate at i+1/2. */
inline auto correction_terms(std::array<state8, 6> const& f) -> corrections
{
    corrections c;
    for (int k = 0; k < 8; ++k) {
        double a = f[0][k] + f[5][k], b = f[1][k] + f[4][k], m = f[2][k] + f[3][k];
        c.d2[k] = (-5.0 * a + 39.0 * b - 34.0 * m) / 48.0;
        c.d4[k] = (a - 3.0 * b + 2.0 * m) / 2.0;
    }
    return c;
}

/** σ_min/σ_max for one interpolation; 1 when β₀ = β₂. */
inline auto sigma_candidate(std::array<double, 3> const& beta) -> double
{
    double d = std::abs(beta[0] - beta[2]);
    double lo = std::min(beta[0], beta[2]), hi = std::max(beta[0], beta[2]);
    double smax = 1.0 + d / (weno::epsilon + lo);
    double smin = 1.0 + d / (weno::epsilon + hi);
    return smin / smax;
}

inline auto sigma(weno::smoothness const& minus, weno::smoothness const& plus) -> double
{
    return std::min(sigma_candidate(minus.beta), sigma_candidate(plus.beta));
}

/** Minimum over the characteristic components of one interface. */
inline auto sigma(weno::state_pair const& sp) -> double
{
    double s = 1.0;
    for (int k = 0; k < 8; ++k) s = std::min(s, sigma(sp.beta_minus[k], sp.beta_plus[k]));
    return s;
}

// ============================================================================
// Interface flux
// ============================================================================

enum class sigma_mode { limited, one, zero };

struct options
{
    riemann::solver solver = riemann::solver::hlld;
    sigma_mode sigma = sigma_mode::limited;
    double gamma = default_gamma;
};

struct interface_result
{
    state8 flux;
    state8 low;
    double sigma = 1.0;
    bool fallback = false;
};

/**
 * Flux through the half point between states q[2] and q[3] in transformed
 * units. `f` holds the transformed node fluxes of the same six nodes and
 * `m` the half-point metric row. `alpha` is the global speed for LF in
 * unit-normal units.
 */
inline auto interface_flux(std::array<conserved, 6> const& q, std::array<state8, 6> const& f, metric_row const& m,
                           options const& opt, double alpha = 0.0) -> interface_result
{
    interface_result r;
    auto geo = interface_normal(m);
    auto sp = weno::interpolate_state_pair(q, geo.normal, opt.gamma);
    if (!sp.ok) {
        sp.minus = q[2];
        sp.plus = q[3];
        r.fallback = true;
    }
    riemann::input in{sp.minus, sp.plus, geo.normal, opt.gamma};
    state8 lead = geo.scale * riemann::solve(opt.solver, in, alpha);

    switch (opt.sigma) {
    case sigma_mode::limited: r.sigma = r.fallback ? 0.0 : sigma(sp); break;
    case sigma_mode::one: r.sigma = 1.0; break;
    case sigma_mode::zero: r.sigma = 0.0; break;
    }
    if (r.sigma > 0.0) {
        auto c = correction_terms(f);
        r.flux = lead + r.sigma * (a2 * c.d2 + a4 * c.d4);
    } else {
        r.flux = lead;
    }

    riemann::input pt{q[2], q[3], geo.normal, opt.gamma};
    r.low = geo.scale * riemann::lax_friedrichs(pt, riemann::local_alpha(pt));
    return r;
}

// ============================================================================
// Sweeps
// ============================================================================

/**
 * Interface fluxes for the whole grid. xi(i, j) is the flux at (i+1/2, j)
 * for i in [−1, nx); eta(i, j) at (i, j+1/2) for j in [−1, ny). One-
 * dimensional grids have no η fluxes.
 */
struct flux_set
{
    array2d<state8> xi, eta;
    array2d<state8> xi_low, eta_low;
    array2d<double> sigma_xi, sigma_eta;
    long fallbacks = 0;
};

namespace detail {

inline auto node_signal_speed(conserved const& q, metric_row const& m, double gamma) -> double
{
    double len = std::hypot(m[0], m[1]);
    if (len == 0.0 || !(q[0] > 0.0)) return 0.0;
    return max_signal_speed(to_primitive(q, gamma), {m[0] / len, m[1] / len, 0.0}, gamma);
}

/** Global LF speed along one family, in unit-normal units, over nodes and ghosts. */
inline auto global_alpha(field_state const& s, array2d<metric_row> const& m, double gamma) -> double
{
    int g = curvilinear_grid::ghost;
    double a = 0.0;
    for (int j = -g; j < s.ny() + g; ++j)
        for (int i = -g; i < s.nx() + g; ++i) a = std::max(a, node_signal_speed(s.q(i, j), m(i, j), gamma));
    return a;
}

} // namespace detail

inline auto compute_fluxes(field_state const& s, curvilinear_grid const& g, options const& opt) -> flux_set
{
    int const nx = g.nx, ny = g.ny, gh = curvilinear_grid::ghost;
    bool const one_d = g.one_dimensional();
    flux_set out;
    out.xi = array2d<state8>(nx, ny, 1);
    out.xi_low = array2d<state8>(nx, ny, 1);
    out.sigma_xi = array2d<double>(nx, ny, 1, 1.0);
    if (!one_d) {
        out.eta = array2d<state8>(nx, ny, 1);
        out.eta_low = array2d<state8>(nx, ny, 1);
        out.sigma_eta = array2d<double>(nx, ny, 1, 1.0);
    }
    bool const lf = opt.solver == riemann::solver::lf;
    double const alpha_xi = lf ? detail::global_alpha(s, g.m_xi, opt.gamma) : 0.0;
    double const alpha_eta = lf && !one_d ? detail::global_alpha(s, g.m_eta, opt.gamma) : 0.0;

    std::vector<state8> nodef(std::size_t(std::max(nx, ny) + 2 * gh));
    std::array<conserved, 6> qs;
    std::array<state8, 6> fs;

    for (int j = 0; j < ny; ++j) {
        for (int i = -gh; i < nx + gh; ++i) {
            auto const& m = g.m_xi(i, j);
            nodef[std::size_t(i + gh)] = flux_along(s.q(i, j), {m[0], m[1], 0.0}, opt.gamma);
        }
        for (int i = -1; i < nx; ++i) {
            for (int k = 0; k < 6; ++k) {
                qs[k] = s.q(i - 2 + k, j);
                fs[k] = nodef[std::size_t(i - 2 + k + gh)];
            }
            auto r = interface_flux(qs, fs, g.half_xi(i, j), opt, alpha_xi);
            out.xi(i, j) = r.flux;
            out.xi_low(i, j) = r.low;
            out.sigma_xi(i, j) = r.sigma;
            out.fallbacks += r.fallback;
        }
    }
    if (one_d) return out;

    for (int i = 0; i < nx; ++i) {
        for (int j = -gh; j < ny + gh; ++j) {
            auto const& m = g.m_eta(i, j);
            nodef[std::size_t(j + gh)] = flux_along(s.q(i, j), {m[0], m[1], 0.0}, opt.gamma);
        }
        for (int j = -1; j < ny; ++j) {
            for (int k = 0; k < 6; ++k) {
                qs[k] = s.q(i, j - 2 + k);
                fs[k] = nodef[std::size_t(j - 2 + k + gh)];
            }
            auto r = interface_flux(qs, fs, g.half_eta(i, j), opt, alpha_eta);
            out.eta(i, j) = r.flux;
            out.eta_low(i, j) = r.low;
            out.sigma_eta(i, j) = r.sigma;
            out.fallbacks += r.fallback;
        }
    }
    return out;
}

// ============================================================================
// Residual
// ============================================================================

/** Flux divergence of the given interface fluxes in transformed units, without the −J factor. */
inline auto flux_divergence(array2d<state8> const& fx, array2d<state8> const* fy, curvilinear_grid const& g, int i,
                            int j) -> state8
{
    state8 d = (1.0 / g.dxi) * (fx(i, j) - fx(i - 1, j));
    if (fy) d += (1.0 / g.deta) * ((*fy)(i, j) - (*fy)(i, j - 1));
    return d;
}

/** dq/dt = −J (Dξ f̂ + Dη ĝ) at interior nodes. */
inline auto residual_from(flux_set const& fl, curvilinear_grid const& g) -> array2d<state8>
{
    array2d<state8> r(g.nx, g.ny, 0);
    auto const* fy = g.one_dimensional() ? nullptr : &fl.eta;
    for_each_interior(g.nx, g.ny, [&](int i, int j) { r(i, j) = (-g.jac(i, j)) * flux_divergence(fl.xi, fy, g, i, j); });
    return r;
}

inline auto residual(field_state const& s, curvilinear_grid const& g, options const& opt) -> array2d<state8>
{
    return residual_from(compute_fluxes(s, g, opt), g);
}

} // namespace afmhd::flux
