#pragma once

#include "afmhd/field.hpp"
#include "afmhd/flux_assembly.hpp"
#include "afmhd/grid.hpp"

#include <stdexcept>
#include <string>

namespace afmhd::positivity {

inline constexpr double default_eps = 1e-13;

struct positivity_error : std::runtime_error
{
    int i, j;
    positivity_error(int i_, int j_, std::string const& what) : std::runtime_error(what), i(i_), j(j_) {}
};

// ============================================================================
// Scalar limiters
// ============================================================================

/** Largest θ ∈ [0, 1] with ρ_low + θ·Δρ ≥ eps. Requires ρ_low ≥ eps. */
inline auto density_theta(double rho_low, double delta_rho, double eps = default_eps) -> double
{
    if (rho_low + delta_rho >= eps) return 1.0;
    return std::clamp((rho_low - eps) / -delta_rho, 0.0, 1.0);
}

/**
 * Largest θ ∈ [0, θ_max] with p(q_low + θ·Δq) ≥ eps, by bisection. p is
 * concave along the segment, so the admissible set is an interval
 * containing 0. Returns 0 when q_low itself is not admissible.
 */
inline auto pressure_theta(conserved const& q_low, state8 const& delta, double theta_max, double gamma,
                           double eps = default_eps) -> double
{
    auto p = [&](double t) { return pressure(q_low + t * delta, gamma); };
    if (p(theta_max) >= eps) return theta_max;
    if (!(p(0.0) >= eps)) return 0.0;
    double lo = 0.0, hi = theta_max;
    for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
        double mid = 0.5 * (lo + hi);
        (p(mid) >= eps ? lo : hi) = mid;
    }
    return lo;
}

inline auto admissible(conserved const& q, double gamma, double eps) -> bool
{
    return q[0] >= eps && pressure(q, gamma) >= eps;
}

// ============================================================================
// Flux blending
// ============================================================================

struct report
{
    long limited = 0;
    double min_theta = 1.0;
};

namespace detail {

/** One face of a node: flux slot, sign in the update and the inverse spacing. */
struct face
{
    array2d<state8>* high;
    array2d<state8> const* low;
    array2d<double>* theta;
    int i, j;
    double sign;
    double inv_h;
};

inline auto faces_of(flux::flux_set& fl, array2d<double>& th_xi, array2d<double>& th_eta, curvilinear_grid const& g,
                     int i, int j, std::array<face, 4>& out) -> int
{
    out[0] = {&fl.xi, &fl.xi_low, &th_xi, i, j, -1.0, 1.0 / g.dxi};
    out[1] = {&fl.xi, &fl.xi_low, &th_xi, i - 1, j, 1.0, 1.0 / g.dxi};
    if (g.one_dimensional()) return 2;
    out[2] = {&fl.eta, &fl.eta_low, &th_eta, i, j, -1.0, 1.0 / g.deta};
    out[3] = {&fl.eta, &fl.eta_low, &th_eta, i, j - 1, 1.0, 1.0 / g.deta};
    return 4;
}

} // namespace detail

/**
 * Blend each interface flux with its low-order counterpart so that a forward
 * Euler step of size dt keeps ρ and p at or above eps at every interior
 * node. Nodes whose update is already admissible impose no constraint; the
 * others split their update equally among their faces and bound θ on each.
 * Throws positivity_error if the low-order update at some node is not
 * admissible.
 */
inline auto limit_fluxes(flux::flux_set& fl, field_state const& s, curvilinear_grid const& g, double dt, double gamma,
                         double eps = default_eps) -> report
{
    int const nx = g.nx, ny = g.ny;
    array2d<double> th_xi(nx, ny, 1, 1.0), th_eta(nx, ny, 1, 1.0);
    array2d<conserved> low(nx, ny, 0);
    array2d<char> constrained(nx, ny, 0, 0);
    std::array<detail::face, 4> fs;

    for_each_interior(nx, ny, [&](int i, int j) {
        int k = detail::faces_of(fl, th_xi, th_eta, g, i, j, fs);
        conserved q = s.q(i, j);
        for (int f = 0; f < k; ++f) q += (fs[f].sign * dt * g.jac(i, j) * fs[f].inv_h) * (*fs[f].low)(fs[f].i, fs[f].j);
        if (!admissible(q, gamma, eps))
            throw positivity_error(i, j, "positivity: low-order update not admissible at node (" + std::to_string(i) +
                                             ", " + std::to_string(j) + ")");
        low(i, j) = q;
    });

    auto update_with_theta = [&](int i, int j) {
        int k = detail::faces_of(fl, th_xi, th_eta, g, i, j, fs);
        conserved q = low(i, j);
        for (int f = 0; f < k; ++f) {
            auto const& fc = fs[f];
            double th = (*fc.theta)(fc.i, fc.j);
            q += (th * fc.sign * dt * g.jac(i, j) * fc.inv_h) * ((*fc.high)(fc.i, fc.j) - (*fc.low)(fc.i, fc.j));
        }
        return q;
    };

    for (;;) {
        bool changed = false;
        for_each_interior(nx, ny, [&](int i, int j) {
            if (constrained(i, j) || admissible(update_with_theta(i, j), gamma, eps)) return;
            constrained(i, j) = 1;
            changed = true;
            int k = detail::faces_of(fl, th_xi, th_eta, g, i, j, fs);
            for (int f = 0; f < k; ++f) {
                auto const& fc = fs[f];
                state8 c = (k * fc.sign * dt * g.jac(i, j) * fc.inv_h) * ((*fc.high)(fc.i, fc.j) - (*fc.low)(fc.i, fc.j));
                double t = density_theta(low(i, j)[0], c[0], eps);
                t = pressure_theta(low(i, j), c, t, gamma, eps);
                auto& slot = (*fc.theta)(fc.i, fc.j);
                slot = std::min(slot, t);
            }
        });
        if (!changed) break;
    }

    report rep;
    auto blend = [&](array2d<state8>& hi, array2d<state8> const& lo, array2d<double> const& th, int i, int j) {
        double t = th(i, j);
        if (t >= 1.0) return;
        hi(i, j) = t * hi(i, j) + (1.0 - t) * lo(i, j);
        ++rep.limited;
        rep.min_theta = std::min(rep.min_theta, t);
    };
    for (int j = 0; j < ny; ++j)
        for (int i = -1; i < nx; ++i) blend(fl.xi, fl.xi_low, th_xi, i, j);
    if (!g.one_dimensional())
        for (int j = -1; j < ny; ++j)
            for (int i = 0; i < nx; ++i) blend(fl.eta, fl.eta_low, th_eta, i, j);
    return rep;
}

} // namespace afmhd::positivity
