#pragma once

#include "afmhd/boundary.hpp"
#include "afmhd/ct.hpp"
#include "afmhd/field.hpp"
#include "afmhd/flux_assembly.hpp"
#include "afmhd/grid.hpp"
#include "afmhd/positivity.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace afmhd::integrator {

struct step_config
{
    double cfl = 0.5;
    double t_final = 1.0;
    long max_steps = std::numeric_limits<long>::max();
    bool ct_on = true;
    bool pp_on = true;
    bool sigma_on = true;
    riemann::solver solver = riemann::solver::hlld;
    double gamma = default_gamma;
    double pp_eps = positivity::default_eps;

    void validate() const
    {
        if (!(cfl > 0.0 && cfl < 1.0)) throw std::invalid_argument("cfl must lie in (0, 1)");
        if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw std::invalid_argument("t_final must be finite and >= 0");
        if (max_steps < 0) throw std::invalid_argument("max_steps must be >= 0");
    }
};

/** Non-finite values in the solution. Carries where they first appeared. */
struct nan_error : std::runtime_error
{
    long step;
    int stage, i, j;
    nan_error(long step_, int stage_, int i_, int j_)
        : std::runtime_error("non-finite state at step " + std::to_string(step_) + " stage " + std::to_string(stage_) +
                             " node (" + std::to_string(i_) + ", " + std::to_string(j_) + ")"),
          step(step_), stage(stage_), i(i_), j(j_)
    {
    }
};

// ============================================================================
// Time step
// ============================================================================

/** dt = cfl / max (λξ/Δξ + λη/Δη) over interior nodes, λ from the contravariant gradients. */
inline auto compute_dt(field_state const& s, curvilinear_grid const& g, double cfl, double gamma = default_gamma) -> double
{
    double m = 0.0;
    bool bad = false;
    int bi = 0, bj = 0;
    for_each_interior(g.nx, g.ny, [&](int i, int j) {
        auto w = to_primitive(s.q(i, j), gamma);
        auto const& gx = g.grad_xi(i, j);
        double r = max_signal_speed(w, {gx[0], gx[1], 0.0}, gamma) / g.dxi;
        if (!g.one_dimensional()) {
            auto const& ge = g.grad_eta(i, j);
            r += max_signal_speed(w, {ge[0], ge[1], 0.0}, gamma) / g.deta;
        }
        if (!std::isfinite(r) && !bad) {
            bad = true;
            bi = i;
            bj = j;
        }
        m = std::max(m, r);
    });
    if (bad) throw nan_error(s.step, 0, bi, bj);
    if (!(m > 0.0)) throw std::domain_error("compute_dt: all signal speeds vanish");
    return cfl / m;
}

// ============================================================================
// Runge-Kutta stages
// ============================================================================

struct step_report
{
    double dt = 0.0;
    double min_rho = std::numeric_limits<double>::infinity();
    double min_p = std::numeric_limits<double>::infinity();
    long limited = 0;
    long negative_ghost_pressure = 0;
    bool inadmissible = false; // some stage left ρ ≤ 0 or p ≤ 0 at a node
};

struct stage_rhs
{
    array2d<conserved> dq;
    array2d<double> da;
};

/**
 * Right-hand side for one forward-Euler stage of size dt. Fills the ghosts
 * (and PEC wall values) of s in place; when pp_on the interface fluxes are
 * blended so that s + dt·dq stays admissible.
 */
inline auto evaluate(field_state& s, curvilinear_grid const& g, boundary::spec const& bc, step_config const& cfg, double dt,
                     step_report& rep) -> stage_rhs
{
    rep.negative_ghost_pressure += boundary::fill(s, g, bc).negative_ghost_pressure;
    flux::options opt{cfg.solver, cfg.sigma_on ? flux::sigma_mode::limited : flux::sigma_mode::zero, cfg.gamma};
    auto fl = flux::compute_fluxes(s, g, opt);
    if (cfg.pp_on) rep.limited += positivity::limit_fluxes(fl, s, g, dt, cfg.gamma, cfg.pp_eps).limited;
    return {flux::residual_from(fl, g), ct::potential_rhs(s, g)};
}

/**
 * Third-order strong-stability-preserving Runge-Kutta combination:
 * q¹ = E(qⁿ), q² = ¾qⁿ + ¼E(q¹), qⁿ⁺¹ = ⅓qⁿ + ⅔E(q²) with E a forward-Euler
 * step. blend(b, w, c) must set w ← b + c(w − b), which returns b exactly
 * when E is the identity. euler may touch its argument (ghost filling);
 * post(w, stage) runs after each combination.
 */
template <class Y, class Euler, class Blend, class Post>
void ssp_rk3(Y& y, Euler&& euler, Blend&& blend, Post&& post)
{
    Y w1 = euler(y);
    post(w1, 1);
    Y w2 = euler(w1);
    blend(y, w2, 0.25);
    post(w2, 2);
    Y w3 = euler(w2);
    blend(y, w3, 2.0 / 3.0);
    post(w3, 3);
    y = std::move(w3);
}

namespace detail {

inline void check_stage(field_state const& s, double gamma, int stage, step_report& rep)
{
    for (int j = 0; j < s.ny(); ++j)
        for (int i = 0; i < s.nx(); ++i) {
            auto const& q = s.q(i, j);
            for (double v : q.v)
                if (!std::isfinite(v)) throw nan_error(s.step, stage, i, j);
            if (!std::isfinite(s.a(i, j))) throw nan_error(s.step, stage, i, j);
            double p = pressure(q, gamma);
            rep.min_rho = std::min(rep.min_rho, q[0]);
            rep.min_p = std::min(rep.min_p, p);
            if (!(q[0] > 0.0) || !(p > 0.0)) rep.inadmissible = true;
        }
}

} // namespace detail

/**
 * One SSP-RK3 step of the coupled (q, A) system. B is replaced by curl A
 * after every stage when ct_on (two-dimensional grids only). Ghosts of the
 * result are those used by the last correction, not refilled.
 */
inline auto rk3_step(field_state& s, curvilinear_grid const& g, boundary::spec const& bc, step_config const& cfg, double dt)
    -> step_report
{
    step_report rep;
    rep.dt = dt;
    bool const ct_on = cfg.ct_on && !g.one_dimensional();

    auto euler = [&](field_state& y) {
        auto r = evaluate(y, g, bc, cfg, dt, rep);
        field_state w = y;
        for_each_interior(g.nx, g.ny, [&](int i, int j) {
            w.q(i, j) += dt * r.dq(i, j);
            w.a(i, j) += dt * r.da(i, j);
        });
        return w;
    };
    auto blend = [&](field_state const& b, field_state& w, double c) {
        for_each_interior(g.nx, g.ny, [&](int i, int j) {
            w.q(i, j) = b.q(i, j) + c * (w.q(i, j) - b.q(i, j));
            w.a(i, j) = b.a(i, j) + c * (w.a(i, j) - b.a(i, j));
        });
    };
    auto post = [&](field_state& w, int stage) {
        if (ct_on) {
            // the curl reaches into ghost A, which must match the updated interior
            rep.negative_ghost_pressure += boundary::fill(w, g, bc).negative_ghost_pressure;
            ct::correct(w, g);
        }
        detail::check_stage(w, cfg.gamma, stage, rep);
    };
    ssp_rk3(s, euler, blend, post);
    s.time += dt;
    s.step += 1;
    return rep;
}

// ============================================================================
// Time loop
// ============================================================================

/** Σ q/J over interior nodes; J⁻¹ is the node volume up to a constant. */
inline auto total_conserved(field_state const& s, curvilinear_grid const& g) -> state8
{
    state8 t{};
    for_each_interior(g.nx, g.ny, [&](int i, int j) { t += (1.0 / g.jac(i, j)) * s.q(i, j); });
    return t;
}

struct step_log
{
    long step;
    double t, dt, min_rho, min_p;
    long limited;
    double max_div_b; // NaN unless computed at this step
};

inline auto format_log(step_log const& l) -> std::string
{
    char buf[256];
    std::snprintf(buf, sizeof buf, "step %6ld  t %.6e  dt %.4e  min_rho %.4e  min_p %.4e  limited %ld  max_divB %.3e",
                  l.step, l.t, l.dt, l.min_rho, l.min_p, l.limited, l.max_div_b);
    return buf;
}

struct run_summary
{
    long steps = 0;
    double t = 0.0;
    double min_rho = std::numeric_limits<double>::infinity();
    double min_p = std::numeric_limits<double>::infinity();
    long limited = 0;
    long negative_ghost_pressure = 0;
    bool inadmissible = false;
};

struct observer
{
    long log_every = 0; // 0: never compute the log line
    std::function<void(step_log const&)> on_log;
    std::function<void(field_state const&, step_report const&)> on_step;
};

/** Advance to cfg.t_final (or cfg.max_steps); the last step is clipped to land on t_final. */
inline auto integrate(field_state& s, curvilinear_grid const& g, boundary::spec const& bc, step_config const& cfg,
                      observer const& obs = {}) -> run_summary
{
    cfg.validate();
    run_summary sum;
    long taken = 0;
    while (s.time < cfg.t_final && taken < cfg.max_steps) {
        double dt = compute_dt(s, g, cfg.cfl, cfg.gamma);
        bool last = s.time + dt >= cfg.t_final;
        if (last) dt = cfg.t_final - s.time;
        auto rep = rk3_step(s, g, bc, cfg, dt);
        if (last) s.time = cfg.t_final;
        ++taken;
        sum.min_rho = std::min(sum.min_rho, rep.min_rho);
        sum.min_p = std::min(sum.min_p, rep.min_p);
        sum.limited += rep.limited;
        sum.negative_ghost_pressure += rep.negative_ghost_pressure;
        sum.inadmissible = sum.inadmissible || rep.inadmissible;
        if (obs.on_step) obs.on_step(s, rep);
        if (obs.log_every > 0 && obs.on_log && (s.step % obs.log_every == 0 || last)) {
            double div = std::numeric_limits<double>::quiet_NaN();
            if (!g.one_dimensional()) {
                field_state filled = s;
                boundary::fill(filled, g, bc);
                div = ct::max_divergence(filled, g);
            }
            obs.on_log({s.step, s.time, dt, rep.min_rho, rep.min_p, rep.limited, div});
        }
    }
    sum.steps = taken;
    sum.t = s.time;
    return sum;
}

} // namespace afmhd::integrator
