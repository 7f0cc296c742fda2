#pragma once

#include "afmhd/physics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace afmhd::riemann {

struct input
{
    conserved ql;
    conserved qr;
    unit_normal n;
    double gamma = default_gamma;
};

enum class solver { lf, llf, hll, hllc, hlld };

inline auto solver_name(solver s) -> std::string
{
    switch (s) {
    case solver::lf: return "lf";
    case solver::llf: return "llf";
    case solver::hll: return "hll";
    case solver::hllc: return "hllc";
    case solver::hlld: return "hlld";
    }
    return "?";
}

inline auto parse_solver(std::string const& name) -> solver
{
    if (name == "lf") return solver::lf;
    if (name == "llf") return solver::llf;
    if (name == "hll") return solver::hll;
    if (name == "hllc") return solver::hllc;
    if (name == "hlld") return solver::hlld;
    throw std::invalid_argument("unknown flux '" + name + "' (expected lf, llf, hll, hllc or hlld)");
}

/** Relative width below which fan waves are treated as coincident. */
inline constexpr double degeneracy_tol = 1e-8;

// ============================================================================
// Lax-Friedrichs
// ============================================================================

inline auto lax_friedrichs(input const& in, double alpha) -> state8
{
    auto fl = physical_flux(in.ql, in.n, in.gamma);
    auto fr = physical_flux(in.qr, in.n, in.gamma);
    return 0.5 * (fl + fr) - (0.5 * alpha) * (in.qr - in.ql);
}

/** Largest |u·n| + c_f over the two states. */
inline auto local_alpha(input const& in) -> double
{
    return std::max(max_signal_speed(to_primitive(in.ql, in.gamma), in.n.n, in.gamma),
                    max_signal_speed(to_primitive(in.qr, in.gamma), in.n.n, in.gamma));
}

// ============================================================================
// Outer wave speeds
// ============================================================================

/** Davis-type bracket from the fast speeds of both states. */
inline auto estimate_outer_speeds(input const& in) -> std::pair<double, double>
{
    auto wl = to_primitive(in.ql, in.gamma);
    auto wr = to_primitive(in.qr, in.gamma);
    double ul = dot(velocity(wl), in.n.n), ur = dot(velocity(wr), in.n.n);
    double cl = fast_speed(wl, in.n.n, in.gamma), cr = fast_speed(wr, in.n.n, in.gamma);
    // std::min/max would drop a NaN speed from one side
    if (std::isnan(ul + ur + cl + cr)) return {ul + ur + cl + cr, ul + ur + cl + cr};
    double sl = std::min(ul - cl, ur - cr);
    double sr = std::max(ul + cl, ur + cr);
    if (!(sl < sr)) {
        // only reachable with vanishing sound and field: widen symmetrically
        double c = std::max({std::abs(sl), std::abs(sr), 1e-14});
        sl -= c;
        sr += c;
    }
    return {sl, sr};
}

// ============================================================================
// HLL
// ============================================================================

inline auto hll_state(input const& in, double sl, double sr) -> conserved
{
    auto fl = physical_flux(in.ql, in.n, in.gamma);
    auto fr = physical_flux(in.qr, in.n, in.gamma);
    return (1.0 / (sr - sl)) * (sr * in.qr - sl * in.ql + fl - fr);
}

inline auto hll(input const& in, double sl, double sr) -> state8
{
    if (!(sl < sr)) throw std::invalid_argument("hll: requires sL < sR");
    auto fl = physical_flux(in.ql, in.n, in.gamma);
    if (sl >= 0.0) return fl;
    auto fr = physical_flux(in.qr, in.n, in.gamma);
    if (sr <= 0.0) return fr;
    return (1.0 / (sr - sl)) * (sr * fl - sl * fr + (sl * sr) * (in.qr - in.ql));
}

// ============================================================================
// Intermediate-state helpers
// ============================================================================

namespace detail {

struct side
{
    conserved q;
    state8 f;
    vec3 u, b;
    double rho, un, bn, pt, e;
};

inline auto make_side(conserved const& q, unit_normal const& n, double gamma) -> side
{
    side s;
    s.q = q;
    s.f = physical_flux(q, n, gamma);
    auto w = to_primitive(q, gamma);
    s.rho = w[0];
    s.u = velocity(w);
    s.b = magnetic(w);
    s.un = dot(s.u, n.n);
    s.bn = dot(s.b, n.n);
    s.pt = total_pressure(w);
    s.e = q[cons::energy];
    return s;
}

inline auto pack(double rho, vec3 const& mom, double e, vec3 const& b) -> conserved
{
    return {rho, mom[0], mom[1], mom[2], e, b[0], b[1], b[2]};
}

inline auto sign_of(double x) -> double { return x >= 0.0 ? 1.0 : -1.0; }

} // namespace detail

// ============================================================================
// HLLC
// ============================================================================

struct hllc_fan
{
    double sl = 0, sm = 0, sr = 0;
    conserved ql_star, qr_star;
    bool valid = false; // false: the two-state fan is degenerate, use HLL
};

/**
 * Two intermediate states separated by S_M = u_HLL·n with B* = B_HLL on
 * both sides. The magnetic work term of the energy uses u_HLL·B_HLL on
 * both sides so that the fan integrates to the HLL average.
 */
inline auto hllc_states(input const& in, double sl, double sr) -> hllc_fan
{
    if (!(sl < sr)) throw std::invalid_argument("hllc: requires sL < sR");
    auto const& n = in.n.n;
    auto L = detail::make_side(in.ql, in.n, in.gamma);
    auto R = detail::make_side(in.qr, in.n, in.gamma);
    auto qh = (1.0 / (sr - sl)) * (sr * R.q - sl * L.q + L.f - R.f);
    hllc_fan fan;
    fan.sl = sl;
    fan.sr = sr;
    if (!(qh[0] > 0.0)) return fan;
    vec3 bh = magnetic(qh);
    vec3 uh{qh[1] / qh[0], qh[2] / qh[0], qh[3] / qh[0]};
    double sm = dot(uh, n);
    double bhn = dot(bh, n);
    double ubh = dot(uh, bh);
    fan.sm = sm;
    double floor = degeneracy_tol * (sr - sl);
    if (!(sm - sl > floor) || !(sr - sm > floor)) return fan;

    auto star = [&](detail::side const& s, double sa) -> conserved {
        double k = s.rho * (sa - s.un);
        double rho = k / (sa - sm);
        double pt = s.pt + k * (sm - s.un) + bhn * bhn - s.bn * s.bn;
        vec3 mom = (1.0 / (sa - sm)) * ((sa - s.un) * (s.rho * s.u) + (pt - s.pt) * n + s.bn * s.b - bhn * bh);
        double e = (s.e * (sa - s.un) + pt * sm - s.pt * s.un + s.bn * dot(s.b, s.u) - bhn * ubh) / (sa - sm);
        return detail::pack(rho, mom, e, bh);
    };
    fan.ql_star = star(L, sl);
    fan.qr_star = star(R, sr);
    fan.valid = fan.ql_star[0] > 0.0 && fan.qr_star[0] > 0.0;
    return fan;
}

inline auto hllc(input const& in, double sl, double sr) -> state8
{
    if (!(sl < sr)) throw std::invalid_argument("hllc: requires sL < sR");
    if (sl >= 0.0) return physical_flux(in.ql, in.n, in.gamma);
    if (sr <= 0.0) return physical_flux(in.qr, in.n, in.gamma);
    auto fan = hllc_states(in, sl, sr);
    if (!fan.valid) return hll(in, sl, sr);
    if (fan.sm >= 0.0) return physical_flux(in.ql, in.n, in.gamma) + sl * (fan.ql_star - in.ql);
    return physical_flux(in.qr, in.n, in.gamma) + sr * (fan.qr_star - in.qr);
}

// ============================================================================
// HLLD
// ============================================================================

struct hlld_fan
{
    double sl = 0, sl_star = 0, sm = 0, sr_star = 0, sr = 0;
    conserved ql_star, ql_2, qr_2, qr_star;
    double pt_star = 0.0;
    double bn = 0.0; // B_HLL·n
    bool valid = false;
};

/**
 * Four intermediate states for arbitrary unit normals and unequal normal
 * fields. `valid` is false when the waves coalesce or the fan is not
 * ordered; hlld() then degrades to HLLC.
 */
inline auto hlld_states(input const& in, double sl, double sr) -> hlld_fan
{
    if (!(sl < sr)) throw std::invalid_argument("hlld: requires sL < sR");
    auto const& n = in.n.n;
    auto L = detail::make_side(in.ql, in.n, in.gamma);
    auto R = detail::make_side(in.qr, in.n, in.gamma);
    auto qh = (1.0 / (sr - sl)) * (sr * R.q - sl * L.q + L.f - R.f);

    hlld_fan fan;
    fan.sl = sl;
    fan.sr = sr;
    if (!(qh[0] > 0.0)) return fan;
    double sm = (qh[1] * n[0] + qh[2] * n[1] + qh[3] * n[2]) / qh[0];
    double bhn = qh[5] * n[0] + qh[6] * n[1] + qh[7] * n[2];
    fan.sm = sm;
    fan.bn = bhn;
    double width = sr - sl;
    if (!(sm - sl > degeneracy_tol * width) || !(sr - sm > degeneracy_tol * width)) return fan;

    struct outer
    {
        conserved q;
        vec3 u, b;
        double rho, s_star;
        bool ok;
    };
    auto star = [&](detail::side const& s, double sa, double dir) -> outer {
        outer o{};
        double k = s.rho * (sa - s.un);
        double d = k * (sa - sm) - bhn * bhn;
        if (std::abs(d) < degeneracy_tol * std::max(1.0, bhn * bhn)) return o;
        double rho = k / (sa - sm);
        double pt = s.pt + k * (sm - s.un) + bhn * bhn - s.bn * s.bn;
        // The jump conditions for u and B are solved in the tangential plane
        // only; the normal parts are S_M and B_HLL·n by assumption. With
        // B_L·n != B_R·n the full 3-vector solution would violate both.
        vec3 ut = s.u - s.un * n, bt = s.b - s.bn * n;
        vec3 u = (1.0 / d) * ((s.bn * (sa - sm) - bhn * (sa - s.un)) * bt + (k * (sa - sm) - bhn * s.bn) * ut) + sm * n;
        vec3 b = (1.0 / d) * ((k * (sa - s.un) - bhn * s.bn) * bt + (k * (s.bn - bhn)) * ut) + bhn * n;
        double e = (s.e * (sa - s.un) + pt * sm - s.pt * s.un + s.bn * dot(s.b, s.u) - bhn * dot(b, u)) / (sa - sm);
        o.q = detail::pack(rho, rho * u, e, b);
        o.u = u;
        o.b = b;
        o.rho = rho;
        o.s_star = sm + dir * std::abs(bhn) / std::sqrt(rho);
        o.ok = rho > 0.0;
        fan.pt_star = pt;
        return o;
    };
    auto ol = star(L, sl, -1.0);
    auto orr = star(R, sr, +1.0);
    if (!ol.ok || !orr.ok) return fan;
    fan.sl_star = ol.s_star;
    fan.sr_star = orr.s_star;
    if (std::abs(ol.s_star - sl) < degeneracy_tol * width || std::abs(orr.s_star - sr) < degeneracy_tol * width)
        return fan;
    if (std::abs(ol.s_star - sm) < degeneracy_tol * width && std::abs(orr.s_star - sm) < degeneracy_tol * width)
        return fan;
    if (!(sl < ol.s_star && ol.s_star <= sm && sm <= orr.s_star && orr.s_star < sr)) return fan;

    double sg = detail::sign_of(bhn);
    double rl = std::sqrt(ol.rho), rr = std::sqrt(orr.rho);
    vec3 u2 = (1.0 / (rl + rr)) * (rl * ol.u + rr * orr.u + sg * (orr.b - ol.b));
    vec3 b2 = (1.0 / (rl + rr)) * (rr * ol.b + rl * orr.b + (sg * rl * rr) * (orr.u - ol.u));
    double ub2 = dot(u2, b2);
    double el = ol.q[cons::energy] - rl * (dot(ol.u, ol.b) - ub2) * sg;
    double er = orr.q[cons::energy] + rr * (dot(orr.u, orr.b) - ub2) * sg;

    fan.ql_star = ol.q;
    fan.qr_star = orr.q;
    fan.ql_2 = detail::pack(ol.rho, ol.rho * u2, el, b2);
    fan.qr_2 = detail::pack(orr.rho, orr.rho * u2, er, b2);
    fan.valid = true;
    return fan;
}

/**
 * Residual of the fan integral against the HLL average, in max norm
 * relative to the largest |S·q| or |F| entering it.
 */
inline auto hlld_consistency_residual(input const& in, hlld_fan const& f) -> double
{
    auto fl = physical_flux(in.ql, in.n, in.gamma);
    auto fr = physical_flux(in.qr, in.n, in.gamma);
    auto r = (f.sr - f.sr_star) * f.qr_star + (f.sr_star - f.sm) * f.qr_2 + (f.sm - f.sl_star) * f.ql_2 +
             (f.sl_star - f.sl) * f.ql_star - f.sr * in.qr + f.sl * in.ql + fr - fl;
    double scale = std::max({max_abs(f.sr * in.qr), max_abs(f.sl * in.ql), max_abs(fl), max_abs(fr), 1e-300});
    return max_abs(r) / scale;
}

inline auto hllc_consistency_residual(input const& in, hllc_fan const& f) -> double
{
    auto qh = hll_state(in, f.sl, f.sr);
    auto r = (f.sm - f.sl) * f.ql_star + (f.sr - f.sm) * f.qr_star - (f.sr - f.sl) * qh;
    double scale = std::max({max_abs((f.sr - f.sl) * qh), max_abs(f.sl * in.ql), max_abs(f.sr * in.qr), 1e-300});
    return max_abs(r) / scale;
}

inline auto hlld(input const& in, double sl, double sr) -> state8
{
    if (!(sl < sr)) throw std::invalid_argument("hlld: requires sL < sR");
    auto fl = physical_flux(in.ql, in.n, in.gamma);
    if (sl >= 0.0) return fl;
    auto fr = physical_flux(in.qr, in.n, in.gamma);
    if (sr <= 0.0) return fr;
    auto f = hlld_states(in, sl, sr);
    if (!f.valid) return hllc(in, sl, sr);
    if (f.sm >= 0.0) {
        auto fls = fl + sl * (f.ql_star - in.ql);
        if (f.sl_star >= 0.0) return fls;
        return fls + f.sl_star * (f.ql_2 - f.ql_star);
    }
    auto frs = fr + sr * (f.qr_star - in.qr);
    if (f.sr_star <= 0.0) return frs;
    return frs + f.sr_star * (f.qr_2 - f.qr_star);
}

// ============================================================================
// Dispatch
// ============================================================================

/**
 * Unit-normal interface flux. `alpha_global` is used only by the global
 * Lax-Friedrichs solver. Inadmissible inputs (p < 0 makes the fast speed
 * NaN) yield an all-NaN flux, which the integrator reports as non-finite.
 */
inline auto solve(solver kind, input const& in, double alpha_global = 0.0) -> state8
{
    switch (kind) {
    case solver::lf: return lax_friedrichs(in, alpha_global);
    case solver::llf: return lax_friedrichs(in, local_alpha(in));
    default: break;
    }
    auto [sl, sr] = estimate_outer_speeds(in);
    if (!std::isfinite(sl) || !std::isfinite(sr)) {
        state8 f;
        f.v.fill(std::numeric_limits<double>::quiet_NaN());
        return f;
    }
    switch (kind) {
    case solver::hll: return hll(in, sl, sr);
    case solver::hllc: return hllc(in, sl, sr);
    default: return hlld(in, sl, sr);
    }
}

} // namespace afmhd::riemann
