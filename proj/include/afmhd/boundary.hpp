#pragma once

#include "afmhd/field.hpp"
#include "afmhd/grid.hpp"
#include "afmhd/physics.hpp"
#include "afmhd/weno.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace afmhd::boundary {

// ============================================================================
// Edge conditions
// ============================================================================

enum class kind { periodic, inflow, outflow, reflective, pec, tangential };

/** How A is continued into ghost layers on non-periodic, non-wall edges. */
enum class potential_fill { weno, linear };

enum edge_id { xi_lo = 0, xi_hi = 1, eta_lo = 2, eta_hi = 3 };

struct edge_spec
{
    kind type = kind::outflow;
    primitive state{};                             // inflow
    potential_fill a_fill = potential_fill::weno;  // inflow, outflow
    double a0 = 0.0;                               // pec
    int shift = 0, rise = 1;                       // tangential: `shift` along the edge per `rise` layers inward

    static auto periodic() -> edge_spec { return {kind::periodic}; }
    static auto inflow(primitive const& w, potential_fill f = potential_fill::linear) -> edge_spec
    {
        return {kind::inflow, w, f};
    }
    static auto outflow(potential_fill f = potential_fill::weno) -> edge_spec { return {kind::outflow, {}, f}; }
    static auto reflective() -> edge_spec { return {kind::reflective}; }
    static auto pec(double a0) -> edge_spec { return {kind::pec, {}, potential_fill::weno, a0}; }
    static auto tangential(int shift, int rise) -> edge_spec
    {
        return {kind::tangential, {}, potential_fill::linear, 0.0, shift, rise};
    }
};

struct spec
{
    std::array<edge_spec, 4> edges{};
    double a_period_xi = 0.0;  // A(ξ + L) − A(ξ) on periodic ξ
    double a_period_eta = 0.0; // A(η + L) − A(η) on periodic η
    double gamma = default_gamma;
};

inline auto kind_name(kind k) -> std::string
{
    switch (k) {
    case kind::periodic: return "periodic";
    case kind::inflow: return "inflow";
    case kind::outflow: return "outflow";
    case kind::reflective: return "reflective";
    case kind::pec: return "pec";
    case kind::tangential: return "tangential";
    }
    return "?";
}

inline void validate(spec const& s, curvilinear_grid const& g)
{
    auto check = [](edge_spec const& lo, edge_spec const& hi, bool periodic, char const* dir) {
        bool plo = lo.type == kind::periodic, phi = hi.type == kind::periodic;
        if (plo != phi || plo != periodic)
            throw std::invalid_argument(std::string("boundary: periodic edges in ") + dir +
                                        " must come in pairs on a periodic grid direction");
        for (auto const* e : {&lo, &hi})
            if (e->type == kind::tangential && e->rise < 1)
                throw std::invalid_argument("boundary: tangential rise must be positive");
    };
    check(s.edges[xi_lo], s.edges[xi_hi], g.box.periodic_xi, "xi");
    if (!g.one_dimensional()) check(s.edges[eta_lo], s.edges[eta_hi], g.box.periodic_eta, "eta");
}

// ============================================================================
// Edge geometry
// ============================================================================

namespace detail {

constexpr int gh = curvilinear_grid::ghost;

/**
 * Index frame of one edge: d counts layers inward from the edge nodes
 * (d < 0 in ghosts) and t runs along the edge.
 */
struct edge_frame
{
    edge_id id;
    int nx, ny;

    auto xi_edge() const -> bool { return id == xi_lo || id == xi_hi; }
    /** +1 when d grows with the normal coordinate. */
    auto orient() const -> double { return (id == xi_lo || id == eta_lo) ? 1.0 : -1.0; }
    auto i_of(int d, int t) const -> int
    {
        switch (id) {
        case xi_lo: return d;
        case xi_hi: return nx - 1 - d;
        default: return t;
        }
    }
    auto j_of(int d, int t) const -> int
    {
        switch (id) {
        case eta_lo: return d;
        case eta_hi: return ny - 1 - d;
        default: return t;
        }
    }
    /** Tangential index range covered by this edge's fill. */
    auto t_begin() const -> int { return xi_edge() ? 0 : -gh; }
    auto t_end() const -> int { return xi_edge() ? ny : nx + gh; }
};

inline auto normal_metric(curvilinear_grid const& g, edge_frame const& e, int i, int j) -> metric_row const&
{
    return e.xi_edge() ? g.m_xi(i, j) : g.m_eta(i, j);
}
inline auto tangent_metric(curvilinear_grid const& g, edge_frame const& e, int i, int j) -> metric_row const&
{
    return e.xi_edge() ? g.m_eta(i, j) : g.m_xi(i, j);
}
inline auto normal_grad(curvilinear_grid const& g, edge_frame const& e, int i, int j) -> metric_row const&
{
    return e.xi_edge() ? g.grad_xi(i, j) : g.grad_eta(i, j);
}
inline auto tangent_grad(curvilinear_grid const& g, edge_frame const& e, int i, int j) -> metric_row const&
{
    return e.xi_edge() ? g.grad_eta(i, j) : g.grad_xi(i, j);
}

inline auto unit(metric_row const& m) -> std::array<double, 2>
{
    double len = std::hypot(m[0], m[1]);
    if (!(len > 0.0)) throw std::runtime_error("boundary: singular surface metric");
    return {m[0] / len, m[1] / len};
}

/** Centered difference along a line of samples, one-sided at open ends. */
inline auto d0(std::vector<double> const& f, std::size_t k, double h, bool wrap) -> double
{
    std::size_t n = f.size();
    if (wrap) return (f[(k + 1) % n] - f[(k + n - 1) % n]) / (2.0 * h);
    if (k == 0) return (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    if (k == n - 1) return (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return (f[k + 1] - f[k - 1]) / (2.0 * h);
}

/** Second-order difference of samples at(0), at(1), at(2) along one index line, one-sided when needed. */
inline auto line_diff(double f0, double f1, double f2) -> double { return (-3.0 * f0 + 4.0 * f1 - f2) / 2.0; }

/**
 * Ghost A on one edge. `linear` continues A linearly in (x, y): its gradient
 * at each edge node comes from index differences of A, x and y with the same
 * stencils, so any A linear in x, y is reproduced exactly on any mesh.
 * `weno` extrapolates along the grid line.
 */
inline void fill_potential(field_state& s, curvilinear_grid const& g, edge_frame const& e, potential_fill f)
{
    int const tb = e.t_begin(), te = e.t_end();
    if (f == potential_fill::weno) {
        double h = e.xi_edge() ? g.dxi : g.deta;
        for (int t = tb; t < te; ++t) {
            auto at = [&](int d) -> double& { return s.a(e.i_of(d, t), e.j_of(d, t)); };
            for (int k = 1; k <= gh; ++k) at(-k) = weno::weno_extrapolate(at(0), at(1), at(2), h, -double(k));
        }
        return;
    }
    bool const along_t = te - tb >= 3; // 1D grids have no tangential line
    std::vector<std::array<double, 2>> grad(std::size_t(te - tb));
    for (int t = tb; t < te; ++t) {
        auto node = [&](int d, int tt) { return std::array<int, 2>{e.i_of(d, tt), e.j_of(d, tt)}; };
        auto diff_n = [&](array2d<double> const& v) {
            auto a = node(0, t), b = node(1, t), c = node(2, t);
            return line_diff(v(a[0], a[1]), v(b[0], b[1]), v(c[0], c[1]));
        };
        auto diff_t = [&](array2d<double> const& v) {
            auto val = [&](int tt) {
                auto n = node(0, tt);
                return v(n[0], n[1]);
            };
            if (t == tb) return line_diff(val(t), val(t + 1), val(t + 2));
            if (t == te - 1) return -line_diff(val(t), val(t - 1), val(t - 2));
            return 0.5 * (val(t + 1) - val(t - 1));
        };
        double an = diff_n(s.a), xn = diff_n(g.x), yn = diff_n(g.y);
        std::array<double, 2> gr;
        if (along_t) {
            double at = diff_t(s.a), xt = diff_t(g.x), yt = diff_t(g.y);
            double det = xn * yt - yn * xt;
            gr = {(an * yt - at * yn) / det, (xn * at - xt * an) / det};
        } else {
            double len2 = xn * xn + yn * yn;
            gr = {an * xn / len2, an * yn / len2};
        }
        grad[std::size_t(t - tb)] = gr;
    }
    for (int t = tb; t < te; ++t) {
        int i0 = e.i_of(0, t), j0 = e.j_of(0, t);
        auto const& gr = grad[std::size_t(t - tb)];
        for (int k = 1; k <= gh; ++k) {
            int i = e.i_of(-k, t), j = e.j_of(-k, t);
            s.a(i, j) = s.a(i0, j0) + gr[0] * (g.x(i, j) - g.x(i0, j0)) + gr[1] * (g.y(i, j) - g.y(i0, j0));
        }
    }
}

} // namespace detail

// ============================================================================
// Edge fills
// ============================================================================

struct report
{
    long negative_ghost_pressure = 0;
};

inline void fill_periodic(field_state& s, curvilinear_grid const& g, spec const& sp, bool xi_dir)
{
    int const nx = g.nx, ny = g.ny;
    if (xi_dir) {
        for (int j = 0; j < ny; ++j)
            for (int k = 1; k <= detail::gh; ++k) {
                s.q(-k, j) = s.q(nx - k, j);
                s.a(-k, j) = s.a(nx - k, j) - sp.a_period_xi;
                s.q(nx - 1 + k, j) = s.q(k - 1, j);
                s.a(nx - 1 + k, j) = s.a(k - 1, j) + sp.a_period_xi;
            }
    } else {
        for (int i = -detail::gh; i < nx + detail::gh; ++i)
            for (int k = 1; k <= detail::gh; ++k) {
                s.q(i, -k) = s.q(i, ny - k);
                s.a(i, -k) = s.a(i, ny - k) - sp.a_period_eta;
                s.q(i, ny - 1 + k) = s.q(i, k - 1);
                s.a(i, ny - 1 + k) = s.a(i, k - 1) + sp.a_period_eta;
            }
    }
}

inline void fill_inflow(field_state& s, curvilinear_grid const& g, edge_id id, edge_spec const& es, double gamma)
{
    detail::edge_frame e{id, g.nx, g.ny};
    auto q = primitive_to_conserved(es.state, gamma);
    for (int t = e.t_begin(); t < e.t_end(); ++t)
        for (int k = 1; k <= detail::gh; ++k) s.q(e.i_of(-k, t), e.j_of(-k, t)) = q;
    detail::fill_potential(s, g, e, es.a_fill);
}

/** Zeroth-order copy of the edge node along the grid normal. */
inline void fill_outflow(field_state& s, curvilinear_grid const& g, edge_id id, edge_spec const& es)
{
    detail::edge_frame e{id, g.nx, g.ny};
    for (int t = e.t_begin(); t < e.t_end(); ++t) {
        auto q = s.q(e.i_of(0, t), e.j_of(0, t));
        for (int k = 1; k <= detail::gh; ++k) s.q(e.i_of(-k, t), e.j_of(-k, t)) = q;
    }
    detail::fill_potential(s, g, e, es.a_fill);
}

/**
 * Mirror images across the edge with the wall-normal components of u and B
 * negated. A is reflected oddly about its wall value so that its normal
 * derivative (the tangential field) is even and its tangential derivative
 * (the normal field) is odd, matching the field mirror.
 */
inline void fill_reflective(field_state& s, curvilinear_grid const& g, edge_id id, double gamma)
{
    detail::edge_frame e{id, g.nx, g.ny};
    for (int t = e.t_begin(); t < e.t_end(); ++t) {
        int iw = e.i_of(0, t), jw = e.j_of(0, t);
        auto n = detail::unit(detail::normal_grad(g, e, iw, jw));
        for (int k = 1; k <= detail::gh; ++k) {
            int ii = e.i_of(k, t), ji = e.j_of(k, t);
            auto w = to_primitive(s.q(ii, ji), gamma);
            double un = w[1] * n[0] + w[2] * n[1], bn = w[5] * n[0] + w[6] * n[1];
            w[1] -= 2.0 * un * n[0];
            w[2] -= 2.0 * un * n[1];
            w[5] -= 2.0 * bn * n[0];
            w[6] -= 2.0 * bn * n[1];
            s.q(e.i_of(-k, t), e.j_of(-k, t)) = to_conserved(w, gamma);
            s.a(e.i_of(-k, t), e.j_of(-k, t)) = 2.0 * s.a(iw, jw) - s.a(ii, ji);
        }
    }
}

/**
 * Zeroth-order copy along a fixed index-space direction: ghost layer m takes
 * the state found k = ⌈m/rise⌉ steps of (shift, rise) inward; A is
 * continued linearly along the same direction.
 */
inline void fill_tangential(field_state& s, curvilinear_grid const& g, edge_id id, edge_spec const& es)
{
    detail::edge_frame e{id, g.nx, g.ny};
    int const tmin = -detail::gh, tmax = (e.xi_edge() ? g.ny : g.nx) + detail::gh - 1;
    auto clamp_t = [&](int t) { return std::clamp(t, tmin, tmax); };
    for (int t = e.t_begin(); t < e.t_end(); ++t) {
        for (int m = 1; m <= detail::gh; ++m) {
            int k = (m + es.rise - 1) / es.rise;
            int d1 = -m + k * es.rise, t1 = clamp_t(t + k * es.shift);
            int d2 = -m + 2 * k * es.rise, t2 = clamp_t(t + 2 * k * es.shift);
            int gi = e.i_of(-m, t), gj = e.j_of(-m, t);
            s.q(gi, gj) = s.q(e.i_of(d1, t1), e.j_of(d1, t1));
            s.a(gi, gj) = 2.0 * s.a(e.i_of(d1, t1), e.j_of(d1, t1)) - s.a(e.i_of(d2, t2), e.j_of(d2, t2));
        }
    }
}

/**
 * Perfect-conductor wall. The edge nodes are projected to zero normal u and
 * B with A = A0; in each ghost layer ρ, u, the node-tangential B, B3 and A
 * are WENO-extrapolated, the normal flux a·B follows from the discrete
 * divergence relation and p_tot from the compatibility relation, both with
 * second-order centered stencils widened to reach the layer.
 */
inline auto fill_pec(field_state& s, curvilinear_grid const& g, edge_id id, edge_spec const& es, double gamma) -> long
{
    detail::edge_frame e{id, g.nx, g.ny};
    double const hn = e.xi_edge() ? g.dxi : g.deta;
    double const ht = e.xi_edge() ? g.deta : g.dxi;
    double const sg = e.orient();
    int const t0 = e.t_begin(), t1 = e.t_end();
    bool const wrap = e.xi_edge() ? (g.box.periodic_eta && !g.one_dimensional()) : g.box.periodic_xi;
    bool const wrap_ok = wrap && t0 == 0;
    std::size_t const nt = std::size_t(t1 - t0);

    // wall projection
    for (int t = t0; t < t1; ++t) {
        int i = e.i_of(0, t), j = e.j_of(0, t);
        auto n = detail::unit(detail::normal_grad(g, e, i, j));
        auto w = to_primitive(s.q(i, j), gamma);
        double un = w[1] * n[0] + w[2] * n[1], bn = w[5] * n[0] + w[6] * n[1];
        w[1] -= un * n[0];
        w[2] -= un * n[1];
        w[5] -= bn * n[0];
        w[6] -= bn * n[1];
        s.q(i, j) = to_conserved(w, gamma);
        s.a(i, j) = es.a0;
    }

    // tangential derivatives along the wall
    std::vector<double> pt(nt), atb(nt);
    std::array<std::vector<double>, 3> uc, bc;
    for (auto* v : {&uc[0], &uc[1], &uc[2], &bc[0], &bc[1], &bc[2]}) v->resize(nt);
    std::vector<primitive> wall(nt);
    for (int t = t0; t < t1; ++t) {
        std::size_t k = std::size_t(t - t0);
        int i = e.i_of(0, t), j = e.j_of(0, t);
        wall[k] = to_primitive(s.q(i, j), gamma);
        auto const& w = wall[k];
        pt[k] = total_pressure(w);
        auto const& mt = detail::tangent_metric(g, e, i, j);
        atb[k] = mt[0] * w[5] + mt[1] * w[6];
        for (int c = 0; c < 3; ++c) {
            uc[c][k] = w[1 + c];
            bc[c][k] = w[5 + c];
        }
    }

    long negative = 0;
    for (int t = t0; t < t1; ++t) {
        std::size_t k = std::size_t(t - t0);
        int iw = e.i_of(0, t), jw = e.j_of(0, t);
        auto const& w0 = wall[k];
        auto const& gn = detail::normal_grad(g, e, iw, jw);
        auto const& gt = detail::tangent_grad(g, e, iw, jw);
        auto n = detail::unit(gn);

        double div_t = detail::d0(atb, k, ht, wrap_ok);
        double dpt = detail::d0(pt, k, ht, wrap_ok);
        double ndu = n[0] * detail::d0(uc[0], k, ht, wrap_ok) + n[1] * detail::d0(uc[1], k, ht, wrap_ok);
        double ndb = n[0] * detail::d0(bc[0], k, ht, wrap_ok) + n[1] * detail::d0(bc[1], k, ht, wrap_ok);
        double u2 = gt[0] * w0[1] + gt[1] * w0[2];
        double b2 = gt[0] * w0[5] + gt[1] * w0[6];
        double rhs = -w0[0] * u2 * ndu + b2 * ndb;
        double cn = n[0] * gn[0] + n[1] * gn[1];
        double ct = n[0] * gt[0] + n[1] * gt[1];
        double dn_pt = (rhs - ct * dpt) / cn; // ∂r p_tot along the normal coordinate

        // primitive samples at d = 0, 1, 2 with node-local tangential field
        std::array<primitive, 3> ws;
        std::array<double, 3> bt;
        for (int d = 0; d < 3; ++d) {
            int i = e.i_of(d, t), j = e.j_of(d, t);
            ws[d] = to_primitive(s.q(i, j), gamma);
            auto nn = detail::unit(detail::normal_metric(g, e, i, j));
            bt[d] = -nn[1] * ws[d][5] + nn[0] * ws[d][6];
        }
        auto a_at = [&](int d) { return s.a(e.i_of(d, t), e.j_of(d, t)); };

        for (int m = 1; m <= detail::gh; ++m) {
            auto ex = [&](double q0, double q1, double q2) { return weno::weno_extrapolate(q0, q1, q2, hn, -double(m)); };
            int gi = e.i_of(-m, t), gj = e.j_of(-m, t);
            int ii = e.i_of(m, t), ij = e.j_of(m, t);
            primitive wg{};
            for (int c : {0, 1, 2, 3, 7}) wg[c] = ex(ws[0][c], ws[1][c], ws[2][c]);
            double btg = ex(bt[0], bt[1], bt[2]);

            auto wi = to_primitive(s.q(ii, ij), gamma);
            auto const& mi = detail::normal_metric(g, e, ii, ij);
            double ab_i = mi[0] * wi[5] + mi[1] * wi[6];
            double ab_g = ab_i + sg * 2.0 * m * hn * div_t;
            auto const& mg = detail::normal_metric(g, e, gi, gj);
            double len = std::hypot(mg[0], mg[1]);
            auto ng = detail::unit(mg);
            double bng = ab_g / len;
            wg[5] = bng * ng[0] - btg * ng[1];
            wg[6] = bng * ng[1] + btg * ng[0];

            double pt_g = total_pressure(wi) - sg * 2.0 * m * hn * dn_pt;
            wg[4] = pt_g - 0.5 * (wg[5] * wg[5] + wg[6] * wg[6] + wg[7] * wg[7]);
            negative += wg[4] < 0.0;
            s.q(gi, gj) = to_conserved(wg, gamma);
            s.a(gi, gj) = ex(a_at(0), a_at(1), a_at(2));
        }
    }
    return negative;
}

// ============================================================================
// Whole-grid fill
// ============================================================================

/**
 * Fill all ghost layers: ξ edges over interior rows first, then η edges
 * over the full ξ range including the ξ ghosts. One-dimensional grids copy
 * their single row into the η ghosts.
 */
inline auto fill(field_state& s, curvilinear_grid const& g, spec const& sp) -> report
{
    report r;
    auto do_edge = [&](edge_id id) {
        auto const& es = sp.edges[id];
        switch (es.type) {
        case kind::periodic: break;
        case kind::inflow: fill_inflow(s, g, id, es, sp.gamma); break;
        case kind::outflow: fill_outflow(s, g, id, es); break;
        case kind::reflective: fill_reflective(s, g, id, sp.gamma); break;
        case kind::pec: r.negative_ghost_pressure += fill_pec(s, g, id, es, sp.gamma); break;
        case kind::tangential: fill_tangential(s, g, id, es); break;
        }
    };
    if (sp.edges[xi_lo].type == kind::periodic) fill_periodic(s, g, sp, true);
    do_edge(xi_lo);
    do_edge(xi_hi);
    if (g.one_dimensional()) {
        for (int i = -detail::gh; i < g.nx + detail::gh; ++i)
            for (int k = 1; k <= detail::gh; ++k) {
                s.q(i, -k) = s.q(i, k) = s.q(i, 0);
                s.a(i, -k) = s.a(i, k) = s.a(i, 0);
            }
        return r;
    }
    if (sp.edges[eta_lo].type == kind::periodic) fill_periodic(s, g, sp, false);
    do_edge(eta_lo);
    do_edge(eta_hi);
    return r;
}

} // namespace afmhd::boundary
