#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace afmhd {

// ============================================================================
// Small fixed-size algebra
// ============================================================================

using vec3 = std::array<double, 3>;

inline auto dot(vec3 const& a, vec3 const& b) -> double
{
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline auto norm(vec3 const& a) -> double
{
    return std::sqrt(dot(a, a));
}

inline auto operator+(vec3 a, vec3 const& b) -> vec3
{
    for (int k = 0; k < 3; ++k) a[k] += b[k];
    return a;
}

inline auto operator-(vec3 a, vec3 const& b) -> vec3
{
    for (int k = 0; k < 3; ++k) a[k] -= b[k];
    return a;
}

inline auto operator*(double s, vec3 a) -> vec3
{
    for (auto& x : a) x *= s;
    return a;
}

/**
 * An 8-component vector of the MHD system. Used for conserved states,
 * primitive states, fluxes and characteristic variables alike; the
 * index constants in `cons` and `prim` name the slots.
 */
struct state8
{
    std::array<double, 8> v{};

    constexpr auto operator[](int k) -> double& { return v[k]; }
    constexpr auto operator[](int k) const -> double const& { return v[k]; }

    friend auto operator+(state8 a, state8 const& b) -> state8
    {
        for (int k = 0; k < 8; ++k) a.v[k] += b.v[k];
        return a;
    }
    friend auto operator-(state8 a, state8 const& b) -> state8
    {
        for (int k = 0; k < 8; ++k) a.v[k] -= b.v[k];
        return a;
    }
    friend auto operator*(double s, state8 a) -> state8
    {
        for (auto& x : a.v) x *= s;
        return a;
    }
    friend auto operator*(state8 a, double s) -> state8 { return s * a; }
    auto operator+=(state8 const& b) -> state8&
    {
        for (int k = 0; k < 8; ++k) v[k] += b.v[k];
        return *this;
    }
    auto operator-=(state8 const& b) -> state8&
    {
        for (int k = 0; k < 8; ++k) v[k] -= b.v[k];
        return *this;
    }
    friend auto operator==(state8 const&, state8 const&) -> bool = default;
};

using conserved = state8;
using primitive = state8;

namespace cons {
inline constexpr int rho = 0, mx = 1, my = 2, mz = 3, energy = 4, bx = 5, by = 6, bz = 7;
}
namespace prim {
inline constexpr int rho = 0, vx = 1, vy = 2, vz = 3, pre = 4, bx = 5, by = 6, bz = 7;
}

inline auto max_abs(state8 const& a) -> double
{
    double m = 0.0;
    for (double x : a.v) m = std::max(m, std::abs(x));
    return m;
}

/** Row-major 8x8 matrix, m[row][col]. */
using mat8 = std::array<std::array<double, 8>, 8>;

inline auto matmul(mat8 const& a, mat8 const& b) -> mat8
{
    mat8 c{};
    for (int i = 0; i < 8; ++i)
        for (int k = 0; k < 8; ++k)
            for (int j = 0; j < 8; ++j)
                c[i][j] += a[i][k] * b[k][j];
    return c;
}

inline auto matvec(mat8 const& a, state8 const& x) -> state8
{
    state8 y;
    for (int i = 0; i < 8; ++i) {
        double s = 0.0;
        for (int j = 0; j < 8; ++j) s += a[i][j] * x[j];
        y[i] = s;
    }
    return y;
}

// ============================================================================
// Equation of state and conversions
// ============================================================================

inline constexpr double default_gamma = 5.0 / 3.0;
inline constexpr double admissible_floor = 1e-14;

struct admissibility_error : std::domain_error
{
    using std::domain_error::domain_error;
};

inline auto velocity(primitive const& w) -> vec3 { return {w[1], w[2], w[3]}; }
inline auto magnetic(state8 const& s) -> vec3 { return {s[5], s[6], s[7]}; }

inline auto total_pressure(primitive const& w) -> double
{
    return w[prim::pre] + 0.5 * (w[5] * w[5] + w[6] * w[6] + w[7] * w[7]);
}

inline auto pressure(conserved const& q, double gamma) -> double
{
    double kin = 0.5 * (q[1] * q[1] + q[2] * q[2] + q[3] * q[3]) / q[0];
    double mag = 0.5 * (q[5] * q[5] + q[6] * q[6] + q[7] * q[7]);
    return (gamma - 1.0) * (q[cons::energy] - kin - mag);
}

/** Unchecked conversion; the caller guarantees rho > 0. */
inline auto to_conserved(primitive const& w, double gamma) -> conserved
{
    double r = w[0];
    double u2 = w[1] * w[1] + w[2] * w[2] + w[3] * w[3];
    double b2 = w[5] * w[5] + w[6] * w[6] + w[7] * w[7];
    return {r, r * w[1], r * w[2], r * w[3],
            w[4] / (gamma - 1.0) + 0.5 * r * u2 + 0.5 * b2,
            w[5], w[6], w[7]};
}

/** Unchecked conversion; the pressure slot may come out non-positive. */
inline auto to_primitive(conserved const& q, double gamma) -> primitive
{
    double r = q[0];
    return {r, q[1] / r, q[2] / r, q[3] / r, pressure(q, gamma), q[5], q[6], q[7]};
}

inline auto is_admissible(primitive const& w) -> bool
{
    return w[prim::rho] > admissible_floor && w[prim::pre] > admissible_floor;
}

inline auto is_admissible(conserved const& q, double gamma) -> bool
{
    return q[0] > admissible_floor && pressure(q, gamma) > admissible_floor;
}

inline auto primitive_to_conserved(primitive const& w, double gamma = default_gamma) -> conserved
{
    if (!(w[prim::rho] > admissible_floor)) throw admissibility_error("primitive_to_conserved: density not positive");
    if (!(w[prim::pre] > admissible_floor)) throw admissibility_error("primitive_to_conserved: pressure not positive");
    return to_conserved(w, gamma);
}

/**
 * Density must be positive. A non-positive pressure is returned as is;
 * use is_admissible on the result to detect it.
 */
inline auto conserved_to_primitive(conserved const& q, double gamma = default_gamma) -> primitive
{
    if (!(q[cons::rho] > admissible_floor)) throw admissibility_error("conserved_to_primitive: density not positive");
    return to_primitive(q, gamma);
}

// ============================================================================
// Directions
// ============================================================================

/** Orthonormal frame (n, t1, t2) with n in the x-y plane and t2 = z. */
struct unit_normal
{
    vec3 n{1.0, 0.0, 0.0};
    vec3 t1{0.0, 1.0, 0.0};
    vec3 t2{0.0, 0.0, 1.0};

    static auto from(double nx, double ny) -> unit_normal
    {
        double len = std::hypot(nx, ny);
        if (!(len > 0.0)) throw std::invalid_argument("unit_normal: zero-length direction");
        nx /= len;
        ny /= len;
        return {{nx, ny, 0.0}, {-ny, nx, 0.0}, {0.0, 0.0, 1.0}};
    }
};

// ============================================================================
// Fluxes
// ============================================================================

/**
 * Flux of the conserved variables through a surface with (not necessarily
 * unit) normal m. Linear in m. Templated on the scalar type so that
 * complex-step differentiation can be applied in tests.
 */
template <class T>
auto flux_along(std::array<T, 8> const& q, vec3 const& m, double gamma) -> std::array<T, 8>
{
    T r = q[0];
    T u = q[1] / r, v = q[2] / r, w = q[3] / r;
    T bx = q[5], by = q[6], bz = q[7];
    T b2 = bx * bx + by * by + bz * bz;
    T p = (gamma - 1.0) * (q[4] - 0.5 * r * (u * u + v * v + w * w) - 0.5 * b2);
    T pt = p + 0.5 * b2;
    T un = u * m[0] + v * m[1] + w * m[2];
    T bn = bx * m[0] + by * m[1] + bz * m[2];
    T ub = u * bx + v * by + w * bz;
    return {r * un,
            q[1] * un + pt * m[0] - bx * bn,
            q[2] * un + pt * m[1] - by * bn,
            q[3] * un + pt * m[2] - bz * bn,
            (q[4] + pt) * un - ub * bn,
            bx * un - u * bn,
            by * un - v * bn,
            bz * un - w * bn};
}

inline auto flux_along(conserved const& q, vec3 const& m, double gamma) -> state8
{
    return {flux_along<double>(q.v, m, gamma)};
}

/** F(q)·n for a unit normal. */
inline auto physical_flux(conserved const& q, unit_normal const& n, double gamma = default_gamma) -> state8
{
    return flux_along(q, n.n, gamma);
}

// ============================================================================
// Wave speeds
// ============================================================================

struct wave_speeds_t
{
    double a = 0.0;
    double c_a = 0.0;
    double c_f = 0.0;
    double c_s = 0.0;
};

namespace detail {

struct speed_squares
{
    double a2, bx2, bt2, cf2, cs2, disc;
};

/**
 * Squared speeds with the cancellation-free forms
 *   c_f² − c_s² = sqrt((a² − b_n²)² + b_t²(2a² + 2b_n² + b_t²)),  c_s² = a² b_n² / c_f².
 * Non-positive pressure is treated as a = 0 so that ghost states stay finite.
 */
inline auto squares(double rho, double p, double bn, double bt_sq, double gamma) -> speed_squares
{
    double a2 = std::max(gamma * p / rho, 0.0);
    double bx2 = bn * bn / rho;
    double bt2 = bt_sq / rho;
    double disc = std::sqrt((a2 - bx2) * (a2 - bx2) + bt2 * (2.0 * a2 + 2.0 * bx2 + bt2));
    double cf2 = 0.5 * (a2 + bx2 + bt2 + disc);
    double cs2 = cf2 > 0.0 ? a2 * bx2 / cf2 : 0.0;
    return {a2, bx2, bt2, cf2, cs2, disc};
}

} // namespace detail

inline auto wave_speeds(primitive const& w, unit_normal const& n, double gamma = default_gamma) -> wave_speeds_t
{
    vec3 b = magnetic(w);
    double bn = dot(b, n.n);
    double bt1 = dot(b, n.t1), bt2 = dot(b, n.t2);
    auto s = detail::squares(w[0], w[4], bn, bt1 * bt1 + bt2 * bt2, gamma);
    return {std::sqrt(s.a2), std::sqrt(s.bx2), std::sqrt(s.cf2), std::sqrt(s.cs2)};
}

/** Eigenvalues in non-decreasing order: u·n ∓ c_f, ∓ c_a, ∓ c_s, and u·n twice. */
inline auto eigenvalues(primitive const& w, unit_normal const& n, double gamma = default_gamma) -> state8
{
    auto c = wave_speeds(w, n, gamma);
    double un = dot(velocity(w), n.n);
    return {un - c.c_f, un - c.c_a, un - c.c_s, un, un, un + c.c_s, un + c.c_a, un + c.c_f};
}

/** Fast magnetosonic speed in direction m/|m|. */
inline auto fast_speed(primitive const& w, vec3 const& m, double gamma) -> double
{
    double len = norm(m);
    if (len == 0.0) return 0.0;
    vec3 b = magnetic(w);
    double bn = dot(b, m) / len;
    // |b × m|² / |m|², free of the cancellation in |b|² − b_n²
    double c0 = b[1] * m[2] - b[2] * m[1], c1 = b[2] * m[0] - b[0] * m[2], c2 = b[0] * m[1] - b[1] * m[0];
    double bt_sq = (c0 * c0 + c1 * c1 + c2 * c2) / (len * len);
    return std::sqrt(detail::squares(w[0], w[4], bn, bt_sq, gamma).cf2);
}

/** (|u·m̂| + c_f)·|m|: bounds |λ_k| for all eight eigenvalues along m. */
inline auto max_signal_speed(primitive const& w, vec3 const& m, double gamma = default_gamma) -> double
{
    double len = norm(m);
    if (len == 0.0) return 0.0;
    return std::abs(dot(velocity(w), m)) + len * fast_speed(w, m, gamma);
}

// ============================================================================
// Characteristic eigen-system
// ============================================================================

/**
 * Eight-wave eigenvectors with Roe–Balsara normalization. Columns of r are
 * right eigenvectors in conserved variables ordered as the eigenvalues;
 * l = r⁻¹. The fifth column is the divergence mode (unit jump in B·n).
 * The other seven have no B·n component and therefore are also
 * eigenvectors of the Jacobian of the conservative flux.
 */
struct eigen_matrices
{
    mat8 r{};
    mat8 l{};
};

inline auto eigen_system(primitive const& w, unit_normal const& nf, double gamma = default_gamma) -> eigen_matrices
{
    double const rho = w[0];
    double const p = w[4];
    vec3 const u = velocity(w);
    vec3 const b = magnetic(w);
    vec3 const& n = nf.n;
    vec3 const& t1 = nf.t1;
    vec3 const& t2 = nf.t2;

    double const bn = dot(b, n);
    double const bt1 = dot(b, t1);
    double const bt2 = dot(b, t2);
    double const bt = std::hypot(bt1, bt2);
    auto const s = detail::squares(rho, p, bn, bt * bt, gamma);
    double const a2 = std::max(s.a2, 1e-300);
    double const a = std::sqrt(a2);
    double const cf = std::sqrt(s.cf2);
    double const cs = std::sqrt(std::max(s.cs2, 0.0));
    double const sr = std::sqrt(rho);

    // a² − c_s² and c_f² − a², each taken from the branch free of cancellation;
    // their product is a² b_t².
    double amcs, cfma;
    if (a2 >= s.bx2) {
        amcs = a2 * 0.5 * (a2 - s.bx2 + s.bt2 + s.disc) / s.cf2;
        cfma = amcs > 0.0 ? a2 * s.bt2 / amcs : 0.0;
    } else {
        cfma = 0.5 * (s.bx2 - a2 + s.bt2 + s.disc);
        amcs = a2 * s.bt2 / cfma;
    }
    double af, as;
    if (amcs + cfma <= 1e-14 * s.cf2) {
        af = 1.0;
        as = 0.0;
    } else {
        af = std::sqrt(amcs / (amcs + cfma));
        as = std::sqrt(cfma / (amcs + cfma));
    }
    double by, bz;
    if (bt > 1e-12 * (sr * a + std::abs(bn))) {
        by = bt1 / bt;
        bz = bt2 / bt;
    } else {
        by = bz = 1.0 / std::sqrt(2.0);
    }
    double const sg = bn >= 0.0 ? 1.0 : -1.0;

    // Right vectors in frame primitive components (rho, u_n, u_t1, u_t2, p, B_n, B_t1, B_t2).
    std::array<std::array<double, 8>, 8> rf{};
    for (int side = -1; side <= 1; side += 2) {
        double const sd = side;
        int const kf = side < 0 ? 0 : 7;
        int const ka = side < 0 ? 1 : 6;
        int const ks = side < 0 ? 2 : 5;
        rf[kf] = {rho * af, sd * af * cf, -sd * as * cs * by * sg, -sd * as * cs * bz * sg,
                  rho * af * a2, 0.0, as * sr * a * by, as * sr * a * bz};
        rf[ka] = {0.0, 0.0, -bz, by, 0.0, 0.0, sd * sg * sr * bz, -sd * sg * sr * by};
        rf[ks] = {rho * as, sd * as * cs, sd * af * cf * by * sg, sd * af * cf * bz * sg,
                  rho * as * a2, 0.0, -af * sr * a * by, -af * sr * a * bz};
    }
    rf[3] = {1.0, 0, 0, 0, 0, 0, 0, 0};
    rf[4] = {0, 0, 0, 0, 0, 1.0, 0, 0};

    // Dual bases of the odd (velocity) and even (rho, p, B_t) blocks.
    double const nn = af * af * cf * cf + as * as * cs * cs;
    double const mm = af * af + as * as;
    double const ox_f = -af * cf / nn, oy_f = sg * as * cs / nn;
    double const ox_s = -as * cs / nn, oy_s = -sg * af * cf / nn;
    double const ep_f = af / (rho * a2 * mm), eb_f = as / (sr * a * mm);
    double const ep_s = as / (rho * a2 * mm), eb_s = -af / (sr * a * mm);

    std::array<std::array<double, 8>, 8> lf{};
    for (int side = -1; side <= 1; side += 2) {
        double const sd = side;
        int const kf = side < 0 ? 0 : 7;
        int const ka = side < 0 ? 1 : 6;
        int const ks = side < 0 ? 2 : 5;
        // Minus members pair the even dual with +odd dual; plus members with −odd.
        double const o = -sd;
        lf[kf] = {0.0, 0.5 * o * ox_f, 0.5 * o * oy_f * by, 0.5 * o * oy_f * bz,
                  0.5 * ep_f, 0.0, 0.5 * eb_f * by, 0.5 * eb_f * bz};
        lf[ks] = {0.0, 0.5 * o * ox_s, 0.5 * o * oy_s * by, 0.5 * o * oy_s * bz,
                  0.5 * ep_s, 0.0, 0.5 * eb_s * by, 0.5 * eb_s * bz};
        lf[ka] = {0.0, 0.0, -0.5 * bz, 0.5 * by, 0.0, 0.0,
                  0.5 * sd * sg * bz / sr, -0.5 * sd * sg * by / sr};
    }
    lf[3] = {1.0, 0, 0, 0, -1.0 / a2, 0, 0, 0};
    lf[4] = {0, 0, 0, 0, 0, 1.0, 0, 0};

    // Frame primitive -> global conserved.
    double const g1 = gamma - 1.0;
    double const u2 = dot(u, u);
    eigen_matrices em;
    for (int k = 0; k < 8; ++k) {
        auto const& c = rf[k];
        vec3 du = c[1] * n + c[2] * t1 + c[3] * t2;
        vec3 db = c[5] * n + c[6] * t1 + c[7] * t2;
        double col[8] = {c[0],
                         u[0] * c[0] + rho * du[0],
                         u[1] * c[0] + rho * du[1],
                         u[2] * c[0] + rho * du[2],
                         0.5 * u2 * c[0] + rho * dot(u, du) + c[4] / g1 + dot(b, db),
                         db[0], db[1], db[2]};
        for (int i = 0; i < 8; ++i) em.r[i][k] = col[i];

        auto const& e = lf[k];
        vec3 lu = e[1] * n + e[2] * t1 + e[3] * t2;
        vec3 lb = e[5] * n + e[6] * t1 + e[7] * t2;
        double lp = e[4] * g1;
        em.l[k] = {e[0] - dot(u, lu) / rho + 0.5 * lp * u2,
                   lu[0] / rho - lp * u[0],
                   lu[1] / rho - lp * u[1],
                   lu[2] / rho - lp * u[2],
                   lp,
                   lb[0] - lp * b[0],
                   lb[1] - lp * b[1],
                   lb[2] - lp * b[2]};
    }
    return em;
}

// ============================================================================
// Linearly degenerate discontinuities
// ============================================================================

enum class discontinuity_kind { contact, rotational, tangential };

struct discontinuity_params
{
    double density_ratio = 10.0;                // contact, tangential: rho_R / rho_L
    double rotation_angle = 1.5707963267948966; // rotational: turn of B_t about n
    int family = -1;                            // rotational: -1 for u·n − c_a, +1 for u·n + c_a
    vec3 velocity_jump{};                       // tangential: jump in u, normal part dropped
    vec3 field_jump{};                          // tangential: jump in B, normal part dropped; p absorbs |B|² change
    bool stationary = false;                    // shift u·n so that the discontinuity speed is 0
};

struct discontinuity
{
    primitive left;
    primitive right;
    double speed = 0.0;
};

/** Residual S(q_R − q_L) − (F(q_R) − F(q_L)) in max norm. */
inline auto rh_residual(primitive const& wl, primitive const& wr, unit_normal const& n, double speed,
                        double gamma = default_gamma) -> double
{
    auto ql = to_conserved(wl, gamma);
    auto qr = to_conserved(wr, gamma);
    auto res = speed * (qr - ql) - (physical_flux(qr, n, gamma) - physical_flux(ql, n, gamma));
    return max_abs(res);
}

/** None of these jumps depends on γ; the parameter keeps the call shape of the other state builders. */
inline auto make_discontinuity(discontinuity_kind kind, primitive const& base, unit_normal const& nf,
                               discontinuity_params const& prm = {}, [[maybe_unused]] double gamma = default_gamma)
    -> discontinuity
{
    if (!is_admissible(base)) throw admissibility_error("make_discontinuity: base state not admissible");
    vec3 const& n = nf.n;
    vec3 u = velocity(base);
    vec3 b = magnetic(base);
    double bn = dot(b, n);
    double rho = base[0];

    auto with = [](primitive w, vec3 const& uu, vec3 const& bb) {
        w[1] = uu[0]; w[2] = uu[1]; w[3] = uu[2];
        w[5] = bb[0]; w[6] = bb[1]; w[7] = bb[2];
        return w;
    };
    auto shift = [&](double du_n) { u = u + du_n * n; };

    discontinuity d;
    switch (kind) {
    case discontinuity_kind::contact: {
        if (std::abs(bn) <= admissible_floor) throw std::invalid_argument("contact requires B·n != 0");
        if (!(prm.density_ratio > 0.0)) throw std::invalid_argument("contact requires a positive density ratio");
        if (prm.stationary) shift(-dot(u, n));
        d.left = with(base, u, b);
        d.right = d.left;
        d.right[0] = rho * prm.density_ratio;
        d.speed = dot(u, n);
        break;
    }
    case discontinuity_kind::rotational: {
        if (std::abs(bn) <= admissible_floor) throw std::invalid_argument("rotational requires B·n != 0");
        if (prm.family != -1 && prm.family != 1) throw std::invalid_argument("rotational family must be -1 or +1");
        double ca = std::abs(bn) / std::sqrt(rho);
        if (prm.stationary) shift(-dot(u, n) - prm.family * ca);
        double b1 = dot(b, nf.t1), b2 = dot(b, nf.t2);
        double c = std::cos(prm.rotation_angle), s = std::sin(prm.rotation_angle);
        double r1 = c * b1 - s * b2, r2 = s * b1 + c * b2;
        vec3 br = bn * n + r1 * nf.t1 + r2 * nf.t2;
        double sg = bn >= 0.0 ? 1.0 : -1.0;
        // rho (S − u·n)[u_t] = −B_n [B_t] with S − u·n = family·c_a.
        vec3 ur = u - (double(prm.family) * sg / std::sqrt(rho)) * (br - b);
        d.left = with(base, u, b);
        d.right = with(base, ur, br);
        d.speed = dot(u, n) + prm.family * ca;
        break;
    }
    case discontinuity_kind::tangential: {
        if (std::abs(bn) > admissible_floor) throw std::invalid_argument("tangential requires B·n == 0");
        if (!(prm.density_ratio > 0.0)) throw std::invalid_argument("tangential requires a positive density ratio");
        if (prm.stationary) shift(-dot(u, n));
        vec3 du = prm.velocity_jump - dot(prm.velocity_jump, n) * n;
        vec3 db = prm.field_jump - dot(prm.field_jump, n) * n;
        vec3 ur = u + du;
        vec3 br = b + db;
        double pr = base[4] + 0.5 * dot(b, b) - 0.5 * dot(br, br);
        if (!(pr > admissible_floor)) throw std::invalid_argument("tangential jump leaves non-positive pressure");
        d.left = with(base, u, b);
        d.right = with(base, ur, br);
        d.right[4] = pr;
        d.right[0] = rho * prm.density_ratio;
        d.speed = dot(u, n);
        break;
    }
    }
    return d;
}

} // namespace afmhd
