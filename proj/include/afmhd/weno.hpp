#pragma once

#include "afmhd/physics.hpp"

#include <array>

namespace afmhd::weno {

inline constexpr double epsilon = 1e-6;
inline constexpr std::array<double, 3> linear_weights{5.0 / 16.0, 5.0 / 8.0, 1.0 / 16.0};

struct smoothness
{
    std::array<double, 3> beta{};
};

struct interpolation
{
    double value = 0.0;
    std::array<double, 3> beta{};
    std::array<double, 3> omega{};
};

/**
 * Fifth-order interpolation to x_{i+1/2} from the left-biased stencil
 * v = (v_{i-2}, v_{i-1}, v_i, v_{i+1}, v_{i+2}). With `linear` set the
 * nonlinear weights are replaced by the linear ones.
 */
inline auto interpolate_minus(double vm2, double vm1, double v0, double vp1, double vp2, bool linear = false)
    -> interpolation
{
    double c0 = 0.375 * v0 + 0.75 * vp1 - 0.125 * vp2;
    double c1 = -0.125 * vm1 + 0.75 * v0 + 0.375 * vp1;
    double c2 = 0.375 * vm2 - 1.25 * vm1 + 1.875 * v0;

    double d0 = v0 - 2.0 * vp1 + vp2, e0 = 3.0 * v0 - 4.0 * vp1 + vp2;
    double d1 = vm1 - 2.0 * v0 + vp1, e1 = vm1 - vp1;
    double d2 = vm2 - 2.0 * vm1 + v0, e2 = vm2 - 4.0 * vm1 + 3.0 * v0;
    interpolation r;
    r.beta = {13.0 / 12.0 * d0 * d0 + 0.25 * e0 * e0,
              13.0 / 12.0 * d1 * d1 + 0.25 * e1 * e1,
              13.0 / 12.0 * d2 * d2 + 0.25 * e2 * e2};
    if (linear) {
        r.omega = linear_weights;
    } else {
        double a[3];
        for (int k = 0; k < 3; ++k) {
            double t = r.beta[k] + epsilon;
            a[k] = linear_weights[k] / (t * t);
        }
        double s = a[0] + a[1] + a[2];
        r.omega = {a[0] / s, a[1] / s, a[2] / s};
    }
    r.value = r.omega[0] * c0 + r.omega[1] * c1 + r.omega[2] * c2;
    return r;
}

/** Stencil of six samples v_{i-2}..v_{i+3} around the interface i+1/2. */
using stencil6 = std::array<double, 6>;

inline auto interpolate_minus(stencil6 const& v, bool linear = false) -> interpolation
{
    return interpolate_minus(v[0], v[1], v[2], v[3], v[4], linear);
}

/** Mirror image of interpolate_minus: uses v_{i-1}..v_{i+3} reversed. */
inline auto interpolate_plus(stencil6 const& v, bool linear = false) -> interpolation
{
    return interpolate_minus(v[5], v[4], v[3], v[2], v[1], linear);
}

// ============================================================================
// Characteristic interpolation of a system
// ============================================================================

struct state_pair
{
    conserved minus;
    conserved plus;
    std::array<smoothness, 8> beta_minus{};
    std::array<smoothness, 8> beta_plus{};
    bool ok = true;
};

/**
 * q^∓ at i+1/2 from q_{i-2}..q_{i+3}, interpolating characteristic
 * variables of the eigen-system at the mean primitive state of q_i and
 * q_{i+1}. `ok` is false when the mean state or either result is not
 * admissible; the caller falls back to point values in that case.
 */
inline auto interpolate_state_pair(std::array<conserved, 6> const& q, unit_normal const& n, double gamma,
                                   bool linear = false) -> state_pair
{
    state_pair out;
    auto wl = to_primitive(q[2], gamma);
    auto wr = to_primitive(q[3], gamma);
    primitive mean = 0.5 * (wl + wr);
    if (!is_admissible(mean) || !(q[2][0] > 0.0) || !(q[3][0] > 0.0)) {
        out.ok = false;
        out.minus = q[2];
        out.plus = q[3];
        return out;
    }
    auto em = eigen_system(mean, n, gamma);

    // Deviations from q_i are projected so that constant data passes through
    // bit-exactly; the map is linear, so this equals projecting q itself.
    std::array<state8, 6> v;
    for (int j = 0; j < 6; ++j) v[j] = matvec(em.l, q[j] - q[2]);

    state8 vm, vp;
    for (int k = 0; k < 8; ++k) {
        stencil6 s{v[0][k], v[1][k], v[2][k], v[3][k], v[4][k], v[5][k]};
        auto m = interpolate_minus(s, linear);
        auto p = interpolate_plus(s, linear);
        vm[k] = m.value;
        vp[k] = p.value;
        out.beta_minus[k].beta = m.beta;
        out.beta_plus[k].beta = p.beta;
    }
    out.minus = q[2] + matvec(em.r, vm);
    out.plus = q[2] + matvec(em.r, vp);
    out.ok = is_admissible(out.minus, gamma) && is_admissible(out.plus, gamma);
    return out;
}

// ============================================================================
// Hamilton–Jacobi derivative reconstruction
// ============================================================================

/**
 * Classical fifth-order Jiang–Peng reconstruction φ(v1..v5) of a
 * derivative from five consecutive one-sided differences. For the left
 * derivative at i pass D+A_{i-3}..D+A_{i+1}; for the right derivative pass
 * D+A_{i+2}, D+A_{i+1}, D+A_i, D+A_{i-1}, D+A_{i-2}.
 */
inline auto hj_weno_derivative(double v1, double v2, double v3, double v4, double v5) -> double
{
    double p1 = v1 / 3.0 - 7.0 / 6.0 * v2 + 11.0 / 6.0 * v3;
    double p2 = -v2 / 6.0 + 5.0 / 6.0 * v3 + v4 / 3.0;
    double p3 = v3 / 3.0 + 5.0 / 6.0 * v4 - v5 / 6.0;

    double d1 = v1 - 2.0 * v2 + v3, e1 = v1 - 4.0 * v2 + 3.0 * v3;
    double d2 = v2 - 2.0 * v3 + v4, e2 = v2 - v4;
    double d3 = v3 - 2.0 * v4 + v5, e3 = 3.0 * v3 - 4.0 * v4 + v5;
    double s1 = 13.0 / 12.0 * d1 * d1 + 0.25 * e1 * e1;
    double s2 = 13.0 / 12.0 * d2 * d2 + 0.25 * e2 * e2;
    double s3 = 13.0 / 12.0 * d3 * d3 + 0.25 * e3 * e3;

    double a1 = 0.1 / ((s1 + epsilon) * (s1 + epsilon));
    double a2 = 0.6 / ((s2 + epsilon) * (s2 + epsilon));
    double a3 = 0.3 / ((s3 + epsilon) * (s3 + epsilon));
    return (a1 * p1 + a2 * p2 + a3 * p3) / (a1 + a2 + a3);
}

// ============================================================================
// Limited extrapolation to ghost points
// ============================================================================

/**
 * Extrapolate from q0 (boundary), q1, q2 (moving inward) to the point at
 * target_offset·dxi, measured from the boundary in the outward direction
 * as a negative multiple. Blends constant, linear and quadratic
 * extrapolants with weights (dxi², dxi, 1 − dxi − dxi²).
 */
inline auto weno_extrapolate(double q0, double q1, double q2, double dxi, double target_offset) -> double
{
    double x = target_offset * dxi;
    double p0 = q0;
    double p1 = q0 + (q1 - q0) / dxi * x;
    double p2 = q0 + (-3.0 * q0 + 4.0 * q1 - q2) / (2.0 * dxi) * x + (q0 - 2.0 * q1 + q2) / (2.0 * dxi * dxi) * x * x;

    double d[3] = {dxi * dxi, dxi, 1.0 - dxi - dxi * dxi};
    double c = q0 - 2.0 * q1 + q2, e = 2.0 * q0 - 3.0 * q1 + q2;
    double b[3] = {dxi * dxi, (q1 - q0) * (q1 - q0), 13.0 / 12.0 * c * c + e * e};
    double a[3];
    for (int k = 0; k < 3; ++k) a[k] = d[k] / ((b[k] + epsilon) * (b[k] + epsilon));
    return (a[0] * p0 + a[1] * p1 + a[2] * p2) / (a[0] + a[1] + a[2]);
}

} // namespace afmhd::weno
