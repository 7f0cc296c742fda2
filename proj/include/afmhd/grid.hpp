#pragma once

#include "afmhd/physics.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <functional>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace afmhd {

// ============================================================================
// Ghosted 2D storage
// ============================================================================

/**
 * Node array with `g` ghost layers on every side. Valid indices are
 * i in [-g, nx + g) and j in [-g, ny + g); storage is row-major with i
 * fastest.
 */
template <class T>
class array2d
{
public:
    array2d() = default;
    array2d(int nx, int ny, int g, T const& fill = T{})
        : nx_(nx), ny_(ny), g_(g), stride_(nx + 2 * g), data_(std::size_t(nx + 2 * g) * std::size_t(ny + 2 * g), fill)
    {
    }

    auto operator()(int i, int j) -> T& { return data_[index(i, j)]; }
    auto operator()(int i, int j) const -> T const& { return data_[index(i, j)]; }

    auto nx() const -> int { return nx_; }
    auto ny() const -> int { return ny_; }
    auto ghost() const -> int { return g_; }
    auto data() -> std::vector<T>& { return data_; }
    auto data() const -> std::vector<T> const& { return data_; }

private:
    auto index(int i, int j) const -> std::size_t
    {
        return std::size_t(j + g_) * std::size_t(stride_) + std::size_t(i + g_);
    }
    int nx_ = 0, ny_ = 0, g_ = 0, stride_ = 0;
    std::vector<T> data_;
};

// ============================================================================
// Mappings
// ============================================================================

struct domain_box
{
    double xi0 = 0.0, xi1 = 1.0;
    double eta0 = 0.0, eta1 = 1.0;
    bool periodic_xi = false;
    bool periodic_eta = false;
};

/** (∂ξx, ∂ηx, ∂ξy, ∂ηy) */
using map_jacobian = std::array<double, 4>;

struct mapping
{
    std::string kind = "identity";
    std::function<std::array<double, 2>(double, double)> map;
    std::function<map_jacobian(double, double)> jacobian;           // optional
    std::function<std::array<double, 2>(int, int)> node_offset;     // optional, per interior node
};

namespace mappings {

inline auto identity() -> mapping
{
    return {"identity",
            [](double xi, double eta) { return std::array<double, 2>{xi, eta}; },
            [](double, double) { return map_jacobian{1.0, 0.0, 0.0, 1.0}; },
            {}};
}

/** x = ξ + ax·sin(kx·η), y = η + ay·sin(ky·ξ). */
inline auto perturbed_sine(double ax, double kx, double ay, double ky) -> mapping
{
    return {"perturbed-sine",
            [=](double xi, double eta) {
                return std::array<double, 2>{xi + ax * std::sin(kx * eta), eta + ay * std::sin(ky * xi)};
            },
            [=](double xi, double eta) {
                return map_jacobian{1.0, ax * kx * std::cos(kx * eta), ay * ky * std::cos(ky * xi), 1.0};
            },
            {}};
}

/** Rigid rotation by angle theta about the origin. */
inline auto rotation(double theta) -> mapping
{
    double c = std::cos(theta), s = std::sin(theta);
    return {"rotation",
            [=](double xi, double eta) { return std::array<double, 2>{c * xi - s * eta, s * xi + c * eta}; },
            [=](double, double) { return map_jacobian{c, -s, s, c}; },
            {}};
}

/** Piecewise-linear clustering: x = 5/9 ξ for |ξ| ≤ 0.2, else sign(ξ)(1/9 + 10/9 (|ξ| − 0.2)); y = η. */
inline auto clustered_1d() -> mapping
{
    auto f = [](double xi) {
        double a = std::abs(xi);
        return a <= 0.2 ? 5.0 / 9.0 * xi : std::copysign(1.0 / 9.0 + 10.0 / 9.0 * (a - 0.2), xi);
    };
    auto df = [](double xi) { return std::abs(xi) <= 0.2 ? 5.0 / 9.0 : 10.0 / 9.0; };
    return {"clustered-1d",
            [=](double xi, double eta) { return std::array<double, 2>{f(xi), eta}; },
            [=](double xi, double) { return map_jacobian{df(xi), 0.0, 0.0, 1.0}; },
            {}};
}

/** x = ξ − 0.5 + 0.1 cos(π(η − 0.5)) sin(π(ξ − 0.5)), y symmetric. */
inline auto rotor() -> mapping
{
    double const pi = M_PI;
    return {"rotor",
            [=](double xi, double eta) {
                return std::array<double, 2>{
                    xi - 0.5 + 0.1 * std::cos(pi * (eta - 0.5)) * std::sin(pi * (xi - 0.5)),
                    eta - 0.5 + 0.1 * std::cos(pi * (xi - 0.5)) * std::sin(pi * (eta - 0.5))};
            },
            [=](double xi, double eta) {
                double cx = std::cos(pi * (xi - 0.5)), sx = std::sin(pi * (xi - 0.5));
                double ce = std::cos(pi * (eta - 0.5)), se = std::sin(pi * (eta - 0.5));
                return map_jacobian{1.0 + 0.1 * pi * ce * cx, -0.1 * pi * se * sx,
                                    -0.1 * pi * sx * se, 1.0 + 0.1 * pi * cx * ce};
            },
            {}};
}

/** Circular sector: x = (3 − 2ξ)cos(π + (1 − 2η)π/4) + 3cos(π/4), y = (3 − 2ξ)sin(π + (1 − 2η)π/4) + 0.5. */
inline auto sector() -> mapping
{
    double const pi = M_PI;
    return {"sector",
            [=](double xi, double eta) {
                double r = 3.0 - 2.0 * xi, t = pi + (1.0 - 2.0 * eta) * pi / 4.0;
                return std::array<double, 2>{r * std::cos(t) + 3.0 * std::cos(pi / 4.0), r * std::sin(t) + 0.5};
            },
            [=](double xi, double eta) {
                double r = 3.0 - 2.0 * xi, t = pi + (1.0 - 2.0 * eta) * pi / 4.0;
                return map_jacobian{-2.0 * std::cos(t), -r * std::sin(t) * (-pi / 2.0),
                                    -2.0 * std::sin(t), r * std::cos(t) * (-pi / 2.0)};
            },
            {}};
}

/** Elliptic annulus around the bow-shock body: radii r1, r2 at ξ = 0 shrinking to r0 at ξ = 1. */
inline auto annulus(double r0 = 0.125, double r1 = 0.3, double r2 = 0.65, double theta = 5.0 * M_PI / 12.0) -> mapping
{
    double const pi = M_PI;
    return {"annulus",
            [=](double xi, double eta) {
                double t = pi + (1.0 - 2.0 * eta) * theta;
                return std::array<double, 2>{(r1 - (r1 - r0) * xi) * std::cos(t), (r2 - (r2 - r0) * xi) * std::sin(t)};
            },
            [=](double xi, double eta) {
                double t = pi + (1.0 - 2.0 * eta) * theta;
                return map_jacobian{-(r1 - r0) * std::cos(t), (r1 - (r1 - r0) * xi) * std::sin(t) * 2.0 * theta,
                                    -(r2 - r0) * std::sin(t), -(r2 - (r2 - r0) * xi) * std::cos(t) * 2.0 * theta};
            },
            {}};
}

/**
 * Uniform mesh with every interior node moved by up to `fraction` of the
 * spacing in each direction, drawn from a seeded generator. Offsets wrap
 * periodically. No analytic derivatives.
 */
inline auto randomized(int nx, int ny, double dxi, double deta, double fraction, std::uint64_t seed) -> mapping
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<> u(-fraction, fraction);
    auto offsets = std::make_shared<std::vector<std::array<double, 2>>>(std::size_t(nx) * std::size_t(ny));
    for (auto& o : *offsets) o = {u(rng) * dxi, u(rng) * deta};
    return {"randomized",
            [](double xi, double eta) { return std::array<double, 2>{xi, eta}; },
            {},
            [=](int i, int j) {
                int a = ((i % nx) + nx) % nx, b = ((j % ny) + ny) % ny;
                return (*offsets)[std::size_t(b) * std::size_t(nx) + std::size_t(a)];
            }};
}

} // namespace mappings

// ============================================================================
// Curvilinear grid
// ============================================================================

enum class metric_mode { analytic, discrete };

/** Scaled metric row (∂xr/J, ∂yr/J) at a node or half point. */
using metric_row = std::array<double, 2>;

struct curvilinear_grid
{
    static constexpr int ghost = 3;

    int nx = 0, ny = 0;
    double dxi = 1.0, deta = 1.0;
    domain_box box;
    std::string mapping_kind;
    metric_mode mode = metric_mode::discrete;

    array2d<double> x, y;         // node coordinates
    array2d<double> jac;          // J = det ∂(ξ,η)/∂(x,y)
    array2d<metric_row> grad_xi;  // (∂xξ, ∂yξ)
    array2d<metric_row> grad_eta; // (∂xη, ∂yη)
    array2d<metric_row> m_xi;     // (∂xξ, ∂yξ)/J = (∂ηy, −∂ηx)
    array2d<metric_row> m_eta;    // (∂xη, ∂yη)/J = (−∂ξy, ∂ξx)
    array2d<metric_row> half_xi;  // m_xi at (i+1/2, j), valid for i in [−1, nx)
    array2d<metric_row> half_eta; // m_eta at (i, j+1/2), valid for j in [−1, ny)

    /** One-dimensional runs have ny == 1 and no η fluxes. */
    auto one_dimensional() const -> bool { return ny == 1; }

    auto xi_at(int i) const -> double { return box.xi0 + i * dxi; }
    auto eta_at(int j) const -> double { return box.eta0 + j * deta; }

    /** Hex FNV-1a hash of interior node coordinates. */
    auto checksum() const -> std::string
    {
        std::uint64_t h = 1469598103934665603ull;
        auto feed = [&](double v) {
            unsigned char b[8];
            std::memcpy(b, &v, 8);
            for (unsigned char c : b) {
                h ^= c;
                h *= 1099511628211ull;
            }
        };
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                feed(x(i, j));
                feed(y(i, j));
            }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }
};

namespace detail {

inline auto d6(double const* v, std::ptrdiff_t s) -> double
{
    return (-v[-3 * s] + 9.0 * v[-2 * s] - 45.0 * v[-s] + 45.0 * v[s] - 9.0 * v[2 * s] + v[3 * s]) / 60.0;
}

inline auto half6(double a, double b, double c, double d, double e, double f) -> double
{
    return (3.0 * a - 25.0 * b + 150.0 * c + 150.0 * d - 25.0 * e + 3.0 * f) / 256.0;
}

} // namespace detail

/**
 * Node spacing: L/n in periodic directions, L/(n − 1) otherwise so that
 * both boundary nodes lie on the domain edges.
 */
inline auto build_grid(mapping const& map, int nx, int ny, domain_box const& box,
                       metric_mode mode = metric_mode::discrete) -> curvilinear_grid
{
    if (nx < 12) throw std::invalid_argument("build_grid: nx must be at least 12");
    if (ny < 12 && ny != 1) throw std::invalid_argument("build_grid: ny must be at least 12, or 1 for 1D");
    bool const one_d = ny == 1;
    constexpr int g = curvilinear_grid::ghost;
    constexpr int pad = 2 * g;

    curvilinear_grid gr;
    gr.nx = nx;
    gr.ny = ny;
    gr.box = box;
    gr.mapping_kind = map.kind;
    gr.mode = (mode == metric_mode::analytic && map.jacobian) ? metric_mode::analytic : metric_mode::discrete;
    gr.dxi = (box.xi1 - box.xi0) / (box.periodic_xi ? nx : nx - 1);
    gr.deta = one_d ? 1.0 : (box.eta1 - box.eta0) / (box.periodic_eta ? ny : ny - 1);

    // Coordinates on a wider halo so that sixth-order metrics reach the ghosts.
    array2d<double> px(nx, ny, pad), py(nx, ny, pad);
    for (int j = -pad; j < ny + pad; ++j) {
        for (int i = -pad; i < nx + pad; ++i) {
            double xi = gr.xi_at(i), eta = one_d ? box.eta0 : gr.eta_at(j);
            auto p = map.map(xi, eta);
            if (map.node_offset) {
                auto o = map.node_offset(i, j);
                p[0] += o[0];
                p[1] += one_d ? 0.0 : o[1];
            }
            px(i, j) = p[0];
            py(i, j) = p[1];
        }
    }

    gr.x = array2d<double>(nx, ny, g);
    gr.y = array2d<double>(nx, ny, g);
    gr.jac = array2d<double>(nx, ny, g);
    gr.grad_xi = array2d<metric_row>(nx, ny, g);
    gr.grad_eta = array2d<metric_row>(nx, ny, g);
    gr.m_xi = array2d<metric_row>(nx, ny, g);
    gr.m_eta = array2d<metric_row>(nx, ny, g);
    gr.half_xi = array2d<metric_row>(nx, ny, g);
    gr.half_eta = array2d<metric_row>(nx, ny, g);

    std::ptrdiff_t const sj = &px(0, 1) - &px(0, 0);
    for (int j = -g; j < ny + g; ++j) {
        for (int i = -g; i < nx + g; ++i) {
            gr.x(i, j) = px(i, j);
            gr.y(i, j) = py(i, j);
            double x_xi, x_eta, y_xi, y_eta;
            if (gr.mode == metric_mode::analytic) {
                auto jm = map.jacobian(gr.xi_at(i), one_d ? box.eta0 : gr.eta_at(j));
                x_xi = jm[0];
                x_eta = jm[1];
                y_xi = jm[2];
                y_eta = jm[3];
            } else {
                x_xi = detail::d6(&px(i, j), 1) / gr.dxi;
                y_xi = detail::d6(&py(i, j), 1) / gr.dxi;
                x_eta = one_d ? 0.0 : detail::d6(&px(i, j), sj) / gr.deta;
                y_eta = one_d ? 1.0 : detail::d6(&py(i, j), sj) / gr.deta;
            }
            if (one_d) {
                x_eta = 0.0;
                y_eta = 1.0;
                y_xi = 0.0;
            }
            double jinv = x_xi * y_eta - x_eta * y_xi;
            if (!(std::abs(jinv) > 0.0) || !std::isfinite(jinv))
                throw std::runtime_error("build_grid: singular Jacobian at node (" + std::to_string(i) + ", " +
                                         std::to_string(j) + ")");
            double jac = 1.0 / jinv;
            gr.jac(i, j) = jac;
            gr.m_xi(i, j) = {y_eta, -x_eta};
            gr.m_eta(i, j) = {-y_xi, x_xi};
            gr.grad_xi(i, j) = {jac * y_eta, -jac * x_eta};
            gr.grad_eta(i, j) = {-jac * y_xi, jac * x_xi};
        }
    }

    for (int j = -g; j < ny + g; ++j) {
        for (int i = -1; i < nx; ++i) {
            for (int c = 0; c < 2; ++c) {
                gr.half_xi(i, j)[c] = detail::half6(gr.m_xi(i - 2, j)[c], gr.m_xi(i - 1, j)[c], gr.m_xi(i, j)[c],
                                                    gr.m_xi(i + 1, j)[c], gr.m_xi(i + 2, j)[c], gr.m_xi(i + 3, j)[c]);
            }
        }
    }
    if (one_d) {
        for (int j = -g; j < ny + g; ++j)
            for (int i = -g; i < nx + g; ++i) gr.half_eta(i, j) = gr.m_eta(i, j);
    } else {
        for (int j = -1; j < ny; ++j) {
            for (int i = -g; i < nx + g; ++i) {
                for (int c = 0; c < 2; ++c) {
                    gr.half_eta(i, j)[c] =
                        detail::half6(gr.m_eta(i, j - 2)[c], gr.m_eta(i, j - 1)[c], gr.m_eta(i, j)[c],
                                      gr.m_eta(i, j + 1)[c], gr.m_eta(i, j + 2)[c], gr.m_eta(i, j + 3)[c]);
                }
            }
        }
    }
    return gr;
}

// ============================================================================
// Interface geometry
// ============================================================================

struct interface_geometry
{
    unit_normal normal;
    double scale = 1.0;
};

/** n = m/|m| and scale = |m| for a scaled metric row m = ∇r/J. */
inline auto interface_normal(metric_row const& m) -> interface_geometry
{
    double s = std::hypot(m[0], m[1]);
    if (!(s > 0.0)) throw std::invalid_argument("interface_normal: zero-length metric row");
    return {unit_normal::from(m[0], m[1]), s};
}

/** (1/J)(∂xr f + ∂yr g) from Cartesian fluxes f, g and the scaled metric row. */
inline auto transform_flux(state8 const& f, state8 const& g, metric_row const& m) -> state8
{
    return m[0] * f + m[1] * g;
}

} // namespace afmhd
