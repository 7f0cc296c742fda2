#pragma once

#include "afmhd/grid.hpp"
#include "afmhd/physics.hpp"

#include <functional>

namespace afmhd {

/** Conserved variables and the magnetic potential A on a ghosted node grid. */
struct field_state
{
    array2d<conserved> q;
    array2d<double> a;
    double time = 0.0;
    long step = 0;

    field_state() = default;
    field_state(int nx, int ny) : q(nx, ny, curvilinear_grid::ghost), a(nx, ny, curvilinear_grid::ghost, 0.0) {}

    auto nx() const -> int { return q.nx(); }
    auto ny() const -> int { return q.ny(); }
};

/** Visit every interior node (i, j). */
template <class F>
void for_each_interior(int nx, int ny, F&& f)
{
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) f(i, j);
}

/** Constant primitive state everywhere, ghosts included, with A zero. */
inline auto make_uniform_field(curvilinear_grid const& g, primitive const& w, double gamma = default_gamma)
    -> field_state
{
    field_state f(g.nx, g.ny);
    auto q = primitive_to_conserved(w, gamma);
    for (auto& v : f.q.data()) v = q;
    return f;
}

} // namespace afmhd
