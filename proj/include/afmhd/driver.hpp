#pragma once

#include "afmhd/boundary.hpp"
#include "afmhd/dump.hpp"
#include "afmhd/grid.hpp"
#include "afmhd/integrator.hpp"
#include "afmhd/problems.hpp"
#include "afmhd/riemann.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace afmhd::driver {

// ============================================================================
// Run configuration
// ============================================================================

/** Bad configuration text, unknown keys or values out of range. */
struct config_error : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

/** Environment variable naming the default output directory. */
inline constexpr char const* out_dir_env = "AFMHD_OUT_DIR";

struct run_config
{
    std::string problem;
    int nx = 0, ny = 0; // 0: problem default
    std::optional<riemann::solver> solver;
    std::optional<double> cfl, t_final;
    std::optional<bool> ct_on, pp_on, sigma_on;
    long max_steps = std::numeric_limits<long>::max();
    metric_mode metric = metric_mode::discrete;
    std::uint64_t seed = 1;
    double gamma = default_gamma;
    std::string out_dir; // empty: no dumps
    long dump_every = 0; // 0: first and last state only
    long log_every = 0;
    std::array<std::optional<std::string>, 4> edge_override; // "kind [args]" per edge
};

/**
 * key = value lines grouped under [section] headers; '#' starts a comment.
 * Keys come back as "section.key". Repeated keys are an error.
 */
inline auto parse_config(std::istream& in, std::string const& origin = "config") -> std::map<std::string, std::string>
{
    auto trim = [](std::string s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::map<std::string, std::string> out;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto where = origin + ":" + std::to_string(lineno);
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw config_error(where + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw config_error(where + ": empty section name");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw config_error(where + ": expected key = value");
        auto key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty()) throw config_error(where + ": empty key");
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        auto full = section.empty() ? key : section + "." + key;
        if (!out.emplace(full, value).second) throw config_error(where + ": duplicate key '" + full + "'");
    }
    return out;
}

namespace detail {

inline auto to_number(std::string const& key, std::string const& v) -> double
{
    try {
        std::size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (std::exception const&) {
        throw config_error("'" + key + "' expects a number, got '" + v + "'");
    }
}

inline auto to_integer(std::string const& key, std::string const& v) -> long
{
    double x = to_number(key, v);
    if (x != std::floor(x) || std::abs(x) > 9e15) throw config_error("'" + key + "' expects an integer, got '" + v + "'");
    return long(x);
}

inline auto to_bool(std::string const& key, std::string const& v) -> bool
{
    if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "off" || v == "no" || v == "0") return false;
    throw config_error("'" + key + "' expects true or false, got '" + v + "'");
}

} // namespace detail

inline auto parse_metric(std::string const& v) -> metric_mode
{
    if (v == "analytic") return metric_mode::analytic;
    if (v == "discrete") return metric_mode::discrete;
    throw config_error("unknown metric '" + v + "' (expected analytic or discrete)");
}

/** Overlay parsed key/values onto c. Unknown keys are rejected. */
inline void apply_config(run_config& c, std::map<std::string, std::string> const& kv)
{
    using namespace detail;
    static std::map<std::string, int> const edge_keys{
        {"boundary.xi_lo", boundary::xi_lo}, {"boundary.xi_hi", boundary::xi_hi},
        {"boundary.eta_lo", boundary::eta_lo}, {"boundary.eta_hi", boundary::eta_hi}};
    for (auto const& [k, v] : kv) {
        if (k == "run.problem") c.problem = v;
        else if (k == "run.tfinal") c.t_final = to_number(k, v);
        else if (k == "run.cfl") c.cfl = to_number(k, v);
        else if (k == "run.max_steps") c.max_steps = to_integer(k, v);
        else if (k == "run.seed") c.seed = std::uint64_t(to_integer(k, v));
        else if (k == "grid.nx") c.nx = int(to_integer(k, v));
        else if (k == "grid.ny") c.ny = int(to_integer(k, v));
        else if (k == "grid.metric") c.metric = parse_metric(v);
        else if (k == "solver.flux") {
            try {
                c.solver = riemann::parse_solver(v);
            } catch (std::invalid_argument const& e) {
                throw config_error(e.what());
            }
        }
        else if (k == "solver.ct") c.ct_on = to_bool(k, v);
        else if (k == "solver.pp") c.pp_on = to_bool(k, v);
        else if (k == "solver.sigma") c.sigma_on = to_bool(k, v);
        else if (k == "solver.gamma") c.gamma = to_number(k, v);
        else if (k == "output.dir") c.out_dir = v;
        else if (k == "output.dump_every") c.dump_every = to_integer(k, v);
        else if (k == "output.log_every") c.log_every = to_integer(k, v);
        else if (auto e = edge_keys.find(k); e != edge_keys.end()) c.edge_override[std::size_t(e->second)] = v;
        else throw config_error("unknown configuration key '" + k + "'");
    }
}

inline auto load_config_file(std::string const& path) -> std::map<std::string, std::string>
{
    std::ifstream in(path);
    if (!in) throw config_error("cannot read configuration file '" + path + "'");
    return parse_config(in, path);
}

/**
 * Edge condition from "periodic", "outflow", "outflow-weno", "reflective",
 * "pec A0" or "tangential SHIFT RISE". An inflow edge can only keep the
 * state the problem already prescribes there.
 */
inline auto parse_edge(std::string const& text, boundary::edge_spec const& current) -> boundary::edge_spec
{
    std::istringstream is(text);
    std::string kind;
    is >> kind;
    auto need = [&](auto& x) {
        if (!(is >> x)) throw config_error("boundary '" + text + "': missing argument");
    };
    boundary::edge_spec e;
    if (kind == "periodic") e = boundary::edge_spec::periodic();
    else if (kind == "outflow") e = boundary::edge_spec::outflow(boundary::potential_fill::linear);
    else if (kind == "outflow-weno") e = boundary::edge_spec::outflow(boundary::potential_fill::weno);
    else if (kind == "reflective") e = boundary::edge_spec::reflective();
    else if (kind == "pec") {
        double a0;
        need(a0);
        e = boundary::edge_spec::pec(a0);
    } else if (kind == "tangential") {
        int shift, rise;
        need(shift);
        need(rise);
        e = boundary::edge_spec::tangential(shift, rise);
    } else if (kind == "inflow") {
        if (current.type != boundary::kind::inflow) throw config_error("boundary '" + text + "': no inflow state on this edge");
        e = current;
    } else {
        throw config_error("unknown boundary kind '" + kind + "'");
    }
    std::string extra;
    if (is >> extra) throw config_error("boundary '" + text + "': unexpected '" + extra + "'");
    return e;
}

/** Everything needed to start a run, with problem defaults filled in. */
struct resolved_run
{
    problems::problem_def const* problem = nullptr;
    problems::problem_def def; // copy with edge overrides applied
    problems::setup_options setup;
    integrator::step_config step;
};

inline auto resolve(run_config const& c, problems::registry const& reg) -> resolved_run
{
    if (c.problem.empty()) throw config_error("no problem given");
    resolved_run r;
    try {
        r.problem = &problems::find_problem(reg, c.problem);
    } catch (std::invalid_argument const& e) {
        throw config_error(e.what());
    }
    r.def = *r.problem;
    auto const& d = r.def.defaults;
    for (std::size_t k = 0; k < 4; ++k)
        if (c.edge_override[k]) r.def.edges[k] = parse_edge(*c.edge_override[k], r.def.edges[k]);
    if (c.nx < 0 || c.ny < 0) throw config_error("grid sizes must be positive");
    r.setup = {c.nx, c.ny, c.seed, c.metric, c.gamma};
    if (!(c.gamma > 1.0)) throw config_error("gamma must exceed 1");
    auto& s = r.step;
    s.cfl = c.cfl.value_or(d.cfl);
    s.t_final = c.t_final.value_or(d.t_final);
    s.max_steps = c.max_steps;
    s.ct_on = c.ct_on.value_or(d.ct_on);
    s.pp_on = c.pp_on.value_or(d.pp_on);
    s.sigma_on = c.sigma_on.value_or(d.sigma_on);
    s.solver = c.solver.value_or(d.solver);
    s.gamma = c.gamma;
    try {
        s.validate();
    } catch (std::invalid_argument const& e) {
        throw config_error(e.what());
    }
    if (c.dump_every < 0 || c.log_every < 0) throw config_error("dump and log cadences must be >= 0");
    return r;
}

/** Configured directory, else $AFMHD_OUT_DIR, else empty (no dumps). */
inline auto output_dir(run_config const& c) -> std::string
{
    if (!c.out_dir.empty()) return c.out_dir;
    if (char const* e = std::getenv(out_dir_env)) return e;
    return {};
}

// ============================================================================
// Run
// ============================================================================

struct run_result
{
    integrator::run_summary summary;
    double mass_drift = 0.0;   // |Σρ/J − Σρ₀/J| / Σρ₀/J
    double energy_drift = 0.0; // same for E
    double wall_seconds = 0.0;
    std::vector<std::string> dumps;
    std::optional<std::string> nan_abort; // message when the run stopped on non-finite values
    curvilinear_grid grid;
    field_state field;        // final (or last good) state
    boundary::spec bc;
};

inline auto dump_path(std::string const& dir, std::string const& problem, long step) -> std::string
{
    char name[64];
    std::snprintf(name, sizeof name, "_%06ld.dump", step);
    return (std::filesystem::path(dir) / (problem + name)).string();
}

/**
 * Set up and integrate one problem. Dumps go to the output directory at
 * step 0, every dump_every steps and at the end; on a non-finite state the
 * last good state is dumped and nan_abort is set.
 */
inline auto run(run_config const& c, problems::registry const& reg, std::ostream* log = nullptr) -> run_result
{
    auto r = resolve(c, reg);
    auto t0 = std::chrono::steady_clock::now();
    auto ps = problems::setup(r.def, r.setup);
    run_result res;
    res.grid = std::move(ps.grid);
    res.field = std::move(ps.field);
    res.bc = ps.bc;
    auto const& g = res.grid;

    std::string dir = output_dir(c);
    if (!dir.empty()) std::filesystem::create_directories(dir);
    io::dump_meta meta{r.def.name, c.gamma, true};
    auto emit = [&](field_state const& s) {
        if (dir.empty()) return;
        field_state filled = s;
        boundary::fill(filled, g, res.bc);
        auto path = dump_path(dir, r.def.name, s.step);
        io::emit_dump(filled, g, meta, path);
        res.dumps.push_back(path);
    };

    auto m0 = integrator::total_conserved(res.field, g);
    emit(res.field);
    integrator::observer obs;
    obs.log_every = c.log_every;
    if (log) obs.on_log = [&](integrator::step_log const& l) { *log << integrator::format_log(l) << '\n'; };
    obs.on_step = [&](field_state const& s, integrator::step_report const&) {
        bool last = s.time >= r.step.t_final;
        if (c.dump_every > 0 && s.step % c.dump_every == 0 && !last) emit(s);
    };
    try {
        res.summary = integrator::integrate(res.field, g, res.bc, r.step, obs);
    } catch (integrator::nan_error const& e) {
        res.nan_abort = e.what();
    }
    // the integrator leaves the last good state in place when it throws
    emit(res.field);
    auto m1 = integrator::total_conserved(res.field, g);
    res.mass_drift = std::abs(m1[0] - m0[0]) / std::abs(m0[0]);
    res.energy_drift = std::abs(m1[4] - m0[4]) / std::abs(m0[4]);
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

inline auto format_summary(run_result const& r) -> std::string
{
    std::ostringstream os;
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "steps %ld  t %.6e  mass_drift %.3e  energy_drift %.3e  min_rho %.4e  min_p %.4e  limited %ld  "
                  "negative_ghost_p %ld  wall %.2fs",
                  r.summary.steps, r.field.time, r.mass_drift, r.energy_drift, r.summary.min_rho, r.summary.min_p,
                  r.summary.limited, r.summary.negative_ghost_pressure, r.wall_seconds);
    os << buf;
    if (r.nan_abort) os << "\naborted: " << *r.nan_abort;
    for (auto const& d : r.dumps) os << "\ndump " << d;
    return os.str();
}

// ============================================================================
// Convergence harness
// ============================================================================

struct solution_errors
{
    double u = 0.0, b = 0.0, a = 0.0; // max over nodes of the Euclidean error
};

inline auto errors_against(field_state const& s, curvilinear_grid const& g, problems::exact_solution const& ex,
                           double gamma) -> solution_errors
{
    solution_errors e;
    for_each_interior(g.nx, g.ny, [&](int i, int j) {
        double x = g.x(i, j), y = g.y(i, j);
        auto w = to_primitive(s.q(i, j), gamma);
        auto we = ex.w(s.time, x, y);
        e.u = std::max(e.u, std::sqrt(std::pow(w[1] - we[1], 2) + std::pow(w[2] - we[2], 2) + std::pow(w[3] - we[3], 2)));
        e.b = std::max(e.b, std::sqrt(std::pow(w[5] - we[5], 2) + std::pow(w[6] - we[6], 2) + std::pow(w[7] - we[7], 2)));
        e.a = std::max(e.a, std::abs(s.a(i, j) - ex.a(s.time, x, y)));
    });
    return e;
}

struct convergence_row
{
    int n = 0;
    solution_errors err;
    double order_u = std::numeric_limits<double>::quiet_NaN();
    double order_b = std::numeric_limits<double>::quiet_NaN();
    double order_a = std::numeric_limits<double>::quiet_NaN();
};

/**
 * Run the problem on n × n grids for each size and compare with its exact
 * solution at t_final. Orders are log2 of successive error ratios, so the
 * sizes should double.
 */
inline auto converge(run_config base, std::vector<int> const& sizes, problems::registry const& reg)
    -> std::vector<convergence_row>
{
    auto const& p = problems::find_problem(reg, base.problem);
    if (!p.exact) throw config_error("problem '" + p.name + "' has no exact solution");
    std::vector<convergence_row> rows;
    for (int n : sizes) {
        auto c = base;
        c.nx = c.ny = n;
        auto r = resolve(c, reg);
        auto ps = problems::setup(r.def, r.setup);
        integrator::integrate(ps.field, ps.grid, ps.bc, r.step);
        convergence_row row;
        row.n = n;
        row.err = errors_against(ps.field, ps.grid, *p.exact, c.gamma);
        if (!rows.empty()) {
            auto const& prev = rows.back();
            double ratio = std::log2(double(n) / prev.n);
            row.order_u = std::log2(prev.err.u / row.err.u) / ratio;
            row.order_b = std::log2(prev.err.b / row.err.b) / ratio;
            row.order_a = std::log2(prev.err.a / row.err.a) / ratio;
        }
        rows.push_back(row);
    }
    return rows;
}

inline auto format_table(std::vector<convergence_row> const& rows) -> std::string
{
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%8s  %12s %6s  %12s %6s  %12s %6s", "mesh", "err_u", "order", "err_B", "order",
                  "err_A", "order");
    os << buf << '\n';
    for (auto const& r : rows) {
        auto ord = [](double o) {
            char b[16];
            if (std::isnan(o)) return std::string("   ---");
            std::snprintf(b, sizeof b, "%6.2f", o);
            return std::string(b);
        };
        std::snprintf(buf, sizeof buf, "%4dx%-3d  %12.4e %s  %12.4e %s  %12.4e %s", r.n, r.n, r.err.u,
                      ord(r.order_u).c_str(), r.err.b, ord(r.order_b).c_str(), r.err.a, ord(r.order_a).c_str());
        os << buf << '\n';
    }
    return os.str();
}

// ============================================================================
// One-dimensional reference profiles
// ============================================================================

struct line_profile
{
    std::vector<double> x, rho;

    /** Linear interpolation; constant beyond the ends. */
    auto at(double xq) const -> double
    {
        if (xq <= x.front()) return rho.front();
        if (xq >= x.back()) return rho.back();
        auto it = std::upper_bound(x.begin(), x.end(), xq);
        std::size_t k = std::size_t(it - x.begin());
        double t = (xq - x[k - 1]) / (x[k] - x[k - 1]);
        return (1.0 - t) * rho[k - 1] + t * rho[k];
    }
};

/** Density along a 1D run, in node order. */
inline auto density_profile(field_state const& s, curvilinear_grid const& g) -> line_profile
{
    line_profile p;
    for (int i = 0; i < g.nx; ++i) {
        p.x.push_back(g.x(i, 0));
        p.rho.push_back(s.q(i, 0)[0]);
    }
    return p;
}

/** 1D Brio-Wu on a uniform mesh of n points at its default final time. */
inline auto brio_wu_profile(int n, riemann::solver solver, problems::registry const& reg,
                            std::string const& problem = "brio-wu") -> line_profile
{
    run_config c;
    c.problem = problem;
    c.nx = n;
    c.ny = 1;
    c.solver = solver;
    auto r = resolve(c, reg);
    auto ps = problems::setup(r.def, r.setup);
    integrator::integrate(ps.field, ps.grid, ps.bc, r.step);
    return density_profile(ps.field, ps.grid);
}

/** ∫|ρ − ρ_ref| dx by the trapezoid rule on the nodes of `p`. */
inline auto l1_error(line_profile const& p, line_profile const& ref) -> double
{
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < p.x.size(); ++k) {
        double e0 = std::abs(p.rho[k] - ref.at(p.x[k])), e1 = std::abs(p.rho[k + 1] - ref.at(p.x[k + 1]));
        s += 0.5 * (e0 + e1) * (p.x[k + 1] - p.x[k]);
    }
    return s;
}

// ============================================================================
// Free stream
// ============================================================================

/** Constant primitive state w everywhere with A = B1·y − B2·x, ghosts included. */
inline auto make_free_stream(curvilinear_grid const& g, primitive const& w, double gamma = default_gamma) -> field_state
{
    auto s = make_uniform_field(g, w, gamma);
    int const gh = curvilinear_grid::ghost;
    for (int j = -gh; j < g.ny + gh; ++j)
        for (int i = -gh; i < g.nx + gh; ++i) s.a(i, j) = w[prim::bx] * g.y(i, j) - w[prim::by] * g.x(i, j);
    return s;
}

/** The problem's periodic pairs, with the jumps of A across them, and every other edge held at w. */
inline auto free_stream_boundary(problems::problem_def const& p, curvilinear_grid const& g, primitive const& w,
                                 double gamma = default_gamma) -> boundary::spec
{
    boundary::spec s;
    s.gamma = gamma;
    for (std::size_t k = 0; k < 4; ++k)
        s.edges[k] = p.edges[k].type == boundary::kind::periodic ? boundary::edge_spec::periodic()
                                                                   : boundary::edge_spec::inflow(w);
    auto jump = [&](int i, int j) {
        return w[prim::bx] * (g.y(i, j) - g.y(0, 0)) - w[prim::by] * (g.x(i, j) - g.x(0, 0));
    };
    if (g.box.periodic_xi) s.a_period_xi = jump(g.nx, 0);
    if (g.box.periodic_eta && !g.one_dimensional()) s.a_period_eta = jump(0, g.ny);
    return s;
}

} // namespace afmhd::driver
