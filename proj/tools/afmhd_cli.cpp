// Command-line front end: run, converge, list-problems, inspect-dump.
//
// Exit codes: 0 success, 2 configuration error, 3 non-finite state, 1 anything else.

#include "afmhd/driver.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

using namespace afmhd;

namespace {

constexpr int exit_config = 2;
constexpr int exit_nan = 3;

/** Options shared by run and converge; only those given on the command line override. */
struct overrides
{
    std::string config_file, problem, flux, metric, out;
    int nx = 0, ny = 0;
    double cfl = 0, tfinal = 0, gamma = default_gamma;
    long dump_every = 0, log_every = 0, max_steps = 0;
    std::uint64_t seed = 1;
    bool no_ct = false, no_pp = false, no_sigma = false;
    std::vector<CLI::Option*> opts;

    void attach(CLI::App& app, bool outputs)
    {
        opts.push_back(app.add_option("--config", config_file, "configuration file ([section] key = value)"));
        opts.push_back(app.add_option("--problem", problem, "registered problem name"));
        opts.push_back(app.add_option("--nx", nx, "grid nodes along xi")->check(CLI::PositiveNumber));
        opts.push_back(app.add_option("--ny", ny, "grid nodes along eta (1 for 1D)")->check(CLI::PositiveNumber));
        opts.push_back(app.add_option("--flux", flux, "lf, llf, hll, hllc or hlld")
                           ->check(CLI::IsMember({"lf", "llf", "hll", "hllc", "hlld"})));
        opts.push_back(app.add_option("--cfl", cfl, "CFL number in (0, 1)"));
        opts.push_back(app.add_option("--tfinal", tfinal, "final time"));
        opts.push_back(app.add_option("--max-steps", max_steps, "stop after this many steps"));
        opts.push_back(app.add_option("--gamma", gamma, "ratio of specific heats"));
        opts.push_back(app.add_flag("--no-ct", no_ct, "disable constrained transport"));
        opts.push_back(app.add_flag("--no-pp", no_pp, "disable the positivity limiter"));
        opts.push_back(app.add_flag("--no-sigma", no_sigma, "drop the high-order flux corrections"));
        opts.push_back(app.add_option("--metric", metric, "analytic or discrete metric terms")
                           ->check(CLI::IsMember({"analytic", "discrete"})));
        opts.push_back(app.add_option("--seed", seed, "seed for randomized meshes"));
        if (outputs) {
            opts.push_back(app.add_option("--out", out, std::string("dump directory (default $") + driver::out_dir_env + ")"));
            opts.push_back(app.add_option("--dump-every", dump_every, "dump every N steps (0: first and last only)"));
            opts.push_back(app.add_option("--log-every", log_every, "log line every N steps"));
        }
    }

    auto given(std::string const& name) const -> bool
    {
        for (auto* o : opts)
            if (o->check_lname(name.substr(2)) && o->count() > 0) return true;
        return false;
    }

    auto build(std::string const& default_problem = {}) const -> driver::run_config
    {
        driver::run_config c;
        c.problem = default_problem;
        if (given("--config")) driver::apply_config(c, driver::load_config_file(config_file));
        if (given("--problem")) c.problem = problem;
        if (given("--nx")) c.nx = nx;
        if (given("--ny")) c.ny = ny;
        if (given("--flux")) c.solver = riemann::parse_solver(flux);
        if (given("--cfl")) c.cfl = cfl;
        if (given("--tfinal")) c.t_final = tfinal;
        if (given("--max-steps")) c.max_steps = max_steps;
        if (given("--gamma")) c.gamma = gamma;
        if (no_ct) c.ct_on = false;
        if (no_pp) c.pp_on = false;
        if (no_sigma) c.sigma_on = false;
        if (given("--metric")) c.metric = driver::parse_metric(metric);
        if (given("--seed")) c.seed = seed;
        if (given("--out")) c.out_dir = out;
        if (given("--dump-every")) c.dump_every = dump_every;
        if (given("--log-every")) c.log_every = log_every;
        return c;
    }
};

auto cmd_run(overrides const& o) -> int
{
    auto reg = problems::register_problems();
    auto c = o.build();
    auto r = driver::run(c, reg, &std::cout);
    std::cout << driver::format_summary(r) << '\n';
    return r.nan_abort ? exit_nan : 0;
}

auto cmd_converge(overrides const& o, std::vector<int> const& sizes) -> int
{
    auto reg = problems::register_problems();
    auto c = o.build("alfven");
    auto rows = driver::converge(c, sizes, reg);
    std::cout << driver::format_table(rows);
    return 0;
}

auto cmd_list() -> int
{
    for (auto const& [name, p] : problems::register_problems()) {
        auto const& d = p.defaults;
        std::printf("%-22s %-12s %4dx%-4d t=%-6g cfl=%-4g %-5s %s\n", name.c_str(), p.family.c_str(), d.nx, d.ny,
                    d.t_final, d.cfl, riemann::solver_name(d.solver).c_str(), p.summary.c_str());
    }
    return 0;
}

auto cmd_inspect(std::string const& path) -> int
{
    auto d = io::read_dump(path);
    std::cout << d.header.dump(2) << '\n';
    for (auto const& v : d.variables) {
        auto const& a = d.at(v);
        auto [lo, hi] = std::minmax_element(a.begin(), a.end());
        std::printf("%-8s min % .6e  max % .6e\n", v.c_str(), *lo, *hi);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Alternative-flux WENO solver for ideal MHD on curvilinear grids"};
    app.require_subcommand(1);

    overrides run_o, conv_o;
    auto* run = app.add_subcommand("run", "integrate one problem and write dumps");
    run_o.attach(*run, true);

    auto* conv = app.add_subcommand("converge", "error and order table against an exact solution");
    conv_o.attach(*conv, false);
    std::vector<int> sizes{32, 64, 128};
    conv->add_option("--sizes", sizes, "grid sizes n (n x n)")->delimiter(',');

    auto* list = app.add_subcommand("list-problems", "print the problem registry");

    std::string dump_file;
    auto* inspect = app.add_subcommand("inspect-dump", "print a dump header and value ranges");
    inspect->add_option("file", dump_file, "dump file")->required();

    try {
        app.parse(argc, argv);
    } catch (CLI::CallForHelp const& e) {
        return app.exit(e);
    } catch (CLI::CallForAllHelp const& e) {
        return app.exit(e);
    } catch (CLI::ParseError const& e) {
        app.exit(e);
        return exit_config;
    }

    try {
        if (*run) return cmd_run(run_o);
        if (*conv) return cmd_converge(conv_o, sizes);
        if (*list) return cmd_list();
        if (*inspect) return cmd_inspect(dump_file);
    } catch (driver::config_error const& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return exit_config;
    } catch (std::invalid_argument const& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return exit_config;
    } catch (integrator::nan_error const& e) {
        std::cerr << "aborted: " << e.what() << '\n';
        return exit_nan;
    } catch (std::exception const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
