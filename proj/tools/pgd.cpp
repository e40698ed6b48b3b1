#include <CLI11.hpp>
#include <iostream>

#include "pgd/cli_io.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Measure-valued solutions of pressureless gas dynamics on the quarter plane"};
    app.require_subcommand(1, 1);
    pgd::RunFlags flags;
    std::string t_text, x_text;
    double tol_eq = 0.0, eps_floor = 0.0;
    for (const char* name : {"solve", "trace", "shocks", "validate"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--scenario", flags.scenario, "built-in name or scenario JSON path")->required();
        sub->add_option("--t", t_text, "times: a,b,c or a:b:n");
        sub->add_option("--x", x_text, "grid a:b:n");
        sub->add_option("--tol-eq", tol_eq, "relative Interface band (default 1e-8)");
        sub->add_option("--eps-floor", eps_floor, "density floor (default 1e-8, scenario may override)");
        sub->add_option("--dt", flags.dt, "shock tracing step")->capture_default_str();
        sub->add_option("--out", flags.out, "output directory")->capture_default_str();
    }
    app.add_subcommand("scenario-list", "print built-in scenario names");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    CLI::App* sub = app.get_subcommands().front();
    if (sub->get_name() == "scenario-list") return pgd::run("scenario-list", flags, std::cout, std::cerr);
    if (sub->count("--t")) flags.t = t_text;
    if (sub->count("--x")) flags.x = x_text;
    if (sub->count("--tol-eq")) flags.tol_eq = tol_eq;
    if (sub->count("--eps-floor")) flags.eps_floor = eps_floor;
    return pgd::run(sub->get_name(), flags, std::cout, std::cerr);
}
