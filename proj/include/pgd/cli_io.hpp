#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pgd/potentials.hpp"

namespace pgd {

struct Scenario final {
    std::string name;
    std::vector<Segment> initial;   // raw data; densities are floored when the problem is built
    std::vector<Segment> boundary;
    double eps_floor = kDefaultEpsFloor;
    double tol_eq = 1e-8;          // relative Interface band
    double quad_rel_tol = 1e-6;
    double x_lo = 0.0;
    double x_hi = 4.0;
    std::size_t x_count = 401;
    std::vector<double> t_list{0.5};
    std::vector<std::string> outputs;

    Problem problem() const;
};

// JSON scenario file; defaults are filled for every optional block.
Scenario parse_scenario(const std::filesystem::path& path);
Scenario parse_scenario_text(const std::string& text, const std::string& origin = "<text>");

std::vector<Scenario> builtin_scenarios();

// Built-in name or path to a scenario file.
Scenario resolve_scenario(const std::string& name_or_path);

struct RunFlags final {
    std::string scenario;
    std::optional<std::string> t;  // "a,b,c" or "a:b:n"
    std::optional<std::string> x;  // "a:b:n"
    std::optional<double> tol_eq;
    std::optional<double> eps_floor;
    double dt = 0.01;              // shock tracing step
    std::filesystem::path out = ".";
};

std::vector<double> parse_time_list(const std::string& text);
void parse_x_range(const std::string& text, double& lo, double& hi, std::size_t& n);

// Executes one command and returns the process exit status; errors are reported on err.
int run(const std::string& command, const RunFlags& flags, std::ostream& out, std::ostream& err);

}  // namespace pgd
