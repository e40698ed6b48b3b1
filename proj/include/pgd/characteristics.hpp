#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "pgd/field.hpp"

namespace pgd {

struct ShockPoint final {
    double x = 0.0;
    double t = 0.0;
    double mass = 0.0;
    double u_left = 0.0;
    double u_right = 0.0;
    double u_shock = 0.0;
    AtomSource source = AtomSource::initial_only;
    AtomLocation location = AtomLocation::interior;
};

struct InterfaceInterval final {
    double t = 0.0;
    double l = 0.0;
    double r = 0.0;
    bool empty = false;
};

// X(η,t): rightmost x whose initial-label bracket contains η. Labels swept into the
// boundary atom map to 0.
double forward_characteristic_X(const Problem& problem, double eta, double t);
// Y(ξ,t): rightmost x whose boundary-label bracket contains ξ, for 0 ≤ ξ < t.
double forward_characteristic_Y(const Problem& problem, double xi, double t);

double characteristic_speed(const Problem& problem, double x, double t);

InterfaceInterval locate_interface_interval(const Problem& problem, double t);

std::vector<ShockPoint> locate_shocks(const Problem& problem, double t, double x_lo, double x_hi,
                                      std::size_t scan_n = 64);

struct ShockPath final {
    std::vector<ShockPoint> samples;
    std::optional<double> absorbed_at;  // time the atom reaches x=0
    std::optional<double> merged_at;    // time this path joined another one
};

ShockPath trace_shock_path(const Problem& problem, const ShockPoint& seed, double t_end, double dt);

struct MergeEvent final {
    double t = 0.0;
    double x = 0.0;
    std::size_t survivor = 0;
    std::size_t absorbed = 0;
};

struct ShockNetwork final {
    std::vector<ShockPath> paths;
    std::vector<MergeEvent> merges;
};

// Continues several seeds together; two paths that relocate to the same atom (|Δx| < 1e-8)
// are merged and the merge time is refined by bisection.
ShockNetwork trace_shock_paths(const Problem& problem, const std::vector<ShockPoint>& seeds, double t_end,
                               double dt);

}  // namespace pgd
