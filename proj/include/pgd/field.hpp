#pragma once

#include <cstddef>
#include <vector>

#include "pgd/potentials.hpp"

namespace pgd {

struct SolutionSample final {
    double x = 0.0;
    double t = 0.0;
    Regime regime{};
    double u = 0.0;
    double m = 0.0;
    double q = 0.0;
    double E = 0.0;
};

enum class AtomLocation { interior, boundary };
enum class AtomSource { initial_only, boundary_only, mixed };

const char* atom_location_name(AtomLocation loc);
const char* atom_source_name(AtomSource src);

struct AtomRecord final {
    double x_atom = 0.0;
    double mass = 0.0;
    double u_atom = 0.0;  // velocity at the atom; 0 for a boundary atom held by F(0,t)<G(0,t)
    AtomLocation location_kind = AtomLocation::interior;
    AtomSource source = AtomSource::initial_only;
    double u_departure = 0.0;  // boundary atom: momentum/mass of its content
    // side data at the refined bracket ends (boundary atom: left is x=0, right is 0⁺)
    PointState left{};
    PointState right{};
    double m_left = 0.0, m_right = 0.0, q_left = 0.0, q_right = 0.0;
};

// Structure of the solution at one time on [x_lo, x_hi]: atoms and the points where the
// governing minimizer changes branch (fan edges, regime switches, atoms).
struct TimeSlice final {
    double t = 0.0;
    double x_lo = 0.0;
    double x_hi = 0.0;
    std::vector<double> breaks;
    std::vector<AtomRecord> atoms;
};

TimeSlice scan_time_slice(const Problem& problem, double t, double x_lo, double x_hi, std::size_t cells = 16);

double velocity(const Problem& problem, double x, double t);
double velocity_from_state(const Problem& problem, const PointState& s);
double mass_potential(const Problem& problem, double x, double t);
double mass_from_state(const Problem& problem, const PointState& s);
double momentum_potential(const Problem& problem, double x, double t);
double momentum_from_state(const Problem& problem, const PointState& s);
double energy_potential(const Problem& problem, double x, double t);
SolutionSample sample_solution(const Problem& problem, double x, double t);

// Exact limits x↘0 of m and q.
double mass_right_limit_at_zero(const Problem& problem, double t);
double momentum_right_limit_at_zero(const Problem& problem, double t);

// One-sided limits of u by Richardson extrapolation over offsets h, h/2, h/4.
// h defaults to 1e-4·(1+|x|); the left limit needs x > 0.
double velocity_left_limit(const Problem& problem, double x, double t, double h = 0.0);
double velocity_right_limit(const Problem& problem, double x, double t, double h = 0.0);

struct DensityProfile final {
    double t = 0.0;
    std::vector<std::pair<double, double>> ac_samples;  // (x, density)
    std::vector<AtomRecord> atoms;
};

DensityProfile density_profile(const Problem& problem, double t, const std::vector<double>& x_grid);

// Internal pieces shared with diagnostics.
namespace detail {

enum class Side { initial, boundary, interface };

// Sign of F−G without the Interface band.
Side strict_side(const PointState& s);

// Piece identity of the solution at a point: which side and which data segment (or fan) governs.
struct PieceTag final {
    Side side = Side::interface;
    ArgKind kind = ArgKind::zero;
    std::size_t segment = 0;
    bool tie = false;
    bool operator==(const PieceTag&) const = default;
};

PieceTag piece_tag(const PointState& s);

// m and q with the strict sign of F−G (left/right values next to a mixed atom).
double strict_mass(const Problem& problem, const PointState& s);
double strict_momentum(const Problem& problem, const PointState& s);

// Absolutely continuous density on the piece governing a point with no tie.
double piece_density(const Problem& problem, const PointState& s);

}  // namespace detail

}  // namespace pgd
