#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "pgd/potentials.hpp"

namespace pgd {

enum class PotentialSide { initial, boundary };

// Grid scan over the exact minimizer's truncated domain plus one golden-section refinement
// per local basin. arg_lo/arg_hi are the extreme refined argmins within 1e-9·scale of the min.
MinimizerResult brute_force_minimize(const Problem& problem, PotentialSide side, double x, double t,
                                     std::size_t n);

struct Particle final {
    double x = 0.0;
    double mass = 0.0;
    double momentum = 0.0;
    double velocity() const { return momentum / mass; }
};

struct ParticleSystem final {
    double time = 0.0;
    std::vector<Particle> particles;  // sorted by position
    double wall_mass = 0.0;
    double wall_momentum = 0.0;
    double injected_mass = 0.0;  // boundary mass let in so far, inside or outside the wall
};

struct TrajectoryEvent final {
    double t = 0.0;
    double x = 0.0;
    double mass = 0.0;
    double velocity = 0.0;
};

struct Trajectory final {
    std::vector<ParticleSystem> snapshots;  // one per requested time, in order
    std::vector<TrajectoryEvent> events;    // merged/injected/released particle after each event
};

struct SimulationOptions final {
    std::size_t n_particles = 10000;
    double t_end = 1.0;
    double inject_dt = 0.0;      // ≤ 0: chosen so each injection carries about one particle mass
    double x_extent = 4.0;       // region that must be exact; the data is cut beyond its light cone
    std::vector<double> snapshot_times;
    std::size_t max_events = 0;  // 0: 50·(particles + injections)
};

// Equal-mass particles for the initial data, boundary influx injected at x=0 every inject_dt,
// perfectly inelastic collisions. Particles reaching x=0 stick to the wall; the wall releases its
// content when the exact solver classifies (0,t) as boundary-dominated and its momentum is positive.
Trajectory sticky_particle_simulate(const Problem& problem, const SimulationOptions& options);

// sup over x_grid of |m̂ − m| with m̂(x) = mass at positions ≤ x + wall mass − injected mass.
double compare_mass_potential(const Problem& problem, const Trajectory& trajectory, double t,
                              const std::vector<double>& x_grid);

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

}  // namespace pgd
