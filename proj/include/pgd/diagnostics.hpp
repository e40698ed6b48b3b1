#pragma once

#include <cstddef>
#include <vector>

#include "pgd/characteristics.hpp"

namespace pgd {

enum class Relation { equality, at_least, at_most };
const char* relation_name(Relation r);

struct BalanceReport final {
    double t = 0.0;
    double total = 0.0;
    double expected = 0.0;
    double residual = 0.0;  // total − expected
    Relation relation = Relation::equality;
};

struct EntropyViolation final {
    double x = 0.0;
    double u_left = 0.0;
    double u_mid = 0.0;
    double u_right = 0.0;
};

struct EntropyReport final {
    double t = 0.0;
    std::size_t checked = 0;
    std::vector<EntropyViolation> violations;
};

struct BoundaryTraceRow final {
    double t = 0.0;
    RegimeTag regime = RegimeTag::interface;
    double u_limit = 0.0;
    double u_b = 0.0;
    double atom_mass = 0.0;
};

struct InitialTraceRow final {
    double x = 0.0;
    double u = 0.0;
    double m = 0.0;
    double u_target = 0.0;
    double m_target = 0.0;
};

// Needs initial density ≤ 2ε beyond some cutoff below x_max; throws NonCompactScenario otherwise.
BalanceReport mass_balance(const Problem& problem, double t, double x_max);
BalanceReport momentum_balance(const Problem& problem, double t, double x_max);
bool effectively_compact(const Problem& problem, double x_max);

EntropyReport entropy_report(const Problem& problem, double t, double x_lo, double x_hi, std::size_t n_samples);

std::vector<BoundaryTraceRow> boundary_trace(const Problem& problem, const std::vector<double>& t_grid);
std::vector<InitialTraceRow> initial_trace(const Problem& problem, const std::vector<double>& x_grid, double t_small);

double second_potential_H(const Problem& problem, double x, double t);

// ∫_{x1}^{x2} m(x,t) dx and ∫_{t1}^{t2} q(x,t) dt by adaptive Gauss–Kronrod.
double integrate_mass_in_x(const Problem& problem, double t, double x1, double x2);
double integrate_momentum_in_t(const Problem& problem, double x, double t1, double t2);

// Difference quotients Δq/Δm and ΔE/Δm over [x−h, x+h] at `levels` dyadic h, halving further
// while the bracket still holds structure away from x. skipped when Δm < 1e-12.
struct DerivativeCheck final {
    double x = 0.0;
    double t = 0.0;
    double u = 0.0;
    double h = 0.0;  // finest half-width used
    double dq_dm = 0.0;
    double de_dm = 0.0;
    bool skipped = false;
};

DerivativeCheck radon_nikodym_check(const Problem& problem, double x, double t, double h0 = 1e-3,
                                    int levels = 3);

// Tensor product of C² piecewise-quintic bumps supported on [x0,x1]×[t0,t1].
struct BumpSpec final {
    double x0 = 0.0;
    double x1 = 1.0;
    double t0 = 0.0;
    double t1 = 1.0;
};

double bump_profile(double s, double a, double b);
double bump_profile_derivative(double s, double a, double b);

struct WeakResidual final {
    double r1 = 0.0;  // ∬ φ_t m dx dt − ∬ φ u dm dt
    double r2 = 0.0;  // ∬ (φ_t u + φ_x u²) dm dt
};

// quad_n: number of time cells; each cell is split further at structural events and integrated
// with 3-point Gauss–Legendre. In x every smooth piece gets 4-point Gauss–Legendre, atoms enter
// as point masses unless include_atoms is false.
WeakResidual weak_residual(const Problem& problem, const BumpSpec& bump, std::size_t quad_n,
                           bool include_atoms = true);

}  // namespace pgd
