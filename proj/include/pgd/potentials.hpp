#pragma once

#include <cstddef>

#include "pgd/profile.hpp"

namespace pgd {

struct Tolerances final {
    double eq_abs = 1e-10;  // Interface band: max(eq_abs, eq_rel·(1+|F|+|G|))
    double eq_rel = 1e-8;
    double tie_rel = 1e-12;  // argmin ties: value ≤ min + tie_rel·scale
};

struct Problem final {
    PiecewiseProfile initial;
    PiecewiseProfile boundary;
    Tolerances tol{};
};

// Which candidate produced an argmin; breakpoint/zero arguments with a positive-length
// preimage in x are rarefaction fans.
enum class ArgKind { zero, critical, breakpoint, cut };

struct MinimizerResult final {
    double value = 0.0;
    double arg_lo = 0.0;
    double arg_hi = 0.0;
    ArgKind lo_kind = ArgKind::zero;
    ArgKind hi_kind = ArgKind::zero;
    std::size_t lo_segment = 0;  // segment containing arg_lo (breakpoint k: its right segment)
    std::size_t hi_segment = 0;

    bool unique() const { return arg_lo == arg_hi; }
};

enum class RegimeTag { initial_dominated, boundary_dominated, interface };

struct Regime final {
    RegimeTag tag = RegimeTag::interface;
    double f_value = 0.0;
    double g_value = 0.0;
};

const char* regime_name(RegimeTag tag);

double eval_F(const PiecewiseProfile& initial, double y, double x, double t);
double eval_G(const PiecewiseProfile& boundary, double tau, double x, double t);

MinimizerResult minimize_initial_potential(const PiecewiseProfile& initial, double x, double t,
                                           const Tolerances& tol = {});
MinimizerResult minimize_boundary_potential(const PiecewiseProfile& boundary, double x, double t,
                                            const Tolerances& tol = {});

double interface_tolerance(double f, double g, const Tolerances& tol);
Regime make_regime(double f, double g, const Tolerances& tol);

// Both minimizations at one point plus the regime.
struct PointState final {
    double x = 0.0;
    double t = 0.0;
    MinimizerResult f{};
    MinimizerResult g{};
    Regime regime{};
};

PointState evaluate_point(const Problem& problem, double x, double t);

double mu(const Problem& problem, double x, double t);
Regime classify(const Problem& problem, double x, double t);

}  // namespace pgd
