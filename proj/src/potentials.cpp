#include "pgd/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pgd/error.hpp"

namespace pgd {

namespace {

void require_nonnegative(double v, const char* what) {
    if (!(v >= 0.0)) throw Error(ErrorCode::negative_argument, std::string(what) + " = " + std::to_string(v));
}

struct Candidate {
    double arg;
    double value;
    ArgKind kind;
    std::size_t segment;
};

// Section value and a magnitude for relative tolerances.
struct Section {
    virtual double value(double s) const = 0;
    virtual double scale(double s) const = 0;
    virtual ~Section() = default;
};

struct InitialSection final : Section {
    const PiecewiseProfile& prof;
    double x, t;
    InitialSection(const PiecewiseProfile& p, double x_, double t_) : prof(p), x(x_), t(t_) {}
    double value(double y) const override {
        const Cumulants c = prof.cumulants(y);
        return t * c.P + c.A - x * c.M;
    }
    double scale(double y) const override {
        const Cumulants c = prof.cumulants(y);
        return 1.0 + std::fabs(t * c.P) + std::fabs(c.A) + std::fabs(x * c.M);
    }
};

struct BoundarySection final : Section {
    const PiecewiseProfile& prof;
    double x, t;
    BoundarySection(const PiecewiseProfile& p, double x_, double t_) : prof(p), x(x_), t(t_) {}
    double value(double tau) const override {
        const Cumulants c = prof.cumulants(tau);
        return x * c.B - t * c.P + c.A;
    }
    double scale(double tau) const override {
        const Cumulants c = prof.cumulants(tau);
        return 1.0 + std::fabs(x * c.B) + std::fabs(t * c.P) + std::fabs(c.A);
    }
};

// Extreme argmins among tied candidates. Adjacent tied candidates whose midpoint is also
// within tolerance lie in one basin and collapse to one representative.
MinimizerResult select(std::vector<Candidate>& cands, const Section& section, double tie_rel) {
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.arg < b.arg; });
    double best = kInfinity;
    double scale = 1.0;
    for (const Candidate& c : cands) {
        if (c.value < best) {
            best = c.value;
            scale = section.scale(c.arg);
        }
    }
    const double cut = best + tie_rel * scale;
    std::vector<Candidate> reps;
    for (const Candidate& c : cands) {
        if (c.value > cut) continue;
        if (!reps.empty()) {
            Candidate& prev = reps.back();
            const bool same_basin = c.arg == prev.arg || section.value(0.5 * (c.arg + prev.arg)) <= cut;
            if (same_basin) {
                // inside a segment the integrand is ρ·(s − critical), so a critical point in a shared
                // basin is the true minimum even when rounding ranks a breakpoint lower
                const bool c_crit = c.kind == ArgKind::critical, p_crit = prev.kind == ArgKind::critical;
                if (c_crit != p_crit ? c_crit : c.value < prev.value) prev = c;
                continue;
            }
        }
        reps.push_back(c);
    }
    MinimizerResult r;
    r.value = best;
    r.arg_lo = reps.front().arg;
    r.lo_kind = reps.front().kind;
    r.lo_segment = reps.front().segment;
    r.arg_hi = reps.back().arg;
    r.hi_kind = reps.back().kind;
    r.hi_segment = reps.back().segment;
    return r;
}

}  // namespace

const char* regime_name(RegimeTag tag) {
    switch (tag) {
        case RegimeTag::initial_dominated: return "initial";
        case RegimeTag::boundary_dominated: return "boundary";
        case RegimeTag::interface: return "interface";
    }
    return "?";
}

double eval_F(const PiecewiseProfile& initial, double y, double x, double t) {
    require_nonnegative(y, "y");
    require_nonnegative(x, "x");
    require_nonnegative(t, "t");
    return InitialSection(initial, x, t).value(y);
}

double eval_G(const PiecewiseProfile& boundary, double tau, double x, double t) {
    require_nonnegative(tau, "tau");
    require_nonnegative(x, "x");
    require_nonnegative(t, "t");
    return BoundarySection(boundary, x, t).value(tau);
}

MinimizerResult minimize_initial_potential(const PiecewiseProfile& initial, double x, double t,
                                           const Tolerances& tol) {
    require_nonnegative(x, "x");
    require_nonnegative(t, "t");
    const InitialSection section(initial, x, t);
    // beyond y_max the integrand t·u₀+η−x is nonnegative, so F(·,x,t) cannot decrease there
    const double y_max = x + t * initial.speed_bound();
    if (t * initial.velocity_at(y_max) + y_max - x < -1e-12 * (1.0 + y_max))
        throw Error(ErrorCode::exceptional_point, "initial search cut has negative integrand");

    std::vector<Candidate> cands;
    cands.push_back({0.0, 0.0, ArgKind::zero, 0});
    for (std::size_t i = 0; i < initial.segment_count(); ++i) {
        const double lo = initial.segment_start(i);
        if (lo > y_max) break;
        if (i > 0) cands.push_back({lo, section.value(lo), ArgKind::breakpoint, i});
        // y_max is not a breakpoint: a critical point sitting on it is still interior to its segment
        const double yc = x - t * initial.segment_velocity(i);
        if (yc > lo && yc < initial.segment_end(i) && yc <= y_max)
            cands.push_back({yc, section.value(yc), ArgKind::critical, i});
    }
    if (y_max > 0.0 && cands.back().arg != y_max) {
        const std::size_t i = initial.segment_index(y_max);
        if (initial.segment_start(i) != y_max) cands.push_back({y_max, section.value(y_max), ArgKind::cut, i});
    }
    return select(cands, section, tol.tie_rel);
}

MinimizerResult minimize_boundary_potential(const PiecewiseProfile& boundary, double x, double t,
                                            const Tolerances& tol) {
    require_nonnegative(x, "x");
    require_nonnegative(t, "t");
    if (t == 0.0) return {};
    const BoundarySection section(boundary, x, t);

    std::vector<Candidate> cands;
    cands.push_back({0.0, 0.0, ArgKind::zero, 0});
    for (std::size_t i = 0; i < boundary.segment_count(); ++i) {
        const double lo = boundary.segment_start(i);
        if (lo >= t) break;
        if (i > 0) cands.push_back({lo, section.value(lo), ArgKind::breakpoint, i});
        const double hi = std::min(boundary.segment_end(i), t);
        const double tc = t - x / boundary.segment_velocity(i);
        if (tc > lo && tc < hi) cands.push_back({tc, section.value(tc), ArgKind::critical, i});
    }
    // the integrand x−u_b(t−τ) equals x ≥ 0 at τ=t, so nothing past t can win
    cands.push_back({t, section.value(t), ArgKind::cut, boundary.segment_index(t)});
    return select(cands, section, tol.tie_rel);
}

double interface_tolerance(double f, double g, const Tolerances& tol) {
    return std::max(tol.eq_abs, tol.eq_rel * (1.0 + std::fabs(f) + std::fabs(g)));
}

Regime make_regime(double f, double g, const Tolerances& tol) {
    Regime r{RegimeTag::interface, f, g};
    const double band = interface_tolerance(f, g, tol);
    if (f < g - band) r.tag = RegimeTag::initial_dominated;
    else if (f > g + band) r.tag = RegimeTag::boundary_dominated;
    return r;
}

PointState evaluate_point(const Problem& problem, double x, double t) {
    PointState s;
    s.x = x;
    s.t = t;
    s.f = minimize_initial_potential(problem.initial, x, t, problem.tol);
    s.g = minimize_boundary_potential(problem.boundary, x, t, problem.tol);
    s.regime = make_regime(s.f.value, s.g.value, problem.tol);
    return s;
}

double mu(const Problem& problem, double x, double t) {
    const PointState s = evaluate_point(problem, x, t);
    return std::min(s.f.value, s.g.value);
}

Regime classify(const Problem& problem, double x, double t) { return evaluate_point(problem, x, t).regime; }

}  // namespace pgd
