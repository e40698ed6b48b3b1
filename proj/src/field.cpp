#include "pgd/field.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "pgd/error.hpp"

namespace pgd {

namespace detail {

Side strict_side(const PointState& s) {
    if (s.f.value < s.g.value) return Side::initial;
    if (s.f.value > s.g.value) return Side::boundary;
    return Side::interface;
}

PieceTag piece_tag(const PointState& s) {
    switch (strict_side(s)) {
        case Side::initial:
            return {Side::initial, s.f.lo_kind, s.f.lo_segment, !s.f.unique()};
        case Side::boundary:
            return {Side::boundary, s.g.lo_kind, s.g.lo_segment, !s.g.unique()};
        case Side::interface:
            break;
    }
    const bool origin_fan = s.f.arg_hi == 0.0 && s.g.arg_hi == 0.0;
    return {Side::interface, ArgKind::zero, 0, !origin_fan};
}

double strict_mass(const Problem& problem, const PointState& s) {
    if (s.x == 0.0 || strict_side(s) == Side::boundary) {
        const double tau = s.x == 0.0 ? s.t : s.g.arg_lo;
        return -problem.boundary.cumulants(tau).B;
    }
    return problem.initial.cumulants(s.f.arg_lo).M;
}

double strict_momentum(const Problem& problem, const PointState& s) {
    if (strict_side(s) == Side::boundary) return -problem.boundary.cumulants(s.g.arg_lo).P;
    return problem.initial.cumulants(s.f.arg_lo).P;
}

double piece_density(const Problem& problem, const PointState& s) {
    const PieceTag tag = piece_tag(s);
    if (tag.tie || tag.kind != ArgKind::critical) return 0.0;
    if (tag.side == Side::initial) return problem.initial.segment_density(tag.segment);
    if (tag.side == Side::boundary) return problem.boundary.segment_density(tag.segment);
    return 0.0;
}

}  // namespace detail

namespace {

using detail::PieceTag;
using detail::Side;

void require_positive_time(double t) {
    if (!(t > 0.0)) throw Error(ErrorCode::undefined_at_rarefaction_center, "t must be positive");
}

double interface_velocity(const Problem& problem, double x, double t, double y_hi, double tau_hi) {
    if (y_hi == 0.0 && tau_hi == 0.0) return x / t;
    const Cumulants ci = problem.initial.cumulants(y_hi);
    const Cumulants cb = problem.boundary.cumulants(tau_hi);
    return (cb.P + ci.P) / (cb.B + ci.M);
}

struct Probe {
    double x = 0.0;
    PointState st{};
    PieceTag tag{};
    double m = 0.0;
    double q = 0.0;
};

Probe probe(const Problem& problem, double x, double t) {
    Probe p;
    p.x = x;
    p.st = evaluate_point(problem, x, t);
    p.tag = detail::piece_tag(p.st);
    p.m = detail::strict_mass(problem, p.st);
    p.q = detail::strict_momentum(problem, p.st);
    return p;
}

// Values at x = 0⁺, built from the one-sided minimizer limits at x = 0.
Probe probe_zero_plus(const Problem& problem, double t) {
    Probe p;
    p.st = evaluate_point(problem, 0.0, t);
    if (p.st.regime.tag != RegimeTag::boundary_dominated) {
        const Cumulants c = problem.initial.cumulants(p.st.f.arg_hi);
        p.m = c.M;
        p.q = c.P;
        p.tag = {Side::initial, p.st.f.hi_kind, p.st.f.hi_segment, false};
    } else {
        const Cumulants c = problem.boundary.cumulants(t);
        p.m = -c.B;
        p.q = -c.P;
        const double below = std::nextafter(t, 0.0);
        p.tag = {Side::boundary, ArgKind::critical, problem.boundary.segment_index(below), false};
    }
    return p;
}

bool carries_initial(Side s) { return s != Side::boundary; }
bool carries_boundary(Side s) { return s != Side::initial; }

class SliceScanner {
public:
    SliceScanner(const Problem& problem, TimeSlice& out)
        : problem_(problem),
          out_(out),
          rho_max_(std::max(problem.initial.density_max(), problem.boundary.density_max())) {}

    void refine(const Probe& a, const Probe& b, int depth) {
        const bool differ = !(a.tag == b.tag) || a.tag.tie || b.tag.tie;
        const double excess = (b.m - a.m) - rho_max_ * (b.x - a.x);
        const double mtol = 1e-12 * (1.0 + std::fabs(a.m) + std::fabs(b.m));
        if (!differ && excess <= mtol) return;
        const double xtol = 1e-12 * (1.0 + std::fabs(b.x));
        if (b.x - a.x <= xtol || depth > 80) {
            record(a, b, excess > mtol);
            return;
        }
        const Probe c = probe(problem_, 0.5 * (a.x + b.x), out_.t);
        refine(a, c, depth + 1);
        refine(c, b, depth + 1);
    }

private:
    void record(const Probe& a, const Probe& b, bool atom) {
        const double xm = 0.5 * (a.x + b.x);
        out_.breaks.push_back(xm);
        if (!atom) return;
        AtomRecord r;
        r.x_atom = xm;
        r.mass = b.m - a.m;
        r.u_atom = (b.q - a.q) / r.mass;
        r.u_departure = r.u_atom;
        r.location_kind = AtomLocation::interior;
        r.left = a.st;
        r.right = b.st;
        r.m_left = a.m;
        r.m_right = b.m;
        r.q_left = a.q;
        r.q_right = b.q;
        const Side ls = detail::strict_side(a.st);
        const Side rs = detail::strict_side(b.st);
        const double eta_hi = carries_initial(rs) ? b.st.f.arg_lo : 0.0;
        const double eta_lo = ls == Side::initial ? a.st.f.arg_lo : 0.0;
        const double tau_hi = carries_boundary(ls) ? a.st.g.arg_lo : 0.0;
        const double tau_lo = rs == Side::boundary ? b.st.g.arg_lo : 0.0;
        const bool has_initial = eta_hi > eta_lo;
        const bool has_boundary = tau_hi > tau_lo;
        r.source = has_initial && has_boundary ? AtomSource::mixed
                   : has_boundary             ? AtomSource::boundary_only
                                              : AtomSource::initial_only;
        out_.atoms.push_back(r);
    }

    const Problem& problem_;
    TimeSlice& out_;
    double rho_max_;
};

// Initial labels [lo, hi] and boundary labels [lo, hi] carried by an atom; both ends use
// arg_lo so the ranges match the m-jump across the bracket.
struct LabelRanges {
    double eta_lo, eta_hi, tau_lo, tau_hi;
};

LabelRanges label_ranges(const AtomRecord& a) {
    if (a.location_kind == AtomLocation::boundary) return {0.0, a.right.f.arg_hi, 0.0, a.left.t};
    const Side ls = detail::strict_side(a.left);
    const Side rs = detail::strict_side(a.right);
    LabelRanges r{0.0, 0.0, 0.0, 0.0};
    if (carries_initial(rs)) {
        r.eta_hi = a.right.f.arg_lo;
        r.eta_lo = ls == Side::initial ? a.left.f.arg_lo : 0.0;
    }
    if (carries_boundary(ls)) {
        r.tau_hi = a.left.g.arg_lo;
        r.tau_lo = rs == Side::boundary ? a.right.g.arg_lo : 0.0;
    }
    return r;
}

}  // namespace

const char* atom_location_name(AtomLocation loc) {
    return loc == AtomLocation::boundary ? "boundary" : "interior";
}

const char* atom_source_name(AtomSource src) {
    switch (src) {
        case AtomSource::initial_only: return "initial";
        case AtomSource::boundary_only: return "boundary";
        case AtomSource::mixed: return "mixed";
    }
    return "?";
}

TimeSlice scan_time_slice(const Problem& problem, double t, double x_lo, double x_hi, std::size_t cells) {
    require_positive_time(t);
    if (x_lo < 0.0 || x_hi < x_lo) throw Error(ErrorCode::negative_argument, "slice window");
    TimeSlice out;
    out.t = t;
    out.x_lo = x_lo;
    out.x_hi = x_hi;

    Probe first = x_lo == 0.0 ? probe_zero_plus(problem, t) : probe(problem, x_lo, t);
    if (x_lo == 0.0 && first.st.regime.tag != RegimeTag::boundary_dominated) {
        AtomRecord r;
        const Cumulants cb = problem.boundary.cumulants(t);
        const Cumulants ci = problem.initial.cumulants(first.st.f.arg_hi);
        r.x_atom = 0.0;
        r.mass = first.m + cb.B;
        r.location_kind = AtomLocation::boundary;
        r.source = ci.M > 0.0 ? AtomSource::mixed : AtomSource::boundary_only;
        r.u_atom = velocity_from_state(problem, first.st);
        r.u_departure = (ci.P + cb.P) / (ci.M + cb.B);
        r.left = first.st;
        r.right = first.st;
        r.m_left = -cb.B;
        r.m_right = first.m;
        r.q_left = first.st.regime.tag == RegimeTag::interface ? -cb.P : first.q;
        r.q_right = first.q;
        out.atoms.push_back(r);
        out.breaks.push_back(0.0);
    }
    if (x_hi > x_lo) {
        cells = std::max<std::size_t>(cells, 1);
        SliceScanner scanner(problem, out);
        Probe prev = first;
        prev.x = x_lo;
        for (std::size_t i = 1; i <= cells; ++i) {
            const double x = i == cells ? x_hi : x_lo + (x_hi - x_lo) * static_cast<double>(i) / static_cast<double>(cells);
            Probe next = probe(problem, x, t);
            scanner.refine(prev, next, 0);
            prev = next;
        }
    }
    std::sort(out.breaks.begin(), out.breaks.end());
    std::sort(out.atoms.begin(), out.atoms.end(),
              [](const AtomRecord& a, const AtomRecord& b) { return a.x_atom < b.x_atom; });
    return out;
}

double velocity_from_state(const Problem& problem, const PointState& s) {
    require_positive_time(s.t);
    const double x = s.x;
    const double t = s.t;
    if (x == 0.0) {
        switch (s.regime.tag) {
            case RegimeTag::boundary_dominated: return problem.boundary.velocity_at(t);
            case RegimeTag::initial_dominated: return 0.0;
            case RegimeTag::interface: return interface_velocity(problem, x, t, s.f.arg_hi, s.g.arg_hi);
        }
    }
    switch (s.regime.tag) {
        case RegimeTag::initial_dominated: {
            if (s.f.unique()) return (x - s.f.arg_lo) / t;
            const Cumulants lo = problem.initial.cumulants(s.f.arg_lo);
            const Cumulants hi = problem.initial.cumulants(s.f.arg_hi);
            return (hi.P - lo.P) / (hi.M - lo.M);
        }
        case RegimeTag::boundary_dominated: {
            if (s.g.unique()) {
                const double lag = t - s.g.arg_lo;
                return lag > 0.0 ? x / lag : problem.boundary.velocity_at(t);
            }
            const Cumulants lo = problem.boundary.cumulants(s.g.arg_lo);
            const Cumulants hi = problem.boundary.cumulants(s.g.arg_hi);
            return (hi.P - lo.P) / (hi.B - lo.B);
        }
        case RegimeTag::interface:
            return interface_velocity(problem, x, t, s.f.arg_hi, s.g.arg_hi);
    }
    return 0.0;
}

double velocity(const Problem& problem, double x, double t) {
    require_positive_time(t);
    return velocity_from_state(problem, evaluate_point(problem, x, t));
}

// m and q follow the plain sign of F−G; the Interface band only labels regimes, and
// switching formulas at its edge would put an O(band) jump into m
double mass_from_state(const Problem& problem, const PointState& s) { return detail::strict_mass(problem, s); }

double mass_potential(const Problem& problem, double x, double t) {
    require_positive_time(t);
    return mass_from_state(problem, evaluate_point(problem, x, t));
}

double momentum_from_state(const Problem& problem, const PointState& s) {
    return detail::strict_momentum(problem, s);
}

double momentum_potential(const Problem& problem, double x, double t) {
    require_positive_time(t);
    return momentum_from_state(problem, evaluate_point(problem, x, t));
}

double mass_right_limit_at_zero(const Problem& problem, double t) {
    return probe_zero_plus(problem, t).m;
}

double momentum_right_limit_at_zero(const Problem& problem, double t) {
    return probe_zero_plus(problem, t).q;
}

double energy_potential(const Problem& problem, double x, double t) {
    require_positive_time(t);
    const PointState s = evaluate_point(problem, x, t);
    // Free labels contribute ½ρu·u, labels inside an atom ½ρu·u_atom.
    if (s.regime.tag == RegimeTag::boundary_dominated) {
        const PiecewiseProfile& b = problem.boundary;
        const double tau = s.g.arg_lo;
        const double reach = std::max(x, t * b.velocity_sup()) + 1.0;
        const TimeSlice slice = scan_time_slice(problem, t, x, reach);
        double sum = b.cumulants(tau).K;
        for (const AtomRecord& a : slice.atoms) {
            const LabelRanges r = label_ranges(a);
            const double lo = std::min(r.tau_lo, tau);
            const double hi = std::min(r.tau_hi, tau);
            if (hi <= lo) continue;
            const Cumulants cl = b.cumulants(lo);
            const Cumulants ch = b.cumulants(hi);
            sum += a.u_atom * (ch.P - cl.P) - (ch.K - cl.K);
        }
        return -0.5 * sum;
    }
    const PiecewiseProfile& ini = problem.initial;
    const double y = s.f.arg_lo;
    const TimeSlice slice = scan_time_slice(problem, t, 0.0, x);
    double sum = ini.cumulants(y).K;
    for (const AtomRecord& a : slice.atoms) {
        const LabelRanges r = label_ranges(a);
        const double lo = std::min(r.eta_lo, y);
        const double hi = std::min(r.eta_hi, y);
        if (hi <= lo) continue;
        const Cumulants cl = ini.cumulants(lo);
        const Cumulants ch = ini.cumulants(hi);
        sum += a.u_atom * (ch.P - cl.P) - (ch.K - cl.K);
    }
    return 0.5 * sum;
}

SolutionSample sample_solution(const Problem& problem, double x, double t) {
    require_positive_time(t);
    const PointState s = evaluate_point(problem, x, t);
    SolutionSample out;
    out.x = x;
    out.t = t;
    out.regime = s.regime;
    out.u = velocity_from_state(problem, s);
    out.m = mass_from_state(problem, s);
    out.q = momentum_from_state(problem, s);
    out.E = energy_potential(problem, x, t);
    return out;
}

namespace {

double richardson(const std::function<double(double)>& f, double h) {
    const double f1 = f(h);
    const double f2 = f(0.5 * h);
    const double f3 = f(0.25 * h);
    return (8.0 * f3 - 6.0 * f2 + f1) / 3.0;
}

}  // namespace

double velocity_right_limit(const Problem& problem, double x, double t, double h) {
    require_positive_time(t);
    if (!(h > 0.0)) h = 1e-4 * (1.0 + std::fabs(x));
    return richardson([&](double d) { return velocity(problem, x + d, t); }, h);
}

double velocity_left_limit(const Problem& problem, double x, double t, double h) {
    require_positive_time(t);
    if (!(x > 0.0)) throw Error(ErrorCode::negative_argument, "left limit needs x > 0");
    if (!(h > 0.0)) h = 1e-4 * (1.0 + std::fabs(x));
    h = std::min(h, 0.5 * x);
    return richardson([&](double d) { return velocity(problem, x - d, t); }, h);
}

DensityProfile density_profile(const Problem& problem, double t, const std::vector<double>& x_grid) {
    require_positive_time(t);
    DensityProfile out;
    out.t = t;
    if (x_grid.empty()) return out;
    const TimeSlice slice = scan_time_slice(problem, t, x_grid.front(), x_grid.back(), 64);
    out.atoms = slice.atoms;
    auto m_at = [&](double x) { return detail::strict_mass(problem, evaluate_point(problem, x, t)); };
    for (double x : x_grid) {
        const double d = 1e-7 * (1.0 + std::fabs(x));
        double a = x - d;
        double b = x + d;
        bool atom_near = a <= 0.0;
        bool atom_right = false;
        for (const AtomRecord& r : slice.atoms) {
            if (r.x_atom >= a - d && r.x_atom <= b + d) {
                atom_near = true;
                atom_right = r.x_atom >= x;
            }
        }
        if (atom_near) {
            if (atom_right && x - 3.0 * d > 0.0) {
                a = x - 3.0 * d;
                b = x - 2.0 * d;
            } else {
                a = x + 2.0 * d;
                b = x + 3.0 * d;
            }
        }
        out.ac_samples.emplace_back(x, std::max(0.0, (m_at(b) - m_at(a)) / (b - a)));
    }
    return out;
}

}  // namespace pgd
