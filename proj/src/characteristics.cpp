#include "pgd/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "pgd/error.hpp"

namespace pgd {

namespace {

void require_positive_time(double t) {
    if (!(t > 0.0)) throw Error(ErrorCode::negative_argument, "t must be positive");
}

// Largest x in [lo, hi] with pred(x) true, given pred(lo) and !pred(hi).
double bisect_last_true(const std::function<bool(double)>& pred, double lo, double hi) {
    for (int i = 0; i < 200 && hi - lo > 1e-14 * (1.0 + std::fabs(hi)); ++i) {
        const double mid = 0.5 * (lo + hi);
        (pred(mid) ? lo : hi) = mid;
    }
    return lo;
}

// Initial labels lying left of x: y_* where F ≤ G, none on the boundary side.
double initial_label(const Problem& problem, double x, double t) {
    const PointState s = evaluate_point(problem, x, t);
    if (x == 0.0 && s.regime.tag != RegimeTag::boundary_dominated) return s.f.arg_hi;
    return s.regime.tag == RegimeTag::boundary_dominated ? 0.0 : s.f.arg_lo;
}

// Boundary labels lying right of x: τ_* where F > G, none on the initial side.
double boundary_label(const Problem& problem, double x, double t) {
    const PointState s = evaluate_point(problem, x, t);
    if (x == 0.0) return t;
    return s.regime.tag == RegimeTag::boundary_dominated ? s.g.arg_lo : 0.0;
}

double velocity_hull(const Problem& problem) {
    const double hi = std::max(problem.initial.velocity_sup(), problem.boundary.velocity_sup());
    const double lo = std::min(problem.initial.velocity_inf(), problem.boundary.velocity_inf());
    return std::max(hi - lo, 1e-12);
}

ShockPoint shock_from_atom(const Problem& problem, const TimeSlice& slice, const AtomRecord& a) {
    ShockPoint p;
    p.x = a.x_atom;
    p.t = slice.t;
    p.mass = a.mass;
    p.u_shock = a.u_atom;
    p.source = a.source;
    p.location = a.location_kind;
    // keep the extrapolation offsets clear of neighbouring features
    double gap_left = std::numeric_limits<double>::infinity();
    double gap_right = gap_left;
    const double cluster = 1e-8 * (1.0 + std::fabs(a.x_atom));
    for (double b : slice.breaks) {
        const double d = b - a.x_atom;
        if (d > cluster) gap_right = std::min(gap_right, d);
        if (-d > cluster) gap_left = std::min(gap_left, -d);
    }
    const double h0 = 1e-4 * (1.0 + std::fabs(a.x_atom));
    const double hr = std::min(h0, 0.5 * gap_right);
    if (a.location_kind == AtomLocation::boundary) {
        p.u_left = velocity(problem, 0.0, slice.t);
        p.u_right = velocity_right_limit(problem, 0.0, slice.t, hr);
        return p;
    }
    const double hl = std::min({h0, 0.5 * gap_left, 0.5 * a.x_atom});
    p.u_left = velocity_left_limit(problem, a.x_atom - cluster, slice.t, hl);
    p.u_right = velocity_right_limit(problem, a.x_atom + cluster, slice.t, hr);
    return p;
}

std::vector<const AtomRecord*> interior_atoms(const TimeSlice& slice) {
    std::vector<const AtomRecord*> out;
    for (const AtomRecord& a : slice.atoms)
        if (a.location_kind == AtomLocation::interior) out.push_back(&a);
    return out;
}

struct Window {
    double lo, hi;
};

Window window_around(double x, double w) { return {std::max(0.0, x - w), x + w}; }

}  // namespace

double forward_characteristic_X(const Problem& problem, double eta, double t) {
    require_positive_time(t);
    if (eta < 0.0) throw Error(ErrorCode::negative_argument, "eta");
    if (initial_label(problem, 0.0, t) > eta) return 0.0;
    const double hi = eta + t * problem.initial.speed_bound() + 1.0;
    if (initial_label(problem, hi, t) <= eta)
        throw Error(ErrorCode::exceptional_point, "initial label bracket degenerates");
    return bisect_last_true([&](double x) { return initial_label(problem, x, t) <= eta; }, 0.0, hi);
}

double forward_characteristic_Y(const Problem& problem, double xi, double t) {
    require_positive_time(t);
    if (xi < 0.0 || xi >= t) throw Error(ErrorCode::negative_argument, "xi outside [0, t)");
    const double hi = (t - xi) * problem.boundary.velocity_sup() + 1.0;
    if (boundary_label(problem, hi, t) >= xi && xi > 0.0)
        throw Error(ErrorCode::exceptional_point, "boundary label bracket degenerates");
    return bisect_last_true([&](double x) { return boundary_label(problem, x, t) >= xi; }, 0.0, hi);
}

double characteristic_speed(const Problem& problem, double x, double t) {
    require_positive_time(t);
    const PointState s = evaluate_point(problem, x, t);
    const PiecewiseProfile& ini = problem.initial;
    const PiecewiseProfile& bnd = problem.boundary;
    const bool at_wall = x == 0.0;
    switch (s.regime.tag) {
        case RegimeTag::initial_dominated: {
            if (at_wall) return 0.0;
            if (s.f.unique()) return (x - s.f.arg_lo) / t;
            const Cumulants a = ini.cumulants(s.f.arg_lo), b = ini.cumulants(s.f.arg_hi);
            return (b.P - a.P) / (b.M - a.M);
        }
        case RegimeTag::boundary_dominated: {
            if (at_wall || s.g.arg_lo >= t) return bnd.velocity_at(t);
            if (s.g.unique()) return x / (t - s.g.arg_lo);
            const Cumulants a = bnd.cumulants(s.g.arg_lo), b = bnd.cumulants(s.g.arg_hi);
            return (b.P - a.P) / (b.B - a.B);
        }
        case RegimeTag::interface: {
            if (s.f.arg_hi == 0.0 && s.g.arg_hi == 0.0) return x / t;
            const Cumulants a = ini.cumulants(s.f.arg_hi), b = bnd.cumulants(s.g.arg_hi);
            return (a.P + b.P) / (a.M + b.B);
        }
    }
    return 0.0;
}

InterfaceInterval locate_interface_interval(const Problem& problem, double t) {
    require_positive_time(t);
    auto diff = [&](double x) {
        const PointState s = evaluate_point(problem, x, t);
        return s.f.value - s.g.value;
    };
    InterfaceInterval out;
    out.t = t;
    if (diff(0.0) < 0.0) {
        out.empty = true;
        return out;
    }
    double far = t * (problem.boundary.velocity_sup() + problem.initial.speed_bound()) + 1.0;
    for (int i = 0; i < 60 && diff(far) >= 0.0; ++i) far *= 2.0;
    // F−G is nonincreasing in x
    out.l = diff(0.0) <= 0.0 ? 0.0 : bisect_last_true([&](double x) { return diff(x) > 0.0; }, 0.0, far);
    out.r = bisect_last_true([&](double x) { return diff(x) >= 0.0; }, 0.0, far);
    if (out.r < out.l) out.r = out.l;
    return out;
}

std::vector<ShockPoint> locate_shocks(const Problem& problem, double t, double x_lo, double x_hi, std::size_t scan_n) {
    require_positive_time(t);
    const TimeSlice slice = scan_time_slice(problem, t, x_lo, x_hi, scan_n);
    std::vector<ShockPoint> out;
    for (const AtomRecord& a : slice.atoms) out.push_back(shock_from_atom(problem, slice, a));
    return out;
}

ShockNetwork trace_shock_paths(const Problem& problem, const std::vector<ShockPoint>& seeds, double t_end,
                               double dt) {
    if (!(dt > 0.0)) throw Error(ErrorCode::negative_argument, "dt must be positive");
    ShockNetwork net;
    if (seeds.empty()) return net;
    const double hull = velocity_hull(problem);
    for (const ShockPoint& s : seeds) {
        const Window win = window_around(s.x, 1e-6 * (1.0 + std::fabs(s.x)));
        if (interior_atoms(scan_time_slice(problem, s.t, win.lo, win.hi)).empty())
            throw Error(ErrorCode::path_lost, "seed at x=" + std::to_string(s.x) + " is not an atom");
    }
    std::vector<bool> active(seeds.size(), true);
    for (const ShockPoint& s : seeds) net.paths.push_back({{s}, std::nullopt, std::nullopt});

    double t = seeds.front().t;
    const double t_stop = t_end - 1e-12 * (1.0 + std::fabs(t_end));
    while (t < t_stop) {
        const double tn = std::min(t + dt, t_end);
        const double w = 10.0 * (tn - t) * hull + 1e-9;
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            if (!active[i]) continue;
            ShockPath& path = net.paths[i];
            const ShockPoint& last = path.samples.back();
            const double pred = last.x + last.u_shock * (tn - t);
            const Window win = window_around(pred, w);
            const TimeSlice slice = scan_time_slice(problem, tn, win.lo, win.hi);
            const auto cands = interior_atoms(slice);
            if (cands.empty()) {
                if (win.lo > 0.0) throw Error(ErrorCode::path_lost, "no atom near x=" + std::to_string(pred));
                const double reach = last.x + w;
                auto present = [&](double tau) {
                    return !interior_atoms(scan_time_slice(problem, tau, 0.0, reach)).empty();
                };
                double t_abs = bisect_last_true(present, t, tn);
                // the atom sits on the wall exactly when F(0,t) = G(0,t)
                auto wall_gap = [&](double tau) {
                    const PointState s = evaluate_point(problem, 0.0, tau);
                    return s.f.value - s.g.value;
                };
                if (wall_gap(t) > 0.0 && wall_gap(tn) <= 0.0)
                    t_abs = bisect_last_true([&](double tau) { return wall_gap(tau) > 0.0; }, t, tn);
                path.absorbed_at = t_abs;
                active[i] = false;
                continue;
            }
            const AtomRecord* best = cands.front();
            for (const AtomRecord* a : cands)
                if (std::fabs(a->x_atom - pred) < std::fabs(best->x_atom - pred)) best = a;
            path.samples.push_back(shock_from_atom(problem, slice, *best));
        }
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            for (std::size_t j = i + 1; j < seeds.size(); ++j) {
                if (!active[i] || !active[j]) continue;
                const ShockPoint& a = net.paths[i].samples.back();
                const ShockPoint& b = net.paths[j].samples.back();
                if (a.t != tn || b.t != tn || std::fabs(a.x - b.x) >= 1e-8) continue;
                const ShockPoint& pa = net.paths[i].samples[net.paths[i].samples.size() - 2];
                const ShockPoint& pb = net.paths[j].samples[net.paths[j].samples.size() - 2];
                const Window win{std::max(0.0, std::min(pa.x, pb.x) - w), std::max(pa.x, pb.x) + w};
                auto separate = [&](double tau) {
                    return interior_atoms(scan_time_slice(problem, tau, win.lo, win.hi)).size() >= 2;
                };
                const double tm = bisect_last_true(separate, t, tn);
                const TimeSlice at = scan_time_slice(problem, std::nextafter(tm, t_end + 1.0), win.lo, win.hi);
                const auto atoms = interior_atoms(at);
                double xm = a.x;
                for (const AtomRecord* r : atoms)
                    if (std::fabs(r->x_atom - a.x) < std::fabs(xm - a.x) || xm == a.x) xm = r->x_atom;
                net.merges.push_back({tm, xm, i, j});
                net.paths[j].merged_at = tm;
                net.paths[j].samples.pop_back();
                active[j] = false;
            }
        }
        t = tn;
    }
    return net;
}

ShockPath trace_shock_path(const Problem& problem, const ShockPoint& seed, double t_end, double dt) {
    return trace_shock_paths(problem, {seed}, t_end, dt).paths.front();
}

}  // namespace pgd
