#include "pgd/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "pgd/error.hpp"

namespace pgd {

namespace {

void require_positive_time(double t) {
    if (!(t > 0.0)) throw Error(ErrorCode::negative_argument, "t must be positive");
}

// Boundary atom mass m(0⁺,t) − m(0,t); zero while F(0,t) > G(0,t).
double wall_atom_mass(const Problem& problem, double t) {
    return mass_right_limit_at_zero(problem, t) + problem.boundary.cumulants(t).B;
}

template <class F>
double adaptive(F f, double a, double b, unsigned depth) {
    double err = 0.0;
    double l1 = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, depth, 1e-13, &err, &l1);
    if (err > 1e-8 * (1.0 + l1))
        throw Error(ErrorCode::quadrature_not_converged, "error estimate " + std::to_string(err));
    return v;
}

}  // namespace

const char* relation_name(Relation r) {
    switch (r) {
        case Relation::equality: return "equality";
        case Relation::at_least: return "at_least";
        case Relation::at_most: return "at_most";
    }
    return "?";
}

bool effectively_compact(const Problem& problem, double x_max) {
    const PiecewiseProfile& ini = problem.initial;
    const std::size_t last = ini.segment_count() - 1;
    std::size_t first_thin = last + 1;
    for (std::size_t i = ini.segment_count(); i-- > 0;) {
        if (ini.segment_density(i) > 2.0 * ini.eps_floor()) break;
        first_thin = i;
    }
    return first_thin <= last && ini.segment_start(first_thin) < x_max;
}

BalanceReport mass_balance(const Problem& problem, double t, double x_max) {
    if (!effectively_compact(problem, x_max))
        throw Error(ErrorCode::non_compact_scenario, "initial mass not confined below x_max");
    BalanceReport r;
    r.t = t;
    r.relation = Relation::equality;
    r.expected = problem.initial.cumulants(x_max).M + problem.boundary.cumulants(t).B;
    r.total = t > 0.0 ? mass_potential(problem, x_max, t) - mass_potential(problem, 0.0, t)
                      : problem.initial.cumulants(x_max).M;
    r.residual = r.total - r.expected;
    return r;
}

BalanceReport momentum_balance(const Problem& problem, double t, double x_max) {
    if (!effectively_compact(problem, x_max))
        throw Error(ErrorCode::non_compact_scenario, "initial mass not confined below x_max");
    BalanceReport r;
    r.t = t;
    const double p0 = problem.initial.cumulants(x_max).P;
    if (t == 0.0) {
        r.total = r.expected = p0;
        return r;
    }
    const double pb = problem.boundary.cumulants(t).P;
    const PointState wall = evaluate_point(problem, 0.0, t);
    // u dm over [0, x_max]: the wall atom carries u(0,t)·mass
    const double atom = velocity_from_state(problem, wall) * wall_atom_mass(problem, t);
    r.total = momentum_potential(problem, x_max, t) - momentum_right_limit_at_zero(problem, t) + atom;
    if (wall.regime.tag == RegimeTag::initial_dominated) {
        r.relation = Relation::at_least;
        r.expected = p0 - pb;
    } else {
        r.relation = Relation::equality;
        r.expected = p0 + pb;
    }
    r.residual = r.total - r.expected;
    return r;
}

EntropyReport entropy_report(const Problem& problem, double t, double x_lo, double x_hi, std::size_t n_samples) {
    require_positive_time(t);
    EntropyReport rep;
    rep.t = t;
    for (const ShockPoint& s : locate_shocks(problem, t, x_lo, x_hi, n_samples)) {
        ++rep.checked;
        bool ok;
        if (s.location == AtomLocation::boundary) {
            ok = std::fabs(s.u_left - s.u_right) <= 1e-9 * (1.0 + std::fabs(s.u_left)) || s.u_left > s.u_right;
        } else {
            ok = s.u_left > s.u_shock && s.u_shock > s.u_right;
        }
        if (!ok) rep.violations.push_back({s.x, s.u_left, s.u_shock, s.u_right});
    }
    if (x_lo == 0.0 && wall_atom_mass(problem, t) <= 0.0) {
        // no wall atom: u must be right-continuous at x=0 or drop into the domain
        ++rep.checked;
        const double u0 = velocity(problem, 0.0, t);
        const double u0p = velocity_right_limit(problem, 0.0, t);
        if (!(std::fabs(u0 - u0p) <= 1e-9 * (1.0 + std::fabs(u0)) || u0 > u0p))
            rep.violations.push_back({0.0, u0, u0, u0p});
    }
    return rep;
}

std::vector<BoundaryTraceRow> boundary_trace(const Problem& problem, const std::vector<double>& t_grid) {
    std::vector<BoundaryTraceRow> out;
    for (double t : t_grid) {
        require_positive_time(t);
        BoundaryTraceRow row;
        row.t = t;
        row.regime = classify(problem, 0.0, t).tag;
        row.u_limit = velocity_right_limit(problem, 0.0, t);
        row.u_b = problem.boundary.velocity_at(t);
        row.atom_mass = row.regime == RegimeTag::boundary_dominated ? 0.0 : wall_atom_mass(problem, t);
        out.push_back(row);
    }
    return out;
}

std::vector<InitialTraceRow> initial_trace(const Problem& problem, const std::vector<double>& x_grid, double t_small) {
    require_positive_time(t_small);
    std::vector<InitialTraceRow> out;
    for (double x : x_grid) {
        const Cumulants c = problem.initial.cumulants(x);
        out.push_back({x, velocity(problem, x, t_small), mass_potential(problem, x, t_small),
                       problem.initial.velocity_at(x), c.M});
    }
    return out;
}

double second_potential_H(const Problem& problem, double x, double t) {
    require_positive_time(t);
    const PointState s = evaluate_point(problem, x, t);
    // free labels move with their data velocity; labels inside an atom sit at the atom
    if (s.regime.tag == RegimeTag::boundary_dominated) {
        const PiecewiseProfile& b = problem.boundary;
        const double tau = s.g.arg_lo;
        auto free_part = [&](const Cumulants& c) { return t * c.K - c.Q - x * c.P; };
        double sum = free_part(b.cumulants(tau));
        const TimeSlice slice = scan_time_slice(problem, t, x, std::max(x, t * b.velocity_sup()) + 1.0);
        for (const AtomRecord& a : slice.atoms) {
            if (detail::strict_side(a.left) == detail::Side::initial) continue;
            const double hi = std::min(a.left.g.arg_lo, tau);
            const double lo =
                std::min(detail::strict_side(a.right) == detail::Side::boundary ? a.right.g.arg_lo : 0.0, hi);
            if (hi <= lo) continue;
            const Cumulants cl = b.cumulants(lo), ch = b.cumulants(hi);
            sum += (a.x_atom - x) * (ch.P - cl.P) - (free_part(ch) - free_part(cl));
        }
        return -sum;
    }
    const PiecewiseProfile& ini = problem.initial;
    const double y = s.f.arg_lo;
    auto free_part = [&](const Cumulants& c) { return c.Q + t * c.K - x * c.P; };
    double sum = free_part(ini.cumulants(y));
    const TimeSlice slice = scan_time_slice(problem, t, 0.0, x);
    for (const AtomRecord& a : slice.atoms) {
        double lo, hi;
        if (a.location_kind == AtomLocation::boundary) {
            lo = 0.0;
            hi = a.right.f.arg_hi;
        } else {
            if (detail::strict_side(a.right) == detail::Side::boundary) continue;
            hi = a.right.f.arg_lo;
            lo = detail::strict_side(a.left) == detail::Side::initial ? a.left.f.arg_lo : 0.0;
        }
        hi = std::min(hi, y);
        lo = std::min(lo, hi);
        if (hi <= lo) continue;
        const Cumulants cl = ini.cumulants(lo), ch = ini.cumulants(hi);
        sum += (a.x_atom - x) * (ch.P - cl.P) - (free_part(ch) - free_part(cl));
    }
    return sum;
}

double integrate_mass_in_x(const Problem& problem, double t, double x1, double x2) {
    require_positive_time(t);
    if (x2 < x1) return -integrate_mass_in_x(problem, t, x2, x1);
    const TimeSlice slice = scan_time_slice(problem, t, x1, x2, 32);
    std::vector<double> cuts{x1};
    for (double b : slice.breaks)
        if (b > cuts.back() && b < x2) cuts.push_back(b);
    cuts.push_back(x2);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double w = cuts[i + 1] - cuts[i];
        if (w <= 0.0) continue;
        // sliver pieces straddle a jump that the scan only brackets; width bounds the error
        if (w < 1e-9) {
            total += w * mass_potential(problem, 0.5 * (cuts[i] + cuts[i + 1]), t);
            continue;
        }
        total += adaptive([&](double x) { return mass_potential(problem, x, t); }, cuts[i], cuts[i + 1], 15);
    }
    return total;
}

double integrate_momentum_in_t(const Problem& problem, double x, double t1, double t2) {
    if (t2 < t1) return -integrate_momentum_in_t(problem, x, t2, t1);
    require_positive_time(t1);
    // q(x,·) is smooth while the piece covering x keeps its tag; split at tag changes
    auto tag_at = [&](double t) { return detail::piece_tag(evaluate_point(problem, x, t)); };
    constexpr int kCells = 64;
    std::vector<double> cuts{t1};
    double ta = t1;
    detail::PieceTag ga = tag_at(ta);
    for (int i = 1; i <= kCells; ++i) {
        const double tb = i == kCells ? t2 : t1 + (t2 - t1) * i / kCells;
        const detail::PieceTag gb = tag_at(tb);
        if (!(ga == gb)) {
            double lo = ta, hi = tb;
            while (hi - lo > 1e-13 * (1.0 + hi)) {
                const double mid = 0.5 * (lo + hi);
                (tag_at(mid) == ga ? lo : hi) = mid;
            }
            cuts.push_back(0.5 * (lo + hi));
        }
        ta = tb;
        ga = gb;
    }
    cuts.push_back(t2);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double w = cuts[i + 1] - cuts[i];
        if (w <= 0.0) continue;
        if (w < 1e-9) {
            total += w * momentum_potential(problem, x, 0.5 * (cuts[i] + cuts[i + 1]));
            continue;
        }
        total += adaptive([&](double t) { return momentum_potential(problem, x, t); }, cuts[i], cuts[i + 1], 15);
    }
    return total;
}

DerivativeCheck radon_nikodym_check(const Problem& problem, double x, double t, double h0, int levels) {
    require_positive_time(t);
    if (!(x > 0.0)) throw Error(ErrorCode::negative_argument, "x must be positive");
    DerivativeCheck out;
    out.x = x;
    out.t = t;
    out.u = velocity(problem, x, t);
    double h = std::min(h0, 0.5 * x);
    const double h_min = 1e-9 * (1.0 + x);
    for (int k = 1; k < levels; ++k) h *= 0.5;
    const TimeSlice slice = scan_time_slice(problem, t, x - h, x + h);
    auto off_center = [&](double b) { return std::fabs(b - x) > 1e-11 * (1.0 + x); };
    for (;;) {
        const bool clean = std::none_of(slice.breaks.begin(), slice.breaks.end(), [&](double b) {
            return off_center(b) && b > x - h && b < x + h;
        });
        if (clean || h <= h_min) break;
        h *= 0.5;
    }
    out.h = h;
    const double dm = mass_potential(problem, x + h, t) - mass_potential(problem, x - h, t);
    if (dm < 1e-12) {
        out.skipped = true;
        return out;
    }
    out.dq_dm = (momentum_potential(problem, x + h, t) - momentum_potential(problem, x - h, t)) / dm;
    out.de_dm = (energy_potential(problem, x + h, t) - energy_potential(problem, x - h, t)) / dm;
    return out;
}

double bump_profile(double s, double a, double b) {
    if (s <= a || s >= b) return 0.0;
    const double half = 0.5 * (b - a);
    const double u = std::min(s - a, b - s) / half;
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

double bump_profile_derivative(double s, double a, double b) {
    if (s <= a || s >= b) return 0.0;
    const double half = 0.5 * (b - a);
    const bool rising = s - a <= b - s;
    const double u = (rising ? s - a : b - s) / half;
    const double d = 30.0 * u * u * (1.0 - u) * (1.0 - u) / half;
    return rising ? d : -d;
}

namespace {

constexpr std::array<double, 4> kGl4Nodes{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                          0.8611363115940526};
constexpr std::array<double, 4> kGl4Weights{0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                            0.3478548451374538};
constexpr std::array<double, 3> kGl3Nodes{-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr std::array<double, 3> kGl3Weights{0.5555555555555556, 0.8888888888888888, 0.5555555555555556};

struct SliceIntegrals {
    double i1 = 0.0;
    double i2 = 0.0;
};

class WeakIntegrator {
public:
    WeakIntegrator(const Problem& problem, const BumpSpec& bump, bool atoms)
        : problem_(problem), bump_(bump), atoms_(atoms) {}

    using Signature = std::vector<std::array<std::size_t, 4>>;

    // x-structure of the solution inside the bump support.
    Signature signature(double t) const {
        const TimeSlice slice = scan_time_slice(problem_, t, bump_.x0, bump_.x1, 16);
        Signature sig;
        const auto cuts = cuts_of(slice);
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            if (cuts[i + 1] - cuts[i] < 1e-9) continue;
            const PointState s = evaluate_point(problem_, 0.5 * (cuts[i] + cuts[i + 1]), t);
            const detail::PieceTag tag = detail::piece_tag(s);
            const std::array<std::size_t, 4> key{static_cast<std::size_t>(tag.side),
                                                 static_cast<std::size_t>(tag.kind), tag.segment, 0};
            if (sig.empty() || sig.back() != key) sig.push_back(key);
        }
        // the bump is only C² at its center, so a front crossing it is an event too
        const double xc = 0.5 * (bump_.x0 + bump_.x1);
        std::size_t left_of_center = 0;
        double last = -kInfinity;
        for (double b : slice.breaks) {
            if (b - last > 1e-9 && b < xc) ++left_of_center;
            last = b;
        }
        sig.push_back({8, left_of_center, 0, 0});
        for (const AtomRecord& a : slice.atoms)
            sig.push_back({9, static_cast<std::size_t>(a.source), a.x_atom < xc ? 0u : 1u, 1});
        return sig;
    }

    SliceIntegrals at_time(double t) const {
        const TimeSlice slice = scan_time_slice(problem_, t, bump_.x0, bump_.x1, 16);
        const double bt = bump_profile(t, bump_.t0, bump_.t1);
        const double dbt = bump_profile_derivative(t, bump_.t0, bump_.t1);
        SliceIntegrals out;
        const auto cuts = cuts_of(slice);
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double a = cuts[i], b = cuts[i + 1];
            if (b - a <= 0.0) continue;
            const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
            for (std::size_t k = 0; k < 4; ++k) {
                const double x = mid + half * kGl4Nodes[k];
                const double w = half * kGl4Weights[k];
                const PointState s = evaluate_point(problem_, x, t);
                const double m = detail::strict_mass(problem_, s);
                const double rho = detail::piece_density(problem_, s);
                const double u = velocity_from_state(problem_, s);
                const double bx = bump_profile(x, bump_.x0, bump_.x1);
                const double dbx = bump_profile_derivative(x, bump_.x0, bump_.x1);
                const double phi = bx * bt, phi_t = bx * dbt, phi_x = dbx * bt;
                out.i1 += w * (phi_t * m - phi * u * rho);
                out.i2 += w * (phi_t * u + phi_x * u * u) * rho;
            }
        }
        if (atoms_) {
            for (const AtomRecord& a : slice.atoms) {
                const double bx = bump_profile(a.x_atom, bump_.x0, bump_.x1);
                const double dbx = bump_profile_derivative(a.x_atom, bump_.x0, bump_.x1);
                const double u = a.u_atom;
                out.i1 -= bx * bt * u * a.mass;
                out.i2 += (bx * dbt * u + dbx * bt * u * u) * a.mass;
            }
        }
        return out;
    }

    SliceIntegrals gauss3(double ta, double tb) const {
        SliceIntegrals out;
        const double half = 0.5 * (tb - ta), mid = 0.5 * (ta + tb);
        for (std::size_t k = 0; k < 3; ++k) {
            const SliceIntegrals s = at_time(mid + half * kGl3Nodes[k]);
            out.i1 += half * kGl3Weights[k] * s.i1;
            out.i2 += half * kGl3Weights[k] * s.i2;
        }
        return out;
    }

    // Splits [ta, tb] until both ends share one structure (or the cell is negligible).
    SliceIntegrals cell(double ta, const Signature& sa, double tb, const Signature& sb, int depth) const {
        if (sa == sb || tb - ta < 1e-12 * (1.0 + tb) || depth > 60) return gauss3(ta, tb);
        const double tm = 0.5 * (ta + tb);
        const Signature sm = signature(tm);
        const SliceIntegrals l = cell(ta, sa, tm, sm, depth + 1);
        const SliceIntegrals r = cell(tm, sm, tb, sb, depth + 1);
        return {l.i1 + r.i1, l.i2 + r.i2};
    }

private:
    std::vector<double> cuts_of(const TimeSlice& slice) const {
        std::vector<double> cuts{bump_.x0, 0.5 * (bump_.x0 + bump_.x1), bump_.x1};
        for (double b : slice.breaks)
            if (b > bump_.x0 && b < bump_.x1) cuts.push_back(b);
        std::sort(cuts.begin(), cuts.end());
        return cuts;
    }

    const Problem& problem_;
    BumpSpec bump_;
    bool atoms_;
};

}  // namespace

WeakResidual weak_residual(const Problem& problem, const BumpSpec& bump, std::size_t quad_n, bool include_atoms) {
    if (!(bump.x0 > 0.0 && bump.x1 > bump.x0 && bump.t0 > 0.0 && bump.t1 > bump.t0))
        throw Error(ErrorCode::negative_argument, "bump must sit inside the open quadrant");
    quad_n = std::max<std::size_t>(quad_n, 2);
    const WeakIntegrator integ(problem, bump, include_atoms);
    const double tc = 0.5 * (bump.t0 + bump.t1);
    WeakResidual out;
    for (const auto& [a, b] : {std::pair{bump.t0, tc}, std::pair{tc, bump.t1}}) {
        const std::size_t n = quad_n / 2;
        double ta = a;
        WeakIntegrator::Signature sa = integ.signature(ta);
        for (std::size_t i = 1; i <= n; ++i) {
            const double tb = i == n ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
            WeakIntegrator::Signature sb = integ.signature(tb);
            const SliceIntegrals c = integ.cell(ta, sa, tb, sb, 0);
            out.r1 += c.i1;
            out.r2 += c.i2;
            ta = tb;
            sa = std::move(sb);
        }
    }
    return out;
}

}  // namespace pgd
