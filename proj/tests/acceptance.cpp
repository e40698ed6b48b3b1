// One PASS/FAIL line per acceptance criterion. Exit status 0 iff all pass.
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "pgd/diagnostics.hpp"
#include "pgd/oracle.hpp"
#include "scenarios.hpp"

using namespace pgd;
using pgd::testing::boundary_takeoff;
using pgd::testing::raref_delta;
using pgd::testing::two_deltas;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Accumulates a worst-case error against its tolerance.
struct Worst {
    double err = 0.0;
    double at = 0.0;
    void add(double e, double where) {
        if (!(e <= err)) {
            err = e;
            at = where;
        }
    }
};

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

std::vector<ShockPoint> interior_shocks(const Problem& p, double t, double lo, double hi) {
    std::vector<ShockPoint> out;
    for (const ShockPoint& s : locate_shocks(p, t, lo, hi))
        if (s.location == AtomLocation::interior) out.push_back(s);
    return out;
}

double wall_gap(const Problem& p, double t) {
    const PointState s = evaluate_point(p, 0.0, t);
    return s.f.value - s.g.value;
}

const std::vector<std::pair<const char*, const Problem*>>& scenarios() {
    static const std::vector<std::pair<const char*, const Problem*>> all{
        {"raref-delta", &raref_delta()}, {"boundary-takeoff", &boundary_takeoff()}, {"two-deltas", &two_deltas()}};
    return all;
}

Outcome raref_delta_statics() {
    Outcome o;
    Worst ex, em, eu;
    for (double t : {0.25, 0.5, 0.9}) {
        const auto shocks = interior_shocks(raref_delta(), t, 0.0, 4.0);
        if (shocks.size() != 1) {
            o.pass = false;
            o.detail += fmt::format("t={}: {} interior shocks; ", t, shocks.size());
            continue;
        }
        ex.add(std::fabs(shocks[0].x - 2.0), t);
        em.add(std::fabs(shocks[0].mass - 4.0 * t), t);
        eu.add(std::fabs(shocks[0].u_shock), t);
    }
    o.pass = o.pass && ex.err <= 1e-8 && em.err <= 1e-8 && eu.err <= 1e-8;
    o.detail += fmt::format("max |x-2|={:.2e} |m-4t|={:.2e} |u|={:.2e}", ex.err, em.err, eu.err);
    return o;
}

Outcome raref_delta_fan() {
    const double t = 0.5;
    Worst eu;
    for (double x : linspace(0.5 + 1e-3, 1.0 - 1e-3, 400)) eu.add(std::fabs(velocity(raref_delta(), x, t) - x / t), x);
    const InterfaceInterval iv = locate_interface_interval(raref_delta(), t);
    const double el = std::fabs(iv.l - 0.5), er = std::fabs(iv.r - 1.0);
    return {eu.err <= 1e-8 && !iv.empty && el <= 1e-6 && er <= 1e-6,
            fmt::format("max |u-x/t|={:.2e}; interface [{:.9f}, {:.9f}]", eu.err, iv.l, iv.r)};
}

Outcome shock_path_phases() {
    const auto seeds = interior_shocks(raref_delta(), 1.0, 0.0, 4.0);
    if (seeds.size() != 1) return {false, fmt::format("{} seeds at t=1", seeds.size())};
    const ShockPath path = trace_shock_path(raref_delta(), seeds[0], 6.0, 1.0 / 64.0);
    const double t_phase = 16.0 / 9.0, t_abs = 16.0 / 3.0;
    Worst ex, em;
    std::size_t n = 0;
    for (const ShockPoint& s : path.samples) {
        if (s.t < 1.0 || s.t > t_abs - 1e-9) continue;
        const bool first = s.t <= t_phase;
        const double x = first ? -2.0 * s.t + 4.0 * std::sqrt(s.t) : -0.5 * s.t + 8.0 / 3.0;
        const double m = first ? 4.0 * std::sqrt(s.t) : 3.0 * s.t;
        ex.add(std::fabs(s.x - x), s.t);
        em.add(std::fabs(s.mass - m), s.t);
        ++n;
    }
    const double ea = path.absorbed_at ? std::fabs(*path.absorbed_at - t_abs) : kInfinity;
    return {n > 100 && ex.err <= 1e-6 && em.err <= 1e-6 && ea <= 1e-6,
            fmt::format("{} samples; sup path err={:.2e} (t={:.3f}); mass err={:.2e}; absorption at {:.9f}", n,
                        ex.err, ex.at, em.err, path.absorbed_at.value_or(-1.0))};
}

Outcome boundary_regime_switch() {
    const Problem& p = raref_delta();
    const double t_abs = 16.0 / 3.0;
    Worst eu, em, e0;
    std::vector<double> before = linspace(0.02, t_abs - 0.02, 120), after = linspace(t_abs + 0.02, 8.0, 60);
    for (const BoundaryTraceRow& r : boundary_trace(p, before)) eu.add(std::fabs(r.u_limit - 1.0), r.t);
    for (const BoundaryTraceRow& r : boundary_trace(p, after)) em.add(std::fabs(r.atom_mass - 3.0 * r.t), r.t);
    for (double t : linspace(0.02, 8.0, 200)) e0.add(std::fabs(mass_potential(p, 0.0, t) + t), t);
    return {eu.err <= 1e-6 && em.err <= 1e-6 && e0.err == 0.0,
            fmt::format("max |u(0+)-1|={:.2e}; max |atom-3t|={:.2e}; max |m(0,t)+t|={:.2e}", eu.err, em.err, e0.err)};
}

Outcome two_deltas_merge() {
    const Problem& p = two_deltas();
    const auto seeds = interior_shocks(p, 1.2, 0.0, 4.0);
    if (seeds.size() != 2) return {false, fmt::format("{} seeds at t=1.2", seeds.size())};
    const ShockNetwork net = trace_shock_paths(p, seeds, 6.0, 1.0 / 64.0);
    if (net.merges.size() != 1) return {false, fmt::format("{} merges", net.merges.size())};
    const MergeEvent& mg = net.merges[0];
    const double e_merge = std::max(std::fabs(mg.x - 9.0 / 8.0), std::fabs(mg.t - 7.0 / 4.0));
    Worst e_path, e_mass;
    bool at_wall = false;
    for (const ShockPath& path : net.paths) {
        if (path.absorbed_at) at_wall = true;
        for (const ShockPoint& s : path.samples) {
            if (s.x <= 0.0) at_wall = true;
            if (s.t < mg.t - 1e-9) {
                // the slower, lighter atom carries the first boundary pulse
                const double m = s.mass < 3.0 * s.t - 0.5 ? s.t - 1.0 : 3.0 * s.t;
                e_mass.add(std::fabs(s.mass - m), s.t);
            } else if (s.t > mg.t + 1e-9) {
                e_mass.add(std::fabs(s.mass - (4.0 * s.t - 1.0)), s.t);
                if (s.t >= 2.0 && s.t <= 6.0) e_path.add(std::fabs(s.x - (0.75 + 17.0 / (32.0 * s.t - 12.0))), s.t);
            }
        }
    }
    return {e_merge <= 1e-6 && e_path.err <= 1e-8 && e_mass.err <= 1e-6 && !at_wall,
            fmt::format("merge ({:.9f}, {:.9f}); sup post-merge path err={:.2e} (t={:.3f}); mass err={:.2e}; "
                        "reaches wall: {}",
                        mg.x, mg.t, e_path.err, e_path.at, e_mass.err, at_wall ? "yes" : "no")};
}

Outcome boundary_takeoff_departure() {
    const Problem& p = boundary_takeoff();
    // departure: the wall gap F(0,t)−G(0,t) turns positive
    double a = 4.0, b = 10.0;
    if (!(wall_gap(p, a) < 0.0 && wall_gap(p, b) > 0.0)) return {false, "no sign change of F(0,t)-G(0,t) on [4,10]"};
    for (int k = 0; k < 60; ++k) {
        const double mid = 0.5 * (a + b);
        (wall_gap(p, mid) > 0.0 ? b : a) = mid;
    }
    const double t_dep = 0.5 * (a + b);
    const double m_dep = boundary_trace(p, {t_dep - 1e-9})[0].atom_mass;
    // departed atom: residual of t = x + 4 + 2√3·√(x+1) along the path for x ∈ [0, 2]
    Worst e_path;
    std::size_t n = 0;
    for (double t : linspace(t_dep + 1e-3, 12.0, 160)) {
        const auto shocks = interior_shocks(p, t, 0.0, 4.0);
        if (shocks.empty()) continue;
        const ShockPoint& s = *std::max_element(shocks.begin(), shocks.end(),
                                                [](const ShockPoint& l, const ShockPoint& r) { return l.mass < r.mass; });
        if (s.x > 2.0) break;
        e_path.add(std::fabs(t - (s.x + 4.0 + 2.0 * std::sqrt(3.0) * std::sqrt(s.x + 1.0))), s.x);
        ++n;
    }
    const double e_t = std::fabs(t_dep - (4.0 + 2.0 * std::sqrt(3.0)));
    const double rel_m = std::fabs(m_dep - 6.0) / 6.0;
    return {e_t <= 0.05 && n > 20 && e_path.err <= 0.05 && rel_m <= 0.02,
            fmt::format("departure t={:.6f}; {} path samples, max time err={:.2e}; departing mass={:.6f} "
                        "(rel. to 6: {:.3f})",
                        t_dep, n, e_path.err, m_dep, rel_m)};
}

Outcome mu_identities() {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> X(0.0, 4.0), T(0.05, 8.0);
    Worst w;
    std::size_t fails = 0;
    for (const auto& [name, p] : scenarios()) {
        for (int k = 0; k < 50; ++k) {
            double x1 = X(rng), x2 = X(rng);
            if (x1 > x2) std::swap(x1, x2);
            const double t = T(rng);
            const double mu1 = mu(*p, x1, t), mu2 = mu(*p, x2, t);
            const double ex = std::fabs(integrate_mass_in_x(*p, t, x1, x2) - (mu1 - mu2)) /
                              (1.0 + std::max(std::fabs(mu1), std::fabs(mu2)));
            double t1 = T(rng), t2 = T(rng);
            if (t1 > t2) std::swap(t1, t2);
            const double x = X(rng);
            const double nu1 = mu(*p, x, t1), nu2 = mu(*p, x, t2);
            const double et = std::fabs(integrate_momentum_in_t(*p, x, t1, t2) - (nu2 - nu1)) /
                              (1.0 + std::max(std::fabs(nu1), std::fabs(nu2)));
            w.add(std::max(ex, et), k);
            if (ex > 1e-6) ++fails;
            if (et > 1e-6) ++fails;
        }
    }
    return {fails == 0, fmt::format("300 identities; {} failures; worst relative residual {:.2e}", fails, w.err)};
}

Outcome conservation() {
    std::size_t mass_checked = 0, eq = 0, ineq = 0, fails = 0;
    Worst wm, wq;
    for (const auto& [name, p] : scenarios()) {
        const double x_max = 4.0;
        if (!effectively_compact(*p, x_max)) continue;
        for (double t : linspace(0.25, 10.0, 20)) {
            const BalanceReport mb = mass_balance(*p, t, x_max);
            ++mass_checked;
            wm.add(std::fabs(mb.residual), t);
            if (std::fabs(mb.residual) > 1e-6) ++fails;
            const BalanceReport qb = momentum_balance(*p, t, x_max);
            const bool f_ge_g = wall_gap(*p, t) >= 0.0;
            if (f_ge_g) {
                ++eq;
                wq.add(std::fabs(qb.residual), t);
                if (qb.relation != Relation::equality || std::fabs(qb.residual) > 1e-6) ++fails;
            } else {
                ++ineq;
                if (qb.relation != Relation::at_least || qb.residual < 0.0) ++fails;
            }
        }
    }
    return {mass_checked >= 20 && fails == 0,
            fmt::format("{} mass balances (worst {:.2e}); {} momentum equalities (worst {:.2e}); {} inequalities; "
                        "{} failures",
                        mass_checked, wm.err, eq, wq.err, ineq, fails)};
}

Outcome entropy() {
    std::size_t checked = 0, violations = 0;
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> T(0.05, 10.0);
    while (checked < 10000) {
        for (const auto& [name, p] : scenarios()) {
            const EntropyReport r = entropy_report(*p, T(rng), 0.0, 4.0, 16);
            checked += r.checked;
            violations += r.violations.size();
        }
    }
    return {violations == 0, fmt::format("{} shock evaluations; {} violations", checked, violations)};
}

Outcome radon_nikodym() {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> X(0.01, 4.0), T(0.05, 8.0);
    std::size_t used = 0, skipped = 0, fails = 0;
    Worst w;
    for (const auto& [name, p] : scenarios()) {
        for (int k = 0; k < 1000; ++k) {
            const DerivativeCheck c = radon_nikodym_check(*p, X(rng), T(rng));
            if (c.skipped) {
                ++skipped;
                continue;
            }
            ++used;
            const double e = std::max(std::fabs(c.dq_dm - c.u), std::fabs(c.de_dm - 0.5 * c.u * c.u));
            w.add(e, c.x);
            if (e > 1e-4) ++fails;
        }
    }
    return {fails == 0, fmt::format("{} points checked ({} skipped, zero mass); {} failures; worst {:.2e}", used,
                                    skipped, fails, w.err)};
}

Outcome oracle_equivalence() {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> X(0.0, 4.0), T(0.01, 8.0);
    std::size_t fails = 0;
    Worst w;
    for (int k = 0; k < 1000; ++k) {
        const Problem& p = *scenarios()[k % 3].second;
        const double x = X(rng), t = T(rng);
        const PointState s = evaluate_point(p, x, t);
        const double bf = brute_force_minimize(p, PotentialSide::initial, x, t, 100000).value;
        const double bg = brute_force_minimize(p, PotentialSide::boundary, x, t, 100000).value;
        const double scale = 1.0 + std::fabs(s.f.value) + std::fabs(s.g.value);
        const double e = std::max(std::fabs(bf - s.f.value), std::fabs(bg - s.g.value)) / scale;
        w.add(e, x);
        if (e > 1e-9) ++fails;
    }
    std::vector<double> grid;
    for (int k = 0; k < 400; ++k) grid.push_back(0.005 + 0.01 * k);
    auto discrepancy = [&](std::size_t n) {
        SimulationOptions opt;
        opt.n_particles = n;
        opt.t_end = 0.5;
        opt.x_extent = 4.0;
        opt.snapshot_times = {0.5};
        return compare_mass_potential(raref_delta(), sticky_particle_simulate(raref_delta(), opt), 0.5, grid);
    };
    const double d1 = discrepancy(10000), d2 = discrepancy(20000);
    return {fails == 0 && d1 <= 1e-2 && d2 < d1,
            fmt::format("1000 points, {} failures, worst {:.2e}; sticky particles sup|m-m_hat| {:.2e} (n=1e4), "
                        "{:.2e} (n=2e4)",
                        fails, w.err, d1, d2)};
}

Outcome weak_residuals() {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> X0(0.05, 3.0), W(0.3, 1.5), T0(0.05, 6.0), H(0.3, 2.0);
    std::size_t fails = 0;
    double worst512 = 0.0;
    for (const auto& [name, p] : scenarios()) {
        for (int k = 0; k < 10; ++k) {
            const double x0 = X0(rng), t0 = T0(rng);
            const BumpSpec bump{x0, x0 + W(rng), t0, t0 + H(rng)};
            double prev = kInfinity;
            bool ok = true;
            for (std::size_t n = 32; n <= 512; n *= 2) {
                const WeakResidual r = weak_residual(*p, bump, n);
                const double cur = std::max(std::fabs(r.r1), std::fabs(r.r2));
                if (prev > 1e-10 && !(cur <= prev / 4.0 || cur <= 1e-10)) ok = false;
                if (n == 512) {
                    worst512 = std::max(worst512, cur);
                    if (cur > 1e-4) ok = false;
                }
                prev = cur;
            }
            if (!ok) ++fails;
        }
    }
    return {fails == 0, fmt::format("30 bumps; {} failures; worst residual at quad_n=512 {:.2e}", fails, worst512)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"raref-delta statics", raref_delta_statics},
        {"raref-delta fan and interface", raref_delta_fan},
        {"shock path phases and absorption", shock_path_phases},
        {"boundary regime switch", boundary_regime_switch},
        {"two-deltas merge and post-merge path", two_deltas_merge},
        {"boundary-takeoff departure", boundary_takeoff_departure},
        {"mu identities", mu_identities},
        {"conservation", conservation},
        {"entropy", entropy},
        {"Radon-Nikodym derivatives", radon_nikodym},
        {"oracle equivalence", oracle_equivalence},
        {"weak residuals", weak_residuals},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        fmt::print("{} {:2d} {}: {} [{:.1f}s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail, secs);
        if (!o.pass) ++failed;
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
