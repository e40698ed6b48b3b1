#include "pgd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <ostream>
#include <queue>
#include <string>

#include "pgd/error.hpp"
#include "pgd/field.hpp"

namespace pgd {

namespace {

// Running evaluation of a section along increasing arguments; one segment walk per scan.
class SectionScan {
public:
    SectionScan(const PiecewiseProfile& prof, PotentialSide side, double x, double t)
        : prof_(prof), side_(side), x_(x), t_(t) {}

    double at(double s) {
        while (seg_ + 1 < prof_.segment_count() && prof_.segment_start(seg_ + 1) <= s) {
            ++seg_;
            base_ = prof_.cumulants(prof_.segment_start(seg_));
        }
        const double s0 = prof_.segment_start(seg_);
        const double rho = prof_.segment_density(seg_), u = prof_.segment_velocity(seg_);
        const double d = s - s0, sq = 0.5 * (s * s - s0 * s0);
        if (side_ == PotentialSide::initial) {
            const double M = base_.M + rho * d, P = base_.P + rho * u * d, A = base_.A + rho * sq;
            return t_ * P + A - x_ * M;
        }
        const double B = base_.B + rho * u * d, P = base_.P + rho * u * u * d, A = base_.A + rho * u * u * sq;
        return x_ * B - t_ * P + A;
    }

private:
    const PiecewiseProfile& prof_;
    PotentialSide side_;
    double x_, t_;
    std::size_t seg_ = 0;
    Cumulants base_{};
};

double section_value(const PiecewiseProfile& prof, PotentialSide side, double s, double x, double t) {
    return side == PotentialSide::initial ? eval_F(prof, s, x, t) : eval_G(prof, s, x, t);
}

double section_scale(const PiecewiseProfile& prof, PotentialSide side, double s, double x, double t) {
    const Cumulants c = prof.cumulants(s);
    if (side == PotentialSide::initial) return 1.0 + std::fabs(t * c.P) + std::fabs(c.A) + std::fabs(x * c.M);
    return 1.0 + std::fabs(x * c.B) + std::fabs(t * c.P) + std::fabs(c.A);
}

}  // namespace

MinimizerResult brute_force_minimize(const Problem& problem, PotentialSide side, double x, double t,
                                     std::size_t n) {
    if (!(x >= 0.0 && t >= 0.0)) throw Error(ErrorCode::negative_argument, "x and t must be nonnegative");
    n = std::max<std::size_t>(n, 10);
    const PiecewiseProfile& prof = side == PotentialSide::initial ? problem.initial : problem.boundary;
    const double hi = side == PotentialSide::initial ? x + t * prof.speed_bound() : t;
    MinimizerResult out;
    if (hi <= 0.0) return out;

    const double step = hi / static_cast<double>(n);
    std::vector<double> grid(n + 1);
    SectionScan scan(prof, side, x, t);
    for (std::size_t i = 0; i <= n; ++i) grid[i] = scan.at(i == n ? hi : step * static_cast<double>(i));
    const double grid_min = *std::min_element(grid.begin(), grid.end());
    // a basin's minimum lies within Lipschitz·step of its best grid value
    const double lip = prof.density_max() * (t * prof.speed_bound() + hi + x + 1.0) *
                       (side == PotentialSide::boundary ? std::max(1.0, prof.velocity_sup() * prof.velocity_sup()) : 1.0);
    const double band = lip * step + 1e-9 * (1.0 + std::fabs(grid_min));

    struct Found {
        double arg, value;
    };
    std::vector<Found> found;
    auto value = [&](double s) { return section_value(prof, side, s, x, t); };
    for (std::size_t i = 0; i <= n; ++i) {
        if (grid[i] > grid_min + band) continue;
        const bool left_ok = i == 0 || grid[i] <= grid[i - 1];
        const bool right_ok = i == n || grid[i] < grid[i + 1];
        if (!left_ok || !right_ok) continue;
        double a = i == 0 ? 0.0 : step * static_cast<double>(i - 1);
        double b = i == n ? hi : std::min(hi, step * static_cast<double>(i + 1));
        const double r = 0.5 * (std::sqrt(5.0) - 1.0);
        double c = b - r * (b - a), d = a + r * (b - a);
        double fc = value(c), fd = value(d);
        for (int k = 0; k < 200 && b - a > 1e-15 * (1.0 + hi); ++k) {
            if (fc <= fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - r * (b - a);
                fc = value(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + r * (b - a);
                fd = value(d);
            }
        }
        // the bracket ends are grid points or domain ends and may themselves be the minimum
        Found best{0.5 * (a + b), value(0.5 * (a + b))};
        for (double s : {a, b, i == 0 ? 0.0 : a, i == n ? hi : b}) {
            const double v = value(s);
            if (v < best.value) best = {s, v};
        }
        found.push_back(best);
    }
    if (found.empty()) found.push_back({0.0, 0.0});
    const auto best = std::min_element(found.begin(), found.end(), [](const Found& a, const Found& b) {
        return a.value < b.value;
    });
    const double tol = 1e-9 * section_scale(prof, side, best->arg, x, t);
    out.value = best->value;
    out.arg_lo = hi;
    out.arg_hi = 0.0;
    for (const Found& f : found) {
        if (f.value > best->value + tol) continue;
        out.arg_lo = std::min(out.arg_lo, f.arg);
        out.arg_hi = std::max(out.arg_hi, f.arg);
    }
    out.lo_kind = out.hi_kind = ArgKind::critical;
    out.lo_segment = prof.segment_index(out.arg_lo);
    out.hi_segment = prof.segment_index(out.arg_hi);
    return out;
}

namespace {

// Event-driven sticky particles on a doubly linked list; events are invalidated by version stamps.
class StickySystem {
public:
    StickySystem(const Problem& problem, const SimulationOptions& opt) : problem_(problem), opt_(opt) {}

    Trajectory run() {
        seed_particles();
        const double inject_dt = injection_step();
        const std::size_t n_inject = static_cast<std::size_t>(std::ceil(opt_.t_end / inject_dt));
        max_events_ = opt_.max_events ? opt_.max_events : 50 * (nodes_.size() + n_inject + 1);
        for (int i = head_; i >= 0; i = nodes_[i].next) schedule_around(i);

        std::vector<double> snaps = opt_.snapshot_times;
        std::sort(snaps.begin(), snaps.end());
        std::size_t snap_i = 0, inject_i = 0;
        Trajectory traj;
        for (;;) {
            // injection k covers [k·dt, (k+1)·dt] and enters at the interval midpoint
            const double t_inject =
                inject_i < n_inject ? (static_cast<double>(inject_i) + 0.5) * inject_dt : kInfinity;
            const double t_snap = snap_i < snaps.size() ? snaps[snap_i] : kInfinity;
            const double t_ext = std::min({t_inject, t_snap, opt_.t_end});
            advance_to(t_ext, traj);
            if (t_snap <= t_inject && t_snap <= opt_.t_end) {
                traj.snapshots.push_back(snapshot(t_snap));
                ++snap_i;
                continue;
            }
            if (t_inject < opt_.t_end && t_inject <= t_snap) {
                const double a = static_cast<double>(inject_i) * inject_dt;
                const double b = std::min(opt_.t_end, a + inject_dt);
                inject(t_inject, a, b, traj);
                ++inject_i;
                continue;
            }
            break;
        }
        return traj;
    }

private:
    struct Node {
        double x0, t0, mass, momentum;
        int prev, next;
        unsigned version;
        bool alive;
        double position(double t) const { return x0 + momentum / mass * (t - t0); }
        double velocity() const { return momentum / mass; }
    };
    enum class Kind { collision, wall };
    struct Event {
        double t;
        Kind kind;
        int a, b;
        unsigned va, vb;
        bool operator>(const Event& o) const { return t > o.t; }
    };

    double injection_step() const {
        if (opt_.inject_dt > 0.0) return opt_.inject_dt;
        const double flux = problem_.boundary.density_max() * std::max(problem_.boundary.velocity_sup(), 1e-12);
        return std::min(opt_.t_end, std::max(particle_mass_ / flux, opt_.t_end * 1e-6));
    }

    void seed_particles() {
        const PiecewiseProfile& ini = problem_.initial;
        const double length = opt_.x_extent + opt_.t_end * ini.speed_bound() + 1.0;
        const double total = ini.cumulants(length).M;
        const std::size_t n = std::max<std::size_t>(opt_.n_particles, 1);
        particle_mass_ = total / static_cast<double>(n);
        // label of cumulative mass level c, by bisection on the monotone M₀
        auto label = [&](double c) {
            double lo = 0.0, hi = length;
            for (int k = 0; k < 200 && hi - lo > 1e-15 * (1.0 + hi); ++k) {
                const double mid = 0.5 * (lo + hi);
                (ini.cumulants(mid).M < c ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        };
        double y_prev = 0.0;
        Cumulants c_prev{};
        for (std::size_t k = 0; k < n; ++k) {
            const double y_next = k + 1 == n ? length : label(particle_mass_ * static_cast<double>(k + 1));
            const Cumulants c_next = ini.cumulants(y_next);
            const double mass = c_next.M - c_prev.M;
            if (mass > 0.0) {
                // centre of mass of the label interval
                const double x = (c_next.A - c_prev.A) / mass;
                push_back({x, 0.0, mass, c_next.P - c_prev.P, -1, -1, 0, true});
            }
            y_prev = y_next;
            c_prev = c_next;
        }
        (void)y_prev;
    }

    void push_back(Node nd) {
        nd.prev = tail_;
        nd.next = -1;
        nodes_.push_back(nd);
        const int i = static_cast<int>(nodes_.size()) - 1;
        if (tail_ >= 0) nodes_[tail_].next = i;
        else head_ = i;
        tail_ = i;
    }

    void push_front(Node nd) {
        nd.prev = -1;
        nd.next = head_;
        nodes_.push_back(nd);
        const int i = static_cast<int>(nodes_.size()) - 1;
        if (head_ >= 0) nodes_[head_].prev = i;
        else tail_ = i;
        head_ = i;
    }

    void unlink(int i) {
        Node& nd = nodes_[i];
        nd.alive = false;
        if (nd.prev >= 0) nodes_[nd.prev].next = nd.next;
        else head_ = nd.next;
        if (nd.next >= 0) nodes_[nd.next].prev = nd.prev;
        else tail_ = nd.prev;
    }

    void schedule_pair(int a, int b) {
        if (a < 0 || b < 0) return;
        const Node& na = nodes_[a];
        const Node& nb = nodes_[b];
        const double dv = na.velocity() - nb.velocity();
        if (!(dv > 0.0)) return;
        const double gap = std::max(0.0, nb.position(now_) - na.position(now_));
        queue_.push({now_ + gap / dv, Kind::collision, a, b, na.version, nb.version});
    }

    void schedule_wall(int a) {
        if (a < 0 || a != head_) return;
        const Node& na = nodes_[a];
        if (!(na.velocity() < 0.0)) return;
        queue_.push({now_ + std::max(0.0, na.position(now_)) / -na.velocity(), Kind::wall, a, -1, na.version, 0});
    }

    void schedule_around(int i) {
        schedule_pair(nodes_[i].prev, i);
        schedule_pair(i, nodes_[i].next);
        schedule_wall(i);
    }

    bool valid(const Event& e) const {
        if (!nodes_[e.a].alive || nodes_[e.a].version != e.va) return false;
        if (e.kind == Kind::wall) return e.a == head_;
        return nodes_[e.b].alive && nodes_[e.b].version == e.vb && nodes_[e.a].next == e.b;
    }

    void advance_to(double t_stop, Trajectory& traj) {
        while (!queue_.empty() && queue_.top().t <= t_stop) {
            const Event e = queue_.top();
            queue_.pop();
            if (!valid(e)) continue;
            if (++events_ > max_events_) throw Error(ErrorCode::event_queue_overflow, "sticky particle event budget");
            now_ = std::max(now_, e.t);
            if (e.kind == Kind::wall) {
                const Node& nd = nodes_[e.a];
                wall_mass_ += nd.mass;
                wall_momentum_ += nd.momentum;
                unlink(e.a);
                traj.events.push_back({now_, 0.0, wall_mass_, 0.0});
                if (head_ >= 0) schedule_wall(head_);
                try_release(traj);
                continue;
            }
            Node& na = nodes_[e.a];
            const Node& nb = nodes_[e.b];
            const double x = na.position(now_);
            na.x0 = x;
            na.t0 = now_;
            na.mass += nb.mass;
            na.momentum += nb.momentum;
            ++na.version;
            unlink(e.b);
            traj.events.push_back({now_, x, na.mass, na.velocity()});
            schedule_around(e.a);
        }
        now_ = std::max(now_, t_stop);
    }

    bool wall_open(double t) const { return classify(problem_, 0.0, t).tag == RegimeTag::boundary_dominated; }

    void try_release(Trajectory& traj) {
        if (wall_mass_ <= 0.0 || !(wall_momentum_ > 0.0) || !wall_open(now_)) return;
        push_front({0.0, now_, wall_mass_, wall_momentum_, -1, -1, 0, true});
        traj.events.push_back({now_, 0.0, wall_mass_, wall_momentum_ / wall_mass_});
        wall_mass_ = wall_momentum_ = 0.0;
        schedule_around(head_);
    }

    void inject(double t, double a, double b, Trajectory& traj) {
        const Cumulants ca = problem_.boundary.cumulants(a), cb = problem_.boundary.cumulants(b);
        const double mass = cb.B - ca.B, momentum = cb.P - ca.P;
        now_ = t;
        if (mass <= 0.0) return;
        injected_ += mass;
        if (wall_mass_ > 0.0 || !wall_open(t)) {
            wall_mass_ += mass;
            wall_momentum_ += momentum;
            try_release(traj);
            return;
        }
        push_front({0.0, t, mass, momentum, -1, -1, 0, true});
        traj.events.push_back({t, 0.0, mass, momentum / mass});
        schedule_around(head_);
    }

    ParticleSystem snapshot(double t) const {
        ParticleSystem s;
        s.time = t;
        s.wall_mass = wall_mass_;
        s.wall_momentum = wall_momentum_;
        s.injected_mass = injected_;
        for (int i = head_; i >= 0; i = nodes_[i].next)
            s.particles.push_back({std::max(0.0, nodes_[i].position(t)), nodes_[i].mass, nodes_[i].momentum});
        return s;
    }

    const Problem& problem_;
    const SimulationOptions& opt_;
    std::vector<Node> nodes_;
    int head_ = -1, tail_ = -1;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
    double now_ = 0.0;
    double particle_mass_ = 0.0;
    double wall_mass_ = 0.0, wall_momentum_ = 0.0, injected_ = 0.0;
    std::size_t events_ = 0, max_events_ = 0;
};

}  // namespace

Trajectory sticky_particle_simulate(const Problem& problem, const SimulationOptions& options) {
    if (options.n_particles < 10) throw Error(ErrorCode::usage, "need at least 10 particles");
    if (!(options.t_end > 0.0)) throw Error(ErrorCode::negative_argument, "t_end must be positive");
    StickySystem sys(problem, options);
    return sys.run();
}

double compare_mass_potential(const Problem& problem, const Trajectory& trajectory, double t,
                              const std::vector<double>& x_grid) {
    const auto it = std::find_if(trajectory.snapshots.begin(), trajectory.snapshots.end(),
                                 [&](const ParticleSystem& s) { return s.time == t; });
    if (it == trajectory.snapshots.end()) throw Error(ErrorCode::usage, "no snapshot at t=" + std::to_string(t));
    const ParticleSystem& s = *it;
    std::vector<double> cum(s.particles.size() + 1, 0.0);
    for (std::size_t i = 0; i < s.particles.size(); ++i) cum[i + 1] = cum[i] + s.particles[i].mass;
    double worst = 0.0;
    for (double x : x_grid) {
        const auto k = std::upper_bound(s.particles.begin(), s.particles.end(), x,
                                        [](double v, const Particle& p) { return v < p.x; }) -
                       s.particles.begin();
        const double m_hat = cum[static_cast<std::size_t>(k)] + s.wall_mass - s.injected_mass;
        worst = std::max(worst, std::fabs(m_hat - mass_potential(problem, x, t)));
    }
    return worst;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
    out << "t,x,mass,velocity\n";
    for (const TrajectoryEvent& e : trajectory.events)
        out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", e.t, e.x, e.mass, e.velocity);
}

}  // namespace pgd
