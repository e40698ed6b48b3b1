#include "pgd/profile.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pgd/error.hpp"

namespace pgd {

namespace {

// Per-segment integrand rates: constant part c for M,P,B,K and the η-weighted parts for A,Q.
struct Rates {
    double m, p, a, b, k, q;
};

Rates rates_for(ProfileKind kind, double rho, double u) {
    if (kind == ProfileKind::initial) return {rho, rho * u, rho, rho * u, rho * u * u, rho * u};
    return {rho, rho * u * u, rho * u * u, rho * u, rho * u * u * u, rho * u * u * u};
}

Cumulants advance(const Cumulants& c0, const Rates& r, double s0, double s) {
    const double ds = s - s0;
    const double moment = 0.5 * (s * s - s0 * s0);
    return {c0.M + r.m * ds, c0.P + r.p * ds, c0.A + r.a * moment,
            c0.B + r.b * ds, c0.K + r.k * ds, c0.Q + r.q * moment};
}

}  // namespace

PiecewiseProfile PiecewiseProfile::build(ProfileKind kind, std::span<const Segment> segments,
                                         double eps_floor) {
    if (segments.empty()) throw Error(ErrorCode::schema_error, "profile needs at least one segment");
    PiecewiseProfile p;
    p.kind_ = kind;
    p.eps_floor_ = eps_floor;
    double start = 0.0;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const Segment& seg = segments[i];
        const bool last = i + 1 == segments.size();
        if (!(seg.end > start) || (!last && !std::isfinite(seg.end)))
            throw Error(ErrorCode::non_increasing_breakpoints, "segment " + std::to_string(i));
        if (!(seg.density >= 0.0))
            throw Error(ErrorCode::negative_density, "segment " + std::to_string(i));
        if (!std::isfinite(seg.velocity))
            throw Error(ErrorCode::schema_error, "segment " + std::to_string(i) + ": velocity not finite");
        if (kind == ProfileKind::boundary && !(seg.velocity > 0.0))
            throw Error(ErrorCode::non_positive_boundary_velocity, "segment " + std::to_string(i));
        p.start_.push_back(start);
        p.density_.push_back(std::max(seg.density, eps_floor));
        p.velocity_.push_back(seg.velocity);
        start = seg.end;
    }
    // the last segment is unbounded whatever its declared end
    p.at_start_.resize(p.start_.size());
    for (std::size_t i = 1; i < p.start_.size(); ++i) {
        const Rates r = rates_for(kind, p.density_[i - 1], p.velocity_[i - 1]);
        p.at_start_[i] = advance(p.at_start_[i - 1], r, p.start_[i - 1], p.start_[i]);
    }
    p.velocity_sup_ = *std::max_element(p.velocity_.begin(), p.velocity_.end());
    p.velocity_inf_ = *std::min_element(p.velocity_.begin(), p.velocity_.end());
    p.density_max_ = *std::max_element(p.density_.begin(), p.density_.end());
    return p;
}

PiecewiseProfile PiecewiseProfile::sample(ProfileKind kind,
                                          const std::function<std::pair<double, double>(double)>& data,
                                          double length, std::size_t n, double eps_floor) {
    if (n == 0 || !(length > 0.0)) throw Error(ErrorCode::schema_error, "sampling needs n > 0 and length > 0");
    std::vector<Segment> segs(n);
    const double h = length / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto [rho, u] = data((static_cast<double>(i) + 0.5) * h);
        segs[i] = {i + 1 == n ? kInfinity : h * static_cast<double>(i + 1), rho, u};
    }
    return build(kind, segs, eps_floor);
}

std::size_t PiecewiseProfile::segment_index(double s) const {
    const auto it = std::upper_bound(start_.begin(), start_.end(), s);
    return it == start_.begin() ? 0 : static_cast<std::size_t>(it - start_.begin()) - 1;
}

Cumulants PiecewiseProfile::cumulants(double s) const {
    if (s < 0.0) throw Error(ErrorCode::negative_argument, "cumulant argument " + std::to_string(s));
    if (s == 0.0) return {};
    const std::size_t i = segment_index(s);
    return advance(at_start_[i], rates_for(kind_, density_[i], velocity_[i]), start_[i], s);
}

double PiecewiseProfile::speed_bound() const {
    return std::max(std::fabs(velocity_sup_), std::fabs(velocity_inf_));
}

std::vector<Segment> PiecewiseProfile::segments() const {
    std::vector<Segment> out(start_.size());
    for (std::size_t i = 0; i < start_.size(); ++i) out[i] = {segment_end(i), density_[i], velocity_[i]};
    return out;
}

}  // namespace pgd
