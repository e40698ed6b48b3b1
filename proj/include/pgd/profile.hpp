#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace pgd {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kDefaultEpsFloor = 1e-8;

enum class ProfileKind { initial, boundary };

struct Segment final {
    double end = kInfinity;  // +inf marks the unbounded last segment
    double density = 0.0;
    double velocity = 0.0;
};

// Integrals over [0, s] of the data weights.
//   initial:  M=∫ρ  P=∫ρu   A=∫ηρ    B=∫ρu  K=∫ρu²  Q=∫ηρu
//   boundary: M=∫ρ  P=∫ρu²  A=∫ηρu²  B=∫ρu  K=∫ρu³  Q=∫ηρu³
// B is the transported mass for boundary data, K and Q feed the energy and H potentials.
struct Cumulants final {
    double M = 0.0;
    double P = 0.0;
    double A = 0.0;
    double B = 0.0;
    double K = 0.0;
    double Q = 0.0;
};

class PiecewiseProfile final {
public:
    PiecewiseProfile() = default;

    static PiecewiseProfile build(ProfileKind kind, std::span<const Segment> segments,
                                  double eps_floor = kDefaultEpsFloor);

    // Piecewise-constant approximation of (density, velocity)(s) on [0, length] with n cells;
    // the last cell's values extend to +inf.
    static PiecewiseProfile sample(ProfileKind kind,
                                   const std::function<std::pair<double, double>(double)>& data,
                                   double length, std::size_t n, double eps_floor = kDefaultEpsFloor);

    Cumulants cumulants(double s) const;

    // Right-continuous segment lookup.
    std::size_t segment_index(double s) const;
    double density_at(double s) const { return density_[segment_index(s)]; }
    double velocity_at(double s) const { return velocity_[segment_index(s)]; }

    std::size_t segment_count() const { return start_.size(); }
    double segment_start(std::size_t i) const { return start_[i]; }
    double segment_end(std::size_t i) const { return i + 1 < start_.size() ? start_[i + 1] : kInfinity; }
    double segment_density(std::size_t i) const { return density_[i]; }
    double segment_velocity(std::size_t i) const { return velocity_[i]; }

    ProfileKind kind() const { return kind_; }
    double eps_floor() const { return eps_floor_; }
    double velocity_sup() const { return velocity_sup_; }
    double velocity_inf() const { return velocity_inf_; }
    double speed_bound() const;  // sup |velocity|
    double density_max() const { return density_max_; }

    // Segments as supplied (after flooring); round-trips through build().
    std::vector<Segment> segments() const;

private:
    ProfileKind kind_ = ProfileKind::initial;
    double eps_floor_ = kDefaultEpsFloor;
    std::vector<double> start_;
    std::vector<double> density_;
    std::vector<double> velocity_;
    std::vector<Cumulants> at_start_;
    double velocity_sup_ = 0.0;
    double velocity_inf_ = 0.0;
    double density_max_ = 0.0;
};

}  // namespace pgd
