#include <doctest.h>

#include <cmath>
#include <random>

#include "pgd/field.hpp"
#include "scenarios.hpp"

using namespace pgd;
using pgd::testing::boundary_takeoff;
using pgd::testing::raref_delta;
using pgd::testing::two_deltas;

TEST_CASE("velocity in the three regions of the rarefaction scenario") {
    const Problem& p = raref_delta();
    CHECK(velocity(p, 0.5, 2.0) == doctest::Approx(1.0));
    CHECK(velocity(p, 1.5, 1.0) == doctest::Approx(1.5));  // fan x/t
    CHECK(velocity(p, 2.0, 0.5) == doctest::Approx(0.0).scale(1.0));
    CHECK(velocity(p, 1.2, 0.5) == doctest::Approx(2.0));
    CHECK(velocity(p, 3.0, 0.5) == doctest::Approx(-2.0));
}

TEST_CASE("mass and momentum potentials") {
    const Problem& p = raref_delta();
    CHECK(mass_potential(p, 3.0, 0.25) == doctest::Approx(3.5));  // m = x + 2t
    CHECK(mass_potential(p, 0.5, 2.0) == doctest::Approx(-1.5));  // m = x − t
    for (double t : {0.5, 2.0, 5.0, 7.0}) CHECK(mass_potential(p, 0.0, t) == doctest::Approx(-t));
    CHECK(momentum_potential(p, 3.0, 0.25) == doctest::Approx(1.0));
    CHECK(momentum_potential(p, 0.5, 2.0) == doctest::Approx(-1.5));
}

TEST_CASE("energy potential") {
    const Problem& p = raref_delta();
    CHECK(energy_potential(p, 3.0, 0.25) == doctest::Approx(5.0).epsilon(1e-12));
    // labels η < 1/3 already ride the mixed atom at speed −1/2
    CHECK(energy_potential(p, 0.5, 2.0) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("maximum principle and monotone mass on grids") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> T(0.05, 9.0);
    for (const Problem* p : {&raref_delta(), &boundary_takeoff(), &two_deltas()}) {
        const double lo = std::min(p->initial.velocity_inf(), p->boundary.velocity_inf());
        const double hi = std::max(p->initial.velocity_sup(), p->boundary.velocity_sup());
        for (int k = 0; k < 8; ++k) {
            const double t = T(rng);
            double prev = -1e300;
            for (double x = 0.0; x <= 5.0; x += 0.0371) {
                const SolutionSample s = sample_solution(*p, x, t);
                CHECK(s.u >= std::min(lo, 0.0) - 1e-9);
                CHECK(s.u <= hi + 1e-9);
                CHECK(s.m >= prev - 1e-12);
                prev = s.m;
            }
        }
    }
}

TEST_CASE("u(0+) is negative where the initial data strictly dominates the wall") {
    const Problem& p = boundary_takeoff();
    for (double t : {0.5, 1.0, 3.0, 6.0}) {
        REQUIRE(classify(p, 0.0, t).tag == RegimeTag::initial_dominated);
        if (t < 1.0) CHECK(velocity_right_limit(p, 0.0, t) < 0.0);
    }
}

TEST_CASE("slice structure at t=0.5 on the rarefaction scenario") {
    const TimeSlice s = scan_time_slice(raref_delta(), 0.5, 0.0, 4.0);
    REQUIRE(s.atoms.size() == 1);
    const AtomRecord& a = s.atoms.front();
    CHECK(a.x_atom == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(a.mass == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(std::fabs(a.u_atom) < 1e-9);
    CHECK(a.location_kind == AtomLocation::interior);
    CHECK(a.source == AtomSource::initial_only);
}

TEST_CASE("density profile: fan vacuum, atom and unit density elsewhere") {
    std::vector<double> grid;
    for (double x = 0.05; x < 4.0; x += 0.1) grid.push_back(x);
    const DensityProfile d = density_profile(raref_delta(), 0.5, grid);
    for (const auto& [x, rho] : d.ac_samples) {
        if (x > 0.5 && x < 1.0) CHECK(rho == 0.0);
        else CHECK(rho == doctest::Approx(1.0));
    }
    REQUIRE(d.atoms.size() == 1);
    CHECK(d.atoms.front().mass == doctest::Approx(2.0));
}

TEST_CASE("boundary atom after absorption carries 3t") {
    const DensityProfile d = density_profile(raref_delta(), 6.0, {0.0, 0.5, 1.0, 2.0});
    bool found = false;
    for (const AtomRecord& a : d.atoms) {
        if (a.location_kind != AtomLocation::boundary) continue;
        found = true;
        CHECK(a.x_atom == 0.0);
        CHECK(a.mass == doctest::Approx(18.0).epsilon(1e-9));
    }
    CHECK(found);
    for (const auto& sample : d.ac_samples) CHECK(sample.second == doctest::Approx(1.0));
}

TEST_CASE("one-sided limits around the stationary shock") {
    const Problem& p = raref_delta();
    CHECK(velocity_left_limit(p, 2.0, 0.5) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(velocity_right_limit(p, 2.0, 0.5) == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(velocity_right_limit(p, 0.0, 2.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("right limits of m and q at the wall") {
    const Problem& p = raref_delta();
    CHECK(mass_right_limit_at_zero(p, 2.0) == doctest::Approx(-2.0));
    CHECK(momentum_right_limit_at_zero(p, 2.0) == doctest::Approx(-2.0));
    CHECK(mass_right_limit_at_zero(p, 6.0) == doctest::Approx(12.0));  // 18 held at the wall, −6 influx
}

TEST_CASE("fields need positive time") {
    CHECK_THROWS_AS(velocity(raref_delta(), 1.0, 0.0), Error);
}
