#include <doctest.h>

#include <cmath>
#include <fmt/format.h>

#include <fstream>
#include <functional>
#include <json.hpp>
#include <string>

#include "pgd/diagnostics.hpp"
#include "scenarios.hpp"

using namespace pgd;
using pgd::testing::boundary_takeoff;
using pgd::testing::raref_delta;
using pgd::testing::two_deltas;

// Values frozen from the independent numpy brute-force oracle in tools/oracle/.
namespace {

const nlohmann::json& frozen() {
    static const nlohmann::json j = [] {
        std::ifstream in(PGD_ORACLE_VALUES);
        REQUIRE(in.good());
        return nlohmann::json::parse(in);
    }();
    return j;
}

void compare(const std::string& key, double actual) {
    INFO(key);
    REQUIRE(frozen().contains(key));
    const double expected = frozen()[key]["value"].get<double>();
    const double tol = frozen()[key]["tol"].get<double>();
    CHECK(std::fabs(actual - expected) <= tol * (1.0 + std::fabs(expected)));
}

std::string py(double v) {
    // Python float repr for the short literals used in keys
    std::string s = fmt::format("{}", v);
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos) s += ".0";
    return s;
}

ShockPoint single_shock(const Problem& p, double t, double lo, double hi) {
    const auto shocks = locate_shocks(p, t, lo, hi);
    REQUIRE(shocks.size() == 1);
    return shocks[0];
}

double wall_switch_time(const Problem& p, double a, double b) {
    auto gap = [&](double t) {
        const PointState s = evaluate_point(p, 0.0, t);
        return s.f.value - s.g.value;
    };
    const bool sa = gap(a) > 0.0;
    for (int k = 0; k < 60; ++k) {
        const double mid = 0.5 * (a + b);
        if ((gap(mid) > 0.0) == sa) a = mid;
        else b = mid;
    }
    return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("cumulants and potentials match the oracle") {
    const Problem& p = raref_delta();
    const Cumulants c = p.initial.cumulants(3.0);
    compare("s1.cumulant.M(3)", c.M);
    compare("s1.cumulant.P(3)", c.P);
    compare("s1.cumulant.A(3)", c.A);
    compare("s1.F(3.5;3,0.25)", eval_F(p.initial, 3.5, 3.0, 0.25));
    compare("unit.G(2;0,2)", eval_G(p.boundary, 2.0, 0.0, 2.0));
}

TEST_CASE("exact minimizers match the oracle") {
    const Problem& p = raref_delta();
    const std::pair<const char*, std::pair<double, double>> pts[] = {
        {"(3,0.25)", {3, 0.25}}, {"(2,0.5)", {2, 0.5}}, {"(0.5,2)", {0.5, 2}},
        {"(1.5,1)", {1.5, 1}},   {"(3,0.5)", {3, 0.5}}, {"(1,2)", {1, 2}}};
    for (const auto& [label, xt] : pts) {
        const auto [x, t] = xt;
        const MinimizerResult f = minimize_initial_potential(p.initial, x, t, p.tol);
        compare(std::string("s1.minF") + label + ".value", f.value);
        compare(std::string("s1.minF") + label + ".lo", f.arg_lo);
        compare(std::string("s1.minF") + label + ".hi", f.arg_hi);
        const MinimizerResult g = minimize_boundary_potential(p.boundary, x, t, p.tol);
        compare(std::string("s1.minG") + label + ".value", g.value);
        compare(std::string("s1.minG") + label + ".lo", g.arg_lo);
    }
    const Problem& p3 = two_deltas();
    compare("s3.minG(0.5,2.0).value", minimize_boundary_potential(p3.boundary, 0.5, 2.0, p3.tol).value);
    compare("s3.minG(1.0,3.0).value", minimize_boundary_potential(p3.boundary, 1.0, 3.0, p3.tol).value);
}

TEST_CASE("mass and momentum potentials match the oracle") {
    const Problem& p = raref_delta();
    const std::pair<double, double> pts[] = {{3.0, 0.25}, {1.0, 0.25}, {0.5, 2.0}, {0.0, 2.0},
                                             {1.5, 1.0},  {3.0, 0.5},  {0.7, 0.5}};
    for (const auto& [x, t] : pts) {
        const std::string at = "(" + py(x) + "," + py(t) + ")";
        compare("s1.m" + at, mass_potential(p, x, t));
        compare("s1.q" + at, momentum_potential(p, x, t));
    }
}

TEST_CASE("shocks match the oracle") {
    const ShockPoint s1 = single_shock(raref_delta(), 1.5, 1.5, 2.5);
    compare("s1.shock_x(t=1.5)", s1.x);
    compare("s1.shock_mass(t=1.5)", s1.mass);
    compare("s1.shock_u(t=1.5)", s1.u_shock);
    const ShockPoint s3 = single_shock(two_deltas(), 2.0, 0.9, 1.3);
    compare("s3.shock_x(t=2.0)", s3.x);
    compare("s3.shock_mass(t=2.0)", s3.mass);
    compare("s3.shock_u(t=2.0)", s3.u_shock);
}

TEST_CASE("energy and second potential match the label-space oracle") {
    const Problem& p = raref_delta();
    for (const auto& [x, t] : {std::pair{3.0, 0.25}, {0.5, 2.0}, {1.3, 0.5}}) {
        const std::string at = "(" + py(x) + "," + py(t) + ")";
        compare("s1.E" + at, energy_potential(p, x, t));
        compare("s1.H" + at, second_potential_H(p, x, t));
    }
}

TEST_CASE("interface interval and wall switches match the oracle") {
    const InterfaceInterval iv = locate_interface_interval(raref_delta(), 0.5);
    compare("s1.interface_l(0.5)", iv.l);
    compare("s1.interface_r(0.5)", iv.r);
    compare("s1.wall_switch_time", wall_switch_time(raref_delta(), 4.0, 6.0));
    compare("s2.wall_switch_time", wall_switch_time(boundary_takeoff(), 6.0, 9.0));
    const Problem& p2 = boundary_takeoff();
    compare("s2.F(0,1)", minimize_initial_potential(p2.initial, 0.0, 1.0, p2.tol).value);
    compare("s2.G(0,1)", minimize_boundary_potential(p2.boundary, 0.0, 1.0, p2.tol).value);
    compare("s2.P0(10)", p2.initial.cumulants(10.0).P);
}

TEST_CASE("closed-form values of the built-in scenarios") {
    const Problem& p = raref_delta();
    for (double t : {0.25, 0.5, 0.9}) {
        const ShockPoint s = single_shock(p, t, 0.0, 4.0);
        CHECK(s.x == doctest::Approx(2.0).epsilon(1e-8));
        CHECK(s.mass == doctest::Approx(4.0 * t).epsilon(1e-8));
        CHECK(std::fabs(s.u_shock) <= 1e-8);
    }
    const InterfaceInterval iv = locate_interface_interval(p, 0.5);
    CHECK(iv.l == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(iv.r == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(wall_switch_time(p, 4.0, 6.0) == doctest::Approx(16.0 / 3.0).epsilon(1e-6));
    // boundary-takeoff: the wall lets go when F(0,t) = G(0,t)
    CHECK(wall_switch_time(boundary_takeoff(), 6.0, 9.0) == doctest::Approx(4.0 + 2.0 * std::sqrt(3.0)).epsilon(1e-3));
    const ShockPoint s3 = single_shock(two_deltas(), 2.0, 0.9, 1.3);
    // merged atom of mass 4t−1 and momentum 3−4x
    CHECK(s3.x == doctest::Approx(15.0 / 14.0).epsilon(1e-6));
    CHECK(s3.mass == doctest::Approx(7.0).epsilon(1e-6));
}
