#pragma once

#include <string>

#include "pgd/cli_io.hpp"
#include "pgd/error.hpp"

namespace pgd::testing {

inline Problem builtin(const std::string& name) { return resolve_scenario(name).problem(); }

inline const Problem& raref_delta() {
    static const Problem p = builtin("raref-delta");
    return p;
}
inline const Problem& boundary_takeoff() {
    static const Problem p = builtin("boundary-takeoff");
    return p;
}
inline const Problem& two_deltas() {
    static const Problem p = builtin("two-deltas");
    return p;
}

inline Problem constant_state(double rho, double u, double rho_b, double u_b) {
    const Segment ini[] = {{kInfinity, rho, u}};
    const Segment bd[] = {{kInfinity, rho_b, u_b}};
    return {PiecewiseProfile::build(ProfileKind::initial, ini), PiecewiseProfile::build(ProfileKind::boundary, bd)};
}

}  // namespace pgd::testing
