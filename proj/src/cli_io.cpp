#include "pgd/cli_io.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "pgd/characteristics.hpp"
#include "pgd/diagnostics.hpp"
#include "pgd/error.hpp"
#include "pgd/oracle.hpp"

namespace pgd {

using json = nlohmann::ordered_json;

Problem Scenario::problem() const {
    Problem p;
    try {
        p.initial = PiecewiseProfile::build(ProfileKind::initial, initial, eps_floor);
    } catch (const Error& e) {
        throw Error(e.code(), "initial: " + e.detail());
    }
    try {
        p.boundary = PiecewiseProfile::build(ProfileKind::boundary, boundary, eps_floor);
    } catch (const Error& e) {
        throw Error(e.code(), "boundary: " + e.detail());
    }
    p.tol.eq_rel = tol_eq;
    return p;
}

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& what) {
    throw Error(ErrorCode::schema_error, path + ": " + what);
}

double number_at(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) schema(path + "." + key, "missing");
    const json& v = obj.at(key);
    if (!v.is_number()) schema(path + "." + key, "expected a number");
    return v.get<double>();
}

std::vector<Segment> segments_at(const json& root, const std::string& key) {
    if (!root.contains(key)) schema(key, "missing");
    const json& arr = root.at(key);
    if (!arr.is_array() || arr.empty()) schema(key, "expected a nonempty array of segments");
    std::vector<Segment> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string path = fmt::format("{}[{}]", key, i);
        const json& s = arr[i];
        if (!s.is_object()) schema(path, "expected an object");
        Segment seg;
        // null end marks the unbounded last segment
        if (!s.contains("end") || s.at("end").is_null()) seg.end = kInfinity;
        else if (s.at("end").is_number()) seg.end = s.at("end").get<double>();
        else schema(path + ".end", "expected a number or null");
        seg.density = number_at(s, "rho", path);
        seg.velocity = number_at(s, "u", path);
        out.push_back(seg);
    }
    return out;
}

double positive(double v, const std::string& path) {
    if (!(v > 0.0) || !std::isfinite(v)) schema(path, "must be positive");
    return v;
}

}  // namespace

Scenario parse_scenario_text(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::schema_error, origin + ": " + e.what());
    }
    if (!root.is_object()) schema("$", "expected an object");
    Scenario sc;
    sc.name = root.value("name", std::string{});
    sc.initial = segments_at(root, "initial");
    sc.boundary = segments_at(root, "boundary");
    if (root.contains("eps_floor")) sc.eps_floor = positive(number_at(root, "eps_floor", "$"), "eps_floor");
    if (root.contains("tol_eq")) sc.tol_eq = positive(number_at(root, "tol_eq", "$"), "tol_eq");
    if (root.contains("quad_rel_tol"))
        sc.quad_rel_tol = positive(number_at(root, "quad_rel_tol", "$"), "quad_rel_tol");
    if (root.contains("grid")) {
        const json& g = root.at("grid");
        if (!g.is_object()) schema("grid", "expected an object");
        if (g.contains("x_lo")) sc.x_lo = number_at(g, "x_lo", "grid");
        if (g.contains("x_hi")) sc.x_hi = number_at(g, "x_hi", "grid");
        if (g.contains("x_count")) {
            const json& n = g.at("x_count");
            if (!n.is_number_integer() || n.get<long long>() < 1) schema("grid.x_count", "expected a positive integer");
            sc.x_count = n.get<std::size_t>();
        }
        if (!(sc.x_lo >= 0.0 && sc.x_hi >= sc.x_lo)) schema("grid", "need 0 ≤ x_lo ≤ x_hi");
        if (g.contains("t")) {
            const json& t = g.at("t");
            if (!t.is_array() || t.empty()) schema("grid.t", "expected a nonempty array");
            sc.t_list.clear();
            for (std::size_t i = 0; i < t.size(); ++i) {
                if (!t[i].is_number()) schema(fmt::format("grid.t[{}]", i), "expected a number");
                sc.t_list.push_back(positive(t[i].get<double>(), fmt::format("grid.t[{}]", i)));
            }
        }
    }
    if (root.contains("outputs")) {
        const json& o = root.at("outputs");
        if (!o.is_array()) schema("outputs", "expected an array of names");
        for (std::size_t i = 0; i < o.size(); ++i) {
            if (!o[i].is_string()) schema(fmt::format("outputs[{}]", i), "expected a string");
            sc.outputs.push_back(o[i].get<std::string>());
        }
    }
    sc.problem();  // surfaces data errors (NegativeDensity etc.) with the segment index
    return sc;
}

Scenario parse_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot read " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    Scenario sc = parse_scenario_text(buf.str(), path.string());
    if (sc.name.empty()) sc.name = path.stem().string();
    return sc;
}

std::vector<Scenario> builtin_scenarios() {
    std::vector<Scenario> out;
    Scenario a;
    a.name = "raref-delta";
    a.initial = {{2.0, 1.0, 2.0}, {kInfinity, 1.0, -2.0}};
    a.boundary = {{kInfinity, 1.0, 1.0}};
    a.t_list = {0.25, 0.5, 0.9, 2.0, 4.0, 6.0};
    out.push_back(a);

    Scenario b;
    b.name = "boundary-takeoff";
    b.initial = {{2.0, 1.0, -2.0}, {kInfinity, 0.0, 0.0}};  // vacuum beyond 2 is floored to eps
    b.boundary = {{kInfinity, 1.0, 1.0}};
    b.eps_floor = 1e-4;
    b.t_list = {1.0, 4.0, 7.0, 8.0, 10.0};
    out.push_back(b);

    Scenario c;
    c.name = "two-deltas";
    c.initial = {{2.0, 1.0, 1.0}, {kInfinity, 1.0, -2.0}};
    c.boundary = {{1.0, 1.0, 1.0}, {kInfinity, 1.0, 2.0}};
    c.t_list = {1.2, 1.5, 2.0, 4.0, 6.0};
    out.push_back(c);
    return out;
}

Scenario resolve_scenario(const std::string& name_or_path) {
    for (Scenario& s : builtin_scenarios())
        if (s.name == name_or_path) return s;
    if (std::filesystem::exists(name_or_path)) return parse_scenario(name_or_path);
    throw Error(ErrorCode::usage, "unknown scenario '" + name_or_path + "'");
}

namespace {

double to_number(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::usage, what + ": not a number '" + s + "'");
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) parts.push_back(cur);
    return parts;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    if (n == 1) return {a};
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = i + 1 == n ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

}  // namespace

void parse_x_range(const std::string& text, double& lo, double& hi, std::size_t& n) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw Error(ErrorCode::usage, "--x expects a:b:n");
    lo = to_number(parts[0], "--x");
    hi = to_number(parts[1], "--x");
    const double count = to_number(parts[2], "--x");
    if (!(lo >= 0.0 && hi >= lo && count >= 1.0 && count == std::floor(count)))
        throw Error(ErrorCode::usage, "--x needs 0 ≤ a ≤ b and integer n ≥ 1");
    n = static_cast<std::size_t>(count);
}

std::vector<double> parse_time_list(const std::string& text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        const auto parts = split(text, ':');
        if (parts.size() != 3) throw Error(ErrorCode::usage, "--t range expects a:b:n");
        const double count = to_number(parts[2], "--t");
        if (!(count >= 1.0 && count == std::floor(count))) throw Error(ErrorCode::usage, "--t needs integer n ≥ 1");
        out = linspace(to_number(parts[0], "--t"), to_number(parts[1], "--t"), static_cast<std::size_t>(count));
    } else {
        for (const std::string& p : split(text, ',')) out.push_back(to_number(p, "--t"));
    }
    if (out.empty()) throw Error(ErrorCode::usage, "--t is empty");
    for (double t : out)
        if (!(t > 0.0)) throw Error(ErrorCode::usage, "--t values must be positive");
    return out;
}

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::ofstream open_out(const std::filesystem::path& dir, const std::string& file) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::ofstream f(dir / file, std::ios::binary);
    if (!f) throw Error(ErrorCode::io_error, "cannot write " + (dir / file).string());
    return f;
}

void cmd_solve(const Scenario& sc, const Problem& p, const RunFlags& flags, std::ostream& out) {
    const std::vector<double> xs = linspace(sc.x_lo, sc.x_hi, sc.x_count);
    std::ofstream field = open_out(flags.out, "field.csv");
    std::ofstream atoms = open_out(flags.out, "atoms.csv");
    field << "x,t,regime,u,m,q,E,rho_ac\n";
    atoms << "t,x,mass,u,kind\n";
    std::size_t n_atoms = 0;
    for (double t : sc.t_list) {
        const DensityProfile dens = density_profile(p, t, xs);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const SolutionSample s = sample_solution(p, xs[i], t);
            field << fmt::format("{},{},{},{},{},{},{},{}\n", num(s.x), num(t), regime_name(s.regime.tag), num(s.u),
                                 num(s.m), num(s.q), num(s.E), num(dens.ac_samples[i].second));
        }
        for (const AtomRecord& a : dens.atoms) {
            atoms << fmt::format("{},{},{},{},{}\n", num(t), num(a.x_atom), num(a.mass), num(a.u_atom),
                                 atom_location_name(a.location_kind));
            ++n_atoms;
        }
    }
    out << fmt::format("wrote {} field rows and {} atom rows to {}\n", xs.size() * sc.t_list.size(), n_atoms,
                       flags.out.string());
}

std::vector<ShockPoint> interior_seeds(const Problem& p, double t, const Scenario& sc) {
    std::vector<ShockPoint> seeds;
    for (const ShockPoint& s : locate_shocks(p, t, sc.x_lo, sc.x_hi))
        if (s.location == AtomLocation::interior) seeds.push_back(s);
    return seeds;
}

void cmd_trace(const Scenario& sc, const Problem& p, const RunFlags& flags, std::ostream& out) {
    const double t0 = sc.t_list.front(), t1 = sc.t_list.back();
    const ShockNetwork net = trace_shock_paths(p, interior_seeds(p, t0, sc), t1, flags.dt);
    std::ofstream track = open_out(flags.out, "track.csv");
    track << "t,x,mass,u_shock,source\n";
    for (const ShockPath& path : net.paths)
        for (const ShockPoint& s : path.samples)
            track << fmt::format("{},{},{},{},{}\n", num(s.t), num(s.x), num(s.mass), num(s.u_shock),
                                 atom_source_name(s.source));
    std::ofstream merges = open_out(flags.out, "merges.csv");
    merges << "t,x,survivor,absorbed\n";
    for (const MergeEvent& m : net.merges)
        merges << fmt::format("{},{},{},{}\n", num(m.t), num(m.x), m.survivor, m.absorbed);
    // forward characteristics from evenly spaced labels
    std::ofstream chars = open_out(flags.out, "characteristics.csv");
    chars << "family,label,t,x\n";
    const std::vector<double> labels = linspace(sc.x_lo, sc.x_hi, 9);
    for (double t : sc.t_list) {
        for (double eta : labels) chars << fmt::format("initial,{},{},{}\n", num(eta), num(t), num(forward_characteristic_X(p, eta, t)));
        for (double k : linspace(0.0, 1.0, 9)) {
            const double xi = k * t;
            if (xi >= t) continue;
            chars << fmt::format("boundary,{},{},{}\n", num(xi), num(t), num(forward_characteristic_Y(p, xi, t)));
        }
    }
    out << fmt::format("traced {} paths with {} merges from t={} to t={}\n", net.paths.size(), net.merges.size(),
                       num(t0), num(t1));
}

void cmd_shocks(const Scenario& sc, const Problem& p, const RunFlags& flags, std::ostream& out) {
    std::ofstream f = open_out(flags.out, "shocks.csv");
    f << "t,x,mass,u_left,u_right,u_shock,source,location\n";
    std::size_t n = 0;
    for (double t : sc.t_list) {
        for (const ShockPoint& s : locate_shocks(p, t, sc.x_lo, sc.x_hi)) {
            f << fmt::format("{},{},{},{},{},{},{},{}\n", num(s.t), num(s.x), num(s.mass), num(s.u_left),
                             num(s.u_right), num(s.u_shock), atom_source_name(s.source),
                             atom_location_name(s.location));
            ++n;
        }
    }
    out << fmt::format("found {} shocks\n", n);
}

json check(const std::string& name, json inputs, double residual, double tolerance, bool pass) {
    json c;
    c["name"] = name;
    c["inputs"] = std::move(inputs);
    c["residual"] = residual;
    c["tolerance"] = tolerance;
    c["pass"] = pass;
    return c;
}

void cmd_validate(const Scenario& sc, const Problem& p, const RunFlags& flags, std::ostream& out) {
    json report;
    report["scenario"] = sc.name;
    json checks = json::array();
    const bool compact = effectively_compact(p, sc.x_hi);
    for (double t : sc.t_list) {
        if (compact) {
            const BalanceReport mb = mass_balance(p, t, sc.x_hi);
            const double mtol = 1e-6 + 3.0 * sc.eps_floor * sc.x_hi;
            checks.push_back(check("mass_balance", {{"t", t}, {"x_max", sc.x_hi}}, mb.residual, mtol,
                                   std::fabs(mb.residual) <= mtol));
            const BalanceReport qb = momentum_balance(p, t, sc.x_hi);
            const bool ok = qb.relation == Relation::equality ? std::fabs(qb.residual) <= 1e-6 : qb.residual >= -1e-6;
            checks.push_back(check(std::string("momentum_balance_") + relation_name(qb.relation),
                                   {{"t", t}, {"x_max", sc.x_hi}}, qb.residual, 1e-6, ok));
        }
        const EntropyReport er = entropy_report(p, t, sc.x_lo, sc.x_hi, 64);
        checks.push_back(check("entropy", {{"t", t}, {"checked", er.checked}},
                               static_cast<double>(er.violations.size()), 0.0, er.violations.empty()));
        const double x1 = sc.x_lo, x2 = sc.x_hi;
        const double lhs = integrate_mass_in_x(p, t, x1, x2);
        const double rhs = mu(p, x1, t) - mu(p, x2, t);
        const double tol = sc.quad_rel_tol * (1.0 + std::fabs(rhs));
        checks.push_back(check("mu_identity_x", {{"t", t}, {"x1", x1}, {"x2", x2}}, lhs - rhs, tol,
                               std::fabs(lhs - rhs) <= tol));
    }
    const double t0 = sc.t_list.front(), t1 = sc.t_list.back();
    if (t1 > t0) {
        const double xm = 0.5 * (sc.x_lo + sc.x_hi);
        const double lhs = integrate_momentum_in_t(p, xm, t0, t1);
        const double rhs = mu(p, xm, t1) - mu(p, xm, t0);
        const double tol = sc.quad_rel_tol * (1.0 + std::fabs(rhs));
        checks.push_back(check("mu_identity_t", {{"x", xm}, {"t1", t0}, {"t2", t1}}, lhs - rhs, tol,
                               std::fabs(lhs - rhs) <= tol));
        const double span = sc.x_hi - sc.x_lo;
        const BumpSpec bump{std::max(sc.x_lo + 0.1 * span, 1e-3), sc.x_hi - 0.1 * span, t0, t1};
        if (bump.x1 > bump.x0) {
            const WeakResidual wr = weak_residual(p, bump, 128);
            const double r = std::max(std::fabs(wr.r1), std::fabs(wr.r2));
            checks.push_back(check("weak_residual",
                                   {{"x0", bump.x0}, {"x1", bump.x1}, {"t0", bump.t0}, {"t1", bump.t1}, {"quad_n", 128}},
                                   r, 1e-4, r <= 1e-4));
        }
    }
    {
        SimulationOptions opt;
        opt.n_particles = 4000;
        opt.t_end = t1;
        opt.x_extent = sc.x_hi;
        opt.snapshot_times = {t1};
        const Trajectory traj = sticky_particle_simulate(p, opt);
        std::vector<double> grid;
        for (double x = sc.x_lo + 0.005; x < sc.x_hi; x += 0.01) grid.push_back(x);
        const double d = compare_mass_potential(p, traj, t1, grid);
        checks.push_back(check("sticky_particles", {{"t", t1}, {"n_particles", opt.n_particles}}, d, 1e-2, d <= 1e-2));
        std::ofstream tf = open_out(flags.out, "trajectory.csv");
        write_trajectory_csv(tf, traj);
    }
    const ShockNetwork net = trace_shock_paths(p, interior_seeds(p, t0, sc), t1, flags.dt);
    json merges = json::array();
    for (const MergeEvent& m : net.merges) merges.push_back({{"t", m.t}, {"x", m.x}});
    json absorbed = json::array();
    for (const ShockPath& path : net.paths)
        if (path.absorbed_at) absorbed.push_back(*path.absorbed_at);
    bool all = true;
    for (const json& c : checks) all = all && c["pass"].get<bool>();
    report["checks"] = std::move(checks);
    report["merges"] = std::move(merges);
    report["absorptions"] = std::move(absorbed);
    report["pass"] = all;
    std::ofstream f = open_out(flags.out, "report.json");
    f << report.dump(2) << "\n";
    out << fmt::format("validate {}: {}\n", sc.name, all ? "pass" : "FAIL");
}

}  // namespace

int run(const std::string& command, const RunFlags& flags, std::ostream& out, std::ostream& err) {
    try {
        if (command == "scenario-list") {
            for (const Scenario& s : builtin_scenarios()) out << s.name << "\n";
            return 0;
        }
        static const std::vector<std::string> known{"solve", "trace", "shocks", "validate"};
        if (std::find(known.begin(), known.end(), command) == known.end())
            throw Error(ErrorCode::usage, "unknown command '" + command + "'");
        if (flags.scenario.empty()) throw Error(ErrorCode::usage, "--scenario is required");
        Scenario sc = resolve_scenario(flags.scenario);
        if (flags.t) sc.t_list = parse_time_list(*flags.t);
        if (flags.x) parse_x_range(*flags.x, sc.x_lo, sc.x_hi, sc.x_count);
        if (flags.tol_eq) {
            if (!(*flags.tol_eq > 0.0)) throw Error(ErrorCode::usage, "--tol-eq must be positive");
            sc.tol_eq = *flags.tol_eq;
        }
        if (flags.eps_floor) {
            if (!(*flags.eps_floor > 0.0)) throw Error(ErrorCode::usage, "--eps-floor must be positive");
            sc.eps_floor = *flags.eps_floor;
        }
        if (!(flags.dt > 0.0)) throw Error(ErrorCode::usage, "--dt must be positive");
        std::sort(sc.t_list.begin(), sc.t_list.end());
        const Problem p = sc.problem();
        if (command == "solve") cmd_solve(sc, p, flags, out);
        else if (command == "trace") cmd_trace(sc, p, flags, out);
        else if (command == "shocks") cmd_shocks(sc, p, flags, out);
        else cmd_validate(sc, p, flags, out);
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_status(e.code());
    }
}

}  // namespace pgd
