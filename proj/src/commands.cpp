#include "nbflow/commands.hpp"

#include <cmath>
#include <fstream>
#include <future>
#include <sstream>

#include "nbflow/dynamics.hpp"
#include "nbflow/errors.hpp"
#include "nbflow/graf.hpp"
#include "nbflow/metric.hpp"
#include "nbflow/potential.hpp"
#include "nbflow/scenario.hpp"

namespace nbflow {

namespace {

TableFormat pick_format(const Scenario& sc, const GlobalOpts& g) {
    if (g.format) return *g.format;
    return sc.format == Scenario::Format::Csv ? TableFormat::Csv : TableFormat::Jsonl;
}

std::string pick_out(const Scenario& sc, const GlobalOpts& g) {
    return g.out ? *g.out : sc.out_path;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file " + path);
    return out;
}

void apply_tolerance_overrides(IntegratorControls& c, const GlobalOpts& g) {
    if (g.tol_rel) c.rel_tol = *g.tol_rel;
    if (g.tol_abs) c.abs_tol = *g.tol_abs;
}

std::vector<std::string> array_columns(const std::string& prefix, int n, int d) {
    std::vector<std::string> cols;
    for (int i = 1; i <= n; ++i)
        for (int k = 1; k <= d; ++k)
            cols.push_back(prefix + "_" + std::to_string(i) + "_" + std::to_string(k));
    return cols;
}

void append_array(std::vector<double>& row, const Matrix& m) {
    for (int i = 0; i < m.rows(); ++i)
        for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
}

// Partition whose only nontrivial block is the currently closest pair.
Partition closest_pair_partition(const Matrix& q) {
    const int n = static_cast<int>(q.rows());
    int bi = 0, bj = 1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double r = (q.row(i) - q.row(j)).norm();
            if (r < best) {
                best = r;
                bi = i;
                bj = j;
            }
        }
    std::vector<std::vector<int>> blocks;
    blocks.push_back({bi, bj});
    for (int e = 0; e < n; ++e)
        if (e != bi && e != bj) blocks.push_back({e});
    return Partition(n, std::move(blocks));
}

MassSystem build_system(const GrafSystemArgs& a) {
    const int n = static_cast<int>(a.masses.size());
    return MassSystem(a.dim, a.masses, Matrix::Constant(n, n, a.coupling), a.alpha);
}

Matrix reshape(const MassSystem& sys, const std::vector<double>& vals, const char* what) {
    if (static_cast<int>(vals.size()) != sys.size() * sys.dim())
        throw DomainError(std::string(what) + ": expected " +
                          std::to_string(sys.size() * sys.dim()) + " reals, got " +
                          std::to_string(vals.size()));
    Matrix m(sys.size(), sys.dim());
    for (int i = 0; i < sys.size(); ++i)
        for (int k = 0; k < sys.dim(); ++k)
            m(i, k) = vals[static_cast<std::size_t>(i) * sys.dim() + k];
    return m;
}

}  // namespace

int cmd_simulate(const std::string& scenario_path, const GlobalOpts& g, std::ostream& log) {
    Scenario sc = parse_scenario_file(scenario_path);
    if (sc.kind != Scenario::InitialKind::Physical && sc.kind != Scenario::InitialKind::Rescaled)
        throw DomainError(scenario_path +
                          ": simulate needs [initial.physical] or [initial.rescaled]; use the "
                          "boundary command for chart scenarios");
    apply_tolerance_overrides(sc.controls, g);
    const MassSystem& sys = sc.system;

    RescaledState initial = [&] {
        if (sc.kind == Scenario::InitialKind::Physical)
            return to_rescaled(sys, PhysicalState{Configuration(sys, sc.q), sc.v_or_w}, sc.energy);
        Matrix w = sc.v_or_w;
        double nw = mass_norm(sys, w);
        if (std::abs(nw - 1.0) > 1e-9)
            throw DomainError(scenario_path + ": rescaled w has mass norm " + std::to_string(nw));
        if (sc.energy + potential(sys, sc.q) < 0.0)
            throw DomainError(scenario_path + ": initial configuration outside the Hill region");
        return RescaledState{Configuration(sys, sc.q), w / nw, sc.energy};
    }();

    Trajectory traj = integrate(sys, initial, sc.tau0, sc.tau1, sc.controls);

    const int n = sys.size(), d = sys.dim();
    std::vector<std::string> cols{"tau", "t"};
    for (auto& c : array_columns("q", n, d)) cols.push_back(c);
    for (auto& c : array_columns("w", n, d)) cols.push_back(c);
    cols.push_back("U");
    cols.push_back("rho");
    cols.push_back("wE_norm");

    std::string path = pick_out(sc, g);
    std::ofstream file = open_out(path);
    TableWriter writer(file, pick_format(sc, g), cols);
    for (const auto& s : traj.samples) {
        const Matrix& q = s.state.q.coords();
        Partition watch = sc.watch ? *sc.watch : closest_pair_partition(q);
        std::vector<double> row{s.tau, s.t};
        append_array(row, q);
        append_array(row, s.state.w);
        row.push_back(potential(sys, q));
        row.push_back(rho(sys, q));
        row.push_back(mass_norm(sys, project_external(sys, watch, s.state.w)));
        writer.row(row);
    }

    const auto& last = traj.samples.back();
    log << "simulate " << scenario_path << ": " << to_string(traj.reason) << " at tau="
        << format_real(last.tau) << " t=" << format_real(last.t) << "\n"
        << "  samples=" << traj.samples.size() << " accepted=" << traj.stats.accepted
        << " rejected=" << traj.stats.rejected << "\n"
        << "  max |w-norm - 1| before renormalization: " << format_real(traj.stats.max_w_drift)
        << "\n"
        << "  final rho=" << format_real(rho(sys, last.state.q.coords())) << "  wrote " << path
        << "\n";
    return 0;
}

int cmd_boundary_torus(const TorusArgs& a, const GlobalOpts& g, std::ostream& log) {
    TwoBodyTorusState s0{a.torus, a.theta0, a.theta0 + a.branch * M_PI / 2.0, a.energy, a.alpha};
    ode::StepControls sc;
    if (g.tol_rel) sc.rel_tol = *g.tol_rel;
    if (g.tol_abs) sc.abs_tol = *g.tol_abs;
    auto samples = integrate_torus(s0, a.tau0, a.tau1, a.samples, sc);

    const bool closed_defined = a.torus != TorusKind::Infinity || a.energy > 0.0;
    auto closed = [&](double tau) -> AnglePair {
        switch (a.torus) {
            case TorusKind::Collision:
                return twobody_collision_closed_form(a.theta0, a.branch, a.alpha, tau);
            case TorusKind::Infinity:
                if (a.energy == 0.0) return AnglePair{s0.theta, s0.w_theta};  // all rest
                return twobody_infinity_closed_form(a.theta0, a.branch, a.energy, tau);
            case TorusKind::Hill:
                return twobody_hill_closed_form(a.theta0, a.branch, a.energy, a.alpha, tau);
        }
        throw DomainError("unknown torus kind");
    };

    std::string path = g.out.value_or("torus.csv");
    std::ofstream file = open_out(path);
    TableWriter writer(file, g.format.value_or(TableFormat::Csv),
                       {"tau", "theta", "w_theta", "psi", "theta_closed", "w_theta_closed",
                        "theta_err", "w_theta_err"});
    double max_err = 0.0;
    for (const auto& s : samples) {
        AnglePair cf = closed(s.tau);
        double e1 = s.theta - cf.theta, e2 = s.w_theta - cf.w_theta;
        max_err = std::max({max_err, std::abs(e1), std::abs(e2)});
        writer.row({s.tau, s.theta, s.w_theta, s.w_theta - s.theta, cf.theta, cf.w_theta, e1, e2});
    }

    log << "boundary twobody-torus: wrote " << path << "\n";
    for (const auto& rc : classify_rest_points(a.torus, a.energy, a.alpha)) {
        if (rc.stability == Stability::AllRest) {
            log << "  whole torus consists of rest points (E = 0 at infinity)\n";
        } else {
            log << "  rest circle psi=" << (rc.psi == 0.0 ? "0" : "pi") << ": "
                << to_string(rc.stability) << " (eigenvalue " << format_real(rc.eigenvalue)
                << ")\n";
        }
    }
    if (a.torus == TorusKind::Collision) {
        int m = 0;
        bool reg = collision_regularizable(a.alpha, 1e-9, &m);
        log << "  collision regularizable: " << (reg ? "yes (m=" + std::to_string(m) + ")" : "no")
            << "\n";
    }
    if (closed_defined)
        log << "  max |numeric - closed form| = " << format_real(max_err) << "\n";
    return 0;
}

int cmd_boundary_chart(const std::string& scenario_path, const GlobalOpts& g, std::ostream& log) {
    Scenario sc = parse_scenario_file(scenario_path);
    const MassSystem& sys = sc.system;
    const int n = sys.size(), d = sys.dim();
    ode::StepControls step;
    step.rel_tol = g.tol_rel.value_or(sc.controls.rel_tol);
    step.abs_tol = g.tol_abs.value_or(sc.controls.abs_tol);

    std::string path = pick_out(sc, g);
    std::ofstream file = open_out(path);
    TableFormat fmt = pick_format(sc, g);

    if (sc.kind == Scenario::InitialKind::Collision) {
        CollisionChartState chart = make_collision_chart(sys, *sc.chart_partition, sc.q_ext,
                                                         sc.Q_int, sc.v_int, sc.X_int, sc.w_ext);
        auto samples =
            integrate_collision_chart(sys, chart, sc.tau0, sc.tau1, sc.boundary_samples, step);
        std::vector<std::string> cols{"tau", "v_int", "W", "closure_residual"};
        for (auto& c : array_columns("Q", n, d)) cols.push_back(c);
        for (auto& c : array_columns("X", n, d)) cols.push_back(c);
        for (auto& c : array_columns("wE", n, d)) cols.push_back(c);
        TableWriter writer(file, fmt, cols);
        bool v_increasing = true;
        double prev_v = samples.front().state.v_int;
        for (const auto& s : samples) {
            double w_val = internal_potential(sys, s.state.part, s.state.Q_int);
            double closure = mass_inner(sys, s.state.w_ext, s.state.w_ext) +
                             mass_inner(sys, s.state.X_int, s.state.X_int) +
                             s.state.v_int * s.state.v_int / w_val;
            std::vector<double> row{s.tau, s.state.v_int, w_val, closure - 1.0};
            append_array(row, s.state.Q_int);
            append_array(row, s.state.X_int);
            append_array(row, s.state.w_ext);
            writer.row(row);
            if (s.state.v_int < prev_v - 1e-12) v_increasing = false;
            prev_v = s.state.v_int;
        }
        log << "boundary collision chart (" << chart.part.str() << "): wrote " << path << "\n"
            << "  v_int " << (v_increasing ? "non-decreasing" : "not monotone") << " over ["
            << format_real(sc.tau0) << ", " << format_real(sc.tau1) << "]\n";
    } else if (sc.kind == Scenario::InitialKind::Infinity) {
        InfinityChartState chart{sc.z, sc.inf_Q, sc.inf_w};
        double nq = mass_norm(sys, chart.Q), nw = mass_norm(sys, chart.w);
        if (std::abs(nq - 1.0) > 1e-9 || std::abs(nw - 1.0) > 1e-9)
            throw DomainError(scenario_path + ": infinity chart Q and w must be unit arrays");
        auto samples = integrate_infinity_chart(sys, chart, sc.energy, sc.tau0, sc.tau1,
                                                sc.boundary_samples, step);
        std::vector<std::string> cols{"tau", "z"};
        for (auto& c : array_columns("Q", n, d)) cols.push_back(c);
        for (auto& c : array_columns("w", n, d)) cols.push_back(c);
        TableWriter writer(file, fmt, cols);
        for (const auto& s : samples) {
            std::vector<double> row{s.tau, s.state.z};
            append_array(row, s.state.Q);
            append_array(row, s.state.w);
            writer.row(row);
        }
        log << "boundary infinity chart: wrote " << path << "\n";
        if (sc.energy == 0.0 && sc.z == 0.0)
            log << "  E = 0 at infinity: the whole boundary consists of rest points\n";
    } else if (sc.kind == Scenario::InitialKind::Hill) {
        Matrix q0 = Configuration(sys, sc.q).coords();
        Matrix w0 = sc.v_or_w;
        w0 /= mass_norm(sys, w0);
        auto samples =
            integrate_hill_fiber(sys, q0, w0, sc.energy, sc.tau0, sc.tau1, sc.boundary_samples,
                                 step);
        auto [w_plus, w_minus] = hill_rest_directions(sys, q0);
        std::vector<std::string> cols{"tau", "angle_to_plus_grad"};
        for (auto& c : array_columns("w", n, d)) cols.push_back(c);
        TableWriter writer(file, fmt, cols);
        for (const auto& s : samples) {
            double c = std::clamp(mass_inner(sys, s.w, w_plus), -1.0, 1.0);
            std::vector<double> row{s.tau, std::acos(c)};
            append_array(row, s.w);
            writer.row(row);
        }
        double c_end = std::clamp(mass_inner(sys, samples.back().w, w_plus), -1.0, 1.0);
        log << "boundary hill fiber: wrote " << path << "\n"
            << "  final angle to +grad direction: " << format_real(std::acos(c_end)) << "\n";
    } else {
        throw DomainError(scenario_path +
                          ": boundary needs [initial.collision], [initial.infinity] or "
                          "[initial.hill]");
    }
    return 0;
}

int cmd_graf_value(const GrafSystemArgs& sys_args, double delta, const std::vector<double>& q_raw,
                   bool membership_only, const GlobalOpts& g, std::ostream& log) {
    MassSystem sys = build_system(sys_args);
    Matrix q = Configuration(sys, reshape(sys, q_raw, "graf q")).coords();
    GrafValue gv = graf_value(sys, delta, q);
    if (!membership_only)
        log << "J^(delta) = " << format_real(gv.value) << "\n";
    log << "atoms containing q (" << gv.argmax.size() << "):\n";
    for (const auto& p : gv.argmax) log << "  " << p.str() << "\n";
    if (g.out) {
        std::ofstream file = open_out(*g.out);
        file << "value," << format_real(gv.value) << "\n";
        for (const auto& p : gv.argmax) file << "atom," << p.str() << "\n";
    }
    return 0;
}

int cmd_graf_boundary_point(const GrafSystemArgs& sys_args, double delta,
                            const std::vector<double>& s_raw, const GlobalOpts& g,
                            std::ostream& log) {
    MassSystem sys = build_system(sys_args);
    Matrix s = Configuration(sys, reshape(sys, s_raw, "graf s")).coords();
    double nrm = mass_norm(sys, s);
    if (nrm <= eps_floor) throw DomainError("graf boundary-point: zero direction");
    s /= nrm;
    double lambda = free_atom_boundary_radius(sys, delta, s);
    Matrix point = lambda * s;
    log << "lambda = " << format_real(lambda) << "\n";
    log << "boundary point:";
    for (int i = 0; i < point.rows(); ++i)
        for (int k = 0; k < point.cols(); ++k) log << " " << format_real(point(i, k));
    log << "\n";
    auto members = atom_membership(sys, delta, point);
    log << "atoms at the point (" << members.size() << "):\n";
    for (const auto& p : members) log << "  " << p.str() << "\n";
    if (g.out) {
        std::ofstream file = open_out(*g.out);
        TableWriter writer(file, g.format.value_or(TableFormat::Csv),
                           [&] {
                               std::vector<std::string> cols{"lambda"};
                               for (auto& c : array_columns("p", sys.size(), sys.dim()))
                                   cols.push_back(c);
                               return cols;
                           }());
        std::vector<double> row{lambda};
        append_array(row, point);
        writer.row(row);
    }
    return 0;
}

int cmd_graf_count_components(const GrafSystemArgs& sys_args, double delta,
                              int samples_per_component, const GlobalOpts& g, std::ostream& log) {
    MassSystem sys = build_system(sys_args);
    int count = count_free_boundary_components_d1(sys, delta, samples_per_component, g.seed);
    log << "free-atom boundary components (d=1): " << count << "\n";
    if (g.out) {
        std::ofstream file = open_out(*g.out);
        file << "components," << count << "\n";
    }
    return 0;
}

int cmd_graf_nesting(const GrafSystemArgs& sys_args, double delta1, double delta2, int rays,
                     const GlobalOpts& g, std::ostream& log) {
    MassSystem sys = build_system(sys_args);
    bool ok = nesting_check(sys, delta1, delta2, rays, g.seed);
    log << "nesting " << format_real(delta1) << " < " << format_real(delta2) << " on " << rays
        << " rays: " << (ok ? "pass" : "FAIL") << "\n";
    return ok ? 0 : 4;
}

int cmd_batch(const std::vector<std::string>& scenario_paths, const GlobalOpts& g,
              std::ostream& log) {
    if (scenario_paths.empty()) throw DomainError("batch: no scenario files given");
    std::vector<std::future<std::pair<int, std::string>>> futures;
    for (const auto& path : scenario_paths) {
        futures.push_back(std::async(std::launch::async, [path, &g] {
            std::ostringstream local;
            int code = 0;
            try {
                // Each scenario carries its own output path; the global --out
                // override would make them clobber each other, so it is
                // ignored here.
                GlobalOpts opts = g;
                opts.out.reset();
                code = cmd_simulate(path, opts, local);
            } catch (const std::exception& e) {
                local << path << ": " << e.what() << "\n";
                code = exit_code_for(e);
            }
            return std::make_pair(code, local.str());
        }));
    }
    int worst = 0;
    for (auto& f : futures) {
        auto [code, text] = f.get();
        log << text;
        worst = std::max(worst, code);
    }
    return worst;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ParseError*>(&e)) return 2;
    if (dynamic_cast<const DomainError*>(&e)) return 3;
    return 4;
}

}  // namespace nbflow
